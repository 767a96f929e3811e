//! Fixed inputs shared by the benchmarks.

use num_complex::Complex64 as C64;

/// n points on the unit circle with phases 1.1 rad apart.
pub fn unit_points(n: usize) -> Vec<C64> {
    (0..n).map(|j| C64::from_polar(1.0, 0.4 + 1.1 * j as f64)).collect()
}

/// l points on the t-contour radius for q = 0.6, k = 1.
pub fn screening_points(l: usize) -> Vec<C64> {
    (0..l).map(|a| C64::from_polar(0.216, 0.9 + 2.0 * a as f64)).collect()
}
