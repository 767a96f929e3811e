#![allow(dead_code)]

use qkz::freefield::OpeKind;
use qkz::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn polar(r: f64, a: f64) -> C64 {
    C64::from_polar(r, a)
}

/// Random point in the annulus r_lo <= |x| <= r_hi.
pub fn annulus(rng: &mut ChaCha8Rng, r_lo: f64, r_hi: f64) -> C64 {
    let r = rng.random_range(r_lo..=r_hi);
    let a = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    polar(r, a)
}

/// Unit-modulus points with pairwise circular phase gap >= `gap`.
pub fn unit_points(rng: &mut ChaCha8Rng, n: usize, gap: f64) -> Vec<C64> {
    let tau = std::f64::consts::TAU;
    let mut phases: Vec<f64> = Vec::with_capacity(n);
    while phases.len() < n {
        let a: f64 = rng.random_range(0.0..tau);
        let ok = phases.iter().all(|&b| {
            let d = (a - b).rem_euclid(tau);
            d.min(tau - d) >= gap
        });
        if ok {
            phases.push(a);
        }
    }
    phases.into_iter().map(|a| polar(1.0, a)).collect()
}

/// Fixed phases used by the qKZ checks: 0.4, 2.1, 3.8, 5.5.
pub fn qkz_points(n: usize) -> Vec<C64> {
    (0..n).map(|j| polar(1.0, 0.4 + 1.7 * j as f64)).collect()
}

/// Difference relative to the larger magnitude; 0 when both vanish.
pub fn rel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// (x; p)_inf by a plain 2000-term loop.
fn poch(x: C64, p: C64) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut pj = C64::new(1.0, 0.0);
    for _ in 0..2000 {
        acc *= 1.0 - pj * x;
        pj *= p;
    }
    acc
}

/// xi(z) as a 200 x 200 double product.
fn xi_direct(p: f64, q: f64, z: C64) -> C64 {
    let q4 = q.powi(4);
    let mut acc = C64::new(1.0, 0.0);
    for i in 0..200 {
        for j in 0..200 {
            let b = p.powi(i + 1) * q4.powi(j) / z;
            acc *= (1.0 - b) * (1.0 - q4 * b) / ((1.0 - q * q * b) * (1.0 - q * q * b));
        }
    }
    acc
}

/// The OPE prefactors typed in again from the operator list, sharing no code with the library.
pub fn transcription(kind: OpeKind, q: f64, k: f64, x: C64, y: C64, s1: f64, s2: f64) -> C64 {
    let s = 1.0 / (2.0 * (k + 2.0));
    let p = C64::new(q.powf(2.0 * (k + 2.0)), 0.0);
    let qp = |e: f64| q.powf(e);
    match kind {
        OpeKind::ScreeningScreening => {
            let c = poch(qp(-2.0) * y / x, p) / poch(qp(2.0) * y / x, p);
            (qp(-2.0) * x).powf(4.0 * s) * qp(s1) * (x - qp(s2 - s1) * y) / (x - qp(-2.0) * y) * c
        }
        OpeKind::VertexScreening => (qp(k) * x).powf(-s) * poch(q * y / x, p) / poch(y / (q * x), p),
        OpeKind::CurrentScreening => {
            qp(-s1) * (x - qp(-s1 * (k + 1.0) - s2) * y) / (x - qp(-s1 * (k + 2.0)) * y)
        }
        OpeKind::VertexCurrent => (x - qp(s1 - 2.0 - k) * y) / (x - qp(-1.0 - k) * y),
        OpeKind::CurrentVertex => qp(s1) * (x - qp(k + 2.0 - s1) * y) / (x - qp(k + 3.0) * y),
        OpeKind::QCommutator => {
            (1.0 - q * q) * y * (x - qp(s1 - 2.0 - k) * y) / ((x - qp(-1.0 - k) * y) * (y - qp(k + 3.0) * x))
        }
        OpeKind::CurrentCurrent => qp(-s1) * (x - qp(s1 - s2) * y) / (x - qp(-2.0) * y),
        OpeKind::VertexVertex => (qp(k) * x).powf(s) * xi_direct(p.re, q, x / y),
    }
}
