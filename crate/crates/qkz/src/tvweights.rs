//! The rational weight function w_(eps)(t,z) and the phase function Phi(t,z).

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::qseries::{qpoch_den, qpoch_eps};
use crate::spinchain::SpinConfig;
use crate::C64;

/// Denominators below this fraction of their local scale mark a non-generic point.
pub const GENERIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfig {
    pub z: Vec<C64>,
    pub t: Vec<C64>,
    #[serde(default)]
    pub u: Option<Vec<C64>>,
}

impl PointConfig {
    pub fn new(z: Vec<C64>, t: Vec<C64>) -> Self {
        Self { z, t, u: None }
    }

    pub fn with_u(mut self, u: Vec<C64>) -> Self {
        self.u = Some(u);
        self
    }

    /// Nonzero coordinates and pairwise distinct z.
    pub fn validate(&self) -> Result<()> {
        for (name, xs) in [("z", &self.z), ("t", &self.t)] {
            if let Some(i) = xs.iter().position(|x| x.norm() == 0.0) {
                return Err(Error::Degenerate { factor: format!("{name}[{i}]"), magnitude: 0.0 });
            }
        }
        for i in 0..self.z.len() {
            for j in i + 1..self.z.len() {
                diff(self.z[i], self.z[j], || format!("z[{i}] - z[{j}]"))?;
            }
        }
        Ok(())
    }
}

/// `a - b`, rejected when it is tiny compared with `max(|a|, |b|)`.
#[inline]
pub(crate) fn diff(a: C64, b: C64, what: impl FnOnce() -> String) -> Result<C64> {
    let d = a - b;
    let scale = a.norm().max(b.norm());
    if d.norm() <= GENERIC_TOL * scale || d.norm() == 0.0 {
        return Err(Error::Degenerate { factor: what(), magnitude: d.norm() });
    }
    Ok(d)
}

/// w_(eps)(t,z) for a configuration in the `Ones` convention.
pub fn weight_w(ps: &ParameterSet, cfg: &SpinConfig, pts: &PointConfig) -> Result<C64> {
    let l = cfg.support.len();
    if pts.t.len() != l {
        return Err(Error::InvalidParams(format!(
            "weight function needs {l} t-variables, got {}",
            pts.t.len()
        )));
    }
    if pts.z.len() != cfg.n {
        return Err(Error::InvalidParams(format!("need {} z-variables, got {}", cfg.n, pts.z.len())));
    }
    let qi = 1.0 / ps.q;
    let qi2 = qi * qi;
    let (t, z) = (&pts.t, &pts.z);

    let mut pre = C64::new(1.0, 0.0);
    for a in 0..l {
        for b in a + 1..l {
            pre *= (t[a] - t[b]) / diff(qi2 * t[a], t[b], || format!("q^-2 t{a} - t{b}"))?;
        }
    }

    let mut sum = C64::new(0.0, 0.0);
    for perm in (0..l).permutations(l) {
        let mut term = C64::new(1.0, 0.0);
        for (i, &ai) in perm.iter().enumerate() {
            let ta = t[ai];
            let ki = cfg.support[i];
            term *= ta / diff(ta, qi * z[ki], || format!("t{ai} - q^-1 z{ki}"))?;
            for (j, &zj) in z.iter().enumerate().take(ki) {
                term *= (qi * ta - zj) / diff(ta, qi * zj, || format!("t{ai} - q^-1 z{j}"))?;
            }
            for &aj in &perm[i + 1..] {
                term *= (qi2 * ta - t[aj]) / diff(ta, t[aj], || format!("t{ai} - t{aj}"))?;
            }
        }
        sum += term;
    }
    Ok(pre * sum)
}

/// Phi(t,z) = prod_{a,i} (q t_a/z_i;p)/(q^{-1} t_a/z_i;p) prod_{a<b} (q^{-2} t_a/t_b;p)/(q^2 t_a/t_b;p).
pub fn phase_phi(ps: &ParameterSet, pts: &PointConfig) -> Result<C64> {
    let (q, p, e) = (ps.q, ps.p, ps.eps_trunc);
    let (t, z) = (&pts.t, &pts.z);
    let mut acc = C64::new(1.0, 0.0);
    for a in 0..t.len() {
        for zi in z {
            let x = t[a] / zi;
            acc *= qpoch_eps(q * x, p, e)? / qpoch_den(x / q, p, e, "Phi")?;
        }
        for b in a + 1..t.len() {
            let x = t[a] / t[b];
            acc *= qpoch_eps(x / (q * q), p, e)? / qpoch_den(q * q * x, p, e, "Phi")?;
        }
    }
    Ok(acc)
}
