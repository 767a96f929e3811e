use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

pub const DEFAULT_EPS_TRUNC: f64 = 1e-16;
pub const DEFAULT_EPS_CHECK: f64 = 1e-12;

/// The global scalars shared by every module.
///
/// `p`, `s` and `kappa` are derived from `(q, k, m, n, l)` and never set freely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub q: C64,
    pub k: f64,
    pub p: C64,
    pub s: f64,
    pub m: u32,
    pub n: usize,
    pub l: usize,
    pub kappa: C64,
    pub eps_trunc: f64,
    pub eps_check: f64,
}

impl ParameterSet {
    pub fn new(q: f64, k: f64, m: u32, n: usize, l: usize) -> Result<Self> {
        Self::with_complex_q(C64::new(q, 0.0), k, m, n, l)
    }

    pub fn with_complex_q(q: C64, k: f64, m: u32, n: usize, l: usize) -> Result<Self> {
        if !(q.norm() < 1.0) || q.norm() == 0.0 {
            return Err(Error::InvalidParams(format!("need 0 < |q| < 1, got {q}")));
        }
        if !(k > -2.0) || !k.is_finite() {
            return Err(Error::InvalidParams(format!("need k > -2, got {k}")));
        }
        if n == 0 {
            return Err(Error::InvalidParams("n must be positive".into()));
        }
        if l > n {
            return Err(Error::InvalidParams(format!("need l <= n, got l={l}, n={n}")));
        }
        let p = q.powf(2.0 * (k + 2.0));
        if !(p.norm() < 1.0) {
            return Err(Error::InvalidParams(format!("|p| = {} is not below 1", p.norm())));
        }
        let s = 1.0 / (2.0 * (k + 2.0));
        let kexp = 2 * l as i32 - 2 - n as i32 - 2 * m as i32;
        Ok(Self {
            q,
            k,
            p,
            s,
            m,
            n,
            l,
            kappa: q.powi(kexp),
            eps_trunc: DEFAULT_EPS_TRUNC,
            eps_check: DEFAULT_EPS_CHECK,
        })
    }

    /// Same scalars with different (m, n, l).
    pub fn with_labels(&self, m: u32, n: usize, l: usize) -> Result<Self> {
        let mut out = Self::with_complex_q(self.q, self.k, m, n, l)?;
        out.eps_trunc = self.eps_trunc;
        out.eps_check = self.eps_check;
        Ok(out)
    }

    /// Real q in (0,1) and k > -1: p is real positive and every real power
    /// is single valued under p-shifts.
    pub fn is_default_regime(&self) -> bool {
        self.q.im == 0.0 && self.q.re > 0.0 && self.q.re < 1.0 && self.k > -1.0
    }

    /// Exponent e in kappa = q^e.
    pub fn kappa_exponent(&self) -> i32 {
        2 * self.l as i32 - 2 - self.n as i32 - 2 * self.m as i32
    }

    #[inline]
    pub fn qi(&self, e: i32) -> C64 {
        self.q.powi(e)
    }

    /// Principal q^x.
    #[inline]
    pub fn qf(&self, x: f64) -> C64 {
        self.q.powf(x)
    }
}

impl Default for ParameterSet {
    fn default() -> Self {
        Self::new(0.6, 1.0, 0, 1, 0).expect("default parameters are valid")
    }
}
