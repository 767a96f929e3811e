//! q-Pochhammer symbols and the theta-type functions built from them.
//!
//! Every infinite product is truncated by the geometric tail bound
//! `|x|^N |z| / (1 - |x|) < eps_trunc`, so accuracy is uniform in the
//! parameters instead of depending on a fixed term count.

use crate::error::{Error, Result};
use crate::params::{ParameterSet, DEFAULT_EPS_TRUNC};
use crate::C64;

/// A denominator factor below this magnitude is treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

const MAX_TERMS: usize = 1 << 20;

/// Smallest N with `x_abs^N * z_abs / (1 - x_abs) < eps`.
pub fn truncation_len(z_abs: f64, x_abs: f64, eps: f64) -> usize {
    let mut bound = z_abs / (1.0 - x_abs);
    let mut n = 0;
    while bound >= eps && n < MAX_TERMS {
        bound *= x_abs;
        n += 1;
    }
    n
}

fn check_base(x: C64) -> Result<f64> {
    let a = x.norm();
    if a < 1.0 {
        Ok(a)
    } else {
        Err(Error::Divergent(a))
    }
}

/// `prod_{j < terms} (1 - x^j z)` together with the smallest factor magnitude.
fn product(z: C64, x: C64, terms: usize) -> (C64, f64) {
    let mut acc = C64::new(1.0, 0.0);
    let mut xj = C64::new(1.0, 0.0);
    let mut min_factor = f64::INFINITY;
    for _ in 0..terms {
        let f = 1.0 - xj * z;
        min_factor = min_factor.min(f.norm());
        acc *= f;
        xj *= x;
    }
    (acc, min_factor)
}

/// (z; x)_inf with the default truncation tolerance.
pub fn qpoch(z: C64, x: C64) -> Result<C64> {
    qpoch_eps(z, x, DEFAULT_EPS_TRUNC)
}

pub fn qpoch_eps(z: C64, x: C64, eps: f64) -> Result<C64> {
    let xa = check_base(x)?;
    Ok(product(z, x, truncation_len(z.norm(), xa, eps)).0)
}

/// Fixed-length product; used by oracles and the truncation-soundness check.
pub fn qpoch_fixed(z: C64, x: C64, terms: usize) -> C64 {
    product(z, x, terms).0
}

/// (z; x)_inf destined for a denominator: a vanishing factor is a pole.
pub(crate) fn qpoch_den(z: C64, x: C64, eps: f64, what: &'static str) -> Result<C64> {
    let xa = check_base(x)?;
    let (v, min_factor) = product(z, x, truncation_len(z.norm(), xa, eps));
    if min_factor < POLE_TOL {
        return Err(Error::Pole { what, at: z });
    }
    Ok(v)
}

/// (z; x1, x2)_inf = prod_{i,j} (1 - x1^i x2^j z), rectangular truncation.
pub fn qpoch2(z: C64, x1: C64, x2: C64) -> Result<C64> {
    qpoch2_eps(z, x1, x2, DEFAULT_EPS_TRUNC)
}

pub fn qpoch2_eps(z: C64, x1: C64, x2: C64, eps: f64) -> Result<C64> {
    Ok(qpoch2_parts(z, x1, x2, eps)?.0)
}

fn qpoch2_parts(z: C64, x1: C64, x2: C64, eps: f64) -> Result<(C64, f64)> {
    let a1 = check_base(x1)?;
    let a2 = check_base(x2)?;
    // the tail of each direction is bounded with the full sum over the other
    let za = z.norm() / (1.0 - a2);
    let n1 = truncation_len(za, a1, eps);
    let n2 = truncation_len(z.norm() / (1.0 - a1), a2, eps);
    let mut acc = C64::new(1.0, 0.0);
    let mut min_factor = f64::INFINITY;
    let mut xi = C64::new(1.0, 0.0);
    for _ in 0..n1 {
        let (v, mf) = product(xi * z, x2, n2);
        acc *= v;
        min_factor = min_factor.min(mf);
        xi *= x1;
    }
    Ok((acc, min_factor))
}

fn qpoch2_den(z: C64, x1: C64, x2: C64, eps: f64, what: &'static str) -> Result<C64> {
    let (v, mf) = qpoch2_parts(z, x1, x2, eps)?;
    if mf < POLE_TOL {
        return Err(Error::Pole { what, at: z });
    }
    Ok(v)
}

/// theta(z) = (z;p)(p/z;p)(p;p).
pub fn theta(ps: &ParameterSet, z: C64) -> Result<C64> {
    if z == C64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("theta"));
    }
    let e = ps.eps_trunc;
    Ok(qpoch_eps(z, ps.p, e)? * qpoch_eps(ps.p / z, ps.p, e)? * qpoch_eps(ps.p, ps.p, e)?)
}

/// theta(z) for use in a denominator; a zero is reported as a pole.
pub fn theta_den(ps: &ParameterSet, z: C64, what: &'static str) -> Result<C64> {
    if z == C64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument(what));
    }
    let e = ps.eps_trunc;
    Ok(qpoch_den(z, ps.p, e, what)?
        * qpoch_den(ps.p / z, ps.p, e, what)?
        * qpoch_eps(ps.p, ps.p, e)?)
}

/// xi(z) = (p/z; p,q^4)(pq^4/z; p,q^4) / (pq^2/z; p,q^4)^2.
///
/// The denominator is squared. This is the form for which
/// xi(pz)/xi(z) = (1/z;q^4)(q^4/z;q^4)/(q^2/z;q^4)^2, i.e. xi(pz) = q^{-1/2} rho(z) xi(z).
pub fn xi(ps: &ParameterSet, z: C64) -> Result<C64> {
    if z == C64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("xi"));
    }
    let (p, e) = (ps.p, ps.eps_trunc);
    let q2 = ps.q * ps.q;
    let q4 = q2 * q2;
    let w = p / z;
    let num = qpoch2_eps(w, p, q4, e)? * qpoch2_eps(w * q4, p, q4, e)?;
    let den = qpoch2_den(w * q2, p, q4, e, "xi")?;
    Ok(num / (den * den))
}

/// rho(z) = q^{1/2} (1/z;q^4)(q^4/z;q^4) / (q^2/z;q^4)^2.
pub fn rho(ps: &ParameterSet, z: C64) -> Result<C64> {
    if z == C64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument("rho"));
    }
    let e = ps.eps_trunc;
    let q2 = ps.q * ps.q;
    let q4 = q2 * q2;
    let w = 1.0 / z;
    let num = qpoch_eps(w, q4, e)? * qpoch_eps(q4 * w, q4, e)?;
    let den = qpoch_den(q2 * w, q4, e, "rho")?;
    Ok(ps.q.sqrt() * num / (den * den))
}

/// C(z) = (q^{-2}z;p)/(q^2 z;p).
pub fn cfun(ps: &ParameterSet, z: C64) -> Result<C64> {
    let q2 = ps.q * ps.q;
    let e = ps.eps_trunc;
    let num = qpoch_eps(z / q2, ps.p, e)?;
    let den = qpoch_den(z * q2, ps.p, e, "C")?;
    Ok(num / den)
}
