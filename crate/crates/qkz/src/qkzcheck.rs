//! Solution assembly and qKZ residuals.
//!
//! `psi_tv` integrates Phi w W over the t-contours; `psi_tilde` integrates the
//! transformed free-field correlation function against the transformed gauge
//! function. Both are checked against
//! `T_j Psi = R_{j,j-1}(p z_j/z_{j-1}) ... R_{j,1}(p z_j/z_1) kappa_j R_{j,n}(z_j/z_n) ... R_{j,j+1}(z_j/z_{j+1}) Psi`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::contours::{build_t_contours, integrate_vec};
use crate::ellspace::{check_condition_iii, StructuredW, Var};
use crate::error::{Error, Result};
use crate::freefield::{f_component_closed, f_constant_exponent};
use crate::params::ParameterSet;
use crate::qseries::xi;
use crate::spinchain::{index_of, kappa_apply, r_apply, sector, SpinConfig, SpinVector};
use crate::tvweights::{phase_phi, weight_w, PointConfig};
use crate::C64;

/// Both sides below this fraction of the quadrature mass: the solution vanishes identically.
pub const VANISH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PsiValue {
    pub vector: SpinVector,
    /// quadrature mass, see [`crate::contours::Quadrature`]
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QKZReport {
    /// 0-based shifted coordinate
    pub j: usize,
    pub lhs: SpinVector,
    pub rhs: SpinVector,
    pub residual: f64,
    /// true when both sides cancel to below `VANISH_TOL * mass`; the residual
    /// is then measured against the mass instead of the vanishing sides
    pub vanishing: bool,
    pub mass: f64,
    pub params: ParameterSet,
    pub nodes: usize,
    pub runtime_secs: f64,
}

/// Psi_W = sum over the l-ones sector of (contour integral of Phi w_(eps) W) v_(eps).
pub fn psi_tv(ps: &ParameterSet, w: &StructuredW, z: &[C64], nodes: usize) -> Result<PsiValue> {
    let comps: Vec<SpinConfig> = sector(ps.n, ps.l).iter().map(|b| SpinConfig::ones(b)).collect();
    let plan = build_t_contours(ps, z, ps.l, nodes)?;
    let q = integrate_vec(&plan, comps.len(), |t, out| {
        let pts = PointConfig::new(z.to_vec(), t.to_vec());
        let base = phase_phi(ps, &pts)? * w.eval(ps, &pts)?;
        for (o, cfg) in out.iter_mut().zip(&comps) {
            *o = base * weight_w(ps, cfg, &pts)?;
        }
        Ok(())
    })?;
    Ok(PsiValue { vector: assemble(ps.n, &comps, &q.values), mass: q.mass })
}

fn assemble(n: usize, comps: &[SpinConfig], values: &[C64]) -> SpinVector {
    let mut v = SpinVector::zeros(n);
    for (cfg, val) in comps.iter().zip(values) {
        v.coeffs[index_of(&cfg.bits)] = *val;
    }
    v
}

/// Right-hand side of the qKZ equation for coordinate j applied to `psi`.
pub fn qkz_rhs(ps: &ParameterSet, j: usize, z: &[C64], psi: &SpinVector) -> Result<SpinVector> {
    let n = z.len();
    let mut v = psi.clone();
    // rightmost factor acts first
    for jj in j + 1..n {
        v = r_apply(ps, z[j] / z[jj], j, jj, &v)?;
    }
    v = kappa_apply(ps.kappa, j, &v);
    for jj in 0..j {
        v = r_apply(ps, ps.p * z[j] / z[jj], j, jj, &v)?;
    }
    Ok(v)
}

pub fn shifted(z: &[C64], j: usize, p: C64) -> Vec<C64> {
    let mut out = z.to_vec();
    out[j] *= p;
    out
}

/// Evaluate both sides of the qKZ equation for coordinate j.
pub fn qkz_residual<F>(ps: &ParameterSet, psi: F, j: usize, z: &[C64], nodes: usize) -> Result<QKZReport>
where
    F: Fn(&[C64]) -> Result<PsiValue>,
{
    if j >= z.len() {
        return Err(Error::InvalidParams(format!("coordinate {j} out of range")));
    }
    let start = Instant::now();
    let base = psi(z)?;
    let lhs = psi(&shifted(z, j, ps.p))?;
    let rhs = qkz_rhs(ps, j, z, &base.vector)?;
    Ok(report(ps, j, lhs, rhs, base.mass, nodes, start))
}

fn report(ps: &ParameterSet, j: usize, lhs: PsiValue, rhs: SpinVector, base_mass: f64, nodes: usize, start: Instant) -> QKZReport {
    let mass = lhs.mass.max(base_mass);
    let top = lhs.vector.norm_inf().max(rhs.norm_inf());
    let diff = lhs.vector.sub(&rhs).norm_inf();
    let vanishing = top <= VANISH_TOL * mass;
    let residual = if vanishing {
        if mass > 0.0 { diff / mass } else { 0.0 }
    } else {
        diff / top
    };
    QKZReport {
        j,
        lhs: lhs.vector,
        rhs,
        residual,
        vanishing,
        mass,
        params: ps.clone(),
        nodes,
        runtime_secs: start.elapsed().as_secs_f64(),
    }
}

/// Exponent of z_i (1-based i) after the closed form of F is multiplied by
/// the two monomials of the transformation, taken literally.
pub fn composed_z_exponent(ps: &ParameterSet, i: usize) -> f64 {
    let (n, m, l, s) = (ps.n as f64, ps.m as f64, ps.l as f64, ps.s);
    let i = i as f64;
    s * (m + n - l - i) + s * (m + n - 2.0 * l - i + 1.5) - s * (m + n / 2.0 - l + 1.0) - s / 2.0
}

/// Exponent of z_i (1-based) in the displayed transformed correlation function.
pub fn display_z_exponent(ps: &ParameterSet, i: usize) -> f64 {
    let (n, m, l, s) = (ps.n as f64, ps.m as f64, ps.l as f64, ps.s);
    s * (m + n - 2.0 * l - i as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentAudit {
    pub composed: Vec<f64>,
    pub display: Vec<f64>,
    pub max_mismatch: f64,
}

/// Compare the literal composition of the monomials with the displayed result.
pub fn exponent_audit(ps: &ParameterSet) -> ExponentAudit {
    let composed: Vec<f64> = (1..=ps.n).map(|i| composed_z_exponent(ps, i)).collect();
    let display: Vec<f64> = (1..=ps.n).map(|i| display_z_exponent(ps, i)).collect();
    let max_mismatch = composed.iter().zip(&display).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ExponentAudit { composed, display, max_mismatch }
}

/// F(t,z) = sum over nu with l zeros of F^(nu) v_(nu), from the closed form.
pub fn f_vector(ps: &ParameterSet, pts: &PointConfig) -> Result<SpinVector> {
    let mut v = SpinVector::zeros(ps.n);
    for bits in sector(ps.n, ps.n - ps.l) {
        v.set(&bits, f_component_closed(ps, &SpinConfig::zeros(&bits), pts)?);
    }
    Ok(v)
}

/// Apply the transformation to an F value: the z-monomial
/// prod z_i^{s(m+n-2l-i+3/2)}, then prod z_i^{-s(m+n/2-l+1)} ((prod z_i)^{s/2} prod_{i<j} xi(z_i/z_j))^{-1},
/// then the spin flip.
pub fn transform_tilde<F>(f_eval: F, ps: &ParameterSet, z: &[C64]) -> Result<SpinVector>
where
    F: FnOnce(&[C64]) -> Result<SpinVector>,
{
    let (n, m, l, s) = (ps.n as f64, ps.m as f64, ps.l as f64, ps.s);
    let f = f_eval(z)?;
    let mut h = C64::new(1.0, 0.0);
    for (i, &zi) in z.iter().enumerate() {
        h *= zi.powf(s * (m + n - 2.0 * l - (i as f64 + 1.0) + 1.5));
    }
    let mut g = C64::new(1.0, 0.0);
    for &zi in z {
        g *= zi.powf(-s * (m + n / 2.0 - l + 1.0));
    }
    let prod: C64 = z.iter().product();
    let mut den = prod.powf(s / 2.0);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            den *= xi(ps, z[i] / z[j])?;
        }
    }
    Ok(f.scale(h * g / den).flip_all())
}

/// The displayed transformed correlation function
/// (-1)^l q^E prod z_i^{s(m+n-2l-i)} prod t_a^{2s(2a-2-m)-1} Phi sum w_(nu) v_(nu).
pub fn ftilde_display(ps: &ParameterSet, pts: &PointConfig) -> Result<SpinVector> {
    let base = ftilde_scalar(ps, pts)? * phase_phi(ps, pts)?;
    let mut v = SpinVector::zeros(ps.n);
    for bits in sector(ps.n, ps.l) {
        v.set(&bits, base * weight_w(ps, &SpinConfig::ones(&bits), pts)?);
    }
    Ok(v)
}

fn ftilde_scalar(ps: &ParameterSet, pts: &PointConfig) -> Result<C64> {
    let (m, s) = (ps.m as f64, ps.s);
    let sign = if ps.l.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut c = sign * ps.qf(f_constant_exponent(ps));
    for (i, &zi) in pts.z.iter().enumerate() {
        c *= zi.powf(display_z_exponent(ps, i + 1));
    }
    for (a, &ta) in pts.t.iter().enumerate() {
        c *= ta.powf(2.0 * s * (2.0 * (a as f64 + 1.0) - 2.0 - m) - 1.0);
    }
    Ok(c)
}

/// W-tilde = W (prod z_i^{s(m+n-2l-i)} prod t_a^{2s(2a-2-m)})^{-1}.
pub fn tilde_w(ps: &ParameterSet, w: &StructuredW) -> StructuredW {
    let (m, s) = (ps.m as f64, ps.s);
    let mut out = w.clone();
    for (i, y) in out.power_z.iter_mut().enumerate() {
        *y -= display_z_exponent(ps, i + 1);
    }
    for (a, x) in out.power_t.iter_mut().enumerate() {
        *x -= 2.0 * s * (2.0 * (a as f64 + 1.0) - 2.0 - m);
    }
    out
}

/// T^t_a W~/W~ = 1 and T^z_j W~/W~ = q^{l-m-n+j} (j 1-based).
pub fn check_tilde_conditions(ps: &ParameterSet, wt: &StructuredW) -> Result<()> {
    let (n, m, l) = (ps.n as f64, ps.m as f64, ps.l as f64);
    let targets = (0..ps.l)
        .map(|a| (Var::T(a), 0.0))
        .chain((0..ps.n).map(|j| (Var::Z(j), l - m - n + j as f64 + 1.0)));
    for (var, target) in targets {
        let mult = wt.shift_multiplier(ps, var);
        if !mult.is_q_power(target) {
            return Err(Error::ShiftCondition { var: var.to_string(), detail: format!("got {mult}, want q^{target}") });
        }
    }
    Ok(())
}

/// Psi~_W: contour integral of F~ W~ with measure prod dt_a/(2 pi i).
pub fn psi_tilde(ps: &ParameterSet, w: &StructuredW, z: &[C64], nodes: usize) -> Result<PsiValue> {
    check_condition_iii(ps, w)?;
    let wt = tilde_w(ps, w);
    check_tilde_conditions(ps, &wt)?;
    let comps: Vec<SpinConfig> = sector(ps.n, ps.l).iter().map(|b| SpinConfig::ones(b)).collect();
    let plan = build_t_contours(ps, z, ps.l, nodes)?;
    let q = integrate_vec(&plan, comps.len(), |t, out| {
        let pts = PointConfig::new(z.to_vec(), t.to_vec());
        // the plan's measure is dt/(2 pi i t)
        let jac: C64 = t.iter().product();
        let base = ftilde_scalar(ps, &pts)? * phase_phi(ps, &pts)? * wt.eval(ps, &pts)? * jac;
        for (o, cfg) in out.iter_mut().zip(&comps) {
            *o = base * weight_w(ps, cfg, &pts)?;
        }
        Ok(())
    })?;
    Ok(PsiValue { vector: assemble(ps.n, &comps, &q.values), mass: q.mass })
}
