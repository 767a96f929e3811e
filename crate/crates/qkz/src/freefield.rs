//! Closed forms of the free-field correlation function F = f Phi G, the
//! residue evaluation of its current integrals, and the pairwise OPE prefactors.
//!
//! Configurations here use the `Zeros` convention: the support of nu is the
//! set of positions with nu_i = 0, written k_1 < ... < k_l.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::qseries::{cfun, qpoch_den, qpoch_eps, xi};
use crate::spinchain::{SpinConfig, SupportConvention};
use crate::tvweights::{diff, phase_phi, weight_w, PointConfig};
use crate::C64;

/// Screening signs eps_a and current signs mu_i, each +1 or -1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScreenSignConfig {
    pub eps: Vec<i8>,
    pub mu: Vec<i8>,
}

impl ScreenSignConfig {
    pub fn new(eps: Vec<i8>, mu: Vec<i8>) -> Result<Self> {
        if eps.len() != mu.len() || eps.iter().chain(&mu).any(|s| s.abs() != 1) {
            return Err(Error::InvalidParams("signs must be +-1 with equal counts".into()));
        }
        Ok(Self { eps, mu })
    }

    pub fn l(&self) -> usize {
        self.eps.len()
    }

    /// Positions (0-based) with mu = -1, ascending.
    pub fn a_minus(&self) -> Vec<usize> {
        (0..self.mu.len()).filter(|&i| self.mu[i] < 0).collect()
    }
}

/// A value that should vanish or match, with the magnitude scale of its summands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignSum {
    pub value: C64,
    pub scale: f64,
}

/// Every sign vector of length l, in lexicographic order with + first.
pub fn sign_vectors(l: usize) -> Vec<Vec<i8>> {
    (0..1usize << l)
        .map(|bits| (0..l).map(|a| if bits >> (l - 1 - a) & 1 == 0 { 1 } else { -1 }).collect())
        .collect()
}

fn prod_signs(s: &[i8]) -> f64 {
    s.iter().map(|&x| x as f64).product()
}

fn check_nu(ps: &ParameterSet, nu: &SpinConfig, pts: &PointConfig) -> Result<()> {
    if nu.convention != SupportConvention::Zeros {
        return Err(Error::InvalidParams("free-field configurations use the nu_i = 0 support".into()));
    }
    if nu.n != pts.z.len() || nu.l() != pts.t.len() || nu.l() != ps.l || nu.n != ps.n {
        return Err(Error::InvalidParams(format!(
            "shape mismatch: nu has n={} l={}, point has {} z and {} t, parameters n={} l={}",
            nu.n,
            nu.l(),
            pts.z.len(),
            pts.t.len(),
            ps.n,
            ps.l
        )));
    }
    Ok(())
}

/// G-hat: the five product groups in (u, t, z).
pub fn ghat(ps: &ParameterSet, nu: &SpinConfig, sc: &ScreenSignConfig, pts: &PointConfig) -> Result<C64> {
    check_nu(ps, nu, pts)?;
    let u = pts.u.as_ref().ok_or_else(|| Error::InvalidParams("ghat needs u".into()))?;
    let (t, z, k) = (&pts.t, &pts.z, ps.k);
    let l = nu.l();
    let qf = |x: f64| ps.qf(x);
    let mut acc = C64::new(1.0, 0.0);
    for i in 0..l {
        let (mu, zk) = (sc.mu[i] as f64, z[nu.support[i]]);
        acc *= u[i] * (zk - qf(mu - 2.0 - k) * u[i])
            / (diff(zk, qf(-1.0 - k) * u[i], || format!("z_k{i} - q^(-1-k) u{i}"))?
                * diff(u[i], qf(k + 3.0) * zk, || format!("u{i} - q^(k+3) z_k{i}"))?);
    }
    for j in 0..l {
        let mu = sc.mu[j] as f64;
        for (i, &zi) in z.iter().enumerate() {
            if i < nu.support[j] {
                acc *= (zi - qf(mu - 2.0 - k) * u[j]) / diff(zi, qf(-1.0 - k) * u[j], || format!("z{i} - q^(-1-k) u{j}"))?;
            } else if i > nu.support[j] {
                acc *= (u[j] - qf(k + 2.0 - mu) * zi) / diff(u[j], qf(k + 3.0) * zi, || format!("u{j} - q^(k+3) z{i}"))?;
            }
        }
    }
    for i in 0..l {
        for j in i + 1..l {
            let e = (sc.mu[i] - sc.mu[j]) as f64;
            acc *= (u[i] - qf(e) * u[j]) / diff(u[i], qf(-2.0) * u[j], || format!("u{i} - q^-2 u{j}"))?;
        }
    }
    for i in 0..l {
        let mu = sc.mu[i] as f64;
        for a in 0..l {
            let ea = sc.eps[a] as f64;
            acc *= (u[i] - qf(-mu * (k + 1.0) - ea) * t[a])
                / diff(u[i], qf(-mu * (k + 2.0)) * t[a], || format!("u{i} - q^(-mu(k+2)) t{a}"))?;
        }
    }
    Ok(acc)
}

/// prod_{a<b} (q^{eps_b} t_b - q^{eps_a} t_a)/(t_b - q^{-2} t_a).
pub fn tt_factor(ps: &ParameterSet, eps: &[i8], t: &[C64]) -> Result<C64> {
    let mut acc = C64::new(1.0, 0.0);
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            acc *= (ps.qi(eps[b] as i32) * t[b] - ps.qi(eps[a] as i32) * t[a])
                / diff(t[b], ps.qi(-2) * t[a], || format!("t{b} - q^-2 t{a}"))?;
        }
    }
    Ok(acc)
}

pub fn gfull(ps: &ParameterSet, nu: &SpinConfig, sc: &ScreenSignConfig, pts: &PointConfig) -> Result<C64> {
    Ok(ghat(ps, nu, sc, pts)? * tt_factor(ps, &sc.eps, &pts.t)?)
}

/// f = (1-q^2)^l q^{sum (n+m-2l-k_i+i) mu_i} prod (q^k z_i)^{s(m+n-l-i)} prod_{i<j} xi(z_i/z_j)
///     prod_a (q^{-2} t_a)^{4s(a-1)-2ms}.
pub fn f_prefactor(ps: &ParameterSet, nu: &SpinConfig, mu: &[i8], pts: &PointConfig) -> Result<C64> {
    check_nu(ps, nu, pts)?;
    let (n, m, l, s) = (ps.n as f64, ps.m as f64, ps.l as f64, ps.s);
    let q = ps.q;
    let mut exp = 0.0;
    for (i, &mi) in mu.iter().enumerate() {
        let ki = nu.support[i] as f64 + 1.0;
        exp += (n + m - 2.0 * l - ki + (i as f64 + 1.0)) * mi as f64;
    }
    let mut acc = (1.0 - q * q).powi(ps.l as i32) * ps.qf(exp);
    let qk = ps.qf(ps.k);
    for (i, &zi) in pts.z.iter().enumerate() {
        acc *= (qk * zi).powf(s * (m + n - l - (i as f64 + 1.0)));
    }
    for i in 0..pts.z.len() {
        for j in i + 1..pts.z.len() {
            acc *= xi(ps, pts.z[i] / pts.z[j])?;
        }
    }
    for (a, &ta) in pts.t.iter().enumerate() {
        acc *= (ta / (q * q)).powf(4.0 * s * a as f64 - 2.0 * m * s);
    }
    Ok(acc)
}

/// Closed form of the u-integrals of G-hat (the residue lemma).
pub fn i_residue_closed(ps: &ParameterSet, nu: &SpinConfig, sc: &ScreenSignConfig, pts: &PointConfig) -> Result<C64> {
    check_nu(ps, nu, pts)?;
    let (q, t, z) = (ps.q, &pts.t, &pts.z);
    let l = nu.l();
    let lm = sc.a_minus();
    let r = lm.len();
    let mut sum = C64::new(0.0, 0.0);
    for assign in (0..l).permutations(r) {
        if assign.iter().any(|&a| sc.eps[a] < 0) {
            continue;
        }
        let mut term = C64::new(1.0, 0.0);
        for (i, &ai) in assign.iter().enumerate() {
            let kk = nu.support[lm[i]];
            term *= t[ai] / diff(z[kk], q * t[ai], || format!("z{kk} - q t{ai}"))?;
            for (j, &zj) in z.iter().enumerate().take(kk) {
                term *= (zj - t[ai] / q) / diff(zj, q * t[ai], || format!("z{j} - q t{ai}"))?;
            }
        }
        for i in 0..r {
            let ai = assign[i];
            for a in (0..l).filter(|a| !assign[i..].contains(a)) {
                let e = -1 - sc.eps[a] as i32;
                term *= (t[ai] - ps.qi(e) * t[a]) / diff(t[ai], t[a], || format!("t{ai} - t{a}"))?;
            }
        }
        sum += term;
    }
    Ok((-(q * q).inv() * (q - q.inv())).powi(r as i32) * sum)
}

/// G_(mu) = sum over screening signs of prod eps_a * I * tt_factor.
pub fn signsum_g(ps: &ParameterSet, nu: &SpinConfig, mu: &[i8], pts: &PointConfig) -> Result<SignSum> {
    let mut value = C64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for eps in sign_vectors(nu.l()) {
        let sc = ScreenSignConfig::new(eps, mu.to_vec())?;
        let term = prod_signs(&sc.eps) * i_residue_closed(ps, nu, &sc, pts)? * tt_factor(ps, &sc.eps, &pts.t)?;
        scale = scale.max(term.norm());
        value += term;
    }
    Ok(SignSum { value, scale })
}

/// q^{-2l + l(l-1)/2 - sum k_i} (q - q^{-1})^l w_(-nu)(t,z).
pub fn theorem_rhs(ps: &ParameterSet, nu: &SpinConfig, pts: &PointConfig) -> Result<C64> {
    check_nu(ps, nu, pts)?;
    let l = nu.l() as i32;
    let sum_k: i32 = nu.support.iter().map(|&k| k as i32 + 1).sum();
    let flipped = SpinConfig::ones(&nu.flipped().bits);
    let q = ps.q;
    Ok(ps.qi(-2 * l + l * (l - 1) / 2 - sum_k) * (q - q.inv()).powi(l) * weight_w(ps, &flipped, pts)?)
}

/// q-exponent of the constant in the closed form of F^(nu).
pub fn f_constant_exponent(ps: &ParameterSet) -> f64 {
    let (n, m, l, s, k) = (ps.n as f64, ps.m as f64, ps.l as f64, ps.s, ps.k);
    -(n + m + 2.0 - 2.0 * l) * l + k * s * n * (m + n - l) - 0.5 * k * s * n * (n + 1.0)
        + 4.0 * s * l * (m - l + 1.0)
}

/// F^(nu) in closed form.
pub fn f_component_closed(ps: &ParameterSet, nu: &SpinConfig, pts: &PointConfig) -> Result<C64> {
    check_nu(ps, nu, pts)?;
    let (n, m, l, s) = (ps.n as f64, ps.m as f64, ps.l as f64, ps.s);
    let sign = if ps.l.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut acc = sign * ps.qf(f_constant_exponent(ps));
    for (i, &zi) in pts.z.iter().enumerate() {
        acc *= zi.powf(s * (m + n - l - (i as f64 + 1.0)));
    }
    for i in 0..pts.z.len() {
        for j in i + 1..pts.z.len() {
            acc *= xi(ps, pts.z[i] / pts.z[j])?;
        }
    }
    for (a, &ta) in pts.t.iter().enumerate() {
        acc *= ta.powf(2.0 * s * (2.0 * (a as f64 + 1.0) - 2.0 - m) - 1.0);
    }
    let flipped = SpinConfig::ones(&nu.flipped().bits);
    Ok(acc * phase_phi(ps, pts)? * weight_w(ps, &flipped, pts)?)
}

/// (-1)^l (q-q^{-1})^{-2l} prod t_a^{-1} sum_mu prod mu_i f_(mu) Phi G_(mu).
///
/// The scale is the largest single mu-term.
pub fn f_assembly(ps: &ParameterSet, nu: &SpinConfig, pts: &PointConfig) -> Result<SignSum> {
    check_nu(ps, nu, pts)?;
    let q = ps.q;
    let l = ps.l as i32;
    let mut pre = (q - q.inv()).powi(-2 * l) * if l % 2 == 0 { 1.0 } else { -1.0 };
    for &ta in &pts.t {
        pre /= ta;
    }
    let phi = phase_phi(ps, pts)?;
    let mut value = C64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for mu in sign_vectors(ps.l) {
        let g = signsum_g(ps, nu, &mu, pts)?;
        let term = pre * prod_signs(&mu) * f_prefactor(ps, nu, &mu, pts)? * phi * g.value;
        scale = scale.max(term.norm()).max((pre * g.scale).norm());
        value += term;
    }
    Ok(SignSum { value, scale })
}

/// sum over eps in {+-1}^N of prod eps_j prod_{i>j} (q^{eps_i} t_i - q^{eps_j} t_j).
pub fn altsum_vanish(q: C64, t: &[C64]) -> SignSum {
    let mut value = C64::new(0.0, 0.0);
    let mut scale: f64 = 0.0;
    for eps in sign_vectors(t.len()) {
        let mut term = C64::new(prod_signs(&eps), 0.0);
        for i in 0..t.len() {
            for j in 0..i {
                term *= q.powi(eps[i] as i32) * t[i] - q.powi(eps[j] as i32) * t[j];
            }
        }
        scale = scale.max(term.norm());
        value += term;
    }
    SignSum { value, scale }
}

/// The ordered operator pairs whose OPE prefactors are implemented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpeKind {
    /// S(t1) S(t2); signs (eps1, eps2)
    ScreeningScreening,
    /// phi(z) S(t)
    VertexScreening,
    /// J(u) S(t); signs (mu, eps)
    CurrentScreening,
    /// phi(z) J(u); signs (mu, _)
    VertexCurrent,
    /// J(u) phi(z); signs (mu, _)
    CurrentVertex,
    /// [phi(z), J(u)]_q; signs (mu, _)
    QCommutator,
    /// J(u1) J(u2); signs (mu1, mu2)
    CurrentCurrent,
    /// phi(z1) phi(z2)
    VertexVertex,
}

impl OpeKind {
    pub const ALL: [OpeKind; 8] = [
        OpeKind::ScreeningScreening,
        OpeKind::VertexScreening,
        OpeKind::CurrentScreening,
        OpeKind::VertexCurrent,
        OpeKind::CurrentVertex,
        OpeKind::QCommutator,
        OpeKind::CurrentCurrent,
        OpeKind::VertexVertex,
    ];
}

/// Scalar prefactor of the requested OPE, argument order as in the operator product.
pub fn ope_prefactor(ps: &ParameterSet, kind: OpeKind, args: (C64, C64), signs: (i8, i8)) -> Result<C64> {
    let (x, y) = args;
    let (s1, s2) = (signs.0 as f64, signs.1 as f64);
    let (q, k, s) = (ps.q, ps.k, ps.s);
    let qf = |e: f64| ps.qf(e);
    let v = match kind {
        OpeKind::ScreeningScreening => {
            let (t1, t2) = (x, y);
            (t1 / (q * q)).powf(4.0 * s)
                * qf(s1)
                * (t1 - qf(s2 - s1) * t2)
                / diff(t1, qf(-2.0) * t2, || "t1 - q^-2 t2".into())?
                * cfun(ps, t2 / t1)?
        }
        OpeKind::VertexScreening => {
            let (z, t) = (x, y);
            (qf(k) * z).powf(-s) * qpoch_eps(q * t / z, ps.p, ps.eps_trunc)?
                / qpoch_den(t / (q * z), ps.p, ps.eps_trunc, "phi S")?
        }
        OpeKind::CurrentScreening => {
            let (u, t) = (x, y);
            qf(-s1) * (u - qf(-s1 * (k + 1.0) - s2) * t) / diff(u, qf(-s1 * (k + 2.0)) * t, || "u - q^(-mu(k+2)) t".into())?
        }
        OpeKind::VertexCurrent => {
            let (z, u) = (x, y);
            (z - qf(s1 - 2.0 - k) * u) / diff(z, qf(-1.0 - k) * u, || "z - q^(-1-k) u".into())?
        }
        OpeKind::CurrentVertex => {
            let (u, z) = (x, y);
            qf(s1) * (u - qf(k + 2.0 - s1) * z) / diff(u, qf(k + 3.0) * z, || "u - q^(k+3) z".into())?
        }
        OpeKind::QCommutator => {
            let (z, u) = (x, y);
            (1.0 - q * q) * u * (z - qf(s1 - 2.0 - k) * u)
                / (diff(z, qf(-1.0 - k) * u, || "z - q^(-1-k) u".into())?
                    * diff(u, qf(k + 3.0) * z, || "u - q^(k+3) z".into())?)
        }
        OpeKind::CurrentCurrent => {
            let (u1, u2) = (x, y);
            qf(-s1) * (u1 - qf(s1 - s2) * u2) / diff(u1, qf(-2.0) * u2, || "u1 - q^-2 u2".into())?
        }
        OpeKind::VertexVertex => {
            let (z1, z2) = (x, y);
            (qf(k) * z1).powf(s) * xi(ps, z1 / z2)?
        }
    };
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, l: usize, m: u32) -> ParameterSet {
        ParameterSet::new(0.6, 1.0, m, n, l).unwrap()
    }

    fn cp(r: f64, a: f64) -> C64 {
        C64::from_polar(r, a)
    }

    #[test]
    fn ghat_single_site() {
        let ps = params(1, 1, 0);
        let (z, t, u) = (cp(1.0, 0.2), cp(0.2, 1.0), cp(0.3, -0.5));
        let pts = PointConfig::new(vec![z], vec![t]).with_u(vec![u]);
        let sc = ScreenSignConfig::new(vec![1], vec![-1]).unwrap();
        let got = ghat(&ps, &SpinConfig::zeros(&[0]), &sc, &pts).unwrap();
        let (q, k) = (0.6f64, 1.0);
        let want = u * (z - q.powf(-3.0 - k) * u) / ((z - q.powf(-1.0 - k) * u) * (u - q.powf(k + 3.0) * z))
            * (u - q.powf(k) * t)
            / (u - q.powf(k + 2.0) * t);
        assert!((got - want).norm() < 1e-13 * want.norm());
        assert_eq!(gfull(&ps, &SpinConfig::zeros(&[0]), &sc, &pts).unwrap(), got);
    }

    #[test]
    fn f_prefactor_exponent() {
        let ps = params(1, 1, 0);
        let (z, t) = (cp(1.0, 0.0), cp(1.0, 0.0));
        let pts = PointConfig::new(vec![z], vec![t]);
        let got = f_prefactor(&ps, &SpinConfig::zeros(&[0]), &[-1], &pts).unwrap();
        // (1 - q^2) q * (q^k)^{s(0+1-1-1)} * (q^-2)^0
        let want = 0.64 * 0.6 * 0.6f64.powf(-ps.s);
        assert!((got - want).norm() < 1e-14);

        let ps0 = params(1, 0, 2);
        let pts0 = PointConfig::new(vec![cp(1.0, 0.3)], vec![]);
        let got = f_prefactor(&ps0, &SpinConfig::zeros(&[1]), &[], &pts0).unwrap();
        let want = (0.6f64 * cp(1.0, 0.3)).powf(2.0 * ps0.s);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn residue_closed_single_term() {
        let ps = params(1, 1, 0);
        let (z, t) = (cp(1.0, 0.4), cp(0.216, 1.0));
        let pts = PointConfig::new(vec![z], vec![t]);
        let nu = SpinConfig::zeros(&[0]);
        let minus_minus = ScreenSignConfig::new(vec![-1], vec![-1]).unwrap();
        assert_eq!(i_residue_closed(&ps, &nu, &minus_minus, &pts).unwrap(), C64::new(0.0, 0.0));
        let plus_minus = ScreenSignConfig::new(vec![1], vec![-1]).unwrap();
        let q = 0.6;
        let want = -(q - 1.0 / q) / (q * q) * t / (z - q * t);
        let got = i_residue_closed(&ps, &nu, &plus_minus, &pts).unwrap();
        assert!((got - want).norm() < 1e-14 * want.norm());
        let g = signsum_g(&ps, &nu, &[-1], &pts).unwrap();
        assert!((g.value - want).norm() < 1e-14 * want.norm());
        let rhs = theorem_rhs(&ps, &nu, &pts).unwrap();
        assert!((rhs - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn theorem_exponent_two_sites() {
        let ps = params(2, 2, 0);
        let pts = PointConfig::new(vec![cp(1.0, 0.0), cp(1.0, 2.0)], vec![cp(0.2, 0.5), cp(0.25, -1.0)]);
        let nu = SpinConfig::zeros(&[0, 0]);
        let q = 0.6f64;
        let w = weight_w(&ps, &SpinConfig::ones(&[1, 1]), &pts).unwrap();
        let want = q.powi(-6) * (q - 1.0 / q).powi(2) * w;
        let got = theorem_rhs(&ps, &nu, &pts).unwrap();
        assert!((got - want).norm() < 1e-13 * want.norm());
    }

    #[test]
    fn empty_configuration() {
        let ps = params(1, 0, 0);
        let pts = PointConfig::new(vec![cp(1.0, 0.1)], vec![]);
        let nu = SpinConfig::zeros(&[1]);
        assert_eq!(theorem_rhs(&ps, &nu, &pts).unwrap(), C64::new(1.0, 0.0));
        assert_eq!(signsum_g(&ps, &nu, &[], &pts).unwrap().value, C64::new(1.0, 0.0));
    }

    #[test]
    fn f_closed_without_screenings() {
        let ps = params(1, 0, 2);
        let z = cp(1.0, 0.3);
        let pts = PointConfig::new(vec![z], vec![]);
        let got = f_component_closed(&ps, &SpinConfig::zeros(&[1]), &pts).unwrap();
        let want = 0.6f64.powf(ps.k * ps.s * 2.0) * z.powf(ps.s * 2.0);
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn altsum_small_cases() {
        let q = C64::new(0.6, 0.0);
        assert_eq!(altsum_vanish(q, &[cp(0.7, 0.2)]).value, C64::new(0.0, 0.0));
        let s = altsum_vanish(q, &[cp(0.7, 0.2), cp(1.3, -0.4)]);
        assert!(s.value.norm() < 1e-15 * s.scale);
    }

    #[test]
    fn q_commutator_both_signs() {
        let ps = params(1, 1, 0);
        let (z, u) = (cp(1.0, 0.3), cp(0.4, 2.0));
        for mu in [1i8, -1] {
            let a = ope_prefactor(&ps, OpeKind::VertexCurrent, (z, u), (mu, 0)).unwrap();
            let b = ope_prefactor(&ps, OpeKind::CurrentVertex, (u, z), (mu, 0)).unwrap();
            let c = ope_prefactor(&ps, OpeKind::QCommutator, (z, u), (mu, 0)).unwrap();
            assert!((a - ps.q * b - c).norm() < 1e-13 * c.norm().max(1.0));
        }
    }

    #[test]
    fn screening_pair_equal_signs() {
        let ps = params(1, 1, 0);
        let (t1, t2) = (cp(0.3, 0.1), cp(0.5, 1.2));
        let got = ope_prefactor(&ps, OpeKind::ScreeningScreening, (t1, t2), (1, 1)).unwrap();
        let want = (t1 / 0.36).powf(4.0 * ps.s) * 0.6 * (t1 - t2) / (t1 - t2 / 0.36) * cfun(&ps, t2 / t1).unwrap();
        assert!((got - want).norm() < 1e-14 * want.norm());
    }
}
