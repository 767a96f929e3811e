//! Structured elements W of the elliptic hypergeometric space.
//!
//! A [`StructuredW`] is `constant * prod t_a^{x_a} prod z_j^{y_j} * prod atoms`,
//! each atom being `theta(c q^g prod t^alpha prod z^beta)` in the numerator or
//! the denominator. The p-shift multiplier of such a product is computed
//! symbolically from `theta(p^e X) = (-1)^e p^{-e(e-1)/2} X^{-e} theta(X)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::qseries::{theta, theta_den};
use crate::tvweights::PointConfig;
use crate::C64;

/// Exponent comparisons in the multiplier calculus.
pub const EXPONENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Var {
    T(usize),
    Z(usize),
}

impl std::fmt::Display for Var {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Var::T(a) => write!(f, "t{}", a + 1),
            Var::Z(j) => write!(f, "z{}", j + 1),
        }
    }
}

/// theta(constant * q^{q_power} * prod t^{t_exponent} * prod z^{z_exponent}).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaAtom {
    pub constant: C64,
    #[serde(default)]
    pub q_power: f64,
    pub t_exponent: Vec<i32>,
    pub z_exponent: Vec<i32>,
    pub denominator: bool,
}

impl ThetaAtom {
    pub fn new(q_power: f64, t_exponent: Vec<i32>, z_exponent: Vec<i32>, denominator: bool) -> Self {
        Self { constant: C64::new(1.0, 0.0), q_power, t_exponent, z_exponent, denominator }
    }

    fn exponent_of(&self, v: Var) -> i32 {
        match v {
            Var::T(a) => self.t_exponent.get(a).copied().unwrap_or(0),
            Var::Z(j) => self.z_exponent.get(j).copied().unwrap_or(0),
        }
    }

    fn argument(&self, ps: &ParameterSet, pts: &PointConfig) -> C64 {
        let mut x = self.constant * ps.qf(self.q_power);
        for (a, &e) in self.t_exponent.iter().enumerate() {
            if e != 0 {
                x *= pts.t[a].powi(e);
            }
        }
        for (j, &e) in self.z_exponent.iter().enumerate() {
            if e != 0 {
                x *= pts.z[j].powi(e);
            }
        }
        x
    }

    /// Same atom with t-variables relabelled: new slot `perm[a]` gets old slot `a`.
    fn permuted_t(&self, perm: &[usize]) -> Self {
        let mut out = self.clone();
        for (a, &e) in self.t_exponent.iter().enumerate() {
            out.t_exponent[perm[a]] = e;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuredW {
    pub constant: C64,
    pub power_t: Vec<f64>,
    pub power_z: Vec<f64>,
    pub atoms: Vec<ThetaAtom>,
}

/// Symbolic value of (T W)/W: `coeff * q^{q_exp} * prod t^{t_mono} prod z^{z_mono}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Multiplier {
    pub coeff: C64,
    pub q_exp: f64,
    pub t_mono: Vec<i32>,
    pub z_mono: Vec<i32>,
}

impl Multiplier {
    pub fn is_constant(&self) -> bool {
        self.t_mono.iter().chain(&self.z_mono).all(|&e| e == 0)
    }

    pub fn as_scalar(&self, ps: &ParameterSet) -> Option<C64> {
        self.is_constant().then(|| self.coeff * ps.qf(self.q_exp))
    }

    /// Constant, unit coefficient and q-exponent equal to `target`.
    pub fn is_q_power(&self, target: f64) -> bool {
        self.is_constant()
            && (self.coeff - 1.0).norm() <= 4.0 * f64::EPSILON
            && (self.q_exp - target).abs() <= EXPONENT_TOL
    }

    /// Evaluate, including any leftover monomial, at a point.
    pub fn eval(&self, ps: &ParameterSet, pts: &PointConfig) -> C64 {
        let mut v = self.coeff * ps.qf(self.q_exp);
        for (a, &e) in self.t_mono.iter().enumerate() {
            v *= pts.t[a].powi(e);
        }
        for (j, &e) in self.z_mono.iter().enumerate() {
            v *= pts.z[j].powi(e);
        }
        v
    }
}

impl std::fmt::Display for Multiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) q^{}", self.coeff, self.q_exp)?;
        for (a, &e) in self.t_mono.iter().enumerate().filter(|(_, e)| **e != 0) {
            write!(f, " t{}^{}", a + 1, e)?;
        }
        for (j, &e) in self.z_mono.iter().enumerate().filter(|(_, e)| **e != 0) {
            write!(f, " z{}^{}", j + 1, e)?;
        }
        Ok(())
    }
}

impl StructuredW {
    pub fn one(l: usize, n: usize) -> Self {
        Self { constant: C64::new(1.0, 0.0), power_t: vec![0.0; l], power_z: vec![0.0; n], atoms: vec![] }
    }

    pub fn l(&self) -> usize {
        self.power_t.len()
    }

    pub fn n(&self) -> usize {
        self.power_z.len()
    }

    /// The atoms every element must carry: 1/theta(q t_a/z_j) and theta(t_a/t_b)/theta(q^{-2} t_a/t_b).
    pub fn skeleton(l: usize, n: usize) -> Vec<ThetaAtom> {
        let mut atoms = Vec::new();
        for a in 0..l {
            for j in 0..n {
                atoms.push(ThetaAtom::new(1.0, unit(l, a, 1), unit(n, j, -1), true));
            }
        }
        for a in 0..l {
            for b in a + 1..l {
                let mut te = vec![0; l];
                te[a] = 1;
                te[b] = -1;
                atoms.push(ThetaAtom::new(0.0, te.clone(), vec![0; n], false));
                atoms.push(ThetaAtom::new(-2.0, te, vec![0; n], true));
            }
        }
        atoms
    }

    /// Skeleton atoms are present (as a sub-multiset), and the remaining
    /// atoms together with the t-powers are symmetric under t-permutations.
    pub fn validate(&self) -> Result<()> {
        let (l, n) = (self.l(), self.n());
        for atom in &self.atoms {
            if atom.t_exponent.len() != l || atom.z_exponent.len() != n {
                return Err(Error::InvalidParams("atom exponent vector has the wrong length".into()));
            }
        }
        let mut rest = self.atoms.clone();
        for sk in Self::skeleton(l, n) {
            match rest.iter().position(|a| a == &sk) {
                Some(i) => {
                    rest.remove(i);
                }
                None => {
                    return Err(Error::InvalidParams(format!("missing skeleton atom {sk:?}")));
                }
            }
        }
        if self.power_t.windows(2).any(|w| (w[0] - w[1]).abs() > EXPONENT_TOL) {
            return Err(Error::InvalidParams("t-powers are not symmetric".into()));
        }
        for a in 0..l {
            for b in a + 1..l {
                let mut perm: Vec<usize> = (0..l).collect();
                perm.swap(a, b);
                let mut swapped: Vec<ThetaAtom> = rest.iter().map(|x| x.permuted_t(&perm)).collect();
                for atom in &rest {
                    match swapped.iter().position(|x| x == atom) {
                        Some(i) => {
                            swapped.remove(i);
                        }
                        None => {
                            return Err(Error::InvalidParams(format!(
                                "theta part is not symmetric under t{} <-> t{}",
                                a + 1,
                                b + 1
                            )))
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Symbolic (T_var W)/W where T_var multiplies the variable by p.
    pub fn shift_multiplier(&self, ps: &ParameterSet, var: Var) -> Multiplier {
        let (l, n) = (self.l(), self.n());
        let mut m = Multiplier { coeff: C64::new(1.0, 0.0), q_exp: 0.0, t_mono: vec![0; l], z_mono: vec![0; n] };
        let exact_q = ps.is_default_regime();
        let p_exp = 2.0 * (ps.k + 2.0);
        // p^x contributes either to q_exp (p = q^{2(k+2)} exactly) or numerically
        let add_p_power = |m: &mut Multiplier, x: f64| {
            if exact_q {
                m.q_exp += p_exp * x;
            } else {
                m.coeff *= ps.p.powf(x);
            }
        };

        let power = match var {
            Var::T(a) => self.power_t[a],
            Var::Z(j) => self.power_z[j],
        };
        add_p_power(&mut m, power);

        for atom in &self.atoms {
            let e = atom.exponent_of(var);
            if e == 0 {
                continue;
            }
            let sgn = if atom.denominator { -1 } else { 1 };
            if e % 2 != 0 {
                m.coeff = -m.coeff;
            }
            // X^{-e} with X = c q^g prod t^alpha prod z^beta
            let s = sgn * -e;
            m.coeff *= atom.constant.powi(s);
            m.q_exp += atom.q_power * s as f64;
            for (a, &al) in atom.t_exponent.iter().enumerate() {
                m.t_mono[a] += al * s;
            }
            for (j, &be) in atom.z_exponent.iter().enumerate() {
                m.z_mono[j] += be * s;
            }
            add_p_power(&mut m, (sgn * -(e * (e - 1) / 2)) as f64);
        }
        m
    }

    /// Numeric value at a point, principal branch for real powers.
    pub fn eval(&self, ps: &ParameterSet, pts: &PointConfig) -> Result<C64> {
        let mut v = self.constant;
        for (a, &x) in self.power_t.iter().enumerate() {
            if x != 0.0 {
                v *= pts.t[a].powf(x);
            }
        }
        for (j, &y) in self.power_z.iter().enumerate() {
            if y != 0.0 {
                v *= pts.z[j].powf(y);
            }
        }
        for atom in &self.atoms {
            let x = atom.argument(ps, pts);
            if atom.denominator {
                v /= theta_den(ps, x, "W")?;
            } else {
                v *= theta(ps, x)?;
            }
        }
        Ok(v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("StructuredW serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidParams(format!("W description: {e}")))
    }
}

fn unit(len: usize, at: usize, e: i32) -> Vec<i32> {
    let mut v = vec![0; len];
    v[at] = e;
    v
}

/// Expected condition (iii): T^t_a W/W = kappa q^{n-2l+4a-2} and T^z_j W/W = q^{-l} (a, j 1-based).
pub fn condition_iii_target(ps: &ParameterSet, var: Var) -> f64 {
    let (n, l) = (ps.n as f64, ps.l as f64);
    match var {
        Var::T(a) => ps.kappa_exponent() as f64 + n - 2.0 * l + 4.0 * (a as f64 + 1.0) - 2.0,
        Var::Z(_) => -l,
    }
}

/// Check condition (iii) for every variable via the symbolic calculus.
pub fn check_condition_iii(ps: &ParameterSet, w: &StructuredW) -> Result<()> {
    let vars = (0..ps.l).map(Var::T).chain((0..ps.n).map(Var::Z));
    for var in vars {
        let m = w.shift_multiplier(ps, var);
        let target = condition_iii_target(ps, var);
        if !m.is_q_power(target) {
            return Err(Error::ShiftCondition { var: var.to_string(), detail: format!("got {m}, want q^{target}") });
        }
    }
    Ok(())
}

/// W with Theta = prod_{a,j} theta(c_j t_a/z_j), c_j = kappa^{-1/n} q^{delta_j},
/// and Y = prod_j z_j^{beta_j}, beta_j = s l (2l-2-n-2m)/n - s l delta_j.
///
/// Any offsets with sum delta_j = 0 keep condition (iii) intact.
pub fn solve_w_with_offsets(ps: &ParameterSet, delta: &[f64]) -> Result<StructuredW> {
    if !ps.is_default_regime() {
        return Err(Error::InvalidParams("default W needs real 0 < q < 1 and k > -1".into()));
    }
    let (n, l) = (ps.n, ps.l);
    if delta.len() != n {
        return Err(Error::InvalidParams("one offset per z-variable required".into()));
    }
    if delta.iter().sum::<f64>().abs() > EXPONENT_TOL {
        return Err(Error::InvalidParams("offsets must sum to zero".into()));
    }
    let mut w = StructuredW::one(l, n);
    if l == 0 {
        return Ok(w);
    }
    let e = ps.kappa_exponent() as f64;
    let base_beta = ps.s * l as f64 * e / n as f64;
    w.atoms = StructuredW::skeleton(l, n);
    for a in 0..l {
        for (j, d) in delta.iter().enumerate() {
            w.atoms.push(ThetaAtom::new(-e / n as f64 + d, unit(l, a, 1), unit(n, j, -1), false));
        }
    }
    for (j, d) in delta.iter().enumerate() {
        w.power_z[j] = base_beta - ps.s * l as f64 * d;
    }
    Ok(w)
}

/// The uniform member: c = kappa^{-1/n}, beta = s l (2l-2-n-2m)/n.
pub fn solve_default_w(ps: &ParameterSet) -> Result<StructuredW> {
    solve_w_with_offsets(ps, &vec![0.0; ps.n])
}

/// Offsets delta_j = (j - (n-1)/2) * spread, j = 0..n-1.
pub fn split_offsets(n: usize, spread: f64) -> Vec<f64> {
    (0..n).map(|j| (j as f64 - (n as f64 - 1.0) / 2.0) * spread).collect()
}

/// When c = q every Theta atom cancels a skeleton denominator and the
/// integrand has no poles inside the contour: the solution vanishes.
pub fn is_degenerate_uniform(ps: &ParameterSet) -> bool {
    ps.l > 0 && (-(ps.kappa_exponent() as f64) / ps.n as f64 - 1.0).abs() < EXPONENT_TOL
}

/// The W used for qKZ checks: uniform, or split with unit spread when the
/// uniform member is degenerate and n >= 2.
pub fn default_family_w(ps: &ParameterSet) -> Result<StructuredW> {
    if is_degenerate_uniform(ps) && ps.n >= 2 {
        solve_w_with_offsets(ps, &split_offsets(ps.n, 1.0))
    } else {
        solve_default_w(ps)
    }
}
