//! Deformed tori as base circles plus residue-correction circles, and the
//! tensor-product trapezoidal rule on them.
//!
//! Every integration variable has a base circle and a list of pole families
//! that must end up inside or outside its contour. A family member on the
//! wrong side of the base circle gets a small correction circle, positively
//! oriented for points that must be inside and negatively for points that
//! must be outside. Families may depend on outer variables (`t_b` with
//! `b > a`), so corrections for inner variables are resolved per outer node.
//!
//! The measure is `dt / (2 pi i t)` for every variable; node weights absorb it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ParameterSet;
use crate::C64;

pub const DEFAULT_NODES: usize = 256;
pub const DEFAULT_CORRECTION_FACTOR: f64 = 0.5;

/// Singularities closer than this fraction of the base radius to the base circle are rejected.
pub const BASE_CLEARANCE: f64 = 0.05;

/// Inside and outside points closer than this (relative) pinch the contour.
pub const PINCH_TOL: f64 = 1e-9;

/// Distinct points closer than this (relative) would need a correction circle
/// too small to sample; such configurations are rejected.
pub const NEAR_TOL: f64 = 1e-6;

/// Extra terms kept on both ends of a geometric family so correction radii see their neighbours.
const FAMILY_MARGIN: i32 = 2;
const SCALED_TERMS: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Inside,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PoleSource {
    Fixed(C64),
    /// `factor * t_var` for an outer variable `var`.
    Scaled { var: usize, factor: C64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoleFamily {
    pub source: PoleSource,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub var: usize,
    pub pole: C64,
    pub orientation: i8,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourPlan {
    pub radii: Vec<f64>,
    /// Points each variable's contour must separate, per variable.
    pub families: Vec<Vec<PoleFamily>>,
    /// Corrections that do not depend on outer variables.
    pub corrections: Vec<Correction>,
    pub nodes: usize,
    pub correction_radius_factor: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    pub values: Vec<C64>,
    /// sum over nodes of |weight| * max_i |f_i|: the scale against which
    /// cancellation in `values` is judged
    pub mass: f64,
}

impl ContourPlan {
    pub fn dims(&self) -> usize {
        self.radii.len()
    }

    pub fn correction_nodes(&self) -> usize {
        (self.nodes / 4).max(8)
    }

    /// Same plan with every base radius multiplied by `factor`.
    pub fn with_radius_scale(&self, factor: f64) -> Result<Self> {
        let mut out = self.clone();
        for r in &mut out.radii {
            *r *= factor;
        }
        out.corrections = out.static_corrections()?;
        Ok(out)
    }

    pub fn with_nodes(&self, nodes: usize) -> Self {
        let mut out = self.clone();
        out.nodes = nodes;
        out
    }

    fn static_corrections(&self) -> Result<Vec<Correction>> {
        // families tied to outer variables are resolved during integration
        let mut all = Vec::new();
        for var in 0..self.dims() {
            let points = self.resolve(var, None);
            all.extend(self.corrections_from(var, &points)?);
        }
        Ok(all)
    }

    fn resolve(&self, var: usize, outer: Option<&[C64]>) -> Vec<(C64, Side)> {
        self.families[var]
            .iter()
            .filter_map(|f| match f.source {
                PoleSource::Fixed(c) => Some((c, f.side)),
                PoleSource::Scaled { var: b, factor } => outer.map(|vals| (factor * vals[b], f.side)),
            })
            .collect()
    }

    /// Corrections for `var` given the values of all outer variables.
    pub fn corrections_for(&self, var: usize, outer: &[C64]) -> Result<Vec<Correction>> {
        let points = self.resolve(var, Some(outer));
        self.corrections_from(var, &points)
    }

    fn corrections_from(&self, var: usize, points: &[(C64, Side)]) -> Result<Vec<Correction>> {
        let r = self.radii[var];
        // merge coincident points on the same side, reject coincidences across sides
        let mut uniq: Vec<(C64, Side)> = Vec::with_capacity(points.len());
        for &(c, side) in points {
            let scale = c.norm().max(1e-300);
            match uniq.iter().find(|(d, _)| (c - d).norm() <= NEAR_TOL * scale) {
                Some((d, s)) if *s == side && (c - d).norm() <= PINCH_TOL * scale => {}
                Some((_, s)) if *s != side => {
                    return Err(Error::Contour(format!("variable {var}: contour pinched at {c}")));
                }
                Some((d, _)) => {
                    return Err(Error::Contour(format!("variable {var}: singularities {c} and {d} nearly collide")));
                }
                None => uniq.push((c, side)),
            }
        }
        let mut out = Vec::new();
        for (i, &(c, side)) in uniq.iter().enumerate() {
            if (c.norm() - r).abs() < BASE_CLEARANCE * r {
                return Err(Error::Contour(format!(
                    "variable {var}: singularity {c} within {BASE_CLEARANCE} r of the base circle r = {r}"
                )));
            }
            let orientation = match side {
                Side::Inside if c.norm() > r => 1,
                Side::Outside if c.norm() < r => -1,
                _ => continue,
            };
            let nearest = uniq
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, (d, _))| (c - d).norm())
                .fold(c.norm(), f64::min);
            let radius = (0.5 * nearest).min(self.correction_radius_factor * r);
            out.push(Correction { var, pole: c, orientation, radius });
        }
        Ok(out)
    }

    /// Nodes and weights for `var` with outer variables fixed.
    fn nodes_for(&self, var: usize, outer: &[C64]) -> Result<Vec<(C64, C64)>> {
        let m = self.nodes;
        let mc = self.correction_nodes();
        // per-variable phase offsets keep nodes of different variables apart
        let offset = var as f64 / self.dims() as f64;
        let r = self.radii[var];
        let tau = std::f64::consts::TAU;
        let mut out = Vec::with_capacity(m + 4 * mc);
        for k in 0..m {
            let t = C64::from_polar(r, tau * (k as f64 + offset) / m as f64);
            out.push((t, C64::new(1.0 / m as f64, 0.0)));
        }
        for corr in self.corrections_for(var, outer)? {
            for k in 0..mc {
                let d = C64::from_polar(corr.radius, tau * (k as f64 + offset) / mc as f64);
                let t = corr.pole + d;
                out.push((t, corr.orientation as f64 * d / (t * mc as f64)));
            }
        }
        Ok(out)
    }
}

fn check_families(families: &[Vec<PoleFamily>]) -> Result<()> {
    for (a, fams) in families.iter().enumerate() {
        for f in fams {
            if let PoleSource::Scaled { var, .. } = f.source {
                if var <= a || var >= families.len() {
                    return Err(Error::Contour(format!("variable {a} depends on non-outer variable {var}")));
                }
            }
        }
    }
    Ok(())
}

/// Geometric family `c * x^s` for s >= 0 restricted to a window around the radius.
fn fixed_family(out: &mut Vec<PoleFamily>, c: C64, x: f64, r: f64, side: Side) {
    // keep members down to r x^MARGIN (decreasing) or up to r / x^MARGIN (increasing)
    let mut v = c;
    for _ in 0..64 {
        out.push(PoleFamily { source: PoleSource::Fixed(v), side });
        v *= x;
        let a = v.norm();
        let done = if x < 1.0 { a < r * x.powi(FAMILY_MARGIN) } else { a > r * x.powi(FAMILY_MARGIN) };
        if done {
            break;
        }
    }
}

fn scaled_family(out: &mut Vec<PoleFamily>, var: usize, c: C64, x: f64, side: Side) {
    let mut f = c;
    for _ in 0..=SCALED_TERMS {
        out.push(PoleFamily { source: PoleSource::Scaled { var, factor: f }, side });
        f *= x;
    }
}

fn window_radius(ps: &ParameterSet) -> Result<(f64, f64)> {
    if !ps.is_default_regime() {
        return Err(Error::InvalidParams("contours need real 0 < q < 1 and k > -1".into()));
    }
    let (q, p) = (ps.q.re, ps.p.re);
    if !(p / q < q) {
        return Err(Error::Contour("empty window: need p q^-1 < q".into()));
    }
    Ok(((p / q * q).sqrt(), p))
}

/// Contours for the t-variables of the weight-function integrals.
///
/// Inside: p^s q^{-1} z_j and p^s q^2 t_b; outside: p^{-s} q z_j and p^{-s} q^{-2} t_b.
/// Outer variables also separate the points where the inner contour would be
/// pinched, p^s q z_j (inside) and p^{-s} q^{-1} z_j (outside), s >= 1.
pub fn build_t_contours(ps: &ParameterSet, z: &[C64], l: usize, nodes: usize) -> Result<ContourPlan> {
    let (r, p) = window_radius(ps)?;
    let q = ps.q.re;
    let mut families = vec![Vec::new(); l];
    for (a, fams) in families.iter_mut().enumerate() {
        for &zj in z {
            fixed_family(fams, zj / q, p, r, Side::Inside);
            fixed_family(fams, zj * q, 1.0 / p, r, Side::Outside);
            if a > 0 {
                fixed_family(fams, zj * q * p, p, r, Side::Inside);
                fixed_family(fams, zj / (q * p), 1.0 / p, r, Side::Outside);
            }
        }
        for b in a + 1..l {
            scaled_family(fams, b, C64::new(q * q, 0.0), p, Side::Inside);
            scaled_family(fams, b, C64::new(1.0 / (q * q), 0.0), 1.0 / p, Side::Outside);
        }
    }
    check_families(&families)?;
    let mut plan = ContourPlan {
        radii: vec![r; l],
        families,
        corrections: vec![],
        nodes,
        correction_radius_factor: DEFAULT_CORRECTION_FACTOR,
    };
    plan.corrections = plan.static_corrections()?;
    Ok(plan)
}

/// Contour for the single u-variable of the current integrals (l = 1).
///
/// Base radius q^{k+2}, the geometric midpoint of q^{k+3} and q^{k+1}.
/// Inside: q^{k+3} z_j and q^{-mu(k+2)} t; outside: q^{k+1} z_j.
pub fn build_u_contours(ps: &ParameterSet, z: &[C64], t: &[C64], mu: i8, nodes: usize) -> Result<ContourPlan> {
    if t.len() != 1 {
        return Err(Error::Contour(format!("direct u-quadrature supports l = 1 only, got l = {}", t.len())));
    }
    window_radius(ps)?;
    let q = ps.q.re;
    let k = ps.k;
    let big_r = q.powf(k + 2.0);
    let mut fams = Vec::new();
    for &zj in z {
        fams.push(PoleFamily { source: PoleSource::Fixed(zj * q.powf(k + 3.0)), side: Side::Inside });
        fams.push(PoleFamily { source: PoleSource::Fixed(zj * q.powf(k + 1.0)), side: Side::Outside });
    }
    let tp = t[0] * q.powf(-(mu as f64) * (k + 2.0));
    fams.push(PoleFamily { source: PoleSource::Fixed(tp), side: Side::Inside });
    let mut plan = ContourPlan {
        radii: vec![big_r],
        families: vec![fams],
        corrections: vec![],
        nodes,
        correction_radius_factor: DEFAULT_CORRECTION_FACTOR,
    };
    plan.corrections = plan.static_corrections()?;
    Ok(plan)
}

/// Integrate a vector-valued integrand; `f(vars, out)` fills `out`.
pub fn integrate_vec<F>(plan: &ContourPlan, dim: usize, f: F) -> Result<Quadrature>
where
    F: Fn(&[C64], &mut [C64]) -> Result<()> + Sync,
{
    let d = plan.dims();
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    if d == 0 {
        f(&[], &mut buf)?;
        ensure_finite(&[], &buf)?;
        let mass = max_abs(&buf);
        return Ok(Quadrature { values: buf, mass });
    }
    let top = d - 1;
    let vals = vec![C64::new(0.0, 0.0); d];
    let outer_nodes = plan.nodes_for(top, &vals)?;
    let partials: Vec<Result<(Vec<C64>, f64)>> = outer_nodes
        .par_iter()
        .map(|&(t, w)| {
            let mut vals = vals.clone();
            vals[top] = t;
            let mut acc = vec![C64::new(0.0, 0.0); dim];
            let mut buf = vec![C64::new(0.0, 0.0); dim];
            let mut mass = 0.0;
            descend(plan, top, w, &mut vals, &f, &mut acc, &mut buf, &mut mass)?;
            Ok((acc, mass))
        })
        .collect();
    let mut values = vec![C64::new(0.0, 0.0); dim];
    let mut mass = 0.0;
    for part in partials {
        let (acc, m) = part?;
        for (v, a) in values.iter_mut().zip(acc) {
            *v += a;
        }
        mass += m;
    }
    Ok(Quadrature { values, mass })
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(plan: &ContourPlan, f: F) -> Result<Quadrature>
where
    F: Fn(&[C64]) -> Result<C64> + Sync,
{
    integrate_vec(plan, 1, |t, out| {
        out[0] = f(t)?;
        Ok(())
    })
}

#[allow(clippy::too_many_arguments)]
fn descend<F>(
    plan: &ContourPlan,
    var: usize,
    weight: C64,
    vals: &mut [C64],
    f: &F,
    acc: &mut [C64],
    buf: &mut [C64],
    mass: &mut f64,
) -> Result<()>
where
    F: Fn(&[C64], &mut [C64]) -> Result<()>,
{
    if var == 0 {
        f(vals, buf)?;
        ensure_finite(vals, buf)?;
        for (a, b) in acc.iter_mut().zip(buf.iter()) {
            *a += weight * b;
        }
        *mass += weight.norm() * max_abs(buf);
        return Ok(());
    }
    let inner = var - 1;
    for (t, w) in plan.nodes_for(inner, vals)? {
        vals[inner] = t;
        descend(plan, inner, weight * w, vals, f, acc, buf, mass)?;
    }
    Ok(())
}

fn ensure_finite(vals: &[C64], buf: &[C64]) -> Result<()> {
    if buf.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { node: vals.to_vec() })
    }
}

fn max_abs(xs: &[C64]) -> f64 {
    xs.iter().map(|c| c.norm()).fold(0.0, f64::max)
}
