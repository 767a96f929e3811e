//! The check suites behind each command. Every suite returns a list of cases;
//! a case carries the inputs that identify it, its residual and its verdict.

use qkz::contours::{build_u_contours, integrate};
use qkz::ellspace::default_family_w;
use qkz::freefield::{
    altsum_vanish, f_assembly, f_component_closed, ghat, i_residue_closed, sign_vectors, signsum_g, theorem_rhs,
};
use qkz::qkzcheck::{psi_tilde, psi_tv, qkz_residual};
use qkz::qseries::{qpoch, theta, xi};
use qkz::spinchain::{bits_of, r_apply, sector, SpinConfig, SpinVector};
use qkz::{ParameterSet, PointConfig, Result, ScreenSignConfig, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct Case {
    pub inputs: Value,
    pub residual: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<[f64; 2]>,
}

impl Case {
    fn new(inputs: Value, residual: f64, tol: f64) -> Self {
        Self { inputs, residual, pass: residual < tol, value: None }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

fn annulus(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> C64 {
    let r = rng.random_range(lo..=hi);
    C64::from_polar(r, rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn qseries(cfg: &RunConfig) -> Result<Vec<Case>> {
    let ps = &cfg.params;
    let mut rng = cfg.rng();
    let (q2, mut worst) = (ps.q * ps.q, [0.0f64; 3]);
    let q4 = q2 * q2;
    for _ in 0..200 {
        let z = annulus(&mut rng, 0.3, 3.0);
        let th = theta(ps, z)?;
        worst[0] = worst[0].max(rel(theta(ps, ps.p * z)?, -th / z));
        worst[1] = worst[1].max(rel(theta(ps, 1.0 / z)?, -th / z));
        let zx = annulus(&mut rng, 0.5, 2.0);
        let w = 1.0 / zx;
        let target = qpoch(w, q4)? * qpoch(q4 * w, q4)? / qpoch(q2 * w, q4)?.powi(2);
        worst[2] = worst[2].max(rel(xi(ps, ps.p * zx)? / xi(ps, zx)?, target));
    }
    Ok(["theta quasi-periodicity", "theta inversion", "xi shift"]
        .iter()
        .zip(worst)
        .map(|(name, r)| Case::new(json!({"identity": name, "points": 200}), r, ps.eps_check))
        .collect())
}

pub fn rmatrix(cfg: &RunConfig) -> Result<Vec<Case>> {
    let ps = cfg.params.with_labels(0, 3, 1)?;
    let mut cases = Vec::new();
    let (mut perm, mut leak) = (0.0f64, 0.0f64);
    for idx in 0..8 {
        let bits = bits_of(idx, 3);
        let ones = bits.iter().filter(|&&b| b == 1).count();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut swapped = bits.clone();
            swapped.swap(i, j);
            let at_one = r_apply(&ps, C64::new(1.0, 0.0), i, j, &SpinVector::basis(&bits))?;
            perm = perm.max(at_one.sub(&SpinVector::basis(&swapped)).norm_inf());
            let out = r_apply(&ps, C64::new(0.37, -0.8), i, j, &SpinVector::basis(&bits))?;
            for other in (0..=3).filter(|&o| o != ones) {
                for b in sector(3, other) {
                    leak = leak.max(out.get(&b).norm());
                }
            }
        }
    }
    // both are exact statements
    cases.push(Case { inputs: json!({"property": "R(1) = P"}), residual: perm, pass: perm == 0.0, value: None });
    cases.push(Case { inputs: json!({"property": "weight conservation"}), residual: leak, pass: leak == 0.0, value: None });
    let mut rng = cfg.rng();
    for draw in 0..50 {
        let (z, w) = (annulus(&mut rng, 0.3, 1.5), annulus(&mut rng, 0.3, 1.5));
        let mut res: f64 = 0.0;
        for idx in 0..8 {
            let v = SpinVector::basis(&bits_of(idx, 3));
            let lhs = r_apply(&ps, z, 0, 1, &r_apply(&ps, z * w, 0, 2, &r_apply(&ps, w, 1, 2, &v)?)?)?;
            let rhs = r_apply(&ps, w, 1, 2, &r_apply(&ps, z * w, 0, 2, &r_apply(&ps, z, 0, 1, &v)?)?)?;
            res = res.max(lhs.sub(&rhs).norm_inf());
        }
        cases.push(Case::new(json!({"property": "Yang-Baxter", "draw": draw, "z": pair(z), "w": pair(w)}), res, ps.eps_check));
    }
    Ok(cases)
}

fn nus(n: usize, l: usize) -> Vec<SpinConfig> {
    sector(n, n - l).iter().map(|b| SpinConfig::zeros(b)).collect()
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

pub fn lemma(cfg: &RunConfig) -> Result<Vec<Case>> {
    let ps = &cfg.params;
    let mut rng = cfg.rng();
    let mut cases = Vec::new();
    for big_n in 1..=6 {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let t: Vec<C64> = (0..big_n).map(|_| annulus(&mut rng, 0.2, 2.0)).collect();
            let s = altsum_vanish(ps.q, &t);
            worst = worst.max(s.value.norm() / s.scale);
        }
        cases.push(Case::new(json!({"lemma": "alternating sum", "N": big_n, "draws": 100}), worst, ps.eps_check));
    }
    for n in [1, 2] {
        let ps = ps.with_labels(ps.m, n, 1)?;
        let radius = ps.p.re.sqrt();
        let points: Vec<(Vec<C64>, Vec<C64>)> = (0..20)
            .map(|_| (crate::config::auto_points(&mut rng, n), vec![annulus(&mut rng, radius, radius)]))
            .collect();
        for nu in nus(n, 1) {
            for mu in [1i8, -1] {
                for eps in [1i8, -1] {
                    let sc = ScreenSignConfig::new(vec![eps], vec![mu])?;
                    let mut worst: f64 = 0.0;
                    for (z, t) in &points {
                        let pts = PointConfig::new(z.clone(), t.clone());
                        let closed = i_residue_closed(&ps, &nu, &sc, &pts)?;
                        let plan = build_u_contours(&ps, z, t, mu, cfg.nodes)?;
                        let quad = integrate(&plan, |u| ghat(&ps, &nu, &sc, &pts.clone().with_u(u.to_vec())))?;
                        worst = worst.max((quad.values[0] - closed).norm() / closed.norm().max(1.0));
                    }
                    let inputs = json!({"lemma": "u-integral residues", "n": n, "nu": bit_string(&nu.bits), "mu": mu, "eps": eps, "points": 20});
                    cases.push(Case::new(inputs, worst, 1e-8));
                }
            }
        }
    }
    Ok(cases)
}

pub fn theorem(cfg: &RunConfig) -> Result<Vec<Case>> {
    let ps = &cfg.params;
    let (n, l) = (ps.n, ps.l);
    let mut rng = cfg.rng();
    let points: Vec<PointConfig> = (0..20)
        .map(|_| {
            let z = cfg.z_points(&mut rng);
            let t = (0..l).map(|_| annulus(&mut rng, 0.3, 0.9)).collect();
            PointConfig::new(z, t)
        })
        .collect();
    let mut cases = Vec::new();
    for nu in nus(n, l) {
        for mu in sign_vectors(l) {
            let equality = mu.iter().all(|&m| m < 0);
            let mut worst: f64 = 0.0;
            for pts in &points {
                let g = signsum_g(ps, &nu, &mu, pts)?;
                let r = if equality { rel(g.value, theorem_rhs(ps, &nu, pts)?) } else { g.value.norm() / g.scale };
                worst = worst.max(r);
            }
            let inputs = json!({"identity": if equality { "sign sum equals weight" } else { "sign sum vanishes" },
                "nu": bit_string(&nu.bits), "mu": mu, "points": 20});
            cases.push(Case::new(inputs, worst, if equality { 1e-9 } else { 1e-10 }));
        }
        let mut worst: f64 = 0.0;
        for pts in &points {
            worst = worst.max(rel(f_component_closed(ps, &nu, pts)?, f_assembly(ps, &nu, pts)?.value));
        }
        cases.push(Case::new(json!({"identity": "closed form equals assembly", "nu": bit_string(&nu.bits), "points": 20}), worst, 1e-9));
    }
    Ok(cases)
}

pub fn qkz(cfg: &RunConfig) -> Result<Vec<Case>> {
    let ps = &cfg.params;
    let w = default_family_w(ps)?;
    let z = cfg.z_points(&mut cfg.rng());
    let mut cases = Vec::new();
    for form in ["psi_tv", "psi_tilde"] {
        for j in 0..ps.n {
            let rep = if form == "psi_tv" {
                qkz_residual(ps, |z| psi_tv(ps, &w, z, cfg.nodes), j, &z, cfg.nodes)?
            } else {
                qkz_residual(ps, |z| psi_tilde(ps, &w, z, cfg.nodes), j, &z, cfg.nodes)?
            };
            let inputs = json!({"solution": form, "j": j + 1, "z": z.iter().map(|&x| pair(x)).collect::<Vec<_>>(),
                "nodes": cfg.nodes, "vanishing": rep.vanishing});
            cases.push(Case::new(inputs, rep.residual, 1e-6));
        }
    }
    Ok(cases)
}

/// Component label and value.
pub type Row = (Vec<u8>, C64);

/// Components of the solution at the configured z, one per weight-sector component.
pub fn eval(cfg: &RunConfig) -> Result<(Vec<C64>, Vec<Row>)> {
    let ps = &cfg.params;
    let w = default_family_w(ps)?;
    let z = cfg.z_points(&mut cfg.rng());
    let psi = psi_tv(ps, &w, &z, cfg.nodes)?;
    let rows = sector(ps.n, ps.l).into_iter().map(|bits| (bits.clone(), psi.vector.get(&bits))).collect();
    Ok((z, rows))
}

pub fn eval_cases(rows: &[Row]) -> Vec<Case> {
    rows.iter()
        .map(|(bits, v)| Case {
            inputs: json!({"bits": bit_string(bits)}),
            residual: 0.0,
            pass: v.is_finite(),
            value: Some(pair(*v)),
        })
        .collect()
}

pub fn bits_label(bits: &[u8]) -> String {
    bit_string(bits)
}

/// Labels for the parameter block of a report.
pub fn params_json(ps: &ParameterSet) -> Value {
    json!({"q": ps.q.re, "k": ps.k, "m": ps.m, "n": ps.n, "l": ps.l, "p": ps.p.re, "s": ps.s, "kappa": ps.kappa.re})
}
