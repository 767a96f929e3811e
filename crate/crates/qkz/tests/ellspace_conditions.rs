mod common;

use common::{annulus, rel, rng, unit_points};
use proptest::prelude::*;
use qkz::ellspace::{check_condition_iii, default_family_w, solve_default_w, ThetaAtom};
use qkz::{ParameterSet, PointConfig, StructuredW, Var, C64};

fn shifted(pts: &PointConfig, var: Var, p: C64) -> PointConfig {
    let mut out = pts.clone();
    match var {
        Var::T(a) => out.t[a] *= p,
        Var::Z(j) => out.z[j] *= p,
    }
    out
}

fn vars(l: usize, n: usize) -> Vec<Var> {
    (0..l).map(Var::T).chain((0..n).map(Var::Z)).collect()
}

fn grid() -> Vec<(usize, usize, u32)> {
    let mut out = Vec::new();
    for n in 1..=4 {
        for l in 0..=n {
            for m in 0..=2 {
                out.push((n, l, m));
            }
        }
    }
    out
}

#[test]
fn default_w_satisfies_condition_iii_on_grid() {
    for (n, l, m) in grid() {
        let ps = ParameterSet::new(0.6, 1.0, m, n, l).unwrap();
        let w = solve_default_w(&ps).unwrap();
        w.validate().unwrap();
        check_condition_iii(&ps, &w).unwrap_or_else(|e| panic!("(n,l,m)=({n},{l},{m}): {e}"));
        let fam = default_family_w(&ps).unwrap();
        check_condition_iii(&ps, &fam).unwrap_or_else(|e| panic!("family (n,l,m)=({n},{l},{m}): {e}"));
    }
}

#[test]
fn numeric_shift_consistency_on_grid() {
    let mut r = rng(800);
    for (n, l, m) in grid() {
        let ps = ParameterSet::new(0.6, 1.0, m, n, l).unwrap();
        let w = default_family_w(&ps).unwrap();
        for _ in 0..4 {
            let z = unit_points(&mut r, n, 0.3);
            let t = (0..l).map(|_| annulus(&mut r, 0.3, 0.9)).collect();
            let pts = PointConfig::new(z, t);
            let base = w.eval(&ps, &pts).unwrap();
            for var in vars(l, n) {
                let ratio = w.eval(&ps, &shifted(&pts, var, ps.p)).unwrap() / base;
                let mult = w.shift_multiplier(&ps, var).eval(&ps, &pts);
                assert!(rel(ratio, mult) < 1e-12, "(n,l,m)=({n},{l},{m}) {var}");
            }
        }
    }
}

#[test]
fn shift_multiplier_for_other_parameters() {
    for &(q, k) in &[(0.5, 0.5), (0.7, 2.0)] {
        let ps = ParameterSet::new(q, k, 1, 3, 2).unwrap();
        let w = solve_default_w(&ps).unwrap();
        check_condition_iii(&ps, &w).unwrap();
    }
}

fn atom_strategy(l: usize, n: usize) -> impl Strategy<Value = ThetaAtom> {
    (
        -2.0f64..2.0,
        0.5f64..1.5,
        -3.1f64..3.1,
        proptest::collection::vec(-2i32..=2, l),
        proptest::collection::vec(-2i32..=2, n),
        any::<bool>(),
    )
        .prop_map(|(g, cr, ca, te, ze, den)| ThetaAtom {
            constant: C64::from_polar(cr, ca),
            q_power: g,
            t_exponent: te,
            z_exponent: ze,
            denominator: den,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn calculus_is_exact(
        atoms in proptest::collection::vec(atom_strategy(2, 2), 1..5),
        pt in proptest::collection::vec(-1.0f64..1.0, 2),
        pz in proptest::collection::vec(-1.0f64..1.0, 2),
        seed in 0u64..1000,
        which in 0usize..4,
    ) {
        let ps = ParameterSet::new(0.6, 1.0, 0, 2, 2).unwrap();
        let w = StructuredW { constant: C64::new(1.3, -0.2), power_t: pt, power_z: pz, atoms };
        let mut r = rng(seed);
        let z = unit_points(&mut r, 2, 0.3);
        let t = vec![annulus(&mut r, 0.3, 0.9), annulus(&mut r, 0.3, 0.9)];
        let pts = PointConfig::new(z, t);
        let var = vars(2, 2)[which];
        let (Ok(base), Ok(moved)) = (w.eval(&ps, &pts), w.eval(&ps, &shifted(&pts, var, ps.p))) else {
            return Ok(());
        };
        prop_assume!(base.norm() > 1e-200 && base.norm() < 1e200);
        let mult = w.shift_multiplier(&ps, var).eval(&ps, &pts);
        prop_assert!(rel(moved / base, mult) < 1e-10, "{} vs {}", moved / base, mult);
    }
}
