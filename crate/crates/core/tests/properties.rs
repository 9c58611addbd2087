use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flatfront::c3::{extract_h_data, integral_free_null};
use flatfront::expr::{continue_along, eval_principal, loop_period, parse_expr, BranchState, PathC};
use flatfront::front::{hyperbolic_distance, to_poincare, HermitianPoint};
use flatfront::gallery;
use flatfront::json::to_deterministic_string;
use flatfront::legendrian::{legendrian_from_gauss, monodromy, GaussPair};
use flatfront::null_curve::{small_null, NullData};
use flatfront::psl2::{moebius_apply, psl_distance, random_su2, random_unimodular, Ext, Mat2C};
use flatfront::{MeroExpr, C64};

fn cx() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

/// A point in the annulus 0.4 <= |z| <= 2.
fn annulus() -> impl Strategy<Value = C64> {
    (0.4..2.0f64, 0.0..2.0 * PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn poly_src(c: &[C64]) -> String {
    c.iter()
        .enumerate()
        .map(|(k, a)| format!("({} + {}*i)*z^{}", a.re, a.im, k))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn poly_eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * z + a)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_rule(p in prop::collection::vec(cx(), 1..4), q in prop::collection::vec(cx(), 1..4), z in annulus()) {
        let (pe, qe) = (parse_expr(&poly_src(&p)).unwrap(), parse_expr(&poly_src(&q)).unwrap());
        let lhs = (&pe * &qe).derivative();
        let rhs = &(&pe.derivative() * &qe) + &(&pe * &qe.derivative());
        let (a, b) = (eval_principal(&lhs, z).unwrap(), eval_principal(&rhs, z).unwrap());
        prop_assert!(rel(a, b) < 1e-10);
    }

    #[test]
    fn display_roundtrip(p in prop::collection::vec(cx(), 1..5), z in annulus()) {
        let e = parse_expr(&format!("exp({}) / (z - 3)", poly_src(&p))).unwrap();
        let back = parse_expr(&e.to_string()).unwrap();
        prop_assert!(rel(eval_principal(&back, z).unwrap(), eval_principal(&e, z).unwrap()) < 1e-12);
    }

    #[test]
    fn contractible_loop_returns_to_start(r in 0.2..0.8f64) {
        // log(z - 3) along a circle about 0 that does not enclose 3
        let e = parse_expr("log(z - 3) + sqrt(z - 3)").unwrap();
        let lp = PathC::circle(C64::new(0.0, 0.0), r, 64);
        let start = lp.start();
        let st = BranchState::principal();
        let v0 = eval_principal(&e, start).unwrap();
        let (v1, _) = continue_along(&e, &lp, &st).unwrap();
        prop_assert!((v1 - v0).norm() < 1e-10);
    }

    #[test]
    fn exact_form_has_zero_period(p in prop::collection::vec(cx(), 1..4), r in 0.5..2.0f64) {
        let f = parse_expr(&format!("({}) / z^2", poly_src(&p))).unwrap();
        let per = loop_period(&f.derivative(), &PathC::circle(C64::new(0.0, 0.0), r, 64)).unwrap();
        prop_assert!(per.norm() < 1e-8);
    }

    #[test]
    fn moebius_inverse_and_action(seed in any::<u64>(), w in cx()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_unimodular(&mut rng), random_unimodular(&mut rng));
        let w = Ext::Finite(w);
        let back = moebius_apply(&a.inverse(), moebius_apply(&a, w));
        prop_assert!(back.chordal(w) < 1e-9);
        let composed = moebius_apply(&(a * b), w);
        let stepwise = moebius_apply(&a, moebius_apply(&b, w));
        prop_assert!(composed.chordal(stepwise) < 1e-9);
    }

    #[test]
    fn psl_distance_symmetric_and_sign_blind(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_unimodular(&mut rng), random_unimodular(&mut rng));
        prop_assert!((psl_distance(&a, &b) - psl_distance(&b, &a)).abs() < 1e-12);
        prop_assert!(psl_distance(&a, &a.scale(C64::new(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn psu2_invariance_and_ball(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (m, u) = (random_unimodular(&mut rng), random_su2(&mut rng));
        let (p, q) = (HermitianPoint::from_sl2(&m), HermitianPoint::from_sl2(&(m * u)));
        prop_assert!((p.x - q.x).max_abs() < 1e-9 * p.x.max_abs().max(1.0));
        let b = to_poincare(&p);
        prop_assert!((b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt() < 1.0);
        let r = HermitianPoint::from_sl2(&random_unimodular(&mut rng));
        prop_assert!((hyperbolic_distance(&p, &r) - hyperbolic_distance(&r, &p)).abs() < 1e-9);
    }

    #[test]
    fn small_null_det_and_nullity(a in cx(), z in annulus()) {
        // g = z² + a z is never a Moebius image of G = z
        let data = NullData::new(parse_expr("z").unwrap(), parse_expr(&format!("z^2 + ({} + {}*i)*z", a.re, a.im)).unwrap());
        let f = small_null(&data).unwrap();
        let st = f.branch_at(z, &BranchState::principal());
        prop_assume!(st.is_ok());
        let st = st.unwrap();
        let v = f.eval(z, &st);
        prop_assume!(v.is_ok());
        prop_assert!((v.unwrap().det() - 1.0).norm() < 1e-9);
        let dv = f.derivative().eval(z, &st).unwrap();
        prop_assert!(dv.det().norm() < 1e-9 * dv.frobenius().powi(2).max(1.0));
    }

    #[test]
    fn legendrian_det_contact_dual(lambda in annulus(), z in annulus()) {
        prop_assume!((lambda - 1.0).norm() > 0.1);
        let g = parse_expr("z").unwrap();
        let gs = parse_expr(&format!("({} + {}*i)*z", lambda.re, lambda.im)).unwrap();
        let pair = GaussPair::new(g, gs, Some(C64::new(1.0, 0.0)), None).unwrap();
        let e = legendrian_from_gauss(&pair).unwrap();
        // keep clear of the branch point at 0
        let one = C64::new(1.0, 0.0);
        let path = if z.re > 0.0 {
            PathC::segment(one, z).unwrap()
        } else {
            PathC::polyline(vec![one, C64::new(0.0, 1.5f64.copysign(z.im)), z]).unwrap()
        };
        let (v, st) = e.value_along(&path, &e.base_branch().unwrap()).unwrap();
        prop_assert!((v.det() - 1.0).norm() < 1e-9);
        let dv = e.matrix().unwrap().derivative().eval(z, &st).unwrap();
        prop_assert!((v.d * dv.a - v.b * dv.c).norm() < 1e-9 * dv.max_abs().max(1.0));
        let (dd, _) = e.dual().dual().value_along(&path, &e.base_branch().unwrap()).unwrap();
        prop_assert!(psl_distance(&dd, &v) < 1e-9);
    }

    #[test]
    fn monodromy_is_a_homomorphism(mu in 0.1..0.9f64) {
        let entry = gallery::revolution(mu).unwrap();
        let e = entry.curve().unwrap();
        let lp = &entry.expected_monodromy[0].loop_path;
        let once = monodromy(&e, lp).unwrap().matrix;
        let twice = monodromy(&e, &lp.concat(lp).unwrap()).unwrap().matrix;
        prop_assert!(psl_distance(&twice, &(once * once)) < 1e-7);
    }

    #[test]
    fn parallel_family_scales_omega(k in 0.2..3.0f64, k2 in 0.2..3.0f64, z in annulus()) {
        for name in ["dihedral", "tetrahedral"] {
            let mk = |k: f64| {
                let mut p = BTreeMap::from([("k".to_string(), k)]);
                if name == "dihedral" {
                    p.insert("n".into(), 3.0);
                }
                gallery::build(name, &p).unwrap()
            };
            let (a, b) = (mk(k), mk(k2));
            prop_assume!(a.finite_punctures.iter().all(|p| (z - p).norm() > 0.1));
            let path = PathC::segment(a.basepoint, z).unwrap();
            prop_assume!(a.finite_punctures.iter().all(|p| (0..=32).all(|j| (a.basepoint + (z - a.basepoint) * (j as f64 / 32.0) - p).norm() > 0.05)));
            let wa = continue_along(&a.expected_omega.value, &path, &BranchState::principal()).unwrap().0;
            let wb = continue_along(&b.expected_omega.value, &path, &BranchState::principal()).unwrap().0;
            prop_assert!(rel(wa / wb, C64::new(k / k2, 0.0)) < 1e-10);
            prop_assert!(rel(eval_principal(&a.expected_gauss.value.0, z).unwrap(), eval_principal(&b.expected_gauss.value.0, z).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn c3_nullity_and_h_roundtrip(g in prop::collection::vec(cx(), 2..4), h in prop::collection::vec(cx(), 2..5), z in annulus()) {
        prop_assume!(g[1].norm() > 0.1);
        // a quartic leading term keeps ω = dh₂ from vanishing
        let mut h = h;
        h.resize(4, C64::new(0.0, 0.0));
        h.push(C64::new(1.0, 0.0));
        let (ge, he) = (parse_expr(&poly_src(&g)).unwrap(), parse_expr(&poly_src(&h)).unwrap());
        let f = integral_free_null(&ge, &he).unwrap();
        let scale = f.eval_principal(z).unwrap().iter().map(|x| x.norm()).fold(1.0, f64::max);
        prop_assert!(f.nullity_residual(z).unwrap() < 1e-9 * scale * scale);
        let (eh, _, _) = extract_h_data(&f).unwrap();
        prop_assert!(rel(eval_principal(&eh, z).unwrap(), poly_eval(&h, z)) < 1e-8 * scale);
    }

    #[test]
    fn deterministic_json(v in prop::collection::vec(-1e6..1e6f64, 0..8)) {
        let m: BTreeMap<String, Vec<f64>> = BTreeMap::from([("b".into(), v.clone()), ("a".into(), v.clone())]);
        let s = to_deterministic_string(&m).unwrap();
        prop_assert_eq!(&s, &to_deterministic_string(&m).unwrap());
        let back: BTreeMap<String, Vec<f64>> = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn distinct_pairs_give_distinct_curves() {
    let z = C64::new(1.3, 0.4);
    let f2 = small_null(&NullData::new(parse_expr("z").unwrap(), parse_expr("z^2").unwrap())).unwrap();
    let f3 = small_null(&NullData::new(parse_expr("z").unwrap(), parse_expr("z^3").unwrap())).unwrap();
    let d = psl_distance(&f2.eval_principal(z).unwrap(), &f3.eval_principal(z).unwrap());
    assert!(d > 0.1, "{}", d);
}

#[test]
fn identity_is_unmoved() {
    let w = Ext::Finite(C64::new(0.3, -1.2));
    assert!(moebius_apply(&Mat2C::identity(), w).chordal(w) < 1e-15);
    let _: &MeroExpr = &MeroExpr::var();
}
