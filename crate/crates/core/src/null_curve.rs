//! Null curves in PSL(2,C): Small's formula, the Gauss maps of a null curve,
//! the Hopf differential and the Schwarzian derivative.

use crate::error::{Error, Result};
use crate::expr::{eval, BranchState, MeroExpr, C64};
use crate::matrix::{ExprMatrix, MatrixKind};
use crate::psl2::Ext;

/// Hyperbolic Gauss map `G` and secondary Gauss map `g` of a null curve.
#[derive(Debug, Clone)]
pub struct NullData {
    pub big_g: MeroExpr,
    pub g: MeroExpr,
}

impl NullData {
    pub fn new(big_g: MeroExpr, g: MeroExpr) -> Self {
        NullData { big_g, g }
    }
}

/// Deterministic probe points used for "vanishes identically" decisions.
pub const PROBES: [C64; 6] = [
    C64::new(0.37, 0.21),
    C64::new(1.31, -0.64),
    C64::new(-0.83, 1.12),
    C64::new(2.17, 0.43),
    C64::new(-1.54, -0.97),
    C64::new(0.58, 1.86),
];

/// Numerically decide whether `e` is constant: its derivative vanishes (or
/// the derivative is the literal 0) at every probe where it can be evaluated.
pub fn is_numerically_constant(e: &MeroExpr) -> bool {
    let d = e.derivative();
    if d.is_literal_zero() {
        return true;
    }
    let mut seen = 0;
    for z in PROBES {
        let (Ok(v), Ok(dv)) = (
            eval(e, z, &BranchState::principal()),
            eval(&d, z, &BranchState::principal()),
        ) else {
            continue;
        };
        seen += 1;
        if dv.norm() > 1e-10 * (1.0 + v.norm()) {
            return false;
        }
    }
    seen >= 3
}

/// Small's formula:
/// `F = [[G a' - a, G b' - b], [a', b']]` with `a = sqrt(dG/dg)`, `b = -g a`
/// and `' = d/dG`.
pub fn small_null(data: &NullData) -> Result<ExprMatrix> {
    let (gg, g) = (&data.big_g, &data.g);
    if is_numerically_constant(gg) {
        return Err(Error::ConstantInput("G"));
    }
    if is_numerically_constant(g) {
        return Err(Error::ConstantInput("g"));
    }
    let dgg = gg.derivative();
    let a = MeroExpr::sqrt(&(&dgg / &g.derivative()));
    let b = -(g * &a);
    let c = &a.derivative() / &dgg;
    let d = &b.derivative() / &dgg;
    let big_a = &(gg * &c) - &a;
    let big_b = &(gg * &d) - &b;
    let f = ExprMatrix::new(big_a, big_b, c, d, MatrixKind::Null);
    if is_constant_curve(&f) {
        return Err(Error::GIsMoebiusOfG);
    }
    Ok(f)
}

/// True when `dF` vanishes at every (and at least 3) evaluable probe points.
fn is_constant_curve(f: &ExprMatrix) -> bool {
    let df = f.derivative();
    let mut seen = 0;
    for z in PROBES {
        let st = match f.branch_at(z, &BranchState::principal()) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let (Ok(v), Ok(dv)) = (f.eval(z, &st), df.eval(z, &st)) else {
            continue;
        };
        seen += 1;
        if dv.frobenius() > 1e-10 * (1.0 + v.frobenius()) {
            return false;
        }
    }
    seen >= 3
}

fn degenerate_pair(p: C64, q: C64, scale: f64) -> bool {
    p.norm() + q.norm() <= 1e-12 * scale.max(1.0)
}

/// `(G, g) = (dA/dC, -dB/dA)` at `z`, falling back to `dB/dD` and `-dD/dC`
/// where a quotient pair vanishes.
pub fn gauss_from_null(f: &ExprMatrix, z: C64, branch: &BranchState) -> Result<(Ext, Ext)> {
    let st = f.branch_at(z, branch)?;
    let m = f.eval(z, &st)?;
    let dm = f.derivative().eval(z, &st)?;
    let scale = m.frobenius();
    let big_g = if !degenerate_pair(dm.a, dm.c, scale) {
        Ext::ratio(dm.a, dm.c)
    } else if !degenerate_pair(dm.b, dm.d, scale) {
        Ext::ratio(dm.b, dm.d)
    } else {
        None
    };
    let g = if !degenerate_pair(dm.a, dm.b, scale) {
        Ext::ratio(-dm.b, dm.a)
    } else if !degenerate_pair(dm.c, dm.d, scale) {
        Ext::ratio(-dm.d, dm.c)
    } else {
        None
    };
    match (big_g, g) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(Error::AllBranchesDegenerate),
    }
}

/// The entries of `α = F⁻¹ dF` (using `det F = 1`), as expressions.
pub fn maurer_cartan(f: &ExprMatrix) -> [MeroExpr; 4] {
    let [a, b, c, d] = f.full_entries();
    let (da, db, dc, dd) = (a.derivative(), b.derivative(), c.derivative(), d.derivative());
    [
        &(&d * &da) - &(&b * &dc),
        &(&d * &db) - &(&b * &dd),
        &(&a * &dc) - &(&c * &da),
        &(&a * &dd) - &(&c * &db),
    ]
}

/// Secondary Gauss map from the Maurer-Cartan form: `α11/α21`, or
/// `α12/α22` if the first pair vanishes.
pub fn secondary_gauss_via_mc(f: &ExprMatrix, z: C64, branch: &BranchState) -> Result<Ext> {
    let st = f.branch_at(z, branch)?;
    let m = f.eval(z, &st)?;
    let dm = f.derivative().eval(z, &st)?;
    let scale = m.frobenius();
    // dA ≡ dB ≡ 0 makes g constant; the extraction has nothing to recover
    if degenerate_pair(dm.a, dm.b, scale) {
        return Err(Error::DegenerateAlpha);
    }
    let alpha = maurer_cartan(f);
    let v: Vec<C64> = alpha
        .iter()
        .map(|e| eval(e, z, &st))
        .collect::<std::result::Result<_, _>>()?;
    if !degenerate_pair(v[0], v[2], scale) {
        Ext::ratio(v[0], v[2]).ok_or(Error::DegenerateAlpha)
    } else if !degenerate_pair(v[1], v[3], scale) {
        Ext::ratio(v[1], v[3]).ok_or(Error::DegenerateAlpha)
    } else {
        Err(Error::DegenerateAlpha)
    }
}

/// Coefficient of the Hopf differential `Q = (A dC - C dA) dg`.
pub fn hopf_null(f: &ExprMatrix, g: &MeroExpr) -> MeroExpr {
    let [a, _, c, _] = f.full_entries();
    &(&(&a * &c.derivative()) - &(&c * &a.derivative())) * &g.derivative()
}

/// `S(f) = (f''/f')' - (f''/f')^2 / 2`.
pub fn schwarzian(f: &MeroExpr) -> Result<MeroExpr> {
    if is_numerically_constant(f) {
        return Err(Error::ConstantInput("f"));
    }
    Ok(schwarzian_from_derivative(&f.derivative()))
}

/// The Schwarzian of any primitive of `df`; only `df` is needed.
pub fn schwarzian_from_derivative(df: &MeroExpr) -> MeroExpr {
    let l = &df.derivative() / df;
    &l.derivative() - &(&MeroExpr::real(0.5) * &MeroExpr::powi(&l, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::psl2::{psl_distance, Mat2C};

    fn nd(a: &str, b: &str) -> NullData {
        NullData::new(parse_expr(a).unwrap(), parse_expr(b).unwrap())
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn small_formula_hand_expanded_value() {
        let f = small_null(&nd("z", "z^2")).unwrap();
        let v = f.eval_principal(c(1.0, 0.0)).unwrap();
        let k = c(-1.0 / (2.0 * 2f64.sqrt()), 0.0);
        let want = Mat2C::new(k * 3.0, k, k, k * 3.0);
        assert!(psl_distance(&v, &want) < 1e-14, "{}", v);
        assert!((v.det() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn moebius_pair_is_rejected() {
        assert_eq!(small_null(&nd("z", "2*z+1")).unwrap_err(), Error::GIsMoebiusOfG);
        assert_eq!(small_null(&nd("z", "(2*z+1)/(z+1)")).unwrap_err(), Error::GIsMoebiusOfG);
        assert_eq!(small_null(&nd("3", "z")).unwrap_err(), Error::ConstantInput("G"));
    }

    #[test]
    fn gauss_maps_round_trip() {
        let f = small_null(&nd("z", "z^2")).unwrap();
        let (gg, g) = gauss_from_null(&f, c(2.0, 0.0), &BranchState::principal()).unwrap();
        assert!(gg.rel_error(Ext::Finite(c(2.0, 0.0))) < 1e-12);
        assert!(g.rel_error(Ext::Finite(c(4.0, 0.0))) < 1e-12);
        let f = small_null(&nd("z", "z^3")).unwrap();
        let (gg, g) = gauss_from_null(&f, c(1.0, 0.0), &BranchState::principal()).unwrap();
        assert!(gg.rel_error(Ext::Finite(c(1.0, 0.0))) < 1e-12);
        assert!(g.rel_error(Ext::Finite(c(1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn constant_curve_has_no_gauss_maps() {
        let one = MeroExpr::one();
        let f = ExprMatrix::new(one.clone(), MeroExpr::zero(), MeroExpr::zero(), one, MatrixKind::Null);
        assert_eq!(
            gauss_from_null(&f, c(1.0, 0.0), &BranchState::principal()).unwrap_err(),
            Error::AllBranchesDegenerate
        );
    }

    #[test]
    fn maurer_cartan_secondary_gauss() {
        let f = small_null(&nd("z", "z^2")).unwrap();
        let g = secondary_gauss_via_mc(&f, c(3.0, 0.0), &BranchState::principal()).unwrap();
        assert!(g.rel_error(Ext::Finite(c(9.0, 0.0))) < 1e-12);
        let f = small_null(&nd("z", "exp(z)")).unwrap();
        let g = secondary_gauss_via_mc(&f, c(1.0, 0.0), &BranchState::principal()).unwrap();
        assert!(g.rel_error(Ext::Finite(c(std::f64::consts::E, 0.0))) < 1e-12);
        // dA ≡ dB ≡ 0
        let f = ExprMatrix::new(
            MeroExpr::one(),
            MeroExpr::zero(),
            MeroExpr::var(),
            MeroExpr::one(),
            MatrixKind::Plain,
        );
        assert_eq!(
            secondary_gauss_via_mc(&f, c(1.0, 0.0), &BranchState::principal()).unwrap_err(),
            Error::DegenerateAlpha
        );
    }

    #[test]
    fn hopf_matches_schwarzian_at_one() {
        let d = nd("z", "z^2");
        let f = small_null(&d).unwrap();
        let q = eval(&hopf_null(&f, &d.g), c(1.0, 0.0), &BranchState::principal()).unwrap();
        assert!((q - c(-0.75, 0.0)).norm() < 1e-13, "{}", q);
    }

    #[test]
    fn schwarzian_examples() {
        let s = schwarzian(&parse_expr("z").unwrap()).unwrap();
        assert!(eval(&s, c(0.4, 0.2), &BranchState::principal()).unwrap().norm() < 1e-15);
        let s = schwarzian(&parse_expr("(2*z+1)/(z+1)").unwrap()).unwrap();
        for z in PROBES {
            assert!(eval(&s, z, &BranchState::principal()).unwrap().norm() < 1e-9);
        }
        let s = schwarzian(&parse_expr("z^2").unwrap()).unwrap();
        let z = c(1.5, -0.5);
        let want = -1.5 / (z * z);
        assert!((eval(&s, z, &BranchState::principal()).unwrap() - want).norm() < 1e-13);
        assert!(schwarzian(&MeroExpr::real(2.0)).is_err());
    }
}
