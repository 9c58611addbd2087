use std::collections::HashMap;

use super::{Kind, MeroExpr, C64};

/// Symbolic derivative. Shared subexpressions are differentiated once, and
/// derivatives of multivalued nodes reuse the node itself (e.g. `d sqrt(f) =
/// f' / (2 sqrt(f))`) so that branch choices carry over to the derivative.
pub(crate) fn differentiate(e: &MeroExpr) -> MeroExpr {
    let mut memo = HashMap::new();
    go(e, &mut memo)
}

fn go(e: &MeroExpr, memo: &mut HashMap<*const (), MeroExpr>) -> MeroExpr {
    if let Some(d) = memo.get(&e.ptr()) {
        return d.clone();
    }
    let d = match e.kind() {
        Kind::Const(_) => MeroExpr::zero(),
        Kind::Var => MeroExpr::one(),
        Kind::Add(a, b) => &go(a, memo) + &go(b, memo),
        Kind::Sub(a, b) => &go(a, memo) - &go(b, memo),
        Kind::Mul(a, b) => {
            let da = go(a, memo);
            let db = go(b, memo);
            &(&da * b) + &(a * &db)
        }
        Kind::Div(a, b) => {
            let da = go(a, memo);
            let db = go(b, memo);
            // (a' b - a b') / b^2
            &(&(&da * b) - &(a * &db)) / &MeroExpr::powi(b, 2)
        }
        Kind::PowInt(a, n) => {
            let da = go(a, memo);
            let k = MeroExpr::real(*n as f64);
            &(&k * &MeroExpr::powi(a, n - 1)) * &da
        }
        Kind::Pow(a, c) => {
            let da = go(a, memo);
            // c a^c a'/a keeps the same multivalued node
            &(&MeroExpr::constant(*c) * e) * &(&da / a)
        }
        Kind::Exp(a) => {
            let da = go(a, memo);
            e * &da
        }
        Kind::Log(a) => {
            let da = go(a, memo);
            &da / a
        }
        Kind::Sqrt(a) => {
            let da = go(a, memo);
            &da / &(&MeroExpr::constant(C64::new(2.0, 0.0)) * e)
        }
    };
    memo.insert(e.ptr(), d.clone());
    d
}

#[cfg(test)]
mod tests {
    use super::super::{eval_principal, parse_expr};
    use super::*;

    fn fd(e: &MeroExpr, z: C64) -> C64 {
        // five-point central difference, used only as an independent check
        let h = 1e-4 * (1.0 + z.norm());
        let f = |w: C64| eval_principal(e, w).unwrap();
        let hc = C64::new(h, 0.0);
        (f(z - hc * 2.0) - f(z + hc * 2.0) + (f(z + hc) - f(z - hc)) * 8.0) / (hc * 12.0)
    }

    #[test]
    fn polynomial_derivative() {
        let d = differentiate(&parse_expr("z^2").unwrap());
        for x in [0.5, 1.0, -2.0] {
            let v = eval_principal(&d, C64::new(x, 0.3)).unwrap();
            assert!((v - C64::new(2.0 * x, 0.6)).norm() < 1e-14);
        }
    }

    #[test]
    fn exp_is_its_own_derivative() {
        let e = parse_expr("exp(z)").unwrap();
        let d = differentiate(&e);
        let z = C64::new(0.3, -1.2);
        assert!((eval_principal(&d, z).unwrap() - z.exp()).norm() < 1e-14);
    }

    #[test]
    fn half_power_matches_finite_differences() {
        let e = parse_expr("z^(1/2)").unwrap();
        let d = differentiate(&e);
        // points away from the negative real axis (principal cut)
        for k in 0..10 {
            let z = C64::from_polar(0.5 + 0.3 * k as f64, -1.2 + 0.25 * k as f64);
            let exact = 0.5 * z.powf(-0.5);
            let got = eval_principal(&d, z).unwrap();
            assert!((got - exact).norm() / exact.norm() < 1e-12);
            assert!((fd(&e, z) - exact).norm() / exact.norm() < 1e-6);
        }
    }

    #[test]
    fn chain_rule_through_everything() {
        let e = parse_expr("log(1 + sqrt(z)) * exp(z^2/(z+3)) - pow(z, 0.3+0.1*i)").unwrap();
        let d = differentiate(&e);
        let z = C64::new(1.3, 0.4);
        let got = eval_principal(&d, z).unwrap();
        let want = fd(&e, z);
        assert!((got - want).norm() / want.norm() < 1e-8, "{} vs {}", got, want);
    }
}
