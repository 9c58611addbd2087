//! The rational subclass: conversion to numerator/denominator polynomials,
//! polynomial roots, pole orders and simple-pole partial fractions.

use super::{ExprError, Kind, MeroExpr, C64};

/// Dense polynomial with complex coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(Vec<C64>);

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Poly(coeffs);
        p.trim();
        p
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    pub fn z() -> Self {
        Poly(vec![ZERO, ONE])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial has degree -1.
    pub fn degree(&self) -> i32 {
        self.0.len() as i32 - 1
    }

    fn trim(&mut self) {
        let scale = self.0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while let Some(last) = self.0.last() {
            if last.norm() <= 1e-13 * scale || *last == ZERO {
                self.0.pop();
            } else {
                break;
            }
        }
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.0.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.0.get(k).copied().unwrap_or(ZERO) + other.0.get(k).copied().unwrap_or(ZERO)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-ONE))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly(vec![]);
        }
        let mut out = vec![ZERO; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn powi(&self, n: u32) -> Poly {
        (0..n).fold(Poly::constant(ONE), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder of long division. Panics on a zero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dn = d.0.len();
        if self.0.len() < dn {
            return (Poly(vec![]), self.clone());
        }
        let lead = d.0[dn - 1];
        let mut r = self.0.clone();
        let mut q = vec![ZERO; r.len() - dn + 1];
        for k in (0..q.len()).rev() {
            let coef = r[k + dn - 1] / lead;
            q[k] = coef;
            for (j, dc) in d.0.iter().enumerate() {
                r[k + j] -= coef * dc;
            }
        }
        r.truncate(dn - 1);
        (Poly::new(q), Poly::new(r))
    }

    /// Coefficients of `P(p + w)` in powers of `w`.
    pub fn taylor_at(&self, p: C64) -> Vec<C64> {
        let mut c = self.0.clone();
        let n = c.len();
        for k in 0..n {
            for j in (k..n - 1).rev() {
                let t = c[j + 1] * p;
                c[j] += t;
            }
        }
        c
    }

    /// Order of vanishing at `p`, judged relative to the size each Taylor
    /// coefficient would have without cancellation.
    pub fn multiplicity_at(&self, p: C64, rel_tol: f64) -> u32 {
        if self.is_zero() {
            return u32::MAX;
        }
        let t = self.taylor_at(p);
        let r = p.norm();
        for (k, tk) in t.iter().enumerate() {
            // Σ_j |c_j| C(j,k) r^(j-k)
            let mut scale = 0.0;
            let mut binom = 1.0;
            for j in k..self.0.len() {
                if j > k {
                    binom = binom * j as f64 / (j - k) as f64;
                }
                scale += self.0[j].norm() * binom * r.powi((j - k) as i32);
            }
            if tk.norm() > rel_tol * scale {
                return k as u32;
            }
        }
        (t.len() - 1) as u32
    }

    /// All roots with multiplicity, by the Aberth-Ehrlich iteration.
    pub fn roots(&self) -> Vec<C64> {
        let mut c = self.0.clone();
        let mut out = Vec::new();
        while c.len() > 1 && c[0] == ZERO {
            c.remove(0);
            out.push(ZERO);
        }
        let n = c.len().saturating_sub(1);
        if n == 0 {
            return out;
        }
        let lead = c[n];
        let monic: Vec<C64> = c.iter().map(|x| x / lead).collect();
        if n == 1 {
            out.push(-monic[0]);
            return out;
        }
        let r0 = monic[0].norm().powf(1.0 / n as f64).max(1e-3);
        let mut z: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
            .collect();
        let horner = |x: C64| -> (C64, C64) {
            let mut p = ONE;
            let mut dp = ZERO;
            for k in (0..n).rev() {
                dp = dp * x + p;
                p = p * x + monic[k];
            }
            (p, dp)
        };
        for _ in 0..2000 {
            let mut worst: f64 = 0.0;
            for k in 0..n {
                let (p, dp) = horner(z[k]);
                if p == ZERO {
                    continue;
                }
                let ratio = if dp == ZERO { ONE } else { p / dp };
                let s: C64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| {
                        let d = z[k] - z[j];
                        if d == ZERO {
                            C64::new(1e30, 0.0)
                        } else {
                            ONE / d
                        }
                    })
                    .sum();
                let w = ratio / (ONE - ratio * s);
                if w.re.is_finite() && w.im.is_finite() {
                    z[k] -= w;
                    worst = worst.max(w.norm() / (1.0 + z[k].norm()));
                }
            }
            if worst < 1e-16 {
                break;
            }
        }
        out.extend(z);
        out
    }

    /// Distinct roots: clusters of nearby roots are merged to their mean.
    pub fn distinct_roots(&self) -> Vec<C64> {
        let roots = self.roots();
        let mut clusters: Vec<(C64, usize)> = Vec::new();
        for r in roots {
            match clusters
                .iter_mut()
                .find(|(c, m)| (*c / *m as f64 - r).norm() <= 1e-5 * (1.0 + r.norm()))
            {
                Some((c, m)) => {
                    *c += r;
                    *m += 1;
                }
                None => clusters.push((r, 1)),
            }
        }
        clusters
            .into_iter()
            .map(|(c, m)| self.refine_multiple_root(c / m as f64, m))
            .collect()
    }

    /// A root of multiplicity `m` is a simple root of the `(m-1)`-th
    /// derivative; polish it there with Newton's method.
    fn refine_multiple_root(&self, mut x: C64, m: usize) -> C64 {
        if m <= 1 {
            return x;
        }
        let d = (1..m).fold(self.clone(), |p, _| p.derivative());
        let dd = d.derivative();
        for _ in 0..50 {
            let f = d.eval(x);
            let fp = dd.eval(x);
            if fp == ZERO {
                break;
            }
            let step = f / fp;
            x -= step;
            if step.norm() <= 1e-16 * (1.0 + x.norm()) {
                break;
            }
        }
        x
    }
}

/// A quotient of polynomials (not necessarily in lowest terms).
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: Poly,
    pub den: Poly,
}

impl Rational {
    pub fn eval(&self, z: C64) -> C64 {
        self.num.eval(z) / self.den.eval(z)
    }

    fn combine(a: &Rational, b: &Rational, sign: f64) -> Rational {
        if a.den == b.den {
            return Rational {
                num: a.num.add(&b.num.scale(C64::new(sign, 0.0))),
                den: a.den.clone(),
            };
        }
        Rational {
            num: a
                .num
                .mul(&b.den)
                .add(&b.num.mul(&a.den).scale(C64::new(sign, 0.0))),
            den: a.den.mul(&b.den),
        }
    }
}

const MULT_TOL: f64 = 1e-8;

/// Convert a rational-subclass expression; `None` for anything containing
/// `exp`, `log`, `sqrt` or a non-integer power, or for a division by zero.
pub fn to_rational(e: &MeroExpr) -> Option<Rational> {
    Some(match e.kind() {
        Kind::Const(c) => Rational {
            num: Poly::constant(*c),
            den: Poly::constant(ONE),
        },
        Kind::Var => Rational {
            num: Poly::z(),
            den: Poly::constant(ONE),
        },
        Kind::Add(a, b) => Rational::combine(&to_rational(a)?, &to_rational(b)?, 1.0),
        Kind::Sub(a, b) => Rational::combine(&to_rational(a)?, &to_rational(b)?, -1.0),
        Kind::Mul(a, b) => {
            let (x, y) = (to_rational(a)?, to_rational(b)?);
            Rational {
                num: x.num.mul(&y.num),
                den: x.den.mul(&y.den),
            }
        }
        Kind::Div(a, b) => {
            let (x, y) = (to_rational(a)?, to_rational(b)?);
            if y.num.is_zero() {
                return None;
            }
            Rational {
                num: x.num.mul(&y.den),
                den: x.den.mul(&y.num),
            }
        }
        Kind::PowInt(a, n) => {
            let x = to_rational(a)?;
            let m = n.unsigned_abs();
            if *n >= 0 {
                Rational {
                    num: x.num.powi(m),
                    den: x.den.powi(m),
                }
            } else {
                if x.num.is_zero() {
                    return None;
                }
                Rational {
                    num: x.den.powi(m),
                    den: x.num.powi(m),
                }
            }
        }
        Kind::Pow(..) | Kind::Exp(_) | Kind::Log(_) | Kind::Sqrt(_) => return None,
    })
}

fn rational_of(e: &MeroExpr) -> Result<Rational, ExprError> {
    to_rational(e).ok_or(ExprError::NotRational)
}

fn order_at(r: &Rational, p: C64) -> i64 {
    let md = r.den.multiplicity_at(p, MULT_TOL) as i64;
    if r.num.is_zero() {
        return i64::MIN;
    }
    let mn = r.num.multiplicity_at(p, MULT_TOL) as i64;
    mn - md
}

/// Order of the pole of `e` at the finite point `p` (0 if regular there).
pub fn pole_order(e: &MeroExpr, p: C64) -> Result<u32, ExprError> {
    let r = rational_of(e)?;
    Ok((-order_at(&r, p)).max(0) as u32)
}

/// Order of the zero of `e` at the finite point `p` (0 if nonzero or a pole).
pub fn zero_order(e: &MeroExpr, p: C64) -> Result<u32, ExprError> {
    let r = rational_of(e)?;
    let o = order_at(&r, p);
    if o == i64::MIN {
        return Ok(u32::MAX);
    }
    Ok(o.max(0) as u32)
}

/// `deg num - deg den`: the pole order of the function `e` at infinity
/// (negative values are zero orders).
pub fn pole_order_at_infinity(e: &MeroExpr) -> Result<i32, ExprError> {
    let r = rational_of(e)?;
    Ok(r.num.degree() - r.den.degree())
}

/// Pole order at infinity of the 1-form `e dz` (with `z = 1/w`, `dz = -dw/w^2`).
pub fn form_pole_order_at_infinity(e: &MeroExpr) -> Result<i32, ExprError> {
    Ok(pole_order_at_infinity(e)? + 2)
}

/// Finite poles of `e` with their orders.
pub fn finite_poles(e: &MeroExpr) -> Result<Vec<(C64, u32)>, ExprError> {
    let r = rational_of(e)?;
    Ok(r.den
        .distinct_roots()
        .into_iter()
        .filter_map(|p| {
            let o = -order_at(&r, p);
            (o > 0).then_some((p, o as u32))
        })
        .collect())
}

/// `e = poly_part(z) + Σ residue / (z - pole)`, for rational `e` whose finite
/// poles are all simple.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplePoleDecomposition {
    pub poly_part: Poly,
    /// `(pole, residue)` pairs.
    pub terms: Vec<(C64, C64)>,
}

/// Partial fractions when all finite poles are simple; `Ok(None)` if some
/// pole has higher order.
pub fn simple_pole_decomposition(
    e: &MeroExpr,
) -> Result<Option<SimplePoleDecomposition>, ExprError> {
    let r = rational_of(e)?;
    let mut terms = Vec::new();
    for p in r.den.distinct_roots() {
        let md = r.den.multiplicity_at(p, MULT_TOL) as usize;
        let mn = r.num.multiplicity_at(p, MULT_TOL) as usize;
        if mn >= md {
            continue;
        }
        if md - mn > 1 {
            return Ok(None);
        }
        // lim (z-p) N/D = N_(md-1) / D_md in Taylor coefficients at p
        let tn = r.num.taylor_at(p);
        let td = r.den.taylor_at(p);
        terms.push((p, tn[md - 1] / td[md]));
    }
    let (q, _) = r.num.divrem(&r.den);
    Ok(Some(SimplePoleDecomposition {
        poly_part: q,
        terms,
    }))
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pole_orders() {
        let e = parse_expr("1/(2*z)").unwrap();
        assert_eq!(pole_order(&e, c(0.0, 0.0)).unwrap(), 1);
        let e = parse_expr("1/z^2").unwrap();
        assert_eq!(pole_order(&e, c(0.0, 0.0)).unwrap(), 2);
        let e = parse_expr("z^2/(z^3-1)").unwrap();
        assert_eq!(pole_order(&e, c(1.0, 0.0)).unwrap(), 1);
        assert_eq!(pole_order(&e, c(2.0, 0.0)).unwrap(), 0);
        assert_eq!(zero_order(&e, c(0.0, 0.0)).unwrap(), 2);
        assert_eq!(form_pole_order_at_infinity(&e).unwrap(), 1);
        assert_eq!(
            pole_order(&parse_expr("sqrt(z)").unwrap(), c(0.0, 0.0)),
            Err(ExprError::NotRational)
        );
    }

    #[test]
    fn cancellation_is_seen() {
        // (z-1)/(z^2-1) is regular at 1
        let e = parse_expr("(z-1)/(z^2-1)").unwrap();
        assert_eq!(pole_order(&e, c(1.0, 0.0)).unwrap(), 0);
        let poles = finite_poles(&e).unwrap();
        assert_eq!(poles.len(), 1);
        assert!((poles[0].0 + 1.0).norm() < 1e-12);
    }

    #[test]
    fn roots_of_unity() {
        let p = Poly::new(vec![c(-1.0, 0.0), ZERO, ZERO, ONE]);
        let mut r = p.roots();
        r.sort_by(|a, b| a.arg().total_cmp(&b.arg()));
        for (k, root) in r.iter().enumerate() {
            let want = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 - 1.0) / 3.0);
            assert!((root - want).norm() < 1e-14, "{} vs {}", root, want);
        }
    }

    #[test]
    fn multiple_roots_cluster() {
        // (z-2)^3 (z+i)
        let p = Poly::new(vec![c(-2.0, 0.0), ONE])
            .powi(3)
            .mul(&Poly::new(vec![c(0.0, 1.0), ONE]));
        let d = p.distinct_roots();
        assert_eq!(d.len(), 2);
        let two = d.iter().find(|r| (*r - 2.0).norm() < 1e-4).unwrap();
        assert!((two - 2.0).norm() < 1e-12);
        assert_eq!(p.multiplicity_at(*two, MULT_TOL), 3);
    }

    #[test]
    fn partial_fractions_of_simple_poles() {
        let e = parse_expr("z^2/(z^3-1) + z").unwrap();
        let d = simple_pole_decomposition(&e).unwrap().unwrap();
        assert_eq!(d.terms.len(), 3);
        for (_, r) in &d.terms {
            assert!((r - 1.0 / 3.0).norm() < 1e-12);
        }
        let z = c(0.3, 0.7);
        let back = d.poly_part.eval(z) + d.terms.iter().map(|(p, r)| r / (z - p)).sum::<C64>();
        let direct = super::super::eval_principal(&e, z).unwrap();
        assert!((back - direct).norm() < 1e-12);
        assert!(simple_pole_decomposition(&parse_expr("1/z^2").unwrap())
            .unwrap()
            .is_none());
    }

    #[test]
    fn divrem_reconstructs() {
        let a = Poly::new(vec![c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let b = Poly::new(vec![c(-1.0, 0.0), c(1.0, 0.0)]);
        let (q, r) = a.divrem(&b);
        let z = c(0.7, -0.2);
        assert!((q.eval(z) * b.eval(z) + r.eval(z) - a.eval(z)).norm() < 1e-13);
    }
}
