//! Meromorphic expressions of one complex variable `z`.
//!
//! A [`MeroExpr`] is an immutable, reference-counted expression DAG. Nodes are
//! built through smart constructors that fold constants locally (there is no
//! general simplifier). Multivalued nodes (`log`, `sqrt`, non-integer powers)
//! are evaluated relative to a [`BranchState`], which records the continuous
//! logarithm of each multivalued argument along an analytic continuation.

mod diff;
mod eval;
mod parse;
mod path;
mod quad;
mod rational;

use std::fmt;
use std::ops;
use std::sync::Arc;

pub use num_complex::Complex64 as C64;

pub use eval::{
    continue_along, eval, eval_principal, BranchState, ContinuationOptions, Tracker,
};
pub use parse::{parse_expr, parse_expr_with, ParseError, Params};
pub use path::PathC;
pub use quad::{integrate_path, loop_period, path_integral, QuadOptions};
pub use rational::{
    finite_poles, form_pole_order_at_infinity, pole_order, pole_order_at_infinity,
    simple_pole_decomposition, to_rational, zero_order, Poly, Rational, SimplePoleDecomposition,
};

/// Errors raised by evaluation, continuation, quadrature and pole analysis.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("pole at z = {z}")]
    Pole { z: C64 },
    #[error("branch point at z = {z}")]
    BranchPoint { z: C64 },
    #[error("path passes within {clearance:e} of a singularity near z = {z}")]
    PathTooClose { z: C64, clearance: f64 },
    #[error("quadrature failed: {reason}")]
    QuadratureFailed { reason: String },
    #[error("expression is not rational in z")]
    NotRational,
    #[error("invalid path: {0}")]
    InvalidPath(String),
}

/// The node kinds of a [`MeroExpr`].
#[derive(Debug, Clone)]
pub enum Kind {
    Const(C64),
    Var,
    Add(MeroExpr, MeroExpr),
    Sub(MeroExpr, MeroExpr),
    Mul(MeroExpr, MeroExpr),
    Div(MeroExpr, MeroExpr),
    PowInt(MeroExpr, i32),
    /// Power with a constant, non-integer complex exponent.
    Pow(MeroExpr, C64),
    Exp(MeroExpr),
    Log(MeroExpr),
    Sqrt(MeroExpr),
}

struct Node {
    kind: Kind,
    hash: u64,
}

/// An expression for a meromorphic, possibly multivalued, function of `z`.
#[derive(Clone)]
pub struct MeroExpr(Arc<Node>);

fn mix(mut x: u64) -> u64 {
    // splitmix64 finalizer
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn combine(tag: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(mix(tag), |acc, &p| mix(acc.rotate_left(17) ^ p))
}

fn const_bits(c: C64) -> u64 {
    // normalize -0.0 so that structurally equal constants hash equally
    let re = if c.re == 0.0 { 0.0 } else { c.re };
    let im = if c.im == 0.0 { 0.0 } else { c.im };
    combine(0xC0, &[re.to_bits(), im.to_bits()])
}

fn is_zero(c: C64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

fn is_one(c: C64) -> bool {
    c.re == 1.0 && c.im == 0.0
}

fn finite(c: C64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

/// If `c` is a real integer representable as `i32`, return it.
pub(crate) fn as_int(c: C64) -> Option<i32> {
    if c.im == 0.0 && c.re.fract() == 0.0 && c.re.abs() < i32::MAX as f64 {
        Some(c.re as i32)
    } else {
        None
    }
}

impl MeroExpr {
    fn from_kind(kind: Kind) -> Self {
        let hash = match &kind {
            Kind::Const(c) => const_bits(*c),
            Kind::Var => mix(0x7A),
            Kind::Add(a, b) => combine(1, &[a.hash(), b.hash()]),
            Kind::Sub(a, b) => combine(2, &[a.hash(), b.hash()]),
            Kind::Mul(a, b) => combine(3, &[a.hash(), b.hash()]),
            Kind::Div(a, b) => combine(4, &[a.hash(), b.hash()]),
            Kind::PowInt(a, n) => combine(5, &[a.hash(), *n as i64 as u64]),
            Kind::Pow(a, c) => combine(6, &[a.hash(), const_bits(*c)]),
            Kind::Exp(a) => combine(7, &[a.hash()]),
            Kind::Log(a) => combine(8, &[a.hash()]),
            Kind::Sqrt(a) => combine(9, &[a.hash()]),
        };
        MeroExpr(Arc::new(Node { kind, hash }))
    }

    pub fn kind(&self) -> &Kind {
        &self.0.kind
    }

    /// Structural hash; equal for structurally identical expressions.
    pub fn hash(&self) -> u64 {
        self.0.hash
    }

    pub(crate) fn ptr(&self) -> *const () {
        Arc::as_ptr(&self.0) as *const ()
    }

    pub fn constant(c: C64) -> Self {
        Self::from_kind(Kind::Const(c))
    }

    pub fn real(x: f64) -> Self {
        Self::constant(C64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::constant(C64::new(0.0, 1.0))
    }

    /// The coordinate `z`.
    pub fn var() -> Self {
        Self::from_kind(Kind::Var)
    }

    pub fn as_const(&self) -> Option<C64> {
        match self.kind() {
            Kind::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// True when the expression is the literal constant zero.
    pub fn is_literal_zero(&self) -> bool {
        self.as_const().is_some_and(is_zero)
    }

    /// True when the expression does not depend on `z`.
    pub fn is_constant(&self) -> bool {
        fn walk(e: &MeroExpr) -> bool {
            match e.kind() {
                Kind::Const(_) => true,
                Kind::Var => false,
                Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                    walk(a) && walk(b)
                }
                Kind::PowInt(a, _)
                | Kind::Pow(a, _)
                | Kind::Exp(a)
                | Kind::Log(a)
                | Kind::Sqrt(a) => walk(a),
            }
        }
        walk(self)
    }

    /// True when the expression contains no `exp`, `log`, `sqrt` or
    /// non-integer power, i.e. it is a rational function of `z`.
    pub fn is_rational(&self) -> bool {
        fn walk(e: &MeroExpr) -> bool {
            match e.kind() {
                Kind::Const(_) | Kind::Var => true,
                Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                    walk(a) && walk(b)
                }
                Kind::PowInt(a, _) => walk(a),
                Kind::Pow(..) | Kind::Exp(_) | Kind::Log(_) | Kind::Sqrt(_) => false,
            }
        }
        walk(self)
    }

    /// Number of distinct nodes in the expression DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(e) = stack.pop() {
            if !seen.insert(e.ptr()) {
                continue;
            }
            match e.kind() {
                Kind::Const(_) | Kind::Var => {}
                Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
                Kind::PowInt(a, _)
                | Kind::Pow(a, _)
                | Kind::Exp(a)
                | Kind::Log(a)
                | Kind::Sqrt(a) => stack.push(a.clone()),
            }
        }
        seen.len()
    }

    pub fn add(a: &Self, b: &Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if finite(x + y) => Self::constant(x + y),
            (Some(x), _) if is_zero(x) => b.clone(),
            (_, Some(y)) if is_zero(y) => a.clone(),
            _ => Self::from_kind(Kind::Add(a.clone(), b.clone())),
        }
    }

    pub fn sub(a: &Self, b: &Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if finite(x - y) => Self::constant(x - y),
            (_, Some(y)) if is_zero(y) => a.clone(),
            (Some(x), _) if is_zero(x) => Self::neg(b),
            _ => Self::from_kind(Kind::Sub(a.clone(), b.clone())),
        }
    }

    pub fn mul(a: &Self, b: &Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if finite(x * y) => Self::constant(x * y),
            (Some(x), _) | (_, Some(x)) if is_zero(x) => Self::zero(),
            (Some(x), _) if is_one(x) => b.clone(),
            (_, Some(y)) if is_one(y) => a.clone(),
            // collapse c1*(c2*x) so repeated negation stays flat
            (Some(x), None) => match b.kind() {
                Kind::Mul(l, r) if l.as_const().is_some_and(|y| finite(x * y)) => {
                    Self::mul(&Self::constant(x * l.as_const().unwrap()), r)
                }
                _ => Self::from_kind(Kind::Mul(a.clone(), b.clone())),
            },
            _ => Self::from_kind(Kind::Mul(a.clone(), b.clone())),
        }
    }

    pub fn div(a: &Self, b: &Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if !is_zero(y) && finite(x / y) => Self::constant(x / y),
            (_, Some(y)) if is_one(y) => a.clone(),
            (Some(x), Some(y)) if is_zero(x) && !is_zero(y) => Self::zero(),
            (Some(x), None) if is_zero(x) => Self::zero(),
            _ => Self::from_kind(Kind::Div(a.clone(), b.clone())),
        }
    }

    pub fn neg(a: &Self) -> Self {
        Self::mul(&Self::real(-1.0), a)
    }

    pub fn scale(c: C64, a: &Self) -> Self {
        Self::mul(&Self::constant(c), a)
    }

    pub fn powi(a: &Self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        if n == 1 {
            return a.clone();
        }
        if let Some(x) = a.as_const() {
            if !(is_zero(x) && n < 0) {
                let v = x.powi(n);
                if finite(v) {
                    return Self::constant(v);
                }
            }
        }
        Self::from_kind(Kind::PowInt(a.clone(), n))
    }

    /// `a^c` for a constant exponent; integer exponents become [`Kind::PowInt`].
    pub fn powc(a: &Self, c: C64) -> Self {
        if let Some(n) = as_int(c) {
            return Self::powi(a, n);
        }
        if let Some(x) = a.as_const() {
            if !is_zero(x) {
                let v = (c * x.ln()).exp();
                if finite(v) {
                    return Self::constant(v);
                }
            }
        }
        Self::from_kind(Kind::Pow(a.clone(), c))
    }

    pub fn exp(a: &Self) -> Self {
        if let Some(x) = a.as_const() {
            let v = x.exp();
            if finite(v) {
                return Self::constant(v);
            }
        }
        Self::from_kind(Kind::Exp(a.clone()))
    }

    pub fn log(a: &Self) -> Self {
        if let Some(x) = a.as_const() {
            if !is_zero(x) {
                return Self::constant(x.ln());
            }
        }
        Self::from_kind(Kind::Log(a.clone()))
    }

    pub fn sqrt(a: &Self) -> Self {
        if let Some(x) = a.as_const() {
            return Self::constant(x.sqrt());
        }
        Self::from_kind(Kind::Sqrt(a.clone()))
    }

    /// Exact symbolic derivative with respect to `z`.
    pub fn derivative(&self) -> Self {
        diff::differentiate(self)
    }
}

/// Exact symbolic derivative with respect to `z`.
pub fn differentiate(e: &MeroExpr) -> MeroExpr {
    diff::differentiate(e)
}

impl PartialEq for MeroExpr {
    /// Structural equality (by hash).
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.hash() == other.hash()
    }
}

impl Eq for MeroExpr {}

fn fmt_real(x: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        write!(f, "(-{})", -x)
    } else {
        write!(f, "{}", x)
    }
}

fn fmt_const(c: C64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if c.im == 0.0 {
        fmt_real(c.re, f)
    } else if c.re == 0.0 {
        write!(f, "(")?;
        fmt_real(c.im, f)?;
        write!(f, "*i)")
    } else {
        write!(f, "(")?;
        fmt_real(c.re, f)?;
        write!(f, "+")?;
        fmt_real(c.im, f)?;
        write!(f, "*i)")
    }
}

/// Binding strength used to decide where `Display` needs parentheses.
fn precedence(e: &MeroExpr) -> u8 {
    match e.kind() {
        Kind::Add(..) | Kind::Sub(..) => 1,
        Kind::Mul(..) | Kind::Div(..) => 2,
        Kind::PowInt(..) => 3,
        _ => 4,
    }
}

/// Writes `e`, parenthesized when it binds looser than `min`.
fn fmt_operand(e: &MeroExpr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

/// Prints in the input grammar. Left-associative chains print flat; right
/// operands of equal precedence keep their parentheses. Powers with a
/// non-constant exponent print as `exp(log(..)*..)`, so a deep tower can
/// reparse with [`ParseError::TooDeep`] even
/// though the original text did not.
impl fmt::Display for MeroExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |a: &MeroExpr, op: &str, b: &MeroExpr, p: u8, f: &mut fmt::Formatter<'_>| {
            fmt_operand(a, p, f)?;
            write!(f, "{}", op)?;
            fmt_operand(b, p + 1, f)
        };
        match self.kind() {
            Kind::Const(c) => fmt_const(*c, f),
            Kind::Var => write!(f, "z"),
            Kind::Add(a, b) => binary(a, " + ", b, 1, f),
            Kind::Sub(a, b) => binary(a, " - ", b, 1, f),
            Kind::Mul(a, b) => binary(a, "*", b, 2, f),
            Kind::Div(a, b) => binary(a, "/", b, 2, f),
            Kind::PowInt(a, n) => {
                fmt_operand(a, 4, f)?;
                if *n < 0 {
                    write!(f, "^({})", n)
                } else {
                    write!(f, "^{}", n)
                }
            }
            Kind::Pow(a, c) => {
                write!(f, "pow({}, ", a)?;
                fmt_const(*c, f)?;
                write!(f, ")")
            }
            Kind::Exp(a) => write!(f, "exp({})", a),
            Kind::Log(a) => write!(f, "log({})", a),
            Kind::Sqrt(a) => write!(f, "sqrt({})", a),
        }
    }
}

impl fmt::Debug for MeroExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MeroExpr({})", self)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl ops::$trait<&MeroExpr> for &MeroExpr {
            type Output = MeroExpr;
            fn $method(self, rhs: &MeroExpr) -> MeroExpr {
                MeroExpr::$ctor(self, rhs)
            }
        }
        impl ops::$trait<MeroExpr> for MeroExpr {
            type Output = MeroExpr;
            fn $method(self, rhs: MeroExpr) -> MeroExpr {
                MeroExpr::$ctor(&self, &rhs)
            }
        }
        impl ops::$trait<&MeroExpr> for MeroExpr {
            type Output = MeroExpr;
            fn $method(self, rhs: &MeroExpr) -> MeroExpr {
                MeroExpr::$ctor(&self, rhs)
            }
        }
        impl ops::$trait<MeroExpr> for &MeroExpr {
            type Output = MeroExpr;
            fn $method(self, rhs: MeroExpr) -> MeroExpr {
                MeroExpr::$ctor(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl ops::Neg for &MeroExpr {
    type Output = MeroExpr;
    fn neg(self) -> MeroExpr {
        MeroExpr::neg(self)
    }
}

impl ops::Neg for MeroExpr {
    type Output = MeroExpr;
    fn neg(self) -> MeroExpr {
        MeroExpr::neg(&self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_fold_locally() {
        let z = MeroExpr::var();
        let two = MeroExpr::real(2.0);
        let e = &(&two * &MeroExpr::real(3.0)) + &z;
        match e.kind() {
            Kind::Add(a, _) => assert_eq!(a.as_const(), Some(C64::new(6.0, 0.0))),
            other => panic!("unexpected {:?}", other),
        }
        assert!((&z * &MeroExpr::zero()).is_literal_zero());
        assert_eq!(&z * &MeroExpr::one(), z);
        assert_eq!(MeroExpr::powi(&z, 1), z);
    }

    #[test]
    fn integer_exponent_becomes_powint() {
        let z = MeroExpr::var();
        assert!(matches!(
            MeroExpr::powc(&z, C64::new(3.0, 0.0)).kind(),
            Kind::PowInt(_, 3)
        ));
        assert!(matches!(
            MeroExpr::powc(&z, C64::new(0.5, 0.0)).kind(),
            Kind::Pow(..)
        ));
    }

    #[test]
    fn structural_hash_identifies_equal_trees() {
        let a = parse_expr("sqrt(z/(2*z+1))").unwrap();
        let b = parse_expr("sqrt(z/(2*z+1))").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), parse_expr("sqrt(z/(2*z+2))").unwrap().hash());
    }

    #[test]
    fn rational_and_constant_classification() {
        assert!(parse_expr("z^2/(z-1)").unwrap().is_rational());
        assert!(!parse_expr("sqrt(z)").unwrap().is_rational());
        assert!(parse_expr("sqrt(2)+1").unwrap().is_constant());
        assert!(!parse_expr("z^(1/2)").unwrap().is_rational());
    }
}
