//! 2x2 matrices of expressions: symbolic curves into SL(2,C).

use crate::error::Result;
use crate::expr::{eval, BranchState, ContinuationOptions, MeroExpr, PathC, Tracker, C64};
use crate::psl2::Mat2C;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Null,
    Legendrian,
    Plain,
}

/// `[[A, B], [C, D]]`, optionally multiplied through by a shared scalar
/// factor (typically a square root).
#[derive(Debug, Clone)]
pub struct ExprMatrix {
    pub a: MeroExpr,
    pub b: MeroExpr,
    pub c: MeroExpr,
    pub d: MeroExpr,
    pub shared_factor: Option<MeroExpr>,
    pub kind: MatrixKind,
}

impl ExprMatrix {
    pub fn new(a: MeroExpr, b: MeroExpr, c: MeroExpr, d: MeroExpr, kind: MatrixKind) -> Self {
        ExprMatrix {
            a,
            b,
            c,
            d,
            shared_factor: None,
            kind,
        }
    }

    pub fn with_factor(mut self, factor: MeroExpr) -> Self {
        self.shared_factor = Some(factor);
        self
    }

    /// Entries with the shared factor multiplied in.
    pub fn full_entries(&self) -> [MeroExpr; 4] {
        let f = |e: &MeroExpr| match &self.shared_factor {
            Some(s) => s * e,
            None => e.clone(),
        };
        [f(&self.a), f(&self.b), f(&self.c), f(&self.d)]
    }

    /// Entrywise derivative (kind `Plain`).
    pub fn derivative(&self) -> ExprMatrix {
        let [a, b, c, d] = self.full_entries();
        ExprMatrix::new(
            a.derivative(),
            b.derivative(),
            c.derivative(),
            d.derivative(),
            MatrixKind::Plain,
        )
    }

    /// Right multiplication by a constant matrix.
    pub fn mul_const(&self, m: &Mat2C) -> ExprMatrix {
        let k = |c: C64| MeroExpr::constant(c);
        let comb = |x: &MeroExpr, p: C64, y: &MeroExpr, q: C64| &(x * &k(p)) + &(y * &k(q));
        ExprMatrix {
            a: comb(&self.a, m.a, &self.b, m.c),
            b: comb(&self.a, m.b, &self.b, m.d),
            c: comb(&self.c, m.a, &self.d, m.c),
            d: comb(&self.c, m.b, &self.d, m.d),
            shared_factor: self.shared_factor.clone(),
            kind: self.kind,
        }
    }

    /// Symbolic `AD - BC` of the full entries.
    pub fn det_expr(&self) -> MeroExpr {
        let [a, b, c, d] = self.full_entries();
        &(&a * &d) - &(&b * &c)
    }

    pub fn tracker(&self) -> Tracker {
        let [a, b, c, d] = self.full_entries();
        Tracker::new(&[&a, &b, &c, &d])
    }

    /// A branch state valid at `z`: principal choices at `z` unless `base`
    /// already records them.
    pub fn branch_at(&self, z: C64, base: &BranchState) -> Result<BranchState> {
        Ok(self.tracker().init(z, base)?)
    }

    pub fn eval(&self, z: C64, branch: &BranchState) -> Result<Mat2C> {
        let f = match &self.shared_factor {
            Some(s) => eval(s, z, branch)?,
            None => C64::new(1.0, 0.0),
        };
        Ok(Mat2C::new(
            eval(&self.a, z, branch)?,
            eval(&self.b, z, branch)?,
            eval(&self.c, z, branch)?,
            eval(&self.d, z, branch)?,
        )
        .scale(f))
    }

    pub fn eval_principal(&self, z: C64) -> Result<Mat2C> {
        self.eval(z, &BranchState::principal())
    }

    /// Continue along `path` from `branch` (valid at its start); returns the
    /// value at the end and the continued state.
    pub fn continue_along(&self, path: &PathC, branch: &BranchState) -> Result<(Mat2C, BranchState)> {
        let state = self
            .tracker()
            .continue_path(path, branch, &ContinuationOptions::default())?;
        Ok((self.eval(path.end(), &state)?, state))
    }
}
