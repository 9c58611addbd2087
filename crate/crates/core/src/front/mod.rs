//! Flat fronts: the projection `f = E E*` of a Legendrian curve into the
//! hermitian model of H³, the Poincaré ball, the fundamental forms and the
//! singular set.

mod mesh;

pub use mesh::{
    sample_mesh, sample_plan, FrontMesh, GridSpec, MeshPlan, Patch, BALL_TRUNCATION, SING_CLAMP,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{eval, BranchState, ExprError, Tracker, C64};
use crate::legendrian::LegendrianCurve;
use crate::matrix::ExprMatrix;
use crate::psl2::Mat2C;

/// A point of H³: positive definite hermitian, determinant 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HermitianPoint {
    pub x: Mat2C,
}

impl HermitianPoint {
    /// `a a*` for any `a` with `det a = ±1`.
    pub fn from_sl2(a: &Mat2C) -> Self {
        let x = *a * a.adjoint();
        // exact hermitian symmetry; the diagonal is real
        let off = (x.b + x.c.conj()) * 0.5;
        HermitianPoint {
            x: Mat2C::new(
                C64::new(x.a.re, 0.0),
                off,
                off.conj(),
                C64::new(x.d.re, 0.0),
            ),
        }
    }

    /// Validate a hermitian matrix of determinant 1 with positive trace.
    pub fn new(x: Mat2C) -> Result<Self> {
        let scale = x.frobenius().max(1.0);
        let herm = (x.a.im.abs() + x.d.im.abs() + (x.b - x.c.conj()).norm()) <= 1e-12 * scale;
        if !herm || (x.det() - 1.0).norm() > 1e-9 * scale * scale || x.trace().re <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "x".into(),
                reason: "not a hermitian matrix of determinant 1 with positive trace".into(),
            });
        }
        Ok(HermitianPoint { x })
    }

    /// Minkowski coordinates `(x0, x1, x2, x3)` with
    /// `x = [[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]]`.
    pub fn minkowski(&self) -> [f64; 4] {
        let x = &self.x;
        [
            0.5 * (x.a.re + x.d.re),
            x.b.re,
            x.b.im,
            0.5 * (x.a.re - x.d.re),
        ]
    }
}

/// `E E*` at `z` on the given branch. Only curves with symbolic entries.
pub fn project(e: &LegendrianCurve, z: C64, branch: &BranchState) -> Result<HermitianPoint> {
    let m = e.eval(z, branch)?;
    if !m.is_finite() {
        return Err(ExprError::Pole { z }.into());
    }
    Ok(HermitianPoint::from_sl2(&m))
}

/// Central projection of the hyperboloid onto the open unit ball.
pub fn to_poincare(x: &HermitianPoint) -> [f64; 3] {
    let [x0, x1, x2, x3] = x.minkowski();
    let s = 1.0 + x0;
    [x1 / s, x2 / s, x3 / s]
}

/// Hyperbolic distance from `cosh d = tr(x1 x2⁻¹) / 2`.
pub fn hyperbolic_distance(p: &HermitianPoint, q: &HermitianPoint) -> f64 {
    let t = 0.5 * (p.x * q.x.inverse()).trace().re;
    t.max(1.0).acosh()
}

/// Coefficients of a real quadratic form `E dx² + 2F dx dy + G dy²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ds2 {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl Ds2 {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }
}

/// First fundamental form `(ω dz + θ̄ dz̄)(ω̄ dz̄ + θ dz)` in `(dx, dy)`, and
/// `dσ² = |ω|² - |θ|²`.
pub fn fundamental_forms(omega: C64, theta: C64) -> (Ds2, f64) {
    // ω dz + θ̄ dz̄ = u dx + v dy; ds² = |u dx + v dy|²
    let u = omega + theta.conj();
    let v = C64::new(0.0, 1.0) * (omega - theta.conj());
    let ds2 = Ds2 {
        e: u.norm_sqr(),
        f: (u * v.conj()).re,
        g: v.norm_sqr(),
    };
    (ds2, omega.norm_sqr() - theta.norm_sqr())
}

/// `log(|ω| / |θ|)`; zero on the singular set, `±∞` where one form vanishes.
pub fn singularity_indicator(omega: C64, theta: C64, z: C64) -> Result<f64> {
    let (a, b) = (omega.norm(), theta.norm());
    if a == 0.0 && b == 0.0 {
        return Err(Error::BranchPointOfFront { z });
    }
    Ok(a.ln() - b.ln())
}

/// Everything sampled at one point of a front.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontSample {
    pub z: C64,
    pub point: HermitianPoint,
    pub ball: [f64; 3],
    pub omega_val: C64,
    pub theta_val: C64,
    pub ds2: Ds2,
    pub dsigma2: f64,
    /// `None` at a branch point.
    pub sing: Option<f64>,
}

impl FrontSample {
    /// Assemble a sample from `E(z)` and the form coefficients there.
    pub fn from_parts(z: C64, e: &Mat2C, omega: C64, theta: C64) -> Self {
        let point = HermitianPoint::from_sl2(e);
        let (ds2, dsigma2) = fundamental_forms(omega, theta);
        FrontSample {
            z,
            point,
            ball: to_poincare(&point),
            omega_val: omega,
            theta_val: theta,
            ds2,
            dsigma2,
            sing: singularity_indicator(omega, theta, z).ok(),
        }
    }
}

/// Precomputed data for repeated sampling of one curve; shareable across
/// threads.
#[derive(Debug, Clone)]
pub struct FrontEvaluator {
    m: ExprMatrix,
    dm: ExprMatrix,
    tracker: Tracker,
}

impl FrontEvaluator {
    pub fn new(e: &LegendrianCurve) -> Result<Self> {
        let m = e.matrix()?.clone();
        let dm = m.derivative();
        let [a, b, c, d] = m.full_entries();
        let [da, db, dc, dd] = dm.full_entries();
        let tracker = Tracker::new(&[&a, &b, &c, &d, &da, &db, &dc, &dd]);
        Ok(FrontEvaluator { m, dm, tracker })
    }

    pub fn tracker(&self) -> &Tracker {
        &self.tracker
    }

    pub fn matrix(&self) -> &ExprMatrix {
        &self.m
    }

    /// `(E, ω, θ)` at `z`, with `E⁻¹ dE = [[0, θ], [ω, 0]]`.
    pub fn forms(&self, z: C64, branch: &BranchState) -> Result<(Mat2C, C64, C64)> {
        let v = self.m.eval(z, branch)?;
        let dv = self.dm.eval(z, branch)?;
        if !v.is_finite() || !dv.is_finite() {
            return Err(ExprError::Pole { z }.into());
        }
        let omega = v.a * dv.c - v.c * dv.a;
        let theta = v.d * dv.b - v.b * dv.d;
        Ok((v, omega, theta))
    }

    pub fn sample(&self, z: C64, branch: &BranchState) -> Result<FrontSample> {
        let (v, omega, theta) = self.forms(z, branch)?;
        Ok(FrontSample::from_parts(z, &v, omega, theta))
    }
}

/// Sample the front at `z` on the branch that is principal there.
pub fn front_sample(e: &LegendrianCurve, z: C64) -> Result<FrontSample> {
    let fe = FrontEvaluator::new(e)?;
    let st = fe.tracker.init(z, &BranchState::principal())?;
    fe.sample(z, &st)
}

/// `ω` and `θ` at `z` on a branch.
pub fn forms_at(e: &LegendrianCurve, z: C64, branch: &BranchState) -> Result<(C64, C64)> {
    let [a, b, c, d] = e.matrix()?.full_entries();
    let w = &(&a * &c.derivative()) - &(&c * &a.derivative());
    let t = &(&d * &b.derivative()) - &(&b * &d.derivative());
    Ok((eval(&w, z, branch)?, eval(&t, z, branch)?))
}
