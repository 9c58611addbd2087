use serde::Serialize;

use super::{GaussPair, LegendrianCurve};
use crate::error::{Error, Result};
use crate::expr::{
    eval, finite_poles, form_pole_order_at_infinity, integrate_path, loop_period, ExprError,
    MeroExpr, PathC, QuadOptions, Tracker, C64,
};
use crate::null_curve::PROBES;
use crate::psl2::{is_unitary, psl_distance, Ext, Mat2C};

/// Tolerance for membership of a period in `πi Z`.
pub const PERIOD_TOL: f64 = 1e-8;
/// Tolerance for monodromy classification.
pub const MONODROMY_TOL: f64 = 1e-7;

/// `(ω, θ)` from `E⁻¹ dE = [[0, θ], [ω, 0]]`:
/// `ω = A dC - C dA`, `θ = D dB - B dD`.
///
/// The alternative expressions `dA/B = dC/D` and `dB/A = dD/C` are checked
/// at probe points wherever they are defined.
pub fn canonical_forms(e: &LegendrianCurve) -> Result<(MeroExpr, MeroExpr)> {
    let [a, b, c, d] = e.matrix()?.full_entries();
    let omega = &(&a * &c.derivative()) - &(&c * &a.derivative());
    let theta = &(&d * &b.derivative()) - &(&b * &d.derivative());
    let mut omega_defined = false;
    let mut theta_defined = false;
    for z in std::iter::once(e.basepoint).chain(PROBES) {
        let Ok(fb) = canonical_form_branches(e, z) else {
            continue;
        };
        let Ok(st) = e.branch_at(z) else { continue };
        let (Ok(w), Ok(t)) = (eval(&omega, z, &st), eval(&theta, z, &st)) else {
            continue;
        };
        for (branch, want) in [
            (fb.omega_from_a, w),
            (fb.omega_from_c, w),
            (fb.theta_from_b, t),
            (fb.theta_from_d, t),
        ] {
            if let Some(v) = branch {
                if (v - want).norm() > 1e-6 * (1.0 + want.norm()) {
                    return Err(Error::VerificationFailed(format!(
                        "canonical form branches disagree at z = {} (not Legendrian?)",
                        z
                    )));
                }
            }
        }
        omega_defined |= fb.omega_from_a.is_some() || fb.omega_from_c.is_some();
        theta_defined |= fb.theta_from_b.is_some() || fb.theta_from_d.is_some();
    }
    if !omega_defined || !theta_defined {
        return Err(Error::AllBranchesUndefined);
    }
    Ok((omega, theta))
}

/// The four quotient expressions for the canonical forms at a point; `None`
/// where the quotient is 0/0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormBranches {
    pub omega_from_a: Option<C64>,
    pub omega_from_c: Option<C64>,
    pub theta_from_b: Option<C64>,
    pub theta_from_d: Option<C64>,
}

pub fn canonical_form_branches(e: &LegendrianCurve, z: C64) -> Result<FormBranches> {
    let m = e.matrix()?;
    let st = e.branch_at(z)?;
    let v = m.eval(z, &st)?;
    let dv = m.derivative().eval(z, &st)?;
    let scale = v.frobenius().max(1.0);
    let q = |num: C64, den: C64| -> Option<C64> {
        if num.norm() + den.norm() <= 1e-12 * scale || den == C64::new(0.0, 0.0) {
            None
        } else {
            Some(num / den)
        }
    };
    Ok(FormBranches {
        omega_from_a: q(dv.a, v.b),
        omega_from_c: q(dv.c, v.d),
        theta_from_b: q(dv.b, v.a),
        theta_from_d: q(dv.d, v.c),
    })
}

/// Dual curve; its Gauss maps and canonical forms are swapped.
pub fn dual_curve(e: &LegendrianCurve) -> LegendrianCurve {
    e.dual()
}

/// `(G, G*) = (A/C, B/D)` at `z`.
pub fn gauss_from_legendrian(e: &LegendrianCurve, z: C64) -> Result<(Ext, Ext)> {
    let v = if e.is_symbolic() {
        e.eval_principal(z)?
    } else {
        let path = if (z - e.basepoint).norm() == 0.0 {
            PathC::point(z)
        } else {
            PathC::segment(e.basepoint, z)?
        };
        e.value_along(&path, &e.base_branch()?)?.0
    };
    let g = Ext::ratio(v.a, v.c).ok_or(Error::IndeterminateQuotient { z })?;
    let gs = Ext::ratio(v.b, v.d).ok_or(Error::IndeterminateQuotient { z })?;
    Ok((g, gs))
}

/// Coefficient of `Q = ωθ = -dG dG* / (G - G*)²`.
pub fn hopf_legendrian(pair: &GaussPair) -> MeroExpr {
    let num = &pair.big_g.derivative() * &pair.gstar.derivative();
    let diff = &pair.big_g - &pair.gstar;
    -(&num / &MeroExpr::powi(&diff, 2))
}

/// Developing maps `g = ∫ω`, `g* = ∫θ` along `path`, normalized to vanish at
/// the path start.
pub fn developing_maps(e: &LegendrianCurve, path: &PathC) -> Result<(C64, C64)> {
    let (omega, theta) = canonical_forms(e)?;
    let [a, b, c, d] = e.matrix()?.full_entries();
    let tracker = Tracker::new(&[&a, &b, &c, &d, &omega, &theta]);
    let start = e.branch_at(path.start())?;
    let opts = QuadOptions::default();
    let (g, _) = integrate_path(&tracker, |z, s| eval(&omega, z, s), path, &start, &opts)?;
    let (gs, _) = integrate_path(&tracker, |z, s| eval(&theta, z, s), path, &start, &opts)?;
    Ok((g, gs))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleCheck {
    /// `[re, im]`, ignored when `at_infinity`.
    pub point: [f64; 2],
    pub at_infinity: bool,
    pub order: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodCheck {
    pub loop_start: [f64; 2],
    pub loop_vertices: usize,
    pub period: [f64; 2],
    /// `n` with `πi n` the nearest member of `πi Z`.
    pub nearest_multiple: i64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DescendsToM2,
    UniversalCoverOnly,
    /// Periods pass but the pole analysis was unavailable.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionsReport {
    /// `None` when the data is not rational.
    pub pole_checks: Option<Vec<PoleCheck>>,
    pub period_checks: Vec<PeriodCheck>,
    pub verdict: Verdict,
}

/// Classify a period against `πi Z`.
pub fn period_check(lp: &PathC, period: C64) -> PeriodCheck {
    let n = (period / C64::new(0.0, std::f64::consts::PI)).re.round();
    let residual = (period - C64::new(0.0, std::f64::consts::PI * n)).norm();
    PeriodCheck {
        loop_start: [lp.start().re, lp.start().im],
        loop_vertices: lp.vertices().len(),
        period: [period.re, period.im],
        nearest_multiple: n as i64,
        residual,
        pass: residual < PERIOD_TOL,
    }
}

/// Conditions for `ξ²` to be single valued: simple poles of `dG/(G - G*)`
/// and periods in `πi Z`.
pub fn check_conditions(pair: &GaussPair, loops: &[PathC]) -> Result<ConditionsReport> {
    let form = pair.xi_form();
    let pole_checks = match finite_poles(&form) {
        Ok(poles) => {
            let mut checks: Vec<PoleCheck> = poles
                .into_iter()
                .map(|(p, o)| PoleCheck {
                    point: [p.re, p.im],
                    at_infinity: false,
                    order: o as i64,
                    pass: o == 1,
                })
                .collect();
            let inf = form_pole_order_at_infinity(&form)? as i64;
            if inf > 0 {
                checks.push(PoleCheck {
                    point: [0.0, 0.0],
                    at_infinity: true,
                    order: inf,
                    pass: inf == 1,
                });
            }
            Some(checks)
        }
        Err(ExprError::NotRational) => None,
        Err(e) => return Err(e.into()),
    };
    let mut period_checks = Vec::with_capacity(loops.len());
    for lp in loops {
        let p = loop_period(&form, lp)?;
        period_checks.push(period_check(lp, p));
    }
    let periods_ok = period_checks.iter().all(|c| c.pass);
    let verdict = match &pole_checks {
        Some(pc) if pc.iter().all(|c| c.pass) && periods_ok => Verdict::DescendsToM2,
        None if periods_ok => Verdict::Inconclusive,
        _ => Verdict::UniversalCoverOnly,
    };
    Ok(ConditionsReport {
        pole_checks,
        period_checks,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonodromyClass {
    TrivialInPsl,
    UnitaryNontrivial,
    Nonunitary,
}

#[derive(Debug, Clone)]
pub struct MonodromyResult {
    pub loop_path: PathC,
    pub matrix: Mat2C,
    pub classification: MonodromyClass,
}

impl MonodromyClass {
    pub fn of(m: &Mat2C) -> Self {
        if psl_distance(m, &Mat2C::identity()) < MONODROMY_TOL {
            MonodromyClass::TrivialInPsl
        } else if is_unitary(m, MONODROMY_TOL) {
            MonodromyClass::UnitaryNontrivial
        } else {
            MonodromyClass::Nonunitary
        }
    }
}

/// `M` with `E∘γ = E M`: continue `E` around the closed loop and compare with
/// its value at the loop's start.
pub fn monodromy(e: &LegendrianCurve, lp: &PathC) -> Result<MonodromyResult> {
    if !lp.is_closed() {
        return Err(ExprError::InvalidPath("monodromy needs a closed loop".into()).into());
    }
    let st0 = e.branch_at(lp.start())?;
    let (e0, _) = e.value_along(&PathC::point(lp.start()), &st0)?;
    let (e1, _) = e
        .value_along(lp, &st0)
        .map_err(|err| Error::ContinuationFailed(err.to_string()))?;
    let m = e0.inverse() * e1;
    Ok(MonodromyResult {
        loop_path: lp.clone(),
        matrix: m,
        classification: MonodromyClass::of(&m),
    })
}
