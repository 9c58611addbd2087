//! Adaptive Gauss-Kronrod (7, 15) quadrature along polygonal paths.

use super::eval::Checkpoints;
use super::{eval, BranchState, ContinuationOptions, ExprError, MeroExpr, PathC, Tracker, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute error target for the whole path.
    pub abs_tol: f64,
    /// Relative floor, so large integrals are not held to an absolute target
    /// below their rounding error.
    pub rel_tol: f64,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
    pub continuation: ContinuationOptions,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-13,
            max_evals: 1_000_000,
            continuation: ContinuationOptions::default(),
        }
    }
}

// Kronrod abscissae on [-1, 1] (non-negative half), with the Gauss nodes at odd indices.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Interval {
    lo: f64,
    hi: f64,
    value: C64,
    err: f64,
}

fn gk15<F>(f: &F, lo: f64, hi: f64) -> Result<(C64, f64), ExprError>
where
    F: Fn(f64) -> Result<C64, ExprError>,
{
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c)?;
    let mut k = fc * WK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XK[j];
        let s = f(c - dx)? + f(c + dx)?;
        k += s * WK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    Ok((k * h, ((k - g) * h).norm()))
}

/// Globally adaptive integration of `f` over [0, 1].
fn adaptive<F>(f: &F, tol: f64, rel_tol: f64, budget: &mut usize) -> Result<C64, ExprError>
where
    F: Fn(f64) -> Result<C64, ExprError>,
{
    let take = |budget: &mut usize| -> Result<(), ExprError> {
        if *budget < 15 {
            return Err(ExprError::QuadratureFailed {
                reason: "evaluation budget exhausted".into(),
            });
        }
        *budget -= 15;
        Ok(())
    };
    take(budget)?;
    let (v, e) = gk15(f, 0.0, 1.0)?;
    let mut parts = vec![Interval {
        lo: 0.0,
        hi: 1.0,
        value: v,
        err: e,
    }];
    loop {
        let total_err: f64 = parts.iter().map(|p| p.err).sum();
        let size: f64 = parts.iter().map(|p| p.value.norm()).sum();
        if total_err <= tol.max(rel_tol * size) {
            break;
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .expect("non-empty");
        let p = parts.swap_remove(worst);
        let mid = 0.5 * (p.lo + p.hi);
        if mid <= p.lo || mid >= p.hi {
            return Err(ExprError::QuadratureFailed {
                reason: format!("interval collapsed with error {:e} above {:e}", total_err, tol),
            });
        }
        take(budget)?;
        take(budget)?;
        let (v1, e1) = gk15(f, p.lo, mid)?;
        let (v2, e2) = gk15(f, mid, p.hi)?;
        parts.push(Interval {
            lo: p.lo,
            hi: mid,
            value: v1,
            err: e1,
        });
        parts.push(Interval {
            lo: mid,
            hi: p.hi,
            value: v2,
            err: e2,
        });
    }
    parts.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Ok(parts.iter().map(|p| p.value).sum())
}

fn state_at(cps: &Checkpoints, t: f64) -> &BranchState {
    let idx = cps.partition_point(|(s, _)| *s <= t);
    let below = idx.saturating_sub(1);
    if idx < cps.len() && (cps[idx].0 - t) < (t - cps[below].0) {
        &cps[idx].1
    } else {
        &cps[below].1
    }
}

/// Integrate `f(z, branch) dz` along `path`, where the multivalued subterms
/// listed in `tracker` are continued from `start` (valid at the path start).
/// Returns the integral and the branch state at the path end.
pub fn integrate_path<F>(
    tracker: &Tracker,
    f: F,
    path: &PathC,
    start: &BranchState,
    opts: &QuadOptions,
) -> Result<(C64, BranchState), ExprError>
where
    F: Fn(C64, &BranchState) -> Result<C64, ExprError>,
{
    let (end_state, checkpoints) =
        tracker.continue_with_checkpoints(path, start, &opts.continuation)?;
    if path.is_stationary() {
        return Ok((C64::new(0.0, 0.0), end_state));
    }
    let segments = path.segments();
    let tol = opts.abs_tol / segments.len() as f64;
    let mut budget = opts.max_evals;
    let mut total = C64::new(0.0, 0.0);
    for ((a, b), cps) in segments.into_iter().zip(checkpoints.iter()) {
        let dz = b - a;
        let g = |t: f64| -> Result<C64, ExprError> {
            let z = a + dz * t;
            // evaluation picks the sheet nearest the closest checkpoint
            Ok(f(z, state_at(cps, t))? * dz)
        };
        total += adaptive(&g, tol, opts.rel_tol, &mut budget)?;
    }
    Ok((total, end_state))
}

/// `∫ e dz` along `path`, continuing `e`'s branches from `start`.
pub fn path_integral(
    e: &MeroExpr,
    path: &PathC,
    start: &BranchState,
) -> Result<(C64, BranchState), ExprError> {
    let tracker = Tracker::new(&[e]);
    integrate_path(
        &tracker,
        |z, s| eval(e, z, s),
        path,
        start,
        &QuadOptions::default(),
    )
}

/// `∮ form dz` around a closed loop, starting on the principal branch.
pub fn loop_period(form: &MeroExpr, lp: &PathC) -> Result<C64, ExprError> {
    if !lp.is_closed() {
        return Err(ExprError::InvalidPath("loop_period needs a closed path".into()));
    }
    Ok(path_integral(form, lp, &BranchState::principal())?.0)
}

#[cfg(test)]
mod tests {
    use super::super::parse_expr;
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn residue_of_one_over_two_z() {
        let p = loop_period(
            &parse_expr("1/(2*z)").unwrap(),
            &PathC::circle(C64::new(0.0, 0.0), 1.0, 16),
        )
        .unwrap();
        assert!((p - C64::new(0.0, PI)).norm() < 1e-10, "{}", p);
    }

    #[test]
    fn residue_at_cube_root() {
        let p = loop_period(
            &parse_expr("z^2/(z^3-1)").unwrap(),
            &PathC::circle(C64::new(1.0, 0.0), 0.3, 16),
        )
        .unwrap();
        assert!((p - C64::new(0.0, 2.0 * PI / 3.0)).norm() < 1e-10, "{}", p);
    }

    #[test]
    fn entire_function_has_zero_period() {
        let p = loop_period(&parse_expr("z^2").unwrap(), &PathC::circle(C64::new(0.0, 0.0), 1.0, 7))
            .unwrap();
        assert!(p.norm() < 1e-12);
    }

    #[test]
    fn multivalued_integrand_on_a_segment() {
        // ∫_1^4 z^(-1/2) dz = 2
        let (v, _) = path_integral(
            &parse_expr("z^(-1/2)").unwrap(),
            &PathC::segment(C64::new(1.0, 0.0), C64::new(4.0, 0.0)).unwrap(),
            &BranchState::principal(),
        )
        .unwrap();
        assert!((v - 2.0).norm() < 1e-12);
    }

    #[test]
    fn integrand_follows_the_continued_branch() {
        // sqrt(z) around the unit circle: ∮ = ∫_0^{2π} e^{it/2} i e^{it} dt = -4/3
        let (v, end) = path_integral(
            &parse_expr("sqrt(z)").unwrap(),
            &PathC::circle(C64::new(0.0, 0.0), 1.0, 32),
            &BranchState::principal(),
        )
        .unwrap();
        assert!((v - C64::new(-4.0 / 3.0, 0.0)).norm() < 1e-10, "{}", v);
        assert!(!end.is_empty());
    }

    #[test]
    fn stationary_path_integrates_to_zero() {
        let (v, _) = path_integral(
            &parse_expr("1/z").unwrap(),
            &PathC::point(C64::new(2.0, 0.0)),
            &BranchState::principal(),
        )
        .unwrap();
        assert_eq!(v, C64::new(0.0, 0.0));
    }

    #[test]
    fn large_integrals_meet_relative_floor() {
        let e = parse_expr("2.2e36*z").unwrap();
        let (v, _) = path_integral(&e, &PathC::segment(C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap(), &BranchState::principal()).unwrap();
        assert!((v - 1.1e36).norm() < 1e-12 * 1.1e36);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let opts = QuadOptions {
            max_evals: 40,
            ..QuadOptions::default()
        };
        let e = parse_expr("1/(z - 0.5 - 0.001*i)").unwrap();
        let r = integrate_path(
            &Tracker::new(&[&e]),
            |z, s| eval(&e, z, s),
            &PathC::segment(C64::new(0.0, 0.0), C64::new(1.0, 0.0)).unwrap(),
            &BranchState::principal(),
            &opts,
        );
        assert!(matches!(r, Err(ExprError::QuadratureFailed { .. })));
    }
}
