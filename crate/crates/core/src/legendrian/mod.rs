//! Legendrian curves in PSL(2,C).
//!
//! Two constructions are provided: from the pair of hyperbolic Gauss maps
//! `(G, G*)` via `ξ = c exp ∫ dG/(G - G*)`, and integral-free from `G` and
//! the canonical form `ω`. The second module holds the invariants computed
//! from a curve (canonical forms, duality, periods, monodromy).

mod analysis;

pub use analysis::{
    canonical_form_branches, canonical_forms, check_conditions, developing_maps, dual_curve,
    gauss_from_legendrian, hopf_legendrian, monodromy, period_check, ConditionsReport,
    FormBranches, MonodromyClass, MonodromyResult, PeriodCheck, PoleCheck, Verdict,
    MONODROMY_TOL, PERIOD_TOL,
};

use crate::error::{Error, Result};
use crate::expr::{
    eval, eval_principal, finite_poles, integrate_path, path_integral, simple_pole_decomposition,
    BranchState, ExprError, MeroExpr, PathC, Poly, QuadOptions, Tracker, C64,
};
use crate::matrix::{ExprMatrix, MatrixKind};
use crate::null_curve::{is_numerically_constant, PROBES};
use crate::psl2::Mat2C;

/// Candidate base points, in order of preference.
pub const BASEPOINT_CANDIDATES: [C64; 9] = [
    C64::new(1.0, 0.0),
    C64::new(2.0, 0.0),
    C64::new(1.0, 1.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
    C64::new(1.0, -1.0),
    C64::new(-1.0, 1.0),
    C64::new(-1.0, -1.0),
];

/// Hyperbolic Gauss maps with the base point and constant defining `ξ`.
#[derive(Debug, Clone)]
pub struct GaussPair {
    pub big_g: MeroExpr,
    pub gstar: MeroExpr,
    pub z0: C64,
    pub c: C64,
}

impl GaussPair {
    /// Validate the pair. Without an explicit base point, the first candidate
    /// farthest from the singular set is used; `c` defaults to 1.
    pub fn new(big_g: MeroExpr, gstar: MeroExpr, z0: Option<C64>, c: Option<C64>) -> Result<Self> {
        if is_numerically_constant(&big_g) {
            return Err(Error::ConstantInput("G"));
        }
        if is_numerically_constant(&gstar) {
            return Err(Error::ConstantInput("G*"));
        }
        if identically_equal(&big_g, &gstar) {
            return Err(Error::GIdenticallyGstar);
        }
        let c = c.unwrap_or(C64::new(1.0, 0.0));
        if c == C64::new(0.0, 0.0) || !c.re.is_finite() || !c.im.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c".into(),
                reason: "must be a nonzero finite complex number".into(),
            });
        }
        let mut pair = GaussPair {
            big_g,
            gstar,
            z0: C64::new(0.0, 0.0),
            c,
        };
        pair.z0 = match z0 {
            Some(z) => {
                pair.check_basepoint(z)?;
                z
            }
            None => pair.auto_basepoint()?,
        };
        Ok(pair)
    }

    /// Coefficient of the 1-form `dG / (G - G*)`.
    pub fn xi_form(&self) -> MeroExpr {
        &self.big_g.derivative() / &(&self.big_g - &self.gstar)
    }

    fn check_basepoint(&self, z: C64) -> Result<()> {
        let bad = |reason: &str| Error::InvalidBasepoint {
            z,
            reason: reason.into(),
        };
        let g = eval_principal(&self.big_g, z).map_err(|_| bad("G is singular there"))?;
        let gs = eval_principal(&self.gstar, z).map_err(|_| bad("G* is singular there"))?;
        if (g - gs).norm() <= 1e-12 * (1.0 + g.norm()) {
            return Err(bad("G = G* there"));
        }
        eval_principal(&self.xi_form(), z).map_err(|_| bad("dG/(G - G*) is singular there"))?;
        Ok(())
    }

    /// Known singular points: poles of the form and of `G`, `G*` (rational
    /// data only).
    pub fn singular_points(&self) -> Vec<C64> {
        let mut pts = Vec::new();
        for e in [&self.xi_form(), &self.big_g, &self.gstar] {
            if let Ok(ps) = finite_poles(e) {
                pts.extend(ps.into_iter().map(|(p, _)| p));
            }
        }
        pts
    }

    fn auto_basepoint(&self) -> Result<C64> {
        let sing = self.singular_points();
        let admissible: Vec<(C64, f64)> = BASEPOINT_CANDIDATES
            .iter()
            .filter(|z| self.check_basepoint(**z).is_ok())
            .map(|z| {
                let d = sing.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min);
                (*z, d)
            })
            .collect();
        let best = admissible.iter().map(|(_, d)| *d).fold(f64::NEG_INFINITY, f64::max);
        admissible
            .iter()
            .find(|(_, d)| *d >= best - 1e-9 || (best.is_infinite() && d.is_infinite()))
            .map(|(z, _)| *z)
            .ok_or(Error::InvalidBasepoint {
                z: BASEPOINT_CANDIDATES[0],
                reason: "no admissible candidate base point".into(),
            })
    }
}

/// `e1 ≡ e2` judged at the probe points.
pub(crate) fn identically_equal(e1: &MeroExpr, e2: &MeroExpr) -> bool {
    let diff = e1 - e2;
    if diff.is_literal_zero() {
        return true;
    }
    let mut seen = 0;
    for z in PROBES {
        let (Ok(a), Ok(b)) = (eval_principal(e1, z), eval_principal(e2, z)) else {
            continue;
        };
        seen += 1;
        if (a - b).norm() > 1e-12 * (1.0 + a.norm()) {
            return false;
        }
    }
    seen >= 3
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    FromGaussPair,
    FromGOmega,
    Explicit,
}

#[derive(Debug, Clone)]
enum Repr {
    Symbolic(ExprMatrix),
    /// `ξ` only as a path integral; `dual` right-multiplies by `[[0,i],[i,0]]`.
    Integral {
        big_g: MeroExpr,
        gstar: MeroExpr,
        form: MeroExpr,
        dual: bool,
    },
}

/// A Legendrian curve `E: M -> PSL(2,C)`.
#[derive(Debug, Clone)]
pub struct LegendrianCurve {
    repr: Repr,
    pub basepoint: C64,
    pub c: C64,
    pub construction: Construction,
    /// Coefficient of `dG/(G - G*)` when built from a Gauss pair.
    pub xi_form: Option<MeroExpr>,
    /// Symbolic `ξ` when it has an elementary primitive.
    pub xi: Option<MeroExpr>,
}

fn snap(x: f64) -> f64 {
    for den in 1..=12 {
        let k = (x * den as f64).round();
        if (x - k / den as f64).abs() <= 1e-11 * (1.0 + x.abs()) {
            return k / den as f64;
        }
    }
    x
}

fn snap_c(z: C64) -> C64 {
    C64::new(snap(z.re), snap(z.im))
}

fn poly_expr(p: &Poly) -> MeroExpr {
    let z = MeroExpr::var();
    p.coeffs()
        .iter()
        .enumerate()
        .fold(MeroExpr::zero(), |acc, (k, c)| {
            &acc + &(&MeroExpr::constant(*c) * &MeroExpr::powi(&z, k as i32))
        })
}

/// `c exp(∫_{z0}^{z} form)` as an expression, when `form` is rational with
/// only simple poles.
pub fn symbolic_xi(form: &MeroExpr, z0: C64, c: C64) -> Option<MeroExpr> {
    let dec = simple_pole_decomposition(form).ok()??;
    let q = poly_expr(&Poly::new(
        std::iter::once(C64::new(0.0, 0.0))
            .chain(
                dec.poly_part
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a / (k as f64 + 1.0)),
            )
            .collect(),
    ));
    let z = MeroExpr::var();
    let q0 = eval_principal(&q, z0).ok()?;
    let mut xi = &MeroExpr::constant(c) * &MeroExpr::exp(&(&q - &MeroExpr::constant(q0)));
    for (p, r) in dec.terms {
        let (p, r) = (snap_c(p), snap_c(r));
        let base = &(&z - &MeroExpr::constant(p)) / &MeroExpr::constant(z0 - p);
        xi = &xi * &MeroExpr::powc(&base, r);
    }
    Some(xi)
}

/// Legendrian curve with hyperbolic Gauss maps `(G, G*)`:
/// `E = [[G/ξ, ξ G*/(G - G*)], [1/ξ, ξ/(G - G*)]]`.
pub fn legendrian_from_gauss(pair: &GaussPair) -> Result<LegendrianCurve> {
    let form = pair.xi_form();
    let (gg, gs) = (&pair.big_g, &pair.gstar);
    let xi = symbolic_xi(&form, pair.z0, pair.c);
    let repr = match &xi {
        Some(xi) => {
            let diff = gg - gs;
            Repr::Symbolic(ExprMatrix::new(
                gg / xi,
                &(xi * gs) / &diff,
                &MeroExpr::one() / xi,
                xi / &diff,
                MatrixKind::Legendrian,
            ))
        }
        None => {
            log::debug!("xi has no elementary primitive; using path integrals");
            Repr::Integral {
                big_g: gg.clone(),
                gstar: gs.clone(),
                form: form.clone(),
                dual: false,
            }
        }
    };
    Ok(LegendrianCurve {
        repr,
        basepoint: pair.z0,
        c: pair.c,
        construction: Construction::FromGaussPair,
        xi_form: Some(form),
        xi,
    })
}

/// Integral-free construction: `C = i sqrt(ω/dG)`, `A = G C`,
/// `B = dA/ω`, `D = dC/ω`.
pub fn legendrian_from_g_omega(
    big_g: &MeroExpr,
    omega: &MeroExpr,
    basepoint: Option<C64>,
) -> Result<LegendrianCurve> {
    if is_numerically_constant(big_g) {
        return Err(Error::ConstantInput("G"));
    }
    if omega.is_literal_zero() || identically_equal(omega, &MeroExpr::zero()) {
        return Err(Error::ZeroOmega);
    }
    let c = &MeroExpr::i() * &MeroExpr::sqrt(&(omega / &big_g.derivative()));
    let a = big_g * &c;
    let b = &a.derivative() / omega;
    let d = &c.derivative() / omega;
    let m = ExprMatrix::new(a, b, c, d, MatrixKind::Legendrian);
    let basepoint = match basepoint {
        Some(z) => {
            m.eval_principal(z).map_err(|e| Error::InvalidBasepoint {
                z,
                reason: e.to_string(),
            })?;
            z
        }
        None => BASEPOINT_CANDIDATES
            .iter()
            .copied()
            .find(|z| m.eval_principal(*z).is_ok_and(|v| v.is_finite()))
            .ok_or(Error::InvalidBasepoint {
                z: BASEPOINT_CANDIDATES[0],
                reason: "no admissible candidate base point".into(),
            })?,
    };
    Ok(LegendrianCurve {
        repr: Repr::Symbolic(m),
        basepoint,
        c: C64::new(1.0, 0.0),
        construction: Construction::FromGOmega,
        xi_form: None,
        xi: None,
    })
}

/// `G*` of the curve built from `(G, ω)`: `G + G' C / C'` with
/// `C = i sqrt(ω/G')`.
pub fn gstar_from_g_omega(big_g: &MeroExpr, omega: &MeroExpr) -> MeroExpr {
    let dg = big_g.derivative();
    let c = &MeroExpr::i() * &MeroExpr::sqrt(&(omega / &dg));
    big_g + &(&(&dg * &c) / &c.derivative())
}

const J: Mat2C = Mat2C::new(
    C64::new(0.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, 1.0),
    C64::new(0.0, 0.0),
);

impl LegendrianCurve {
    /// Wrap an explicit matrix of expressions.
    pub fn explicit(m: ExprMatrix, basepoint: C64) -> Self {
        LegendrianCurve {
            repr: Repr::Symbolic(ExprMatrix {
                kind: MatrixKind::Legendrian,
                ..m
            }),
            basepoint,
            c: C64::new(1.0, 0.0),
            construction: Construction::Explicit,
            xi_form: None,
            xi: None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        matches!(self.repr, Repr::Symbolic(_))
    }

    /// The symbolic matrix, if this curve has one.
    pub fn matrix(&self) -> Result<&ExprMatrix> {
        match &self.repr {
            Repr::Symbolic(m) => Ok(m),
            Repr::Integral { .. } => Err(Error::NonElementary),
        }
    }

    /// Principal branch at `z`, continued consistently for all entries.
    pub fn branch_at(&self, z: C64) -> Result<BranchState> {
        match &self.repr {
            Repr::Symbolic(m) => m.branch_at(z, &BranchState::principal()),
            Repr::Integral {
                big_g, gstar, form, ..
            } => Ok(Tracker::new(&[big_g, gstar, form]).init(z, &BranchState::principal())?),
        }
    }

    /// Branch state at the base point.
    pub fn base_branch(&self) -> Result<BranchState> {
        self.branch_at(self.basepoint)
    }

    /// `E(z)` on the given branch (symbolic curves only).
    pub fn eval(&self, z: C64, branch: &BranchState) -> Result<Mat2C> {
        self.matrix()?.eval(z, branch)
    }

    /// `E(z)` on the branch that is principal at `z`.
    pub fn eval_principal(&self, z: C64) -> Result<Mat2C> {
        let st = self.branch_at(z)?;
        self.eval(z, &st)
    }

    fn integral_value(
        big_g: &MeroExpr,
        gstar: &MeroExpr,
        xi: C64,
        z: C64,
        st: &BranchState,
        dual: bool,
    ) -> Result<Mat2C> {
        let g = eval(big_g, z, st)?;
        let gs = eval(gstar, z, st)?;
        let diff = g - gs;
        if diff == C64::new(0.0, 0.0) {
            return Err(ExprError::Pole { z }.into());
        }
        let m = Mat2C::new(g / xi, xi * gs / diff, C64::new(1.0, 0.0) / xi, xi / diff);
        Ok(if dual { m * J } else { m })
    }

    /// Value at the end of `path`, continuing from `start` (a branch state
    /// valid at the path start). For path-integral curves, the path must start
    /// at the base point.
    pub fn value_along(&self, path: &PathC, start: &BranchState) -> Result<(Mat2C, BranchState)> {
        match &self.repr {
            Repr::Symbolic(m) => m.continue_along(path, start),
            Repr::Integral {
                big_g,
                gstar,
                form,
                dual,
            } => {
                if (path.start() - self.basepoint).norm() > 1e-12 * (1.0 + self.basepoint.norm()) {
                    return Err(ExprError::InvalidPath(
                        "path must start at the base point".into(),
                    )
                    .into());
                }
                let tracker = Tracker::new(&[big_g, gstar, form]);
                let (integral, st) = integrate_path(
                    &tracker,
                    |z, s| eval(form, z, s),
                    path,
                    start,
                    &QuadOptions::default(),
                )?;
                let xi = self.c * integral.exp();
                let v = Self::integral_value(big_g, gstar, xi, path.end(), &st, *dual)?;
                Ok((v, st))
            }
        }
    }

    /// Dual curve `E [[0, i], [i, 0]]`.
    pub fn dual(&self) -> LegendrianCurve {
        let repr = match &self.repr {
            Repr::Symbolic(m) => Repr::Symbolic(m.mul_const(&J)),
            Repr::Integral {
                big_g,
                gstar,
                form,
                dual,
            } => Repr::Integral {
                big_g: big_g.clone(),
                gstar: gstar.clone(),
                form: form.clone(),
                dual: !dual,
            },
        };
        LegendrianCurve {
            repr,
            basepoint: self.basepoint,
            c: self.c,
            construction: Construction::Explicit,
            xi_form: None,
            xi: None,
        }
    }

    /// `(ω, θ)` coefficients at the end of `path`: evaluated from the symbolic
    /// forms, or from `ω = -dG/ξ²`, `θ = ξ² dG*/(G - G*)²` for path-integral
    /// curves.
    pub fn forms_along(&self, path: &PathC, start: &BranchState) -> Result<(C64, C64)> {
        match &self.repr {
            Repr::Symbolic(_) => {
                let (omega, theta) = canonical_forms(self)?;
                let (_, st) = self.value_along(path, start)?;
                Ok((eval(&omega, path.end(), &st)?, eval(&theta, path.end(), &st)?))
            }
            Repr::Integral {
                big_g, gstar, dual, ..
            } => {
                let (m, st) = self.value_along(path, start)?;
                let m = if *dual { m * J.inverse() } else { m };
                let xi = C64::new(1.0, 0.0) / m.c;
                let z = path.end();
                let g = eval(big_g, z, &st)?;
                let gs = eval(gstar, z, &st)?;
                let dg = eval(&big_g.derivative(), z, &st)?;
                let dgs = eval(&gstar.derivative(), z, &st)?;
                let omega = -dg / (xi * xi);
                let theta = xi * xi * dgs / ((g - gs) * (g - gs));
                Ok(if *dual { (theta, omega) } else { (omega, theta) })
            }
        }
    }
}

/// `ξ` at the end of `path` (which must start at the base point) by
/// quadrature: `c exp ∫_path dG/(G - G*)`.
pub fn xi_at(pair: &GaussPair, path: &PathC) -> Result<C64> {
    if (path.start() - pair.z0).norm() > 1e-12 * (1.0 + pair.z0.norm()) {
        return Err(ExprError::InvalidPath("path must start at the base point".into()).into());
    }
    let form = pair.xi_form();
    let start = Tracker::new(&[&form]).init(pair.z0, &BranchState::principal())?;
    let (integral, _) = path_integral(&form, path, &start)?;
    Ok(pair.c * integral.exp())
}
