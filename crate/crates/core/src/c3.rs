//! Null curves in C³: the Weierstrass formula, the integral-free formula in
//! terms of `(g, h)`, and recovery of the data from a curve.

use crate::error::{Error, Result};
use crate::expr::{
    eval, eval_principal, integrate_path, BranchState, MeroExpr, PathC, QuadOptions, Tracker, C64,
};
use crate::null_curve::{is_numerically_constant, PROBES};

/// `F = (F1, F2, F3)`.
#[derive(Debug, Clone)]
pub struct C3Curve {
    pub f: [MeroExpr; 3],
}

/// Weierstrass data `(g, ω)`; `omega` is the coefficient of `dz`.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    pub g: MeroExpr,
    pub omega: MeroExpr,
}

impl WeierstrassData {
    pub fn new(g: MeroExpr, omega: MeroExpr) -> Result<Self> {
        if omega.is_literal_zero() || is_numerically_zero(&omega) {
            return Err(Error::ZeroOmega);
        }
        Ok(WeierstrassData { g, omega })
    }

    /// `½((1 - g²) ω, i(1 + g²) ω, 2gω)`.
    pub fn integrands(&self) -> [MeroExpr; 3] {
        let (g, w) = (&self.g, &self.omega);
        let half = MeroExpr::real(0.5);
        let g2 = MeroExpr::powi(g, 2);
        let one = MeroExpr::one();
        [
            &half * &(&(&one - &g2) * w),
            &(&half * &MeroExpr::i()) * &(&(&one + &g2) * w),
            g * w,
        ]
    }

    /// First of {0, 1, 2, ...} where every integrand is regular.
    pub fn default_basepoint(&self) -> Result<C64> {
        let ints = self.integrands();
        let mut candidates = vec![C64::new(0.0, 0.0)];
        candidates.extend(crate::legendrian::BASEPOINT_CANDIDATES);
        candidates
            .into_iter()
            .find(|z| ints.iter().all(|e| eval_principal(e, *z).is_ok()))
            .ok_or(Error::InvalidBasepoint {
                z: C64::new(0.0, 0.0),
                reason: "no candidate base point is regular".into(),
            })
    }
}

fn is_numerically_zero(e: &MeroExpr) -> bool {
    let mut seen = 0;
    for z in PROBES {
        if let Ok(v) = eval_principal(e, z) {
            seen += 1;
            if v.norm() > 1e-13 {
                return false;
            }
        }
    }
    seen >= 3
}

impl C3Curve {
    pub fn new(f1: MeroExpr, f2: MeroExpr, f3: MeroExpr) -> Self {
        C3Curve { f: [f1, f2, f3] }
    }

    pub fn eval(&self, z: C64, branch: &BranchState) -> Result<[C64; 3]> {
        Ok([
            eval(&self.f[0], z, branch)?,
            eval(&self.f[1], z, branch)?,
            eval(&self.f[2], z, branch)?,
        ])
    }

    pub fn eval_principal(&self, z: C64) -> Result<[C64; 3]> {
        let st = self.tracker().init(z, &BranchState::principal())?;
        self.eval(z, &st)
    }

    pub fn derivative(&self) -> [MeroExpr; 3] {
        [self.f[0].derivative(), self.f[1].derivative(), self.f[2].derivative()]
    }

    pub fn tracker(&self) -> Tracker {
        let [a, b, c] = &self.f;
        let [da, db, dc] = self.derivative();
        Tracker::new(&[a, b, c, &da, &db, &dc])
    }

    /// `|Σ (dFʲ)²| / Σ |dFʲ|²` at `z`; 0 for a null curve.
    pub fn nullity_residual(&self, z: C64) -> Result<f64> {
        let st = self.tracker().init(z, &BranchState::principal())?;
        let df: Vec<C64> = self
            .derivative()
            .iter()
            .map(|e| eval(e, z, &st))
            .collect::<std::result::Result<_, _>>()?;
        let sq: C64 = df.iter().map(|x| x * x).sum();
        let scale: f64 = df.iter().map(|x| x.norm_sqr()).sum();
        Ok(if scale == 0.0 { sq.norm() } else { sq.norm() / scale })
    }
}

/// `∫ ½((1 - g²) ω, i(1 + g²) ω, 2gω)` along `path`, starting on the
/// principal branch at the path start.
pub fn weierstrass_integrate(data: &WeierstrassData, path: &PathC) -> Result<[C64; 3]> {
    let ints = data.integrands();
    let tracker = Tracker::new(&[&ints[0], &ints[1], &ints[2]]);
    let start = tracker.init(path.start(), &BranchState::principal())?;
    let opts = QuadOptions::default();
    let mut out = [C64::new(0.0, 0.0); 3];
    for (o, e) in out.iter_mut().zip(&ints) {
        *o = integrate_path(&tracker, |z, s| eval(e, z, s), path, &start, &opts)?.0;
    }
    Ok(out)
}

/// Integral-free null curve from `(g, h)`, with `h₁ = dh/dg`, `h₂ = dh₁/dg`:
///
/// `F1 = -h + g h₁ + (1 - g²)/2 h₂`, `F2 = i(h - g h₁ + (1 + g²)/2 h₂)`,
/// `F3 = -h₁ + g h₂`.
///
/// Its Weierstrass data is `(g, dh₂)`.
pub fn integral_free_null(g: &MeroExpr, h: &MeroExpr) -> Result<C3Curve> {
    if is_numerically_constant(g) {
        return Err(Error::ConstantInput("g"));
    }
    let dg = g.derivative();
    let h1 = &h.derivative() / &dg;
    let h2 = &h1.derivative() / &dg;
    let g2 = MeroExpr::powi(g, 2);
    let half = MeroExpr::real(0.5);
    let one = MeroExpr::one();
    let f1 = &(&(-h) + &(g * &h1)) + &(&(&half * &(&one - &g2)) * &h2);
    let f2 = &MeroExpr::i() * &(&(h - &(g * &h1)) + &(&(&half * &(&one + &g2)) * &h2));
    let f3 = &(-&h1) + &(g * &h2);
    Ok(C3Curve::new(f1, f2, f3))
}

fn max_rel_diff(pairs: &[(MeroExpr, MeroExpr)]) -> Option<f64> {
    let mut worst = 0.0f64;
    let mut seen = 0;
    for z in PROBES {
        let mut ok = true;
        let mut local = 0.0f64;
        for (a, b) in pairs {
            match (eval_principal(a, z), eval_principal(b, z)) {
                (Ok(x), Ok(y)) => local = local.max((x - y).norm() / (1.0 + y.norm())),
                _ => ok = false,
            }
        }
        if ok {
            seen += 1;
            worst = worst.max(local);
        }
    }
    (seen >= 3).then_some(worst)
}

const CHECK_TOL: f64 = 1e-9;

/// `ω = d(F1 - iF2)`, `g = dF3/ω`, validated against the Weierstrass
/// integrands at the probe points.
pub fn extract_weierstrass(f: &C3Curve) -> Result<WeierstrassData> {
    let [d1, d2, d3] = f.derivative();
    let omega = &d1 - &(&MeroExpr::i() * &d2);
    if omega.is_literal_zero() || is_numerically_zero(&omega) {
        return Err(Error::DegenerateOmega);
    }
    let g = &d3 / &omega;
    let data = WeierstrassData {
        g,
        omega: omega.clone(),
    };
    let [i1, i2, i3] = data.integrands();
    match max_rel_diff(&[(d1, i1), (d2, i2), (d3, i3)]) {
        Some(r) if r < CHECK_TOL => Ok(data),
        Some(r) => Err(Error::VerificationFailed(format!(
            "dF does not match the Weierstrass integrands (residual {:.3e}); input not null",
            r
        ))),
        None => Err(Error::VerificationFailed("too few regular probe points".into())),
    }
}

/// `(h, h₁, h₂)` with `h₂ = F1 - iF2`, `h₁ = h₂ g - F3` and
/// `h = (ψ - h₂ g² + 2 h₁ g)/2` where `ψ = -F1 - iF2`; checks `h₂ = dh₁/dg`
/// and `h₁ = dh/dg` at the probe points.
pub fn extract_h_data(f: &C3Curve) -> Result<(MeroExpr, MeroExpr, MeroExpr)> {
    let data = extract_weierstrass(f)?;
    let g = &data.g;
    let [f1, f2, f3] = &f.f;
    let i = MeroExpr::i();
    let h2 = f1 - &(&i * f2);
    let h1 = &(&h2 * g) - f3;
    let psi = &(-f1) - &(&i * f2);
    let g2 = MeroExpr::powi(g, 2);
    let h = &MeroExpr::real(0.5)
        * &(&(&psi - &(&h2 * &g2)) + &(&MeroExpr::real(2.0) * &(&h1 * g)));
    let dg = g.derivative();
    let checks = [
        (&h1.derivative() / &dg, h2.clone()),
        (&h.derivative() / &dg, h1.clone()),
    ];
    match max_rel_diff(&checks) {
        Some(r) if r < CHECK_TOL => Ok((h, h1, h2)),
        Some(r) => Err(Error::VerificationFailed(format!(
            "h-chain identities fail (residual {:.3e})",
            r
        ))),
        None => Err(Error::VerificationFailed("too few regular probe points".into())),
    }
}
