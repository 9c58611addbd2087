//! Verification reports: every identity that should hold for a built curve,
//! probed at seeded random sample points.

use serde::Serialize;

use crate::c3::{extract_h_data, extract_weierstrass, weierstrass_integrate, C3Curve, WeierstrassData};
use crate::error::{Error, Result};
use crate::expr::{
    continue_along, eval, eval_principal, finite_poles, BranchState, MeroExpr, PathC, C64,
};
use crate::front::HermitianPoint;
use crate::legendrian::{
    canonical_forms, check_conditions, hopf_legendrian,
    legendrian_from_g_omega, legendrian_from_gauss, monodromy, ConditionsReport, GaussPair,
    LegendrianCurve, MonodromyClass, MONODROMY_TOL,
};
use crate::matrix::ExprMatrix;
use crate::null_curve::{
    gauss_from_null, hopf_null, schwarzian, secondary_gauss_via_mc, NullData,
};
use crate::psl2::{is_unitary, psl_distance, Ext, Mat2C};
use crate::sampling::{annulus_points, rng};
use crate::spec::{Built, LegendrianBuild};

/// Fourth derivatives enter the Schwarzian identity; it gets its own floor.
pub const SCHWARZIAN_TOL: f64 = 1e-6;

const SAMPLE_RMIN: f64 = 0.3;
const SAMPLE_RMAX: f64 = 2.5;
const CLEARANCE: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub citation: String,
    pub samples: usize,
    /// Sample points where evaluation failed and which were left out.
    pub skipped: usize,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonodromyRecord {
    pub around: Option<C64>,
    pub loop_start: C64,
    pub matrix: Mat2C,
    pub classification: MonodromyClass,
    pub expected: Option<Mat2C>,
    pub psl_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: String,
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub records: Vec<Record>,
    pub conditions: Option<ConditionsReport>,
    pub monodromy: Vec<MonodromyRecord>,
    pub findings: Vec<Finding>,
    pub pass: bool,
}

impl VerificationReport {
    fn new(kind: &str, samples: usize, tol: f64, seed: u64) -> Self {
        VerificationReport {
            kind: kind.to_string(),
            samples,
            tolerance: tol,
            seed,
            records: Vec::new(),
            conditions: None,
            monodromy: Vec::new(),
            findings: Vec::new(),
            pass: false,
        }
    }

    /// Report for a curve that could not be built (for reasons other than
    /// invalid input): one failing record and a finding.
    pub fn construction_failed(kind: &str, err: &Error, samples: usize, tol: f64, seed: u64) -> Self {
        let mut r = Self::new(kind, samples, tol, seed);
        r.records.push(Record {
            name: "construction".into(),
            citation: "the input data defines a curve".into(),
            samples: 0,
            skipped: 0,
            max_residual: None,
            tolerance: tol,
            pass: false,
        });
        r.findings.push(finding(err));
        r.finish()
    }

    fn finish(mut self) -> Self {
        self.pass = !self.records.is_empty() && self.records.iter().all(|r| r.pass);
        self
    }

    fn push(&mut self, acc: Acc) {
        self.records.push(acc.record());
    }

    fn fail_record(&mut self, name: &'static str, citation: &'static str, tol: f64, err: &Error) {
        let mut acc = Acc::new(name, citation, tol);
        acc.skip();
        self.push(acc);
        self.findings.push(finding(err));
    }
}

fn finding(err: &Error) -> Finding {
    Finding {
        code: err.code().to_string(),
        message: err.to_string(),
    }
}

/// Running maximum of one residual over the sample points.
struct Acc {
    name: &'static str,
    citation: &'static str,
    tol: f64,
    max: f64,
    n: usize,
    skipped: usize,
}

impl Acc {
    fn new(name: &'static str, citation: &'static str, tol: f64) -> Self {
        Acc {
            name,
            citation,
            tol,
            max: 0.0,
            n: 0,
            skipped: 0,
        }
    }

    fn add(&mut self, r: f64) {
        self.n += 1;
        // NaN must fail, so keep it sticky
        self.max = if r.is_nan() || self.max.is_nan() { f64::NAN } else { self.max.max(r) };
    }

    fn skip(&mut self) {
        self.skipped += 1;
    }

    fn take<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                log::debug!("{}: skipping sample: {}", self.name, e);
                self.skip();
                None
            }
        }
    }

    fn record(&self) -> Record {
        let max = (self.n > 0).then_some(self.max);
        Record {
            name: self.name.to_string(),
            citation: self.citation.to_string(),
            samples: self.n,
            skipped: self.skipped,
            max_residual: max.filter(|m| m.is_finite()),
            tolerance: self.tol,
            pass: self.n > 0 && self.max.is_finite() && self.max < self.tol,
        }
    }
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn ext_dist(a: Ext, b: C64) -> f64 {
    a.chordal(Ext::Finite(b))
}

/// Distance from `p` to the segment `[a, b]`.
fn segment_distance(a: C64, b: C64, p: C64) -> f64 {
    let d = b - a;
    let t = if d.norm_sqr() == 0.0 {
        0.0
    } else {
        (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0)
    };
    (a + d * t - p).norm()
}

/// A path from `z0` to `z` keeping away from `avoid`: the segment, or a
/// two-segment detour.
pub fn route(z0: C64, z: C64, avoid: &[C64], clearance: f64) -> PathC {
    if z == z0 {
        return PathC::point(z);
    }
    let clear = |a: C64, b: C64| avoid.iter().all(|p| segment_distance(a, b, *p) >= clearance);
    if clear(z0, z) {
        return PathC::segment(z0, z).expect("distinct finite endpoints");
    }
    let mid = (z0 + z) * 0.5;
    let perp = (z - z0) * C64::new(0.0, 1.0);
    for s in [0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
        let w = mid + perp * s;
        if clear(z0, w) && clear(w, z) {
            if let Ok(p) = PathC::polyline(vec![z0, w, z]) {
                return p;
            }
        }
    }
    PathC::segment(z0, z).expect("distinct finite endpoints")
}

/// Finite poles and zeros of rational expressions; others contribute nothing.
fn singular_set(exprs: &[&MeroExpr]) -> Vec<C64> {
    let mut out = Vec::new();
    for e in exprs {
        for f in [(*e).clone(), &MeroExpr::one() / *e] {
            if let Ok(ps) = finite_poles(&f) {
                out.extend(ps.into_iter().map(|(p, _)| p));
            }
        }
    }
    out
}

fn sample_points(n: usize, seed: u64, avoid: &[C64]) -> Vec<C64> {
    annulus_points(
        &mut rng(seed),
        n,
        C64::new(0.0, 0.0),
        SAMPLE_RMIN,
        SAMPLE_RMAX,
        avoid,
        CLEARANCE,
    )
}

/// Run every applicable identity for `built` at `samples` seeded points.
pub fn verify(built: &Built, samples: usize, tol: f64, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new(built.kind(), samples, tol, seed);
    match built {
        Built::Legendrian(l) => verify_legendrian(&mut report, l, samples, tol, seed),
        Built::Null { data, f } => verify_null(&mut report, data, f, samples, tol, seed),
        Built::C3Weierstrass { data, basepoint } => {
            verify_weierstrass(&mut report, data, *basepoint, samples, tol, seed)
        }
        Built::C3IntegralFree { g, h, curve } => {
            verify_integral_free(&mut report, g, h, curve, samples, tol, seed)
        }
    }
    report.finish()
}

/// `(ω, θ)` from `E` and `E'` via `E⁻¹ E' = [[0, θ], [ω, 0]]`, plus the
/// size of the diagonal relative to the whole.
fn forms_from(e: &Mat2C, de: &Mat2C) -> (C64, C64, f64) {
    let x = e.inverse() * *de;
    let diag = x.a.norm() + x.d.norm();
    (x.c, x.b, diag / x.frobenius().max(1e-300))
}

/// The curve to compare against: from the Gauss pair when the main curve
/// came from `(G, ω)`, and from `(G, -dG/ξ²)` otherwise.
fn partner(l: &LegendrianBuild) -> Result<LegendrianCurve> {
    let e = &l.curve;
    match e.construction {
        crate::legendrian::Construction::FromGaussPair => {
            let pair = l.pair.as_ref().ok_or(Error::NonElementary)?;
            let (omega, _) = canonical_forms(e)?;
            legendrian_from_g_omega(&pair.big_g, &omega, Some(e.basepoint))
        }
        _ => legendrian_from_gauss(l.pair.as_ref().ok_or(Error::NonElementary)?),
    }
}

/// Lassos from the base point around each known singular point.
fn default_loops(z0: C64, sing: &[C64]) -> Vec<(C64, PathC)> {
    let mut out = Vec::new();
    for (i, p) in sing.iter().enumerate() {
        if out.iter().any(|(q, _): &(C64, PathC)| (q - p).norm() < 1e-9) {
            continue;
        }
        let mut r = 0.5 * (z0 - p).norm();
        for (j, q) in sing.iter().enumerate() {
            let d = (q - p).norm();
            if j != i && d > 1e-9 {
                r = r.min(0.4 * d);
            }
        }
        let r = r.min(0.5);
        if r <= 1e-6 {
            continue;
        }
        if let Ok(lp) = PathC::lasso(z0, *p, r, 96) {
            out.push((*p, lp));
        }
    }
    out
}

fn verify_legendrian(
    report: &mut VerificationReport,
    l: &LegendrianBuild,
    samples: usize,
    tol: f64,
    seed: u64,
) {
    let e = &l.curve;
    let z0 = e.basepoint;
    let base = match e.base_branch() {
        Ok(b) => b,
        Err(err) => {
            report.fail_record("construction", "E is defined at the base point", tol, &err);
            return;
        }
    };
    let mut avoid: Vec<C64> = Vec::new();
    if let Some(p) = &l.pair {
        avoid.extend(p.singular_points());
        avoid.extend(singular_set(&[&(&p.big_g - &p.gstar), &p.big_g.derivative()]));
    }
    if let Some((g, w)) = &l.g_omega {
        avoid.extend(singular_set(&[w, &g.derivative()]));
    }
    if let Some(entry) = &l.gallery {
        avoid.extend(entry.finite_punctures.iter().copied());
    }
    let points = sample_points(samples, seed, &avoid);

    let symbolic = e.matrix().ok().map(|m| (m.clone(), m.derivative()));
    let dual = e.dual();
    let double_dual = dual.dual();
    let other = match partner(l) {
        Ok(c) => Some(c),
        Err(err) => {
            report.findings.push(Finding {
                code: "no-cross-construction".into(),
                message: err.to_string(),
            });
            None
        }
    };
    let other_base = other.as_ref().and_then(|c| c.base_branch().ok());
    let hopf = l.pair.as_ref().map(hopf_legendrian);

    let mut det = Acc::new("det_E", "det E = 1", tol);
    let mut contact = Acc::new("contact", "D dA - B dC = 0 (E is Legendrian)", tol);
    let mut canon = Acc::new(
        "canonical_form_shape",
        "E^-1 dE is off-diagonal [[0, theta], [omega, 0]]",
        tol,
    );
    let mut gauss = Acc::new("gauss_roundtrip", "(A/C, B/D) reproduces (G, G*)", tol);
    let mut hopf_acc = Acc::new(
        "hopf_three_way",
        "omega theta = -dG dG*/(G - G*)^2 = Q of the Gauss pair",
        tol,
    );
    let mut dual_acc = Acc::new("dual_involution", "dual of the dual is E in PSL(2,C)", tol);
    let mut dual_swap = Acc::new("dual_swaps_gauss", "the dual curve has Gauss maps (G*, G)", tol);
    let mut cross = Acc::new(
        "cross_construction",
        "Gauss-pair and (G, omega) constructions agree in PSL(2,C)",
        tol,
    );

    let entry = l.gallery.as_ref();
    let mut g_matrix = Acc::new("printed_matrix", "closed form of E", tol);
    let mut g_big_g = Acc::new("printed_G", "hyperbolic Gauss map G", tol);
    let mut g_gstar = Acc::new("printed_Gstar", "hyperbolic Gauss map G*", tol);
    let mut g_omega = Acc::new("printed_omega", "canonical form omega", tol);
    let mut g_theta = Acc::new("printed_theta", "dual canonical form theta", tol);
    let expected_matrix = entry.and_then(|g| g.expected_matrix.as_ref());
    let expected_theta = entry.and_then(|g| g.expected_theta.as_ref());
    if let Some(en) = entry {
        g_big_g.citation = en.expected_gauss.citation;
        g_gstar.citation = en.expected_gauss.citation;
        g_omega.citation = en.expected_omega.citation;
    }
    if let Some(m) = expected_matrix {
        g_matrix.citation = m.citation;
    }
    if let Some(t) = expected_theta {
        g_theta.citation = t.citation;
    }

    for &z in &points {
        let path = route(z0, z, &avoid, 0.5 * CLEARANCE);
        let Some((v, st)) = det.take(e.value_along(&path, &base)) else {
            continue;
        };
        det.add((v.det() - 1.0).norm());

        let forms = match &symbolic {
            Some((m, dm)) => {
                let st = m.tracker().init(z, &st).map_err(Error::from);
                match st.and_then(|s| dm.eval(z, &s)) {
                    Ok(dv) => {
                        let r = (v.d * dv.a - v.b * dv.c).norm() / (v.frobenius() * dv.frobenius()).max(1e-300);
                        contact.add(r);
                        let (w, t, diag) = forms_from(&v, &dv);
                        canon.add(diag);
                        Some((w, t))
                    }
                    Err(err) => {
                        contact.take::<()>(Err(err));
                        canon.skip();
                        None
                    }
                }
            }
            None => gauss.take(e.forms_along(&path, &base)),
        };

        if let Some(pair) = &l.pair {
            let gz = eval(&pair.big_g, z, &st).or_else(|_| eval_principal(&pair.big_g, z));
            let gsz = eval(&pair.gstar, z, &st).or_else(|_| eval_principal(&pair.gstar, z));
            if let (Ok(gz), Ok(gsz)) = (gz, gsz) {
                match (Ext::ratio(v.a, v.c), Ext::ratio(v.b, v.d)) {
                    (Some(a), Some(b)) => gauss.add(ext_dist(a, gz).max(ext_dist(b, gsz))),
                    _ => gauss.skip(),
                }
                if let (Some((w, t)), Some(h)) = (forms, &hopf) {
                    let dg = eval_principal(&pair.big_g.derivative(), z);
                    let dgs = eval_principal(&pair.gstar.derivative(), z);
                    let q3 = eval_principal(h, z);
                    match (dg, dgs, q3) {
                        (Ok(dg), Ok(dgs), Ok(q3)) => {
                            let q2 = -dg * dgs / ((gz - gsz) * (gz - gsz));
                            hopf_acc.add(rel(w * t, q2).max(rel(q3, q2)));
                        }
                        _ => hopf_acc.skip(),
                    }
                }
                match dual.value_along(&path, &base) {
                    Ok((dv, _)) => match (Ext::ratio(dv.a, dv.c), Ext::ratio(dv.b, dv.d)) {
                        (Some(a), Some(b)) => dual_swap.add(ext_dist(a, gsz).max(ext_dist(b, gz))),
                        _ => dual_swap.skip(),
                    },
                    Err(_) => dual_swap.skip(),
                }
            } else {
                gauss.skip();
            }
        }
        if let Some((dd, _)) = dual_acc.take(double_dual.value_along(&path, &base)) {
            dual_acc.add(psl_distance(&dd, &v));
        }
        if let (Some(o), Some(ob)) = (&other, &other_base) {
            if let Some((ov, _)) = cross.take(o.value_along(&path, ob)) {
                cross.add(psl_distance(&ov, &v));
            }
        }

        if let Some(en) = entry {
            if let Some(m) = expected_matrix {
                let got = m
                    .value
                    .branch_at(z0, &BranchState::principal())
                    .and_then(|b| m.value.continue_along(&path, &b));
                if let Some((mv, _)) = g_matrix.take(got) {
                    g_matrix.add(psl_distance(&mv, &v));
                }
            }
            let (pg, pgs) = &en.expected_gauss.value;
            match (expr_along(pg, &path), expr_along(pgs, &path)) {
                (Ok(a), Ok(b)) => {
                    let ga = Ext::ratio(v.a, v.c);
                    let gb = Ext::ratio(v.b, v.d);
                    match (ga, gb) {
                        (Some(ga), Some(gb)) => {
                            g_big_g.add(ext_dist(ga, a));
                            g_gstar.add(ext_dist(gb, b));
                        }
                        _ => {
                            g_big_g.skip();
                            g_gstar.skip();
                        }
                    }
                }
                _ => {
                    g_big_g.skip();
                    g_gstar.skip();
                }
            }
            if let Some((w, t)) = forms {
                if let Some(pw) = g_omega.take(expr_along(&en.expected_omega.value, &path)) {
                    g_omega.add(rel(w, pw));
                }
                if let Some(th) = expected_theta {
                    if let Some(pt) = g_theta.take(expr_along(&th.value, &path)) {
                        g_theta.add(rel(t, pt));
                    }
                }
            }
        }
    }

    report.push(det);
    if symbolic.is_some() {
        report.push(contact);
        report.push(canon);
    } else {
        report.findings.push(Finding {
            code: "non-elementary".into(),
            message: "E is evaluated by path integrals; contact and shape checks skipped".into(),
        });
    }
    if l.pair.is_some() {
        report.push(gauss);
        report.push(hopf_acc);
        report.push(dual_swap);
    }
    report.push(dual_acc);
    if other.is_some() {
        report.push(cross);
    }
    if let Some(en) = entry {
        if en.expected_matrix.is_some() {
            report.push(g_matrix);
        }
        report.push(g_big_g);
        report.push(g_gstar);
        report.push(g_omega);
        if en.expected_theta.is_some() {
            report.push(g_theta);
        }
    }

    // periods and monodromy
    let loops: Vec<(C64, PathC, Option<Mat2C>)> = match entry {
        Some(en) => en
            .expected_monodromy
            .iter()
            .map(|m| (m.around, m.loop_path.clone(), Some(m.matrix)))
            .collect(),
        None => default_loops(z0, &dedup(&avoid))
            .into_iter()
            .map(|(p, lp)| (p, lp, None))
            .collect(),
    };
    // the printed pair of a gallery entry is rational, so pole orders are decidable
    let cond_pair = match entry {
        Some(en) => en.gauss_pair().ok(),
        None => l.pair.as_ref().and_then(|p| pair_at(p, z0)),
    };
    if let Some(pair) = cond_pair {
        let paths: Vec<PathC> = loops.iter().map(|(_, lp, _)| lp.clone()).collect();
        match check_conditions(&pair, &paths) {
            Ok(c) => report.conditions = Some(c),
            Err(err) => report.findings.push(finding(&err)),
        }
    }
    let mut mono = Acc::new(
        "monodromy",
        "monodromy matches the expected deck transformation up to sign",
        tol.max(MONODROMY_TOL),
    );
    let mut descent = Acc::new(
        "f_descent",
        "f = E E* is invariant under deck loops (unitary monodromy)",
        tol,
    );
    for (around, lp, expected) in &loops {
        let res = match mono.take(monodromy(e, lp)) {
            Some(r) => r,
            None => {
                descent.skip();
                continue;
            }
        };
        let dist = expected.map(|m| psl_distance(&res.matrix, &m));
        if let Some(d) = dist {
            mono.add(d);
        }
        // f at the loop start before and after the deck transformation
        if let Ok((v, _)) = e.value_along(&PathC::point(lp.start()), &base) {
            let f0 = HermitianPoint::from_sl2(&v).x;
            let f1 = HermitianPoint::from_sl2(&(v * res.matrix)).x;
            let r = (f1 - f0).frobenius() / f0.frobenius();
            if entry.is_some_and(|en| en.descends) || is_unitary(&res.matrix, MONODROMY_TOL) {
                descent.add(r);
            }
        } else {
            descent.skip();
        }
        report.monodromy.push(MonodromyRecord {
            around: Some(*around),
            loop_start: lp.start(),
            matrix: res.matrix,
            classification: res.classification,
            expected: *expected,
            psl_distance: dist,
        });
    }
    if entry.is_some() {
        report.push(mono);
        if entry.is_some_and(|en| en.descends) {
            report.push(descent);
        }
    } else if descent.n > 0 {
        report.push(descent);
    }
}

fn dedup(pts: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::new();
    for p in pts {
        if p.re.is_finite() && p.im.is_finite() && out.iter().all(|q| (q - p).norm() > 1e-9) {
            out.push(*p);
        }
    }
    out
}

/// The pair with its base point moved to `z0` when needed.
fn pair_at(p: &GaussPair, z0: C64) -> Option<GaussPair> {
    if p.z0 == z0 {
        Some(p.clone())
    } else {
        GaussPair::new(p.big_g.clone(), p.gstar.clone(), Some(z0), Some(p.c)).ok()
    }
}

/// Value of `e` at the end of `path`, principal at its start.
fn expr_along(e: &MeroExpr, path: &PathC) -> Result<C64> {
    Ok(continue_along(e, path, &BranchState::principal())?.0)
}

fn verify_null(
    report: &mut VerificationReport,
    data: &NullData,
    f: &ExprMatrix,
    samples: usize,
    tol: f64,
    seed: u64,
) {
    let avoid = singular_set(&[&data.big_g, &data.g, &data.big_g.derivative(), &data.g.derivative()]);
    let points = sample_points(samples, seed, &avoid);
    let df = f.derivative();
    let q = hopf_null(f, &data.g);
    let sch = schwarzian(&data.g).and_then(|sg| Ok((sg, schwarzian(&data.big_g)?)));
    let tracker = {
        let [a, b, c, d] = f.full_entries();
        let [da, db, dc, dd] = df.full_entries();
        crate::expr::Tracker::new(&[&a, &b, &c, &d, &da, &db, &dc, &dd, &q])
    };

    let mut det = Acc::new("det_F", "det F = 1", tol);
    let mut null = Acc::new("null_det_dF", "det dF = 0 relative to |dF|^2", tol);
    let mut gauss = Acc::new("gauss_roundtrip", "(dA/dC, -dB/dA) reproduces (G, g)", tol);
    let mut mc = Acc::new(
        "secondary_gauss_mc",
        "g recovered from the Maurer-Cartan form F^-1 dF",
        tol,
    );
    let mut schw = Acc::new(
        "schwarzian",
        "S(g) - S(G) = 2Q with Q = (A dC - C dA) dg",
        tol.max(SCHWARZIAN_TOL),
    );
    for &z in &points {
        let Some(st) = det.take(tracker.init(z, &BranchState::principal()).map_err(Error::from)) else {
            continue;
        };
        let (Some(v), Some(dv)) = (det.take(f.eval(z, &st)), null.take(df.eval(z, &st))) else {
            continue;
        };
        det.add((v.det() - 1.0).norm());
        null.add(dv.det().norm() / dv.frobenius().powi(2).max(1e-300));
        let gz = eval(&data.big_g, z, &st);
        let sz = eval(&data.g, z, &st);
        let (Ok(gz), Ok(sz)) = (gz, sz) else {
            gauss.skip();
            mc.skip();
            schw.skip();
            continue;
        };
        if let Some((a, b)) = gauss.take(gauss_from_null(f, z, &st)) {
            gauss.add(ext_dist(a, gz).max(ext_dist(b, sz)));
        }
        if let Some(s) = mc.take(secondary_gauss_via_mc(f, z, &st)) {
            mc.add(ext_dist(s, sz));
        }
        match &sch {
            Ok((sg, sgg)) => {
                let vals = (eval(sg, z, &st), eval(sgg, z, &st), eval(&q, z, &st));
                if let (Ok(a), Ok(b), Ok(qz)) = vals {
                    let scale = 1.0 + a.norm() + b.norm();
                    schw.add((a - b - 2.0 * qz).norm() / scale);
                } else {
                    schw.skip();
                }
            }
            Err(_) => schw.skip(),
        }
    }
    for a in [det, null, gauss, mc, schw] {
        report.push(a);
    }
}

fn verify_weierstrass(
    report: &mut VerificationReport,
    data: &WeierstrassData,
    z0: C64,
    samples: usize,
    tol: f64,
    seed: u64,
) {
    let ints = data.integrands();
    let poles: Vec<_> = ints.iter().map(finite_poles).collect();
    let rational = poles.iter().all(|p| p.is_ok());
    let avoid: Vec<C64> = poles.into_iter().flatten().flatten().map(|(p, _)| p).collect();
    let points = sample_points(samples, seed, &avoid);
    let mut null = Acc::new(
        "nullity",
        "the Weierstrass integrands satisfy (dF1)^2 + (dF2)^2 + (dF3)^2 = 0",
        tol,
    );
    let mut indep = Acc::new(
        "path_independence",
        "two homotopic paths give the same integral",
        tol,
    );
    for &z in &points {
        let vals: std::result::Result<Vec<C64>, _> = ints.iter().map(|e| eval_principal(e, z)).collect();
        let Some(vals) = null.take(vals.map_err(Error::from)) else {
            continue;
        };
        let sq: C64 = vals.iter().map(|x| x * x).sum();
        let scale: f64 = vals.iter().map(|x| x.norm_sqr()).sum();
        null.add(sq.norm() / scale.max(1e-300));
        if !rational || z == z0 {
            continue;
        }
        // a triangle free of singular points: both sides are homotopic
        let w = (z0 + z) * 0.5 + (z - z0) * C64::new(0.0, 0.25);
        let inside = avoid.iter().any(|p| in_triangle(*p, z0, w, z));
        if inside || avoid.iter().any(|p| segment_distance(z0, z, *p) < 1e-3) {
            indep.skip();
            continue;
        }
        let a = PathC::segment(z0, z).map_err(Error::from).and_then(|p| weierstrass_integrate(data, &p));
        let b = PathC::polyline(vec![z0, w, z])
            .map_err(Error::from)
            .and_then(|p| weierstrass_integrate(data, &p));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let s = a.iter().map(|x| x.norm()).fold(1.0, f64::max);
                let d = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
                indep.add(d / s);
            }
            _ => indep.skip(),
        }
    }
    report.push(null);
    if rational {
        report.push(indep);
    }
}

fn in_triangle(p: C64, a: C64, b: C64, c: C64) -> bool {
    let cross = |u: C64, v: C64| u.re * v.im - u.im * v.re;
    let d1 = cross(b - a, p - a);
    let d2 = cross(c - b, p - b);
    let d3 = cross(a - c, p - c);
    let neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(neg && pos)
}

fn verify_integral_free(
    report: &mut VerificationReport,
    g: &MeroExpr,
    h: &MeroExpr,
    curve: &C3Curve,
    samples: usize,
    tol: f64,
    seed: u64,
) {
    let dg = g.derivative();
    let h1 = &h.derivative() / &dg;
    let h2 = &h1.derivative() / &dg;
    let dh2 = h2.derivative();
    let avoid = singular_set(&[g, h, &dg]);
    let points = sample_points(samples, seed, &avoid);
    let mut null = Acc::new("nullity", "(dF1)^2 + (dF2)^2 + (dF3)^2 = 0", tol);
    let mut wdata = Acc::new(
        "weierstrass_roundtrip",
        "the extracted Weierstrass data is (g, dh2)",
        tol,
    );
    let mut hdata = Acc::new("h_data_roundtrip", "the extracted (h, h1, h2) match the input", tol);
    let extracted = extract_weierstrass(curve);
    let hs = extract_h_data(curve);
    if let Err(err) = &extracted {
        report.findings.push(finding(err));
    }
    if let Err(err) = &hs {
        if extracted.is_ok() {
            report.findings.push(finding(err));
        }
    }
    for &z in &points {
        if let Some(r) = null.take(curve.nullity_residual(z)) {
            null.add(r);
        }
        let want = [g, &dh2, h, &h1, &h2].map(|e| eval_principal(e, z));
        let Ok::<Vec<C64>, _>(want) = want.into_iter().collect() else {
            wdata.skip();
            hdata.skip();
            continue;
        };
        match &extracted {
            Ok(d) => match (eval_principal(&d.g, z), eval_principal(&d.omega, z)) {
                (Ok(a), Ok(b)) => wdata.add(rel(a, want[0]).max(rel(b, want[1]))),
                _ => wdata.skip(),
            },
            Err(_) => wdata.skip(),
        }
        match &hs {
            Ok((eh, eh1, eh2)) => {
                let got = [eh, eh1, eh2].map(|e| eval_principal(e, z));
                match got {
                    [Ok(a), Ok(b), Ok(c)] => {
                        hdata.add(rel(a, want[2]).max(rel(b, want[3])).max(rel(c, want[4])))
                    }
                    _ => hdata.skip(),
                }
            }
            Err(_) => hdata.skip(),
        }
    }
    report.push(null);
    report.push(wdata);
    report.push(hdata);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::CurveSpec;

    fn run(json: &str, n: usize) -> VerificationReport {
        let built = CurveSpec::from_json(json).unwrap().build().unwrap();
        verify(&built, n, 1e-8, 0)
    }

    fn failing(r: &VerificationReport) -> Vec<String> {
        r.records.iter().filter(|x| !x.pass).map(|x| format!("{:?}", x)).collect()
    }

    #[test]
    fn equidistant_passes() {
        let r = run(r#"{"kind":"gallery","name":"equidistant","params":{"k":2}}"#, 40);
        assert!(r.pass, "{:#?}", failing(&r));
        assert!(r.records.iter().any(|x| x.name == "cross_construction"));
        assert!(r.records.iter().any(|x| x.name == "printed_matrix"));
    }

    #[test]
    fn gauss_spec_passes() {
        let r = run(r#"{"kind":"legendrian_gauss","G":"z","Gstar":"-z"}"#, 40);
        assert!(r.pass, "{:#?}", failing(&r));
        let c = r.conditions.unwrap();
        assert!(c.period_checks.iter().all(|p| p.pass));
    }

    #[test]
    fn null_and_c3_pass() {
        for s in [
            r#"{"kind":"null_small","G":"z","g":"z^2"}"#,
            r#"{"kind":"null_small","G":"z","g":"exp(z)"}"#,
            r#"{"kind":"c3_integral_free","g":"z","h":"z^3/6"}"#,
            r#"{"kind":"c3_weierstrass","g":"z","omega":"1"}"#,
        ] {
            let r = run(s, 30);
            assert!(r.pass, "{}: {:#?}", s, failing(&r));
        }
    }

    #[test]
    fn deterministic() {
        let a = run(r#"{"kind":"null_small","G":"z^2","g":"z^3"}"#, 20);
        let b = run(r#"{"kind":"null_small","G":"z^2","g":"z^3"}"#, 20);
        assert_eq!(a, b);
    }

    #[test]
    fn construction_failure_report() {
        let r = VerificationReport::construction_failed("null_small", &Error::GIsMoebiusOfG, 10, 1e-8, 0);
        assert!(!r.pass);
        assert_eq!(r.findings[0].code, "g-is-moebius-of-G");
    }

    #[test]
    fn routes_avoid_points() {
        let p = route(C64::new(2.0, 0.0), C64::new(-2.0, 0.0), &[C64::new(0.0, 0.0)], 0.1);
        assert_eq!(p.vertices().len(), 3);
        for (a, b) in p.segments() {
            assert!(segment_distance(a, b, C64::new(0.0, 0.0)) >= 0.1);
        }
    }
}
