//! The four example families of flat fronts, with their closed forms,
//! Gauss maps and monodromies attached as expectations.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expr::{eval_principal, parse_expr_with, MeroExpr, Params, PathC, C64};
use crate::front::{GridSpec, MeshPlan};
use crate::legendrian::{
    gstar_from_g_omega, legendrian_from_g_omega, legendrian_from_gauss, GaussPair, LegendrianCurve,
};
use crate::matrix::{ExprMatrix, MatrixKind};
use crate::psl2::Mat2C;

/// Base point of every gallery curve; branches are principal there.
pub const GALLERY_BASEPOINT: C64 = C64::new(2.0, 0.0);

pub const NAMES: [&str; 4] = ["equidistant", "revolution", "dihedral", "tetrahedral"];

/// An expected datum and where it comes from.
#[derive(Debug, Clone)]
pub struct Expected<T> {
    pub value: T,
    pub citation: &'static str,
}

#[derive(Debug, Clone)]
pub struct ExpectedMonodromy {
    pub around: C64,
    pub loop_path: PathC,
    pub matrix: Mat2C,
    pub citation: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamInfo {
    pub name: &'static str,
    pub default: f64,
    pub range: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogItem {
    pub name: &'static str,
    pub title: &'static str,
    pub params: &'static [ParamInfo],
}

pub const CATALOG: [CatalogItem; 4] = [
    CatalogItem {
        name: "equidistant",
        title: "surface equidistant from a geodesic",
        params: &[ParamInfo {
            name: "k",
            default: 2.0,
            range: "k > 0",
        }],
    },
    CatalogItem {
        name: "revolution",
        title: "flat front of revolution (universal cover of C minus 0)",
        params: &[ParamInfo {
            name: "mu",
            default: 0.5,
            range: "mu > 0, mu != 1",
        }],
    },
    CatalogItem {
        name: "dihedral",
        title: "flat front with dihedral symmetry and n complete ends",
        params: &[
            ParamInfo {
                name: "n",
                default: 3.0,
                range: "integer n >= 2",
            },
            ParamInfo {
                name: "k",
                default: 1.0,
                range: "k > 0",
            },
        ],
    },
    CatalogItem {
        name: "tetrahedral",
        title: "flat front with tetrahedral symmetry and four complete ends",
        params: &[ParamInfo {
            name: "k",
            default: 1.0,
            range: "k > 0",
        }],
    },
];

/// A constructed gallery curve with its expected data.
#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: &'static str,
    pub params: BTreeMap<String, f64>,
    pub big_g: MeroExpr,
    /// Coefficient of the canonical form `ω`.
    pub omega: MeroExpr,
    pub basepoint: C64,
    pub expected_matrix: Option<Expected<ExprMatrix>>,
    pub expected_gauss: Expected<(MeroExpr, MeroExpr)>,
    /// `G*` as derived from `(G, ω)`: `G + G' C / C'`.
    pub derived_gstar: MeroExpr,
    pub expected_omega: Expected<MeroExpr>,
    pub expected_theta: Option<Expected<MeroExpr>>,
    pub expected_monodromy: Vec<ExpectedMonodromy>,
    pub finite_punctures: Vec<C64>,
    pub puncture_at_infinity: bool,
    /// `E` lives on the universal cover only.
    pub universal_cover: bool,
    /// `f = E E*` is well defined on the punctured sphere.
    pub descends: bool,
    pub mesh_plan: MeshPlan,
}

fn param_map(item: &CatalogItem, given: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    for k in given.keys() {
        if !item.params.iter().any(|p| p.name == k) {
            return Err(Error::InvalidParameter {
                name: k.clone(),
                reason: format!("'{}' takes no parameter '{}'", item.name, k),
            });
        }
    }
    let mut out = BTreeMap::new();
    for p in item.params {
        let v = given.get(p.name).copied().unwrap_or(p.default);
        if !v.is_finite() {
            return Err(Error::InvalidParameter {
                name: p.name.into(),
                reason: "must be finite".into(),
            });
        }
        out.insert(p.name.to_string(), v);
    }
    Ok(out)
}

fn positive(params: &BTreeMap<String, f64>, name: &str) -> Result<f64> {
    let v = params[name];
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter {
            name: name.into(),
            reason: "must be positive".into(),
        })
    }
}

fn ex(src: &str, params: &BTreeMap<String, f64>) -> MeroExpr {
    let p: Params = params
        .iter()
        .map(|(k, v)| (k.clone(), C64::new(*v, 0.0)))
        .collect();
    parse_expr_with(src, &p).expect("gallery expressions are well formed")
}

/// Build a gallery entry by name; missing parameters take their defaults.
pub fn build(name: &str, params: &BTreeMap<String, f64>) -> Result<GalleryEntry> {
    match name {
        "equidistant" => {
            let p = param_map(&CATALOG[0], params)?;
            equidistant(positive(&p, "k")?)
        }
        "revolution" => {
            let p = param_map(&CATALOG[1], params)?;
            revolution(p["mu"])
        }
        "dihedral" => {
            let p = param_map(&CATALOG[2], params)?;
            let n = p["n"];
            if n.fract() != 0.0 || !(2.0..=64.0).contains(&n) {
                return Err(Error::InvalidParameter {
                    name: "n".into(),
                    reason: "must be an integer with 2 <= n <= 64".into(),
                });
            }
            dihedral(n as u32, positive(&p, "k")?)
        }
        "tetrahedral" => {
            let p = param_map(&CATALOG[3], params)?;
            tetrahedral(positive(&p, "k")?)
        }
        _ => Err(Error::UnknownGallery(name.to_string())),
    }
}

fn one_param(name: &str, v: f64) -> BTreeMap<String, f64> {
    BTreeMap::from([(name.to_string(), v)])
}

fn roots_of_unity(n: u32) -> Vec<C64> {
    (0..n)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// Lasso from the base point around each puncture.
fn puncture_loops(punctures: &[C64], radius: f64) -> Vec<(C64, PathC)> {
    punctures
        .iter()
        .map(|p| {
            let lp = PathC::lasso(GALLERY_BASEPOINT, *p, radius, 96)
                .expect("base point lies outside every puncture circle");
            (*p, lp)
        })
        .collect()
}

/// Mesh plan for `G = z` data with finite punctures on the unit circle: a
/// disc about 0, graded annuli about each puncture and an outer annulus.
fn symmetric_plan(punctures: &[C64], outer: f64) -> MeshPlan {
    let n = punctures.len() as f64;
    let rp = 0.8 * (PI / n).sin();
    let mut patches = vec![GridSpec::Annulus {
        center: C64::new(0.0, 0.0),
        rmin: 0.0,
        rmax: 1.0 - rp,
        nr: 10,
        ntheta: 48,
        phase: PI / n,
    }];
    for p in punctures {
        patches.push(GridSpec::Annulus {
            center: *p,
            rmin: 1e-4,
            rmax: rp,
            nr: 40,
            ntheta: 48,
            phase: p.arg(),
        });
    }
    patches.push(GridSpec::Annulus {
        center: C64::new(0.0, 0.0),
        rmin: 1.0 + rp,
        rmax: outer,
        nr: 40,
        ntheta: 48,
        phase: PI / n,
    });
    MeshPlan { patches }
}

fn annulus_plan() -> MeshPlan {
    MeshPlan {
        patches: vec![GridSpec::annulus(0.2, 5.0, 32, 64)],
    }
}

pub fn equidistant(k: f64) -> Result<GalleryEntry> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "must be positive".into(),
        });
    }
    let p = one_param("k", k);
    let big_g = ex("z", &p);
    let omega = ex("k/(2*z)", &p);
    let s = MeroExpr::constant(C64::new(0.0, 1.0 / 2f64.sqrt()));
    let m = ExprMatrix::new(
        &s * &ex("sqrt(k*z)", &p),
        &s * &ex("sqrt(z/k)", &p),
        &s * &ex("sqrt(k/z)", &p),
        &s * &ex("-1/sqrt(k*z)", &p),
        MatrixKind::Legendrian,
    );
    let derived_gstar = gstar_from_g_omega(&big_g, &omega);
    let loops = puncture_loops(&[C64::new(0.0, 0.0)], 1.0);
    Ok(GalleryEntry {
        name: "equidistant",
        params: p.clone(),
        expected_matrix: Some(Expected {
            value: m,
            citation: "printed closed form of E for the equidistant family",
        }),
        expected_gauss: Expected {
            value: (big_g.clone(), ex("-z", &p)),
            citation: "printed Gauss maps (z, -z) of the equidistant family",
        },
        expected_omega: Expected {
            value: omega.clone(),
            citation: "defining data omega = k/(2z) dz",
        },
        // ωθ = -dG dG*/(G - G*)² = 1/(4z²)
        expected_theta: Some(Expected {
            value: ex("1/(2*k*z)", &p),
            citation: "derived: theta = Q/omega with Q = 1/(4z^2) from the Gauss maps",
        }),
        expected_monodromy: loops
            .into_iter()
            .map(|(around, loop_path)| ExpectedMonodromy {
                around,
                loop_path,
                matrix: Mat2C::identity(),
                citation: "derived: sqrt(z) changes sign only, trivial in PSL",
            })
            .collect(),
        big_g,
        omega,
        basepoint: GALLERY_BASEPOINT,
        derived_gstar,
        finite_punctures: vec![C64::new(0.0, 0.0)],
        puncture_at_infinity: true,
        universal_cover: false,
        descends: true,
        mesh_plan: annulus_plan(),
    })
}

pub fn revolution(mu: f64) -> Result<GalleryEntry> {
    if !(mu > 0.0 && mu.is_finite()) || mu == 1.0 {
        return Err(Error::InvalidParameter {
            name: "mu".into(),
            reason: "must be positive and different from 1".into(),
        });
    }
    let p = one_param("mu", mu);
    let big_g = ex("sqrt((mu-1)/(mu+1))*z", &p);
    let omega = ex("sqrt(1-mu^2)/2*z^(mu-1)", &p);
    let s = MeroExpr::constant(C64::new(0.0, 1.0 / 2f64.sqrt()));
    let m = ExprMatrix::new(
        &s * &ex("z^((mu+1)/2)", &p),
        &s * &ex("(mu+1)*z^(-(mu-1)/2)", &p),
        &s * &ex("z^((mu-1)/2)", &p),
        &s * &ex("(mu-1)*z^(-(mu+1)/2)", &p),
        MatrixKind::Legendrian,
    );
    let derived_gstar = gstar_from_g_omega(&big_g, &omega);
    let w = C64::new(0.0, PI * mu).exp();
    let mono = Mat2C::diag(-w, -1.0 / w);
    let loops = puncture_loops(&[C64::new(0.0, 0.0)], 1.0);
    Ok(GalleryEntry {
        name: "revolution",
        params: p.clone(),
        expected_matrix: Some(Expected {
            value: m,
            citation: "printed closed form of E for the fronts of revolution",
        }),
        expected_gauss: Expected {
            value: (big_g.clone(), ex("i*sqrt((mu+1)/(mu-1))*z", &p)),
            citation: "printed Gauss maps of the fronts of revolution",
        },
        expected_omega: Expected {
            value: omega.clone(),
            citation: "defining data omega = sqrt(1-mu^2)/2 z^(mu-1) dz",
        },
        expected_theta: Some(Expected {
            value: ex("sqrt(1-mu^2)/2*z^(-mu-1)", &p),
            citation: "printed dual canonical form of the fronts of revolution",
        }),
        expected_monodromy: loops
            .into_iter()
            .map(|(around, loop_path)| ExpectedMonodromy {
                around,
                loop_path,
                matrix: mono,
                citation: "printed deck transformation diag(-e^(pi i mu), -e^(-pi i mu))",
            })
            .collect(),
        big_g,
        omega,
        basepoint: GALLERY_BASEPOINT,
        derived_gstar,
        finite_punctures: vec![C64::new(0.0, 0.0)],
        puncture_at_infinity: true,
        universal_cover: mu.fract() != 0.0,
        descends: true,
        mesh_plan: annulus_plan(),
    })
}

pub fn dihedral(n: u32, k: f64) -> Result<GalleryEntry> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n".into(),
            reason: "must be an integer >= 2".into(),
        });
    }
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "must be positive".into(),
        });
    }
    let p = BTreeMap::from([("n".to_string(), n as f64), ("k".to_string(), k)]);
    let big_g = ex("z", &p);
    let omega = ex("k*(z^n-1)^(-2/n)", &p);
    let derived_gstar = gstar_from_g_omega(&big_g, &omega);
    let punctures = roots_of_unity(n);
    let zeta = punctures[1 % punctures.len()];
    let mono = Mat2C::diag(1.0 / zeta, zeta);
    let radius = (0.4 * (PI / n as f64).sin()).min(0.5);
    let loops = puncture_loops(&punctures, radius);
    Ok(GalleryEntry {
        name: "dihedral",
        params: p.clone(),
        expected_matrix: None,
        expected_gauss: Expected {
            value: (big_g.clone(), ex("z^(1-n)", &p)),
            citation: "printed Gauss maps (z, z^(1-n)) of the dihedral family",
        },
        expected_omega: Expected {
            value: omega.clone(),
            citation: "defining data omega = k (z^n - 1)^(-2/n) dz",
        },
        expected_theta: None,
        expected_monodromy: loops
            .into_iter()
            .map(|(around, loop_path)| ExpectedMonodromy {
                around,
                loop_path,
                matrix: mono,
                citation: "printed deck transformation diag(zeta^-1, zeta) around each end",
            })
            .collect(),
        big_g,
        omega,
        basepoint: GALLERY_BASEPOINT,
        derived_gstar,
        mesh_plan: symmetric_plan(&punctures, 1e3),
        finite_punctures: punctures,
        puncture_at_infinity: false,
        universal_cover: true,
        descends: true,
    })
}

pub fn tetrahedral(k: f64) -> Result<GalleryEntry> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "k".into(),
            reason: "must be positive".into(),
        });
    }
    let p = one_param("k", k);
    let big_g = ex("z", &p);
    let omega = ex("k*(z^3-1)^(-1/2)", &p);
    let derived_gstar = gstar_from_g_omega(&big_g, &omega);
    let punctures = roots_of_unity(3);
    let i = C64::new(0.0, 1.0);
    let mono = Mat2C::diag(-i, i);
    let loops = puncture_loops(&punctures, 0.3);
    Ok(GalleryEntry {
        name: "tetrahedral",
        params: p.clone(),
        expected_matrix: None,
        expected_gauss: Expected {
            value: (big_g.clone(), ex("(4-z^3)/(3*z^2)", &p)),
            citation: "printed Gauss maps (z, (4-z^3)/(3z^2)) of the tetrahedral front",
        },
        expected_omega: Expected {
            value: omega.clone(),
            citation: "defining data omega = k (z^3 - 1)^(-1/2) dz",
        },
        expected_theta: None,
        expected_monodromy: loops
            .into_iter()
            .map(|(around, loop_path)| ExpectedMonodromy {
                around,
                loop_path,
                matrix: mono,
                citation: "derived: (z^3 - 1)^(-1/4) gains a factor -i around a simple root",
            })
            .collect(),
        big_g,
        omega,
        basepoint: GALLERY_BASEPOINT,
        derived_gstar,
        mesh_plan: symmetric_plan(&punctures, 1e4),
        finite_punctures: punctures,
        puncture_at_infinity: true,
        universal_cover: true,
        descends: true,
    })
}

impl GalleryEntry {
    /// The curve from `(G, ω)`.
    pub fn curve(&self) -> Result<LegendrianCurve> {
        legendrian_from_g_omega(&self.big_g, &self.omega, Some(self.basepoint))
    }

    /// `ξ(z0)` matching `ω`: `ξ² = -G'/ω` at the base point.
    pub fn matching_c(&self) -> Result<C64> {
        let dg = eval_principal(&self.big_g.derivative(), self.basepoint)?;
        let w = eval_principal(&self.omega, self.basepoint)?;
        Ok((-dg / w).sqrt())
    }

    /// Gauss pair with the expected `G*`, normalized to match `ω`.
    pub fn gauss_pair(&self) -> Result<GaussPair> {
        GaussPair::new(
            self.expected_gauss.value.0.clone(),
            self.expected_gauss.value.1.clone(),
            Some(self.basepoint),
            Some(self.matching_c()?),
        )
    }

    /// The curve from the expected Gauss pair.
    pub fn gauss_curve(&self) -> Result<LegendrianCurve> {
        legendrian_from_gauss(&self.gauss_pair()?)
    }

    /// Params as a display string, `k=2,n=3`.
    pub fn param_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{}={}", k, v))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Points where the data is known to be singular.
    pub fn singular_points(&self) -> &[C64] {
        &self.finite_punctures
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::eval;
    use crate::front::{project, to_poincare};
    use crate::legendrian::{gauss_from_legendrian, monodromy, MonodromyClass};
    use crate::psl2::{psl_distance, Ext};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn catalog_and_errors() {
        assert_eq!(NAMES.len(), CATALOG.len());
        for name in NAMES {
            assert!(build(name, &BTreeMap::new()).is_ok(), "{}", name);
        }
        assert_eq!(
            build("nope", &BTreeMap::new()).unwrap_err(),
            Error::UnknownGallery("nope".into())
        );
        let bad = |name: &str, k: &str, v: f64| {
            build(name, &BTreeMap::from([(k.to_string(), v)])).unwrap_err()
        };
        assert!(matches!(bad("dihedral", "n", 1.0), Error::InvalidParameter { .. }));
        assert!(matches!(bad("dihedral", "n", 2.5), Error::InvalidParameter { .. }));
        assert!(matches!(bad("revolution", "mu", 1.0), Error::InvalidParameter { .. }));
        assert!(matches!(bad("equidistant", "k", -1.0), Error::InvalidParameter { .. }));
        assert!(matches!(bad("equidistant", "q", 1.0), Error::InvalidParameter { .. }));
        assert!(bad("tetrahedral", "k", 0.0).is_invalid_input());
    }

    #[test]
    fn equidistant_closed_form() {
        let g = equidistant(2.0).unwrap();
        let e = g.curve().unwrap();
        let want = g.expected_matrix.as_ref().unwrap().value.eval_principal(c(1.0, 0.0)).unwrap();
        let got = e.eval_principal(c(1.0, 0.0)).unwrap();
        assert!(psl_distance(&got, &want) < 1e-12);
        let (gg, gs) = gauss_from_legendrian(&e, c(5.0, 0.0)).unwrap();
        assert!(gg.rel_error(Ext::Finite(c(5.0, 0.0))) < 1e-12);
        assert!(gs.rel_error(Ext::Finite(c(-5.0, 0.0))) < 1e-12);
        let x = project(&e, c(1.0, 0.0), &e.branch_at(c(1.0, 0.0)).unwrap()).unwrap();
        let b = to_poincare(&x);
        assert!((b[0] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn derived_gstar_matches_printed_except_for_revolution() {
        for name in NAMES {
            let g = build(name, &BTreeMap::new()).unwrap();
            let z = c(1.7, 0.6);
            let d = eval_principal(&g.derived_gstar, z).unwrap();
            let printed = eval_principal(&g.expected_gauss.value.1, z).unwrap();
            let ratio = printed / d;
            if name == "revolution" {
                // the printed G* is i times the one forced by (G, ω)
                assert!((ratio - c(0.0, 1.0)).norm() < 1e-12, "{}", ratio);
            } else {
                assert!((ratio - 1.0).norm() < 1e-12, "{}: {}", name, ratio);
            }
        }
    }

    #[test]
    fn dihedral_monodromy_and_gauss() {
        let g = dihedral(3, 1.0).unwrap();
        let e = g.curve().unwrap();
        let (gg, gs) = gauss_from_legendrian(&e, c(2.0, 0.0)).unwrap();
        assert!(gg.rel_error(Ext::Finite(c(2.0, 0.0))) < 1e-12);
        assert!(gs.rel_error(Ext::Finite(c(0.25, 0.0))) < 1e-12);
        for m in &g.expected_monodromy {
            let r = monodromy(&e, &m.loop_path).unwrap();
            assert!(psl_distance(&r.matrix, &m.matrix) < 1e-7, "{} {}", m.around, r.matrix);
            assert_eq!(r.classification, MonodromyClass::UnitaryNontrivial);
        }
    }

    #[test]
    fn dihedral_rotation_symmetry() {
        let g = dihedral(3, 1.0).unwrap();
        let e = g.curve().unwrap();
        let zeta = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let half = C64::from_polar(1.0, PI / 3.0);
        let r = Mat2C::diag(half, 1.0 / half);
        for z in [c(0.3, 0.2), c(1.8, -0.7), c(-0.4, 0.9)] {
            let x = project(&e, z, &e.branch_at(z).unwrap()).unwrap();
            let zz = zeta * z;
            let y = project(&e, zz, &e.branch_at(zz).unwrap()).unwrap();
            let rx = r * x.x * r.adjoint();
            assert!((rx - y.x).frobenius() < 1e-9 * y.x.frobenius(), "{}", z);
        }
    }

    #[test]
    fn parallel_family_scales_omega() {
        let a = dihedral(3, 1.0).unwrap();
        let b = dihedral(3, 1.8).unwrap();
        let (ea, eb) = (a.curve().unwrap(), b.curve().unwrap());
        let (wa, _) = crate::legendrian::canonical_forms(&ea).unwrap();
        let (wb, _) = crate::legendrian::canonical_forms(&eb).unwrap();
        let z = c(0.4, 0.3);
        let ra = eval(&wa, z, &ea.branch_at(z).unwrap()).unwrap();
        let rb = eval(&wb, z, &eb.branch_at(z).unwrap()).unwrap();
        assert!((ra / rb - 1.0 / 1.8).norm() < 1e-12);
    }

    #[test]
    fn tetrahedral_gauss_pair_roundtrip() {
        let g = tetrahedral(1.0).unwrap();
        let e = g.curve().unwrap();
        let (gg, gs) = gauss_from_legendrian(&e, c(2.0, 0.0)).unwrap();
        assert!(gg.rel_error(Ext::Finite(c(2.0, 0.0))) < 1e-12);
        assert!(gs.rel_error(Ext::Finite(c(-1.0 / 3.0, 0.0))) < 1e-12);
        let gc = g.gauss_curve().unwrap();
        for z in [c(2.0, 0.0), c(1.5, 0.5), c(2.5, -0.3)] {
            let d = psl_distance(&e.eval_principal(z).unwrap(), &gc.eval_principal(z).unwrap());
            assert!(d < 1e-9, "{} {}", z, d);
        }
    }
}

