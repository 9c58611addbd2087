//! Curve specifications in JSON, tagged by `"kind"`.
//!
//! ```json
//! {"kind": "legendrian_gauss", "G": "z", "Gstar": "-z", "basepoint": [1, 0]}
//! {"kind": "gallery", "name": "dihedral", "params": {"n": 3, "k": 1.0}}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::c3::{integral_free_null, weierstrass_integrate, C3Curve, WeierstrassData};
use crate::error::{Error, Result};
use crate::expr::{eval_principal, parse_expr_with, BranchState, MeroExpr, Params, PathC, C64};
use crate::front::{front_sample, FrontSample};
use crate::gallery::{self, GalleryEntry};
use crate::legendrian::{
    canonical_forms, gstar_from_g_omega, legendrian_from_g_omega, legendrian_from_gauss, GaussPair,
    LegendrianCurve,
};
use crate::matrix::ExprMatrix;
use crate::null_curve::{gauss_from_null, small_null, NullData};
use crate::psl2::Mat2C;

/// A named constant: a real number or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Real(f64),
    Complex([f64; 2]),
}

impl ParamValue {
    pub fn to_c64(self) -> C64 {
        match self {
            ParamValue::Real(x) => C64::new(x, 0.0),
            ParamValue::Complex([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum CurveSpec {
    #[serde(rename = "legendrian_gauss")]
    LegendrianGauss {
        #[serde(rename = "G")]
        big_g: String,
        #[serde(rename = "Gstar", alias = "G*")]
        gstar: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basepoint: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, ParamValue>,
    },
    #[serde(rename = "legendrian_G_omega")]
    LegendrianGOmega {
        #[serde(rename = "G")]
        big_g: String,
        omega: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basepoint: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, ParamValue>,
    },
    #[serde(rename = "null_small")]
    NullSmall {
        #[serde(rename = "G")]
        big_g: String,
        g: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, ParamValue>,
    },
    #[serde(rename = "c3_weierstrass")]
    C3Weierstrass {
        g: String,
        omega: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basepoint: Option<[f64; 2]>,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, ParamValue>,
    },
    #[serde(rename = "c3_integral_free")]
    C3IntegralFree {
        g: String,
        h: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, ParamValue>,
    },
    #[serde(rename = "gallery")]
    Gallery {
        name: String,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        params: BTreeMap<String, f64>,
    },
}

/// A Legendrian curve with whatever construction data produced it.
#[derive(Debug, Clone)]
pub struct LegendrianBuild {
    pub curve: LegendrianCurve,
    /// Gauss pair with `ξ` normalized to reproduce `curve`.
    pub pair: Option<GaussPair>,
    /// `(G, ω)`, when known symbolically.
    pub g_omega: Option<(MeroExpr, MeroExpr)>,
    pub gallery: Option<GalleryEntry>,
}

#[derive(Debug, Clone)]
pub enum Built {
    Legendrian(Box<LegendrianBuild>),
    Null {
        data: NullData,
        f: ExprMatrix,
    },
    C3Weierstrass {
        data: WeierstrassData,
        basepoint: C64,
    },
    C3IntegralFree {
        g: MeroExpr,
        h: MeroExpr,
        curve: C3Curve,
    },
}

/// One row of `sample` output; complex numbers serialize as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SampleRow {
    Front(FrontSample),
    Null {
        z: C64,
        #[serde(rename = "F")]
        f: Mat2C,
        /// `(G, g)`; `None` stands for infinity.
        #[serde(rename = "G")]
        big_g: Option<C64>,
        g: Option<C64>,
    },
    C3 {
        z: C64,
        #[serde(rename = "F")]
        f: [C64; 3],
    },
}

impl Built {
    /// Evaluate the curve at `z`. Legendrian curves give front samples;
    /// multivalued curves are taken on the principal branch at `z`, or
    /// continued along a segment from the base point when only path
    /// integrals are available.
    pub fn sample(&self, z: C64) -> Result<SampleRow> {
        match self {
            Built::Legendrian(l) => {
                let e = &l.curve;
                if e.is_symbolic() {
                    return Ok(SampleRow::Front(front_sample(e, z)?));
                }
                let path = if z == e.basepoint {
                    PathC::point(z)
                } else {
                    PathC::segment(e.basepoint, z)?
                };
                let base = e.base_branch()?;
                let (v, _) = e.value_along(&path, &base)?;
                let (w, t) = e.forms_along(&path, &base)?;
                Ok(SampleRow::Front(FrontSample::from_parts(z, &v, w, t)))
            }
            Built::Null { f, .. } => {
                let st = f.branch_at(z, &BranchState::principal())?;
                let v = f.eval(z, &st)?;
                let (big_g, g) = gauss_from_null(f, z, &st)?;
                Ok(SampleRow::Null {
                    z,
                    f: v,
                    big_g: big_g.finite(),
                    g: g.finite(),
                })
            }
            Built::C3Weierstrass { data, basepoint } => {
                let f = if z == *basepoint {
                    [C64::new(0.0, 0.0); 3]
                } else {
                    weierstrass_integrate(data, &PathC::segment(*basepoint, z)?)?
                };
                Ok(SampleRow::C3 { z, f })
            }
            Built::C3IntegralFree { curve, .. } => Ok(SampleRow::C3 {
                z,
                f: curve.eval_principal(z)?,
            }),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Built::Legendrian(_) => "legendrian",
            Built::Null { .. } => "null_small",
            Built::C3Weierstrass { .. } => "c3_weierstrass",
            Built::C3IntegralFree { .. } => "c3_integral_free",
        }
    }
}

fn c64(p: Option<[f64; 2]>) -> Result<Option<C64>> {
    match p {
        Some([re, im]) if re.is_finite() && im.is_finite() => Ok(Some(C64::new(re, im))),
        Some(_) => Err(Error::Spec("coordinates must be finite".into())),
        None => Ok(None),
    }
}

fn params(p: &BTreeMap<String, ParamValue>) -> Params {
    p.iter().map(|(k, v)| (k.clone(), v.to_c64())).collect()
}

fn parse(src: &str, p: &Params) -> Result<MeroExpr> {
    Ok(parse_expr_with(src, p)?)
}

impl CurveSpec {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Spec(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("curve specs serialize")
    }

    pub fn build(&self) -> Result<Built> {
        match self {
            CurveSpec::LegendrianGauss {
                big_g,
                gstar,
                basepoint,
                c,
                params: ps,
            } => {
                let p = params(ps);
                let pair = GaussPair::new(parse(big_g, &p)?, parse(gstar, &p)?, c64(*basepoint)?, c64(*c)?)?;
                let curve = legendrian_from_gauss(&pair)?;
                let g_omega = canonical_forms(&curve)
                    .ok()
                    .map(|(omega, _)| (pair.big_g.clone(), omega));
                Ok(Built::Legendrian(Box::new(LegendrianBuild {
                    curve,
                    pair: Some(pair),
                    g_omega,
                    gallery: None,
                })))
            }
            CurveSpec::LegendrianGOmega {
                big_g,
                omega,
                basepoint,
                params: ps,
            } => {
                let p = params(ps);
                let (g, w) = (parse(big_g, &p)?, parse(omega, &p)?);
                let curve = legendrian_from_g_omega(&g, &w, c64(*basepoint)?)?;
                let pair = matched_pair(&g, &w, curve.basepoint).ok();
                Ok(Built::Legendrian(Box::new(LegendrianBuild {
                    curve,
                    pair,
                    g_omega: Some((g, w)),
                    gallery: None,
                })))
            }
            CurveSpec::NullSmall {
                big_g,
                g,
                params: ps,
            } => {
                let p = params(ps);
                let data = NullData::new(parse(big_g, &p)?, parse(g, &p)?);
                let f = small_null(&data)?;
                Ok(Built::Null { data, f })
            }
            CurveSpec::C3Weierstrass {
                g,
                omega,
                basepoint,
                params: ps,
            } => {
                let p = params(ps);
                let data = WeierstrassData::new(parse(g, &p)?, parse(omega, &p)?)?;
                let basepoint = match c64(*basepoint)? {
                    Some(z) => z,
                    None => data.default_basepoint()?,
                };
                Ok(Built::C3Weierstrass { data, basepoint })
            }
            CurveSpec::C3IntegralFree { g, h, params: ps } => {
                let p = params(ps);
                let (g, h) = (parse(g, &p)?, parse(h, &p)?);
                let curve = integral_free_null(&g, &h)?;
                Ok(Built::C3IntegralFree { g, h, curve })
            }
            CurveSpec::Gallery { name, params } => {
                let entry = gallery::build(name, params)?;
                let curve = entry.curve()?;
                let pair = matched_pair(&entry.big_g, &entry.omega, entry.basepoint).ok();
                Ok(Built::Legendrian(Box::new(LegendrianBuild {
                    curve,
                    pair,
                    g_omega: Some((entry.big_g.clone(), entry.omega.clone())),
                    gallery: Some(entry),
                })))
            }
        }
    }
}

/// `(G, G*)` with `G*` derived from `(G, ω)` and `ξ(z0)² = -G'(z0)/ω(z0)`,
/// so that the Gauss-pair construction reproduces the `(G, ω)` curve.
pub fn matched_pair(big_g: &MeroExpr, omega: &MeroExpr, z0: C64) -> Result<GaussPair> {
    let gstar = gstar_from_g_omega(big_g, omega);
    let dg = eval_principal(&big_g.derivative(), z0)?;
    let w = eval_principal(omega, z0)?;
    let c = (-dg / w).sqrt();
    // the (G, ω) construction takes C = i sqrt(ω/G') = 1/ξ on the principal branch
    let c_curve = C64::new(0.0, 1.0) * (w / dg).sqrt();
    let c = if (C64::new(1.0, 0.0) / c - c_curve).norm() <= (C64::new(1.0, 0.0) / c + c_curve).norm() {
        c
    } else {
        -c
    };
    GaussPair::new(big_g.clone(), gstar, Some(z0), Some(c))
}
