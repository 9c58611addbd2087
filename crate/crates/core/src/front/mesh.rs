//! Triangulated samples of a front over annular or rectangular grids.
//!
//! Branches are lifted along a spanning tree of the grid: a path from the
//! curve's base point to an anchor vertex, a walk around the anchor ring
//! (or row), then radial (or column) chains sampled in parallel.

use std::str::FromStr;

use rayon::prelude::*;

use super::{FrontEvaluator, FrontSample};
use crate::error::{Error, Result};
use crate::expr::{BranchState, ContinuationOptions, PathC, C64};
use crate::legendrian::LegendrianCurve;

/// Vertices beyond this ball norm are dropped along with their faces.
pub const BALL_TRUNCATION: f64 = 0.999;
/// `sing` is clamped to `[-SING_CLAMP, SING_CLAMP]` where a form vanishes.
pub const SING_CLAMP: f64 = 50.0;
const MAX_VERTICES: usize = 1 << 22;

/// A parameter grid. Annuli with `rmin > 0` are graded geometrically toward
/// the center; `rmin = 0` gives a disc with a center vertex and uniform
/// radii.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Annulus {
        center: C64,
        rmin: f64,
        rmax: f64,
        nr: usize,
        ntheta: usize,
        phase: f64,
    },
    Rect {
        lo: C64,
        hi: C64,
        nx: usize,
        ny: usize,
    },
}

pub type Patch = GridSpec;

impl GridSpec {
    pub fn annulus(rmin: f64, rmax: f64, nr: usize, ntheta: usize) -> Self {
        GridSpec::Annulus {
            center: C64::new(0.0, 0.0),
            rmin,
            rmax,
            nr,
            ntheta,
            phase: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Grid(m.into()));
        match *self {
            GridSpec::Annulus {
                center,
                rmin,
                rmax,
                nr,
                ntheta,
                phase,
            } => {
                if ![center.re, center.im, rmin, rmax, phase].iter().all(|x| x.is_finite()) {
                    return bad("non-finite annulus parameter");
                }
                if !(rmin >= 0.0 && rmin < rmax) {
                    return bad("need 0 <= rmin < rmax");
                }
                if nr < 2 || ntheta < 3 {
                    return bad("need nr >= 2 and ntheta >= 3");
                }
                if nr.saturating_mul(ntheta) > MAX_VERTICES {
                    return bad("too many vertices");
                }
            }
            GridSpec::Rect { lo, hi, nx, ny } => {
                if ![lo.re, lo.im, hi.re, hi.im].iter().all(|x| x.is_finite()) {
                    return bad("non-finite rectangle corner");
                }
                if !(lo.re < hi.re && lo.im < hi.im) {
                    return bad("need lo < hi in both coordinates");
                }
                if nx < 2 || ny < 2 {
                    return bad("need nx >= 2 and ny >= 2");
                }
                if nx.saturating_mul(ny) > MAX_VERTICES {
                    return bad("too many vertices");
                }
            }
        }
        Ok(())
    }

    fn layout(&self) -> Layout {
        match *self {
            GridSpec::Annulus {
                center,
                rmin,
                rmax,
                nr,
                ntheta,
                phase,
            } => {
                let radii: Vec<f64> = if rmin > 0.0 {
                    let q = rmax / rmin;
                    (0..nr)
                        .map(|i| rmin * q.powf(i as f64 / (nr - 1) as f64))
                        .collect()
                } else {
                    (0..nr).map(|i| rmax * i as f64 / (nr - 1) as f64).collect()
                };
                let has_center = rmin == 0.0;
                let mut points = Vec::new();
                if has_center {
                    points.push(center);
                }
                let first = usize::from(has_center);
                for r in &radii[first..] {
                    for j in 0..ntheta {
                        let t = phase + std::f64::consts::TAU * j as f64 / ntheta as f64;
                        points.push(center + C64::from_polar(*r, t));
                    }
                }
                let rings = nr - first;
                let idx = |i: usize, j: usize| first + i * ntheta + j % ntheta;
                let mut faces = Vec::new();
                if has_center {
                    for j in 0..ntheta {
                        faces.push([0, idx(0, j), idx(0, j + 1)]);
                    }
                }
                for i in 0..rings - 1 {
                    for j in 0..ntheta {
                        faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                        faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
                    }
                }
                Layout {
                    points,
                    faces,
                    kind: LayoutKind::Rings {
                        has_center,
                        rings,
                        per_ring: ntheta,
                        closed: true,
                    },
                }
            }
            GridSpec::Rect { lo, hi, nx, ny } => {
                let mut points = Vec::with_capacity(nx * ny);
                for iy in 0..ny {
                    for ix in 0..nx {
                        let x = lo.re + (hi.re - lo.re) * ix as f64 / (nx - 1) as f64;
                        let y = lo.im + (hi.im - lo.im) * iy as f64 / (ny - 1) as f64;
                        points.push(C64::new(x, y));
                    }
                }
                let idx = |ix: usize, iy: usize| iy * nx + ix;
                let mut faces = Vec::new();
                for iy in 0..ny - 1 {
                    for ix in 0..nx - 1 {
                        faces.push([idx(ix, iy), idx(ix + 1, iy), idx(ix + 1, iy + 1)]);
                        faces.push([idx(ix, iy), idx(ix + 1, iy + 1), idx(ix, iy + 1)]);
                    }
                }
                // rows play the role of rings, columns of rays
                Layout {
                    points,
                    faces,
                    kind: LayoutKind::Rings {
                        has_center: false,
                        rings: ny,
                        per_ring: nx,
                        closed: false,
                    },
                }
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    /// `rmin,rmax,nr,ntheta`: an annulus about the origin.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Grid(format!("expected rmin,rmax,nr,ntheta, got '{}'", s)));
        }
        let f = |x: &str| {
            x.parse::<f64>()
                .map_err(|_| Error::Grid(format!("bad number '{}'", x)))
        };
        let n = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| Error::Grid(format!("bad count '{}'", x)))
        };
        let g = GridSpec::annulus(f(parts[0])?, f(parts[1])?, n(parts[2])?, n(parts[3])?);
        g.validate()?;
        Ok(g)
    }
}

/// A set of patches sampled into one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshPlan {
    pub patches: Vec<GridSpec>,
}

#[derive(Debug)]
enum LayoutKind {
    Rings {
        has_center: bool,
        rings: usize,
        per_ring: usize,
        closed: bool,
    },
}

#[derive(Debug)]
struct Layout {
    points: Vec<C64>,
    faces: Vec<[usize; 3]>,
    kind: LayoutKind,
}

impl Layout {
    /// Chains of vertex indices; the first vertex of each chain is already
    /// lifted when the chain runs. Chains within a stage are independent.
    fn stages(&self, anchor_ring: usize, anchor_pos: usize) -> Vec<Vec<Vec<usize>>> {
        let LayoutKind::Rings {
            has_center,
            rings,
            per_ring,
            closed,
        } = self.kind;
        let first = usize::from(has_center);
        let idx = |i: usize, j: usize| first + i * per_ring + j;
        let mut stages = Vec::new();
        // the anchor ring
        if closed {
            let walk: Vec<usize> = (0..per_ring)
                .map(|k| idx(anchor_ring, (anchor_pos + k) % per_ring))
                .collect();
            stages.push(vec![walk]);
        } else {
            let fwd: Vec<usize> = (anchor_pos..per_ring).map(|j| idx(anchor_ring, j)).collect();
            let back: Vec<usize> = (0..=anchor_pos).rev().map(|j| idx(anchor_ring, j)).collect();
            stages.push(vec![fwd, back]);
        }
        // rays
        let rays: Vec<Vec<usize>> = (0..per_ring)
            .flat_map(|j| {
                let out: Vec<usize> = (anchor_ring..rings).map(|i| idx(i, j)).collect();
                let inw: Vec<usize> = (0..=anchor_ring).rev().map(|i| idx(i, j)).collect();
                [out, inw]
            })
            .filter(|c| c.len() > 1)
            .collect();
        stages.push(rays);
        if has_center {
            stages.push(vec![vec![idx(0, 0), 0]]);
        }
        stages
    }

    /// Ring and position of the vertex nearest `z0`, among the innermost and
    /// outermost rings.
    fn anchor(&self, z0: C64) -> (usize, usize) {
        let LayoutKind::Rings {
            has_center,
            rings,
            per_ring,
            ..
        } = self.kind;
        let first = usize::from(has_center);
        let mut best = (0, 0, f64::INFINITY);
        for i in [0, rings - 1] {
            for j in 0..per_ring {
                let d = (self.points[first + i * per_ring + j] - z0).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        (best.0, best.1)
    }
}

/// A sampled front: Poincaré-ball vertices, triangles, per-vertex scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[u32; 3]>,
    pub sing: Vec<f64>,
    pub dsigma2: Vec<f64>,
    /// Parameter value of each vertex.
    pub params: Vec<C64>,
    /// Vertices dropped beyond [`BALL_TRUNCATION`].
    pub truncated: usize,
    /// Vertices at which both forms vanish.
    pub branch_points: usize,
}

impl FrontMesh {
    pub fn max_norm(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
            .fold(0.0, f64::max)
    }

    fn append(&mut self, other: FrontMesh) {
        let off = self.vertices.len() as u32;
        self.vertices.extend(other.vertices);
        self.faces
            .extend(other.faces.iter().map(|f| [f[0] + off, f[1] + off, f[2] + off]));
        self.sing.extend(other.sing);
        self.dsigma2.extend(other.dsigma2);
        self.params.extend(other.params);
        self.truncated += other.truncated;
        self.branch_points += other.branch_points;
    }

    fn empty() -> Self {
        FrontMesh {
            vertices: Vec::new(),
            faces: Vec::new(),
            sing: Vec::new(),
            dsigma2: Vec::new(),
            params: Vec::new(),
            truncated: 0,
            branch_points: 0,
        }
    }
}

struct Lifter<'a> {
    fe: &'a FrontEvaluator,
    opts: ContinuationOptions,
}

impl Lifter<'_> {
    fn is_singular(&self, z: C64) -> bool {
        self.fe
            .tracker()
            .init(z, &BranchState::principal())
            .map_err(Error::from)
            .and_then(|st| self.fe.sample(z, &st))
            .is_err()
    }

    fn step(&self, from: C64, to: C64, st: &BranchState) -> Result<BranchState> {
        if self.is_singular(to) {
            return Err(Error::GridHitsPole { z: to });
        }
        let path = PathC::segment(from, to)?;
        self.fe
            .tracker()
            .continue_path(&path, st, &self.opts)
            .map_err(|e| Error::ContinuationFailed(format!("{} -> {}: {}", from, to, e)))
    }

    /// Continue from the base point to `to`, detouring sideways if the
    /// straight segment fails.
    fn reach(&self, z0: C64, st0: &BranchState, to: C64) -> Result<BranchState> {
        if self.is_singular(to) {
            return Err(Error::GridHitsPole { z: to });
        }
        if (to - z0).norm() == 0.0 {
            return Ok(st0.clone());
        }
        let mut last = None;
        for s in [0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0] {
            let mid = (z0 + to) * 0.5 + C64::new(0.0, s) * (to - z0);
            let path = if s == 0.0 {
                PathC::segment(z0, to)?
            } else {
                PathC::polyline(vec![z0, mid, to])?
            };
            match self.fe.tracker().continue_path(&path, st0, &self.opts) {
                Ok(st) => return Ok(st),
                Err(e) => last = Some(e),
            }
        }
        Err(Error::ContinuationFailed(format!(
            "no path from the base point to {}: {}",
            to,
            last.map(|e| e.to_string()).unwrap_or_default()
        )))
    }
}

fn sample_patch(
    fe: &FrontEvaluator,
    z0: C64,
    st0: &BranchState,
    grid: &GridSpec,
) -> Result<FrontMesh> {
    grid.validate()?;
    let layout = grid.layout();
    let lifter = Lifter {
        fe,
        opts: ContinuationOptions::default(),
    };
    let (ar, ap) = layout.anchor(z0);
    let stages = layout.stages(ar, ap);
    let n = layout.points.len();
    let mut states: Vec<Option<BranchState>> = vec![None; n];
    let anchor = stages[0][0][0];
    states[anchor] = Some(lifter.reach(z0, st0, layout.points[anchor])?);
    for stage in &stages {
        let lifted: Vec<Vec<(usize, BranchState)>> = stage
            .par_iter()
            .map(|chain| -> Result<Vec<(usize, BranchState)>> {
                let mut st = states[chain[0]].clone().expect("chain start is lifted");
                let mut out = Vec::with_capacity(chain.len() - 1);
                for w in chain.windows(2) {
                    st = lifter.step(layout.points[w[0]], layout.points[w[1]], &st)?;
                    out.push((w[1], st.clone()));
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        for (i, st) in lifted.into_iter().flatten() {
            states[i].get_or_insert(st);
        }
    }
    let samples: Vec<FrontSample> = layout
        .points
        .par_iter()
        .zip(states.par_iter())
        .map(|(z, st)| {
            let st = st.as_ref().expect("every vertex is lifted");
            fe.sample(*z, st).map_err(|_| Error::GridHitsPole { z: *z })
        })
        .collect::<Result<_>>()?;

    let mut mesh = FrontMesh::empty();
    let mut new_index = vec![u32::MAX; n];
    for (i, s) in samples.iter().enumerate() {
        let norm = s.ball.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm.is_nan() || norm >= BALL_TRUNCATION || !s.dsigma2.is_finite() {
            mesh.truncated += 1;
            continue;
        }
        new_index[i] = mesh.vertices.len() as u32;
        mesh.vertices.push(s.ball);
        mesh.params.push(s.z);
        mesh.dsigma2.push(s.dsigma2);
        mesh.sing.push(match s.sing {
            Some(v) => v.clamp(-SING_CLAMP, SING_CLAMP),
            None => {
                mesh.branch_points += 1;
                0.0
            }
        });
    }
    for f in &layout.faces {
        let g = [new_index[f[0]], new_index[f[1]], new_index[f[2]]];
        if g.iter().all(|&k| k != u32::MAX) {
            mesh.faces.push(g);
        }
    }
    Ok(mesh)
}

/// Mesh the front of `e` over a single grid.
pub fn sample_mesh(e: &LegendrianCurve, grid: &GridSpec) -> Result<FrontMesh> {
    sample_plan(
        e,
        &MeshPlan {
            patches: vec![grid.clone()],
        },
    )
}

/// Mesh the front of `e` over every patch of `plan`, lifting branches from
/// the curve's base point.
pub fn sample_plan(e: &LegendrianCurve, plan: &MeshPlan) -> Result<FrontMesh> {
    let fe = FrontEvaluator::new(e)?;
    let z0 = e.basepoint;
    let st0 = fe.tracker().init(z0, &BranchState::principal())?;
    let mut mesh = FrontMesh::empty();
    for (k, grid) in plan.patches.iter().enumerate() {
        log::debug!("meshing patch {} of {}", k + 1, plan.patches.len());
        mesh.append(sample_patch(&fe, z0, &st0, grid)?);
    }
    log::info!(
        "mesh: {} vertices, {} faces, {} truncated",
        mesh.vertices.len(),
        mesh.faces.len(),
        mesh.truncated
    );
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::legendrian::legendrian_from_g_omega;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn curve(g: &str, w: &str) -> LegendrianCurve {
        legendrian_from_g_omega(&parse_expr(g).unwrap(), &parse_expr(w).unwrap(), Some(c(2.0, 0.0)))
            .unwrap()
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0.2,5,8,16".parse().unwrap();
        assert_eq!(g, GridSpec::annulus(0.2, 5.0, 8, 16));
        for bad in ["", "1,2,3", "5,0.2,8,16", "0.2,5,1,16", "0.2,5,8,2", "a,5,8,16", "0.2,nan,8,8"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{}", bad);
        }
    }

    #[test]
    fn annulus_mesh_is_valid() {
        let e = curve("z", "1/z");
        let m = sample_mesh(&e, &GridSpec::annulus(0.2, 5.0, 6, 12)).unwrap();
        assert_eq!(m.vertices.len() + m.truncated, 72);
        assert_eq!(m.faces.len(), 5 * 12 * 2);
        assert!(m.max_norm() < 1.0);
        for f in &m.faces {
            assert!(f.iter().all(|&i| (i as usize) < m.vertices.len()));
        }
        assert!(m.sing.iter().chain(&m.dsigma2).all(|x| x.is_finite()));
    }

    #[test]
    fn mesh_matches_pointwise_samples() {
        let e = curve("z", "1/z");
        let m = sample_mesh(&e, &GridSpec::annulus(0.5, 2.0, 3, 8)).unwrap();
        for (z, v) in m.params.iter().zip(&m.vertices) {
            let s = super::super::front_sample(&e, *z).unwrap();
            let d: f64 = (0..3).map(|k| (s.ball[k] - v[k]).powi(2)).sum::<f64>().sqrt();
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn grid_through_a_pole() {
        let e = curve("z", "1/z");
        let err = sample_mesh(&e, &GridSpec::annulus(0.0, 1.0, 4, 8)).unwrap_err();
        assert_eq!(err, Error::GridHitsPole { z: c(0.0, 0.0) });
    }

    #[test]
    fn disc_and_rect_grids() {
        let e = curve("z", "1");
        let m = sample_mesh(&e, &GridSpec::annulus(0.0, 1.0, 4, 8)).unwrap();
        assert_eq!(m.vertices.len(), 1 + 3 * 8);
        assert_eq!(m.faces.len(), 8 + 2 * 2 * 8);
        let r = GridSpec::Rect {
            lo: c(-1.0, -1.0),
            hi: c(1.0, 1.0),
            nx: 5,
            ny: 4,
        };
        let m = sample_mesh(&e, &r).unwrap();
        assert_eq!(m.vertices.len(), 20);
        assert_eq!(m.faces.len(), 4 * 3 * 2);
    }

    #[test]
    fn deterministic() {
        let e = curve("z", "(z^3-1)^(-2/3)");
        let g = GridSpec::Annulus {
            center: c(1.0, 0.0),
            rmin: 1e-3,
            rmax: 0.5,
            nr: 10,
            ntheta: 12,
            phase: 0.1,
        };
        let a = sample_mesh(&e, &g).unwrap();
        let b = sample_mesh(&e, &g).unwrap();
        assert_eq!(a, b);
        assert!(a.max_norm() > 0.99, "{}", a.max_norm());
    }
}
