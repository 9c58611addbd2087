use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

use super::{ExprError, Kind, MeroExpr, PathC, C64};

/// Continuous logarithms of the arguments of multivalued subterms.
///
/// Entries are keyed by the structural hash of the argument, so `log(f)`,
/// `sqrt(f)` and `f^c` share one branch choice. A subterm without an entry is
/// evaluated on the principal branch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BranchState {
    logs: BTreeMap<u64, C64>,
}

impl BranchState {
    /// The empty state: every multivalued subterm on its principal branch.
    pub fn principal() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn log_of(&self, key: u64) -> Option<C64> {
        self.logs.get(&key).copied()
    }

    /// Largest difference between matching entries; entries present in only
    /// one state count as infinitely different.
    pub fn max_difference(&self, other: &BranchState) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in &self.logs {
            match other.logs.get(k) {
                Some(w) => worst = worst.max((v - w).norm()),
                None => return f64::INFINITY,
            }
        }
        if other.logs.keys().any(|k| !self.logs.contains_key(k)) {
            return f64::INFINITY;
        }
        worst
    }
}

fn nearest_log(w: C64, reference: Option<C64>) -> C64 {
    let l0 = w.ln();
    match reference {
        Some(r) => {
            let k = ((r.im - l0.im) / (2.0 * PI)).round();
            l0 + C64::new(0.0, 2.0 * PI * k)
        }
        None => l0,
    }
}

fn finite(c: C64) -> bool {
    c.re.is_finite() && c.im.is_finite()
}

struct Evaluator<'a> {
    z: C64,
    state: &'a BranchState,
    memo: HashMap<*const (), C64>,
}

impl Evaluator<'_> {
    fn branch_log(&mut self, arg: &MeroExpr) -> Result<C64, ExprError> {
        let w = self.go(arg)?;
        if w == C64::new(0.0, 0.0) {
            return Err(ExprError::BranchPoint { z: self.z });
        }
        Ok(nearest_log(w, self.state.log_of(arg.hash())))
    }

    fn go(&mut self, e: &MeroExpr) -> Result<C64, ExprError> {
        if let Some(v) = self.memo.get(&e.ptr()) {
            return Ok(*v);
        }
        let z = self.z;
        let v = match e.kind() {
            Kind::Const(c) => *c,
            Kind::Var => z,
            Kind::Add(a, b) => self.go(a)? + self.go(b)?,
            Kind::Sub(a, b) => self.go(a)? - self.go(b)?,
            Kind::Mul(a, b) => self.go(a)? * self.go(b)?,
            Kind::Div(a, b) => {
                let num = self.go(a)?;
                let den = self.go(b)?;
                if den == C64::new(0.0, 0.0) {
                    return Err(ExprError::Pole { z });
                }
                num / den
            }
            Kind::PowInt(a, n) => {
                let w = self.go(a)?;
                if *n < 0 && w == C64::new(0.0, 0.0) {
                    return Err(ExprError::Pole { z });
                }
                w.powi(*n)
            }
            Kind::Pow(a, c) => (c * self.branch_log(a)?).exp(),
            Kind::Exp(a) => self.go(a)?.exp(),
            Kind::Log(a) => self.branch_log(a)?,
            Kind::Sqrt(a) => (self.branch_log(a)? * 0.5).exp(),
        };
        if !finite(v) {
            return Err(ExprError::Pole { z });
        }
        self.memo.insert(e.ptr(), v);
        Ok(v)
    }
}

/// Evaluate `e` at `z` on the branch recorded in `branch`.
pub fn eval(e: &MeroExpr, z: C64, branch: &BranchState) -> Result<C64, ExprError> {
    if !finite(z) {
        return Err(ExprError::Pole { z });
    }
    Evaluator {
        z,
        state: branch,
        memo: HashMap::new(),
    }
    .go(e)
}

/// Evaluate on the principal branch of every multivalued subterm.
pub fn eval_principal(e: &MeroExpr, z: C64) -> Result<C64, ExprError> {
    eval(e, z, &BranchState::principal())
}

/// Tuning for analytic continuation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    /// Minimum allowed step, as a fraction of the path's bounding-box diameter.
    pub clearance_factor: f64,
    /// Absolute floor for the clearance.
    pub min_clearance: f64,
    /// Largest accepted change of any tracked logarithm in one step.
    pub max_log_step: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            clearance_factor: 1e-3,
            min_clearance: 1e-12,
            max_log_step: 0.25,
        }
    }
}

impl ContinuationOptions {
    pub fn clearance_for(&self, path: &PathC) -> f64 {
        (self.clearance_factor * path.bbox_diameter()).max(self.min_clearance)
    }
}

/// The multivalued subterms of a set of expressions, in dependency order.
#[derive(Debug, Clone, Default)]
pub struct Tracker {
    nodes: Vec<(u64, MeroExpr)>,
}

/// Branch states recorded along one segment, at increasing parameters in [0, 1].
pub(crate) type Checkpoints = Vec<(f64, BranchState)>;

impl Tracker {
    pub fn new(exprs: &[&MeroExpr]) -> Self {
        let mut seen_nodes = HashSet::new();
        let mut seen_keys = HashSet::new();
        let mut nodes = Vec::new();
        fn walk(
            e: &MeroExpr,
            seen_nodes: &mut HashSet<*const ()>,
            seen_keys: &mut HashSet<u64>,
            out: &mut Vec<(u64, MeroExpr)>,
        ) {
            if !seen_nodes.insert(e.ptr()) {
                return;
            }
            match e.kind() {
                Kind::Const(_) | Kind::Var => {}
                Kind::Add(a, b) | Kind::Sub(a, b) | Kind::Mul(a, b) | Kind::Div(a, b) => {
                    walk(a, seen_nodes, seen_keys, out);
                    walk(b, seen_nodes, seen_keys, out);
                }
                Kind::PowInt(a, _) | Kind::Exp(a) => walk(a, seen_nodes, seen_keys, out),
                Kind::Pow(a, _) | Kind::Log(a) | Kind::Sqrt(a) => {
                    walk(a, seen_nodes, seen_keys, out);
                    if seen_keys.insert(a.hash()) {
                        out.push((a.hash(), a.clone()));
                    }
                }
            }
        }
        for e in exprs {
            walk(e, &mut seen_nodes, &mut seen_keys, &mut nodes);
        }
        Tracker { nodes }
    }

    /// True when there is nothing multivalued to track.
    pub fn is_trivial(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Fill in entries for every tracked subterm at `z`, keeping existing
    /// entries' sheets.
    pub fn init(&self, z: C64, state: &BranchState) -> Result<BranchState, ExprError> {
        Ok(self.step(z, state)?.0)
    }

    fn step(&self, z: C64, state: &BranchState) -> Result<(BranchState, f64), ExprError> {
        let mut next = state.clone();
        let mut worst: f64 = 0.0;
        for (key, arg) in &self.nodes {
            let w = eval(arg, z, &next)?;
            if w == C64::new(0.0, 0.0) || !finite(w) {
                return Err(ExprError::BranchPoint { z });
            }
            let prev = state.log_of(*key);
            let l = nearest_log(w, prev);
            if let Some(p) = prev {
                worst = worst.max((l - p).norm());
            }
            next.logs.insert(*key, l);
        }
        Ok((next, worst))
    }

    /// Continue `state` (valid at the path start) along `path`.
    pub fn continue_path(
        &self,
        path: &PathC,
        state: &BranchState,
        opts: &ContinuationOptions,
    ) -> Result<BranchState, ExprError> {
        Ok(self.continue_with_checkpoints(path, state, opts)?.0)
    }

    pub(crate) fn continue_with_checkpoints(
        &self,
        path: &PathC,
        state: &BranchState,
        opts: &ContinuationOptions,
    ) -> Result<(BranchState, Vec<Checkpoints>), ExprError> {
        let mut cur = self.init(path.start(), state)?;
        let segments = path.segments();
        let mut all = Vec::with_capacity(segments.len());
        if self.is_trivial() {
            for _ in &segments {
                all.push(vec![(0.0, cur.clone())]);
            }
            return Ok((cur, all));
        }
        let clearance = opts.clearance_for(path);
        const MAX_H: f64 = 0.125;
        for (a, b) in segments {
            let len = (b - a).norm();
            let mut cps = vec![(0.0, cur.clone())];
            let mut t = 0.0;
            let mut h = MAX_H;
            while t < 1.0 {
                let t_new = (t + h).min(1.0);
                let z_new = a + (b - a) * t_new;
                let accepted = match self.step(z_new, &cur) {
                    Ok((s, d)) if d <= opts.max_log_step => Some(s),
                    _ => None,
                };
                match accepted {
                    Some(s) => {
                        cur = s;
                        t = t_new;
                        cps.push((t, cur.clone()));
                        h = (h * 2.0).min(MAX_H);
                    }
                    None => {
                        h *= 0.5;
                        if h * len < clearance {
                            return Err(ExprError::PathTooClose { z: z_new, clearance });
                        }
                    }
                }
            }
            all.push(cps);
        }
        Ok((cur, all))
    }
}

/// Continue `e` along `path` from `branch` (valid at the path start) and
/// evaluate at the endpoint.
pub fn continue_along(
    e: &MeroExpr,
    path: &PathC,
    branch: &BranchState,
) -> Result<(C64, BranchState), ExprError> {
    let tracker = Tracker::new(&[e]);
    let state = tracker.continue_path(path, branch, &ContinuationOptions::default())?;
    let v = eval(e, path.end(), &state)?;
    Ok((v, state))
}
