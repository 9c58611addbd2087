use std::f64::consts::PI;

use super::{ExprError, C64};

/// A polygonal path in the plane. A closed path returns from its last vertex
/// to its first; the first vertex is not repeated.
#[derive(Debug, Clone, PartialEq)]
pub struct PathC {
    vertices: Vec<C64>,
    closed: bool,
}

fn invalid(msg: impl Into<String>) -> ExprError {
    ExprError::InvalidPath(msg.into())
}

impl PathC {
    pub fn new(vertices: Vec<C64>, closed: bool) -> Result<Self, ExprError> {
        let need = if closed { 3 } else { 2 };
        if vertices.len() < need {
            return Err(invalid(format!(
                "{} path needs at least {} vertices",
                if closed { "closed" } else { "open" },
                need
            )));
        }
        if vertices.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("non-finite vertex"));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("consecutive vertices coincide"));
        }
        if closed && vertices[0] == vertices[vertices.len() - 1] {
            return Err(invalid("closed path repeats its first vertex"));
        }
        Ok(PathC { vertices, closed })
    }

    /// The stationary path at `z`: start and end coincide, nothing to
    /// integrate or continue along.
    pub fn point(z: C64) -> Self {
        PathC {
            vertices: vec![z],
            closed: false,
        }
    }

    pub fn segment(a: C64, b: C64) -> Result<Self, ExprError> {
        Self::new(vec![a, b], false)
    }

    /// Counterclockwise circle with `n` vertices starting at `center + radius`.
    pub fn circle(center: C64, radius: f64, n: usize) -> Self {
        Self::arc_loop(center, radius, 0.0, n)
    }

    /// Counterclockwise circle about `center` starting at angle `phase`.
    pub fn arc_loop(center: C64, radius: f64, phase: f64, n: usize) -> Self {
        let n = n.max(3);
        let vertices = (0..n)
            .map(|j| center + C64::from_polar(radius, phase + 2.0 * PI * j as f64 / n as f64))
            .collect();
        PathC {
            vertices,
            closed: true,
        }
    }

    /// Loop based at `base`: straight to the circle of `radius` about `center`,
    /// once around counterclockwise, and straight back.
    pub fn lasso(base: C64, center: C64, radius: f64, n: usize) -> Result<Self, ExprError> {
        let d = base - center;
        if d.norm() <= radius {
            return Err(invalid("lasso base point lies inside its circle"));
        }
        let phase = d.arg();
        let circle = Self::arc_loop(center, radius, phase, n);
        let mut v = vec![base];
        v.extend(circle.vertices.iter().copied());
        v.push(circle.vertices[0]);
        Self::new(v, true)
    }

    /// Open polyline through the given points.
    pub fn polyline(vertices: Vec<C64>) -> Result<Self, ExprError> {
        Self::new(vertices, false)
    }

    pub fn vertices(&self) -> &[C64] {
        &self.vertices
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_stationary(&self) -> bool {
        self.vertices.len() == 1
    }

    pub fn start(&self) -> C64 {
        self.vertices[0]
    }

    pub fn end(&self) -> C64 {
        if self.closed {
            self.vertices[0]
        } else {
            self.vertices[self.vertices.len() - 1]
        }
    }

    /// Straight pieces, including the closing one of a closed path.
    pub fn segments(&self) -> Vec<(C64, C64)> {
        let mut s: Vec<_> = self.vertices.windows(2).map(|w| (w[0], w[1])).collect();
        if self.closed {
            s.push((self.vertices[self.vertices.len() - 1], self.vertices[0]));
        }
        s
    }

    pub fn length(&self) -> f64 {
        self.segments().iter().map(|(a, b)| (b - a).norm()).sum()
    }

    pub fn bbox_diameter(&self) -> f64 {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for v in &self.vertices {
            x0 = x0.min(v.re);
            x1 = x1.max(v.re);
            y0 = y0.min(v.im);
            y1 = y1.max(v.im);
        }
        (x1 - x0).hypot(y1 - y0)
    }

    /// The same route traversed backwards.
    pub fn reversed(&self) -> Self {
        if self.closed {
            let mut v = vec![self.vertices[0]];
            v.extend(self.vertices[1..].iter().rev().copied());
            PathC {
                vertices: v,
                closed: true,
            }
        } else {
            let mut v = self.vertices.clone();
            v.reverse();
            PathC {
                vertices: v,
                closed: false,
            }
        }
    }

    /// `self` followed by `other`. The end of `self` must equal the start of
    /// `other`; two loops based at the same point give a loop.
    pub fn concat(&self, other: &PathC) -> Result<Self, ExprError> {
        let (a, b) = (self.end(), other.start());
        if (a - b).norm() > 1e-12 * (1.0 + a.norm()) {
            return Err(invalid("concatenated paths do not meet"));
        }
        let mut v: Vec<C64> = self.route();
        let mut tail = other.route();
        tail.remove(0);
        v.append(&mut tail);
        let closed = (v[0] - v[v.len() - 1]).norm() <= 1e-12 * (1.0 + v[0].norm());
        if closed {
            v.pop();
            if v.len() < 3 {
                return Ok(PathC::point(v[0]));
            }
        }
        if v.len() == 1 {
            return Ok(PathC::point(v[0]));
        }
        v.dedup();
        Self::new(v, closed)
    }

    /// Every visited vertex in order, with the start repeated at the end of a
    /// closed path.
    pub fn route(&self) -> Vec<C64> {
        let mut v = self.vertices.clone();
        if self.closed {
            v.push(self.vertices[0]);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let a = C64::new(0.0, 0.0);
        let b = C64::new(1.0, 0.0);
        assert!(PathC::new(vec![a], false).is_err());
        assert!(PathC::new(vec![a, b], true).is_err());
        assert!(PathC::new(vec![a, a, b], false).is_err());
        assert!(PathC::new(vec![a, b, a], true).is_err());
        assert!(PathC::segment(a, b).is_ok());
    }

    #[test]
    fn circle_is_closed_and_starts_on_the_right() {
        let c = PathC::circle(C64::new(1.0, 0.0), 0.5, 16);
        assert!(c.is_closed());
        assert_eq!(c.start(), C64::new(1.5, 0.0));
        assert_eq!(c.end(), c.start());
        assert_eq!(c.segments().len(), 16);
    }

    #[test]
    fn lasso_is_based_at_base() {
        let l = PathC::lasso(C64::new(2.0, 0.0), C64::new(1.0, 0.0), 0.3, 32).unwrap();
        assert_eq!(l.start(), C64::new(2.0, 0.0));
        assert!((l.vertices()[1] - C64::new(1.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reverse_and_concat() {
        let p = PathC::polyline(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 1.0)]).unwrap();
        let r = p.reversed();
        assert_eq!(r.start(), p.end());
        let there_and_back = p.concat(&r).unwrap();
        assert!(there_and_back.is_closed());
        let c = PathC::circle(C64::new(0.0, 0.0), 1.0, 8);
        let cc = c.concat(&c).unwrap();
        assert!(cc.is_closed());
        assert_eq!(cc.segments().len(), 16);
        assert!((cc.length() - 2.0 * c.length()).abs() < 1e-12);
    }
}
