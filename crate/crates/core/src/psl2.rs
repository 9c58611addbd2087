//! Numeric 2x2 complex matrices, the sign quotient SL(2,C) -> PSL(2,C), and
//! the Möbius action on the Riemann sphere.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::Serialize;

use crate::expr::C64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Row-major 2x2 complex matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mat2C {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2C {
    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2C { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Mat2C::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn diag(p: C64, q: C64) -> Self {
        Mat2C::new(p, ZERO, ZERO, q)
    }

    pub fn from_rows(rows: [[C64; 2]; 2]) -> Self {
        Mat2C::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    }

    pub fn rows(&self) -> [[C64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> C64 {
        self.a + self.d
    }

    /// Inverse via the adjugate.
    pub fn inverse(&self) -> Self {
        let det = self.det();
        Mat2C::new(self.d / det, -self.b / det, -self.c / det, self.a / det)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Mat2C::new(self.a.conj(), self.c.conj(), self.b.conj(), self.d.conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Mat2C::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn frobenius(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.entries()
            .iter()
            .all(|e| e.re.is_finite() && e.im.is_finite())
    }

    /// Rescale by `det^{-1/2}` to land in SL(2,C).
    pub fn normalized(&self) -> Self {
        self.scale(ONE / self.det().sqrt())
    }
}

impl Mul for Mat2C {
    type Output = Mat2C;
    fn mul(self, o: Mat2C) -> Mat2C {
        Mat2C::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

impl Add for Mat2C {
    type Output = Mat2C;
    fn add(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2C {
    type Output = Mat2C;
    fn sub(self, o: Mat2C) -> Mat2C {
        Mat2C::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Neg for Mat2C {
    type Output = Mat2C;
    fn neg(self) -> Mat2C {
        Mat2C::new(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for Mat2C {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A point of the Riemann sphere C ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    Finite(C64),
    Infinity,
}

impl Ext {
    /// `num / den` projectively; `None` for 0/0.
    pub fn ratio(num: C64, den: C64) -> Option<Ext> {
        if den == ZERO {
            if num == ZERO {
                None
            } else {
                Some(Ext::Infinity)
            }
        } else {
            let q = num / den;
            if q.re.is_finite() && q.im.is_finite() {
                Some(Ext::Finite(q))
            } else {
                Some(Ext::Infinity)
            }
        }
    }

    pub fn finite(self) -> Option<C64> {
        match self {
            Ext::Finite(z) => Some(z),
            Ext::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ext::Infinity)
    }

    /// Chordal distance on the unit sphere (at most 2).
    pub fn chordal(self, other: Ext) -> f64 {
        match (self, other) {
            (Ext::Infinity, Ext::Infinity) => 0.0,
            (Ext::Finite(z), Ext::Infinity) | (Ext::Infinity, Ext::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (Ext::Finite(z), Ext::Finite(w)) => {
                2.0 * (z - w).norm()
                    / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }

    /// `|z - w| / max(1, |w|)` for finite points, chordal otherwise.
    pub fn rel_error(self, want: Ext) -> f64 {
        match (self, want) {
            (Ext::Finite(z), Ext::Finite(w)) => (z - w).norm() / w.norm().max(1.0),
            _ => self.chordal(want),
        }
    }
}

impl From<C64> for Ext {
    fn from(z: C64) -> Self {
        Ext::Finite(z)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(z) => write!(f, "{}", z),
            Ext::Infinity => write!(f, "inf"),
        }
    }
}

/// `(a11 w + a12) / (a21 w + a22)` with ∞ handled projectively.
pub fn moebius_apply(m: &Mat2C, w: Ext) -> Ext {
    let (num, den) = match w {
        Ext::Finite(w) => (m.a * w + m.b, m.c * w + m.d),
        Ext::Infinity => (m.a, m.c),
    };
    // a unimodular matrix never gives 0/0; treat a singular one as ∞
    Ext::ratio(num, den).unwrap_or(Ext::Infinity)
}

/// Distance in PSL(2,C): `min(‖A - B‖, ‖A + B‖)` in the Frobenius norm.
pub fn psl_distance(a: &Mat2C, b: &Mat2C) -> f64 {
    (*a - *b).frobenius().min((*a + *b).frobenius())
}

/// `‖A A* - I‖ < tol`.
pub fn is_unitary(a: &Mat2C, tol: f64) -> bool {
    (*a * a.adjoint() - Mat2C::identity()).frobenius() < tol
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random element of SL(2,C) with entries of moderate size.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R) -> Mat2C {
    loop {
        let m = Mat2C::new(
            gaussian_c64(rng),
            gaussian_c64(rng),
            gaussian_c64(rng),
            gaussian_c64(rng),
        );
        if m.det().norm() > 0.1 {
            return m.normalized();
        }
    }
}

/// Random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2C {
    loop {
        let p = gaussian_c64(rng);
        let q = gaussian_c64(rng);
        let n = (p.norm_sqr() + q.norm_sqr()).sqrt();
        if n > 0.1 {
            let (p, q) = (p / n, q / n);
            return Mat2C::new(p, -q.conj(), q, p.conj());
        }
    }
}
