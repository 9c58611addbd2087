//! Seeded sample points for verification runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `n` points uniform (by area) in the annulus `rmin <= |z - center|
/// <= rmax`, at distance at least `clearance` from every point of `avoid`.
pub fn annulus_points(
    rng: &mut ChaCha8Rng,
    n: usize,
    center: C64,
    rmin: f64,
    rmax: f64,
    avoid: &[C64],
    clearance: f64,
) -> Vec<C64> {
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 100 * n.max(1) {
        tries += 1;
        let r = rng.gen_range(rmin * rmin..=rmax * rmax).sqrt();
        let t = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = center + C64::from_polar(r, t);
        if avoid.iter().all(|p| (z - p).norm() >= clearance) {
            out.push(z);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_constrained() {
        let a = annulus_points(&mut rng(7), 50, C64::new(0.0, 0.0), 0.5, 2.0, &[C64::new(1.0, 0.0)], 0.2);
        let b = annulus_points(&mut rng(7), 50, C64::new(0.0, 0.0), 0.5, 2.0, &[C64::new(1.0, 0.0)], 0.2);
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        for z in &a {
            assert!(z.norm() >= 0.5 - 1e-12 && z.norm() <= 2.0 + 1e-12);
            assert!((z - C64::new(1.0, 0.0)).norm() >= 0.2);
        }
        assert_ne!(a, annulus_points(&mut rng(8), 50, C64::new(0.0, 0.0), 0.5, 2.0, &[], 0.0));
    }
}
