//! Dual norm and Fenchel conjugate computed from evaluations of the primal
//! norm only. These serve as independent oracles for the analytic formulas.

use nalgebra::DVector;
use rand::Rng;

use super::norm::NormSpec;
use crate::sampling::unit_direction;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal function on `[lo, hi]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// `sup_{v ≠ 0} ⟨η, v⟩ / ‖v‖` by a direction grid followed by golden-section
/// searches along great circles through the current best direction.
///
/// The superlevel sets of the ratio are convex cones, so the ratio is
/// unimodal along every great-circle arc on which it is positive.
pub fn sampled_dual_norm<R: Rng + ?Sized>(norm: &NormSpec, eta: &DVector<f64>, rng: &mut R) -> f64 {
    sampled_dual_norm_of(|v| norm.norm_raw(v), eta, rng)
}

/// [`sampled_dual_norm`] for a norm given as a closure.
pub fn sampled_dual_norm_of<F, R>(norm: F, eta: &DVector<f64>, rng: &mut R) -> f64
where
    F: Fn(&DVector<f64>) -> f64,
    R: Rng + ?Sized,
{
    let n = eta.len();
    if eta.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    let ratio = |v: &DVector<f64>| eta.dot(v) / norm(v);
    if n == 1 {
        return eta[0].abs() / norm(&DVector::from_element(1, 1.0));
    }
    let mut best = eta / eta.norm();
    let mut best_val = ratio(&best);
    let starts = if n == 2 { 720 } else { 4000 };
    for k in 0..starts {
        let v = if n == 2 {
            let th = std::f64::consts::TAU * k as f64 / starts as f64;
            DVector::from_column_slice(&[th.cos(), th.sin()])
        } else {
            unit_direction(rng, n)
        };
        let val = ratio(&v);
        if val > best_val {
            best_val = val;
            best = v;
        }
    }
    let rounds = if n == 2 { 4 } else { 60 * n };
    let mut width = if n == 2 { std::f64::consts::TAU / starts as f64 } else { 0.5 };
    for _ in 0..rounds {
        let d = if n == 2 {
            DVector::from_column_slice(&[-best[1], best[0]])
        } else {
            let r = unit_direction(rng, n);
            let d = &r - &best * best.dot(&r);
            if d.norm() < 1e-9 {
                continue;
            }
            d.normalize()
        };
        let curve = |phi: f64| &best * phi.cos() + &d * phi.sin();
        let (phi, val) = golden_section_max(|phi| ratio(&curve(phi)), -width, width, 1e-13);
        if val > best_val {
            best_val = val;
            best = curve(phi).normalize();
        }
        if n == 2 {
            width *= 0.5;
        } else {
            width = (width * 0.97).max(1e-3);
        }
    }
    best_val
}

/// `E*(η) = sup_v ⟨η, v⟩ − ‖v‖²/2`, maximizing first along each ray, which
/// gives `½ (⟨η, θ⟩₊ / ‖θ‖)²` for the direction `θ`.
pub fn sampled_fenchel_conjugate<R: Rng + ?Sized>(norm: &NormSpec, eta: &DVector<f64>, rng: &mut R) -> f64 {
    let s = sampled_dual_norm(norm, eta, rng).max(0.0);
    0.5 * s * s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, y) = golden_section_max(|x| -(x - 0.3).powi(2), -1.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && y.abs() < 1e-12);
    }

    #[test]
    fn sampled_dual_matches_l1() {
        let mut rng = rng_from_seed(3);
        let eta = DVector::from_column_slice(&[3.0, -4.0]);
        let s = sampled_dual_norm(&NormSpec::l1(2), &eta, &mut rng);
        assert!((s - 4.0).abs() < 1e-9);
    }

    #[test]
    fn sampled_dual_of_corner_at_half_one() {
        let mut rng = rng_from_seed(4);
        let eta = DVector::from_column_slice(&[0.5, 1.0]);
        let s = sampled_dual_norm(&NormSpec::corner(2, 0).unwrap(), &eta, &mut rng);
        assert!((s - 1.0).abs() < 1e-9);
    }
}
