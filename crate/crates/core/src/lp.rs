//! Small linear programs that come up around polyhedral norms, solved with
//! `minilp`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DVector;

use crate::error::{Error, Result};

const FREE: (f64, f64) = (f64::NEG_INFINITY, f64::INFINITY);

fn lp_error(e: minilp::Error) -> Error {
    Error::Consistency(format!("linear program failed: {e}"))
}

/// Distance `min ‖a − b‖` between `conv(a_pts)` and `conv(b_pts)` where the
/// norm is the support function `‖x‖ = max_k ⟨x, g_k⟩` of a symmetric
/// generator set `gauge` (for the dual norm of a polyhedral norm these are
/// the unit-ball vertices).
pub fn polytope_distance(
    a_pts: &[DVector<f64>],
    b_pts: &[DVector<f64>],
    gauge: &[DVector<f64>],
) -> Result<f64> {
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let t = pb.add_var(1.0, FREE);
    let alpha: Vec<_> = a_pts
        .iter()
        .map(|_| pb.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let beta: Vec<_> = b_pts
        .iter()
        .map(|_| pb.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let sum_a: Vec<_> = alpha.iter().map(|&v| (v, 1.0)).collect();
    pb.add_constraint(&sum_a, ComparisonOp::Eq, 1.0);
    let sum_b: Vec<_> = beta.iter().map(|&v| (v, 1.0)).collect();
    pb.add_constraint(&sum_b, ComparisonOp::Eq, 1.0);
    for g in gauge {
        let mut row = Vec::with_capacity(alpha.len() + beta.len() + 1);
        for (v, p) in alpha.iter().zip(a_pts) {
            row.push((*v, p.dot(g)));
        }
        for (v, p) in beta.iter().zip(b_pts) {
            row.push((*v, -p.dot(g)));
        }
        row.push((t, -1.0));
        pb.add_constraint(&row, ComparisonOp::Le, 0.0);
    }
    let sol = pb.solve().map_err(lp_error)?;
    Ok(sol.objective())
}

/// Solves `min max_k ⟨f_k, v⟩` subject to `A v = w` over free `v`.
///
/// Returns the optimal value and a minimizer. Used for pushforward norms
/// of polyhedral norms, where `f_k` are the supporting functionals.
pub fn min_gauge_on_affine(
    functionals: &[DVector<f64>],
    a: &nalgebra::DMatrix<f64>,
    w: &DVector<f64>,
) -> Result<(f64, DVector<f64>)> {
    let n = a.ncols();
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let t = pb.add_var(1.0, FREE);
    let v: Vec<_> = (0..n).map(|_| pb.add_var(0.0, FREE)).collect();
    for r in 0..a.nrows() {
        let row: Vec<_> = (0..n).map(|c| (v[c], a[(r, c)])).collect();
        pb.add_constraint(&row, ComparisonOp::Eq, w[r]);
    }
    for f in functionals {
        let mut row: Vec<_> = (0..n).map(|c| (v[c], f[c])).collect();
        row.push((t, -1.0));
        pb.add_constraint(&row, ComparisonOp::Le, 0.0);
    }
    let sol = pb.solve().map_err(lp_error)?;
    let x = DVector::from_iterator(n, v.iter().map(|&vi| sol[vi]));
    Ok((sol.objective(), x))
}

/// Whether `p` lies in `conv(points)` up to an l1 slack of `tol`.
pub fn in_convex_hull(points: &[DVector<f64>], p: &DVector<f64>, tol: f64) -> Result<bool> {
    let dim = p.len();
    let mut pb = Problem::new(OptimizationDirection::Minimize);
    let weights: Vec<_> = points
        .iter()
        .map(|_| pb.add_var(0.0, (0.0, f64::INFINITY)))
        .collect();
    let plus: Vec<_> = (0..dim)
        .map(|_| pb.add_var(1.0, (0.0, f64::INFINITY)))
        .collect();
    let minus: Vec<_> = (0..dim)
        .map(|_| pb.add_var(1.0, (0.0, f64::INFINITY)))
        .collect();
    let sum: Vec<_> = weights.iter().map(|&v| (v, 1.0)).collect();
    pb.add_constraint(&sum, ComparisonOp::Eq, 1.0);
    for c in 0..dim {
        let mut row: Vec<_> = weights
            .iter()
            .zip(points)
            .map(|(&v, q)| (v, q[c]))
            .collect();
        row.push((plus[c], 1.0));
        row.push((minus[c], -1.0));
        pb.add_constraint(&row, ComparisonOp::Eq, p[c]);
    }
    let sol = pb.solve().map_err(lp_error)?;
    Ok(sol.objective() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn distance_between_points_in_max_norm() {
        // gauge = vertices of the l1 ball, so the distance is the max norm
        let gauge = vec![dv(&[1.0, 0.0]), dv(&[-1.0, 0.0]), dv(&[0.0, 1.0]), dv(&[0.0, -1.0])];
        let d = polytope_distance(&[dv(&[0.0, 0.0])], &[dv(&[3.0, -4.0])], &gauge).unwrap();
        assert!((d - 4.0).abs() < 1e-9);
    }

    #[test]
    fn distance_between_segments() {
        let gauge = vec![dv(&[1.0, 0.0]), dv(&[-1.0, 0.0]), dv(&[0.0, 1.0]), dv(&[0.0, -1.0])];
        let a = [dv(&[0.0, 0.0]), dv(&[2.0, 0.0])];
        let b = [dv(&[1.0, 1.0]), dv(&[1.0, 3.0])];
        let d = polytope_distance(&a, &b, &gauge).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hull_membership() {
        let sq = [dv(&[1.0, 1.0]), dv(&[-1.0, 1.0]), dv(&[-1.0, -1.0]), dv(&[1.0, -1.0])];
        assert!(in_convex_hull(&sq, &dv(&[0.3, -0.9]), 1e-9).unwrap());
        assert!(!in_convex_hull(&sq, &dv(&[1.2, 0.0]), 1e-9).unwrap());
    }

    #[test]
    fn gauge_minimization_on_a_line() {
        // max-norm minimized over {v : v_0 = 1}: optimum 1 at v_1 in [-1,1]
        let f = vec![dv(&[1.0, 0.0]), dv(&[-1.0, 0.0]), dv(&[0.0, 1.0]), dv(&[0.0, -1.0])];
        let a = nalgebra::DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let (val, v) = min_gauge_on_affine(&f, &a, &dv(&[1.0])).unwrap();
        assert!((val - 1.0).abs() < 1e-9);
        assert!((v[0] - 1.0).abs() < 1e-9 && v[1].abs() <= 1.0 + 1e-9);
    }
}
