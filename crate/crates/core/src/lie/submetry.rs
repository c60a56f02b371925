use nalgebra::{DMatrix, DVector};

use super::group::{GroupElement, GroupSpec};
use crate::convex::{sampled::golden_section_max, NormSpec};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{rank, Covector, Vector};
use crate::lp;
use crate::polyhedral::Polyhedron;

/// A Lie group epimorphism `π: G → H` given by its differential, together
/// with the norm on the polarization `V` of `G`. The target polarization `W`
/// must equal `dπ(V)`; it carries the pushforward norm
/// `‖w‖ = inf{‖v‖ : v ∈ V, dπ(v) = w}`.
#[derive(Clone, Debug)]
pub struct SubmetryData {
    source: GroupSpec,
    target: GroupSpec,
    dpi: DMatrix<f64>,
    norm: NormSpec,
    /// `dπ` restricted to `V`, in `V` and `W` coordinates.
    restricted: DMatrix<f64>,
    restricted_pinv: DMatrix<f64>,
    /// Orthonormal basis of `ker(dπ|_V)`.
    kernel: DMatrix<f64>,
}

impl SubmetryData {
    pub fn new(source: GroupSpec, target: GroupSpec, dpi: DMatrix<f64>, norm: NormSpec) -> Result<Self> {
        let (n, m) = (source.dim(), target.dim());
        if dpi.nrows() != m || dpi.ncols() != n {
            return Err(Error::InvalidInput(format!(
                "dπ must be {m}×{n}, got {}×{}",
                dpi.nrows(),
                dpi.ncols()
            )));
        }
        check_dim(source.rank_dim(), norm.dim())?;
        if rank(&dpi, 1e-10) < m {
            return Err(Error::InvalidInput("dπ is not surjective".into()));
        }
        let e = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        for i in 0..n {
            for j in 0..n {
                let lhs = &dpi * source.bracket_raw(&e(i), &e(j));
                let rhs = target.bracket_raw(&(&dpi * e(i)), &(&dpi * e(j)));
                if (lhs - rhs).amax() > 1e-12 {
                    return Err(Error::InvalidInput(
                        "dπ is not a Lie algebra homomorphism".into(),
                    ));
                }
            }
        }
        let v_cols: Vec<DVector<f64>> = source.polarization().iter().map(|&i| dpi.column(i).into_owned()).collect();
        let image = DMatrix::from_columns(&v_cols);
        for r in (0..m).filter(|r| !target.polarization().contains(r)) {
            if image.row(r).amax() > 1e-12 {
                return Err(Error::InvalidInput(
                    "dπ(V) leaves the target polarization".into(),
                ));
            }
        }
        let restricted = DMatrix::from_rows(
            &target
                .polarization()
                .iter()
                .map(|&r| image.row(r).into_owned())
                .collect::<Vec<_>>(),
        );
        if rank(&restricted, 1e-10) < target.rank_dim() {
            return Err(Error::InvalidInput(
                "dπ(V) does not fill the target polarization".into(),
            ));
        }
        let svd = restricted.clone().svd(true, true);
        let restricted_pinv = svd
            .pseudo_inverse(1e-12)
            .map_err(|e| Error::Consistency(e.to_string()))?;
        let full = restricted.clone().transpose().svd(true, false);
        let u = full.u.unwrap();
        let r = target.rank_dim();
        let mut kernel_cols = Vec::new();
        // left singular vectors of Aᵀ beyond the rank span ker A
        let mut order: Vec<usize> = (0..full.singular_values.len()).collect();
        order.sort_by(|&a, &b| full.singular_values[b].total_cmp(&full.singular_values[a]));
        let used: Vec<usize> = order.into_iter().take(r).collect();
        let basis: Vec<DVector<f64>> = used.iter().map(|&i| u.column(i).into_owned()).collect();
        for k in 0..restricted.ncols() {
            let mut c = DVector::from_fn(restricted.ncols(), |i, _| if i == k { 1.0 } else { 0.0 });
            for b in basis.iter().chain(kernel_cols.iter()) {
                c -= b * b.dot(&c);
            }
            if c.norm() > 1e-8 {
                kernel_cols.push(c.normalize());
            }
        }
        let kernel = if kernel_cols.is_empty() {
            DMatrix::zeros(restricted.ncols(), 0)
        } else {
            DMatrix::from_columns(&kernel_cols)
        };
        Ok(SubmetryData {
            source,
            target,
            dpi,
            norm,
            restricted,
            restricted_pinv,
            kernel,
        })
    }

    /// Projection of a group onto its abelianization `ℝᵐ`, where `m` is the
    /// dimension of `V` and `V` complements the derived algebra.
    pub fn abelianization(source: GroupSpec, norm: NormSpec) -> Result<Self> {
        let m = source.rank_dim();
        let target = GroupSpec::abelian(m)?;
        let mut dpi = DMatrix::zeros(m, source.dim());
        for (j, &i) in source.polarization().iter().enumerate() {
            dpi[(j, i)] = 1.0;
        }
        Self::new(source, target, dpi, norm)
    }

    pub fn source(&self) -> &GroupSpec {
        &self.source
    }

    pub fn target(&self) -> &GroupSpec {
        &self.target
    }

    pub fn dpi(&self) -> &DMatrix<f64> {
        &self.dpi
    }

    pub fn norm(&self) -> &NormSpec {
        &self.norm
    }

    /// `dπ|_V` in `V` and `W` coordinates.
    pub fn restricted(&self) -> &DMatrix<f64> {
        &self.restricted
    }

    /// Pushforward norm of `w ∈ W` and a minimizing `v` in the fiber.
    pub fn pushforward_norm(&self, w: &Vector) -> Result<(f64, Vector)> {
        check_dim(self.target.rank_dim(), w.dim())?;
        let w = w.coords();
        if self.norm.is_polyhedral() {
            let p = self.norm.polyhedron()?;
            let (val, v) = lp::min_gauge_on_affine(p.raw_functionals(), &self.restricted, w)?;
            return Ok((val, Vector::from_dvector(v)));
        }
        let v0 = &self.restricted_pinv * w;
        let q = self.kernel.ncols();
        if q == 0 {
            return Ok((self.norm.norm_raw(&v0), Vector::from_dvector(v0)));
        }
        let radius = self.norm.norm_raw(&v0) / self.norm.euclidean_lower_bound() + 1.0;
        let mut z = DVector::zeros(q);
        let f = |z: &DVector<f64>| self.norm.norm_raw(&(&v0 + &self.kernel * z));
        let mut best = f(&z);
        for _ in 0..200 {
            let before = best;
            for k in 0..q {
                let (zk, val) = golden_section_max(
                    |s| {
                        let mut y = z.clone();
                        y[k] = s;
                        -f(&y)
                    },
                    -radius,
                    radius,
                    1e-13 * radius,
                );
                if -val < best {
                    z[k] = zk;
                    best = -val;
                }
            }
            if before - best <= 1e-15 * before.max(1.0) {
                break;
            }
        }
        Ok((best, Vector::from_dvector(&v0 + &self.kernel * z)))
    }

    /// Dual of the pushforward norm, `‖β‖ = ‖(dπ|_V)ᵀ β‖_*`.
    pub fn pushforward_dual_norm(&self, beta: &Covector) -> Result<f64> {
        check_dim(self.target.rank_dim(), beta.dim())?;
        Ok(self.norm.dual_norm_raw(&(self.restricted.transpose() * beta.coords())))
    }

    /// Unit ball of the pushforward norm, `dπ(B_V)`, for polyhedral norms.
    pub fn pushforward_polyhedron(&self) -> Result<Polyhedron> {
        let p = self.norm.polyhedron()?;
        let images: Vec<Vector> = p
            .raw_vertices()
            .iter()
            .map(|v| Vector::from_dvector(&self.restricted * v))
            .collect();
        Polyhedron::from_vertices(&images)
    }

    /// The pushforward norm as a [`NormSpec`] when it is polyhedral.
    pub fn pushforward_norm_spec(&self) -> Result<NormSpec> {
        Ok(NormSpec::polyhedral(self.pushforward_polyhedron()?))
    }

    /// Lifted covector `λ ∘ dπ` on the source algebra.
    pub fn lift_covector(&self, beta: &Covector) -> Result<Covector> {
        check_dim(self.target.dim(), beta.dim())?;
        Ok(Covector::from_dvector(self.dpi.transpose() * beta.coords()))
    }

    /// `π(g) = exp(dπ(log g))`, valid for simply connected nilpotent sources.
    pub fn project(&self, g: &GroupElement) -> Result<GroupElement> {
        let x = self.source.log_unipotent(g)?;
        self.target.exp(&Vector::from_dvector(&self.dpi * x.coords()))
    }

    /// Projects a control `u ∈ V` to `W`.
    pub fn project_control(&self, u: &Vector) -> Result<Vector> {
        check_dim(self.source.rank_dim(), u.dim())?;
        Ok(Vector::from_dvector(&self.restricted * u.coords()))
    }

    /// Horizontal lift of the piecewise-constant control sequence `w` (held on
    /// steps of length `h`) starting at `g0`. Each lifted control is a norm
    /// minimizer in its fiber, so `‖ũ‖ = ‖w‖` and `π∘γ̃ = γ`.
    pub fn lift_controls(&self, w: &[Vector], h: f64, g0: &GroupElement) -> Result<(Vec<GroupElement>, Vec<Vector>)> {
        let mut points = vec![g0.clone()];
        let mut controls = Vec::with_capacity(w.len());
        let mut g = g0.clone();
        for wi in w {
            let (_, v) = self.pushforward_norm(wi)?;
            let step = self.source.exp_matrix(&self.source.embed(&(v.coords() * h)));
            g = self.source.element(g.matrix() * step);
            points.push(g.clone());
            controls.push(v);
        }
        Ok((points, controls))
    }
}

impl NormSpec {
    /// A constant `c > 0` with `‖v‖ ≥ c·|v|₂`.
    pub fn euclidean_lower_bound(&self) -> f64 {
        match self {
            NormSpec::Euclidean { .. }
            | NormSpec::L1 { .. }
            | NormSpec::Corner { .. }
            | NormSpec::Axial { .. }
            | NormSpec::RootSum { .. } => 1.0,
            NormSpec::LInf { dim } => 1.0 / (*dim as f64).sqrt(),
            NormSpec::Polyhedral(p) => {
                // inradius of the ball: distance from 0 to the nearest facet
                1.0 / p
                    .raw_functionals()
                    .iter()
                    .map(|f| f.norm())
                    .fold(0.0, f64::max)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;
    use crate::convex::sampled::sampled_dual_norm_of;

    #[test]
    fn heisenberg_finsler_to_plane() {
        let sub = SubmetryData::abelianization(GroupSpec::heisenberg().unwrap(), NormSpec::linf(3));
        // V = 𝔤 is not a complement of the derived algebra here, so dπ must be built by hand
        assert!(sub.is_err());
        let dpi = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let sub = SubmetryData::new(
            GroupSpec::heisenberg().unwrap(),
            GroupSpec::abelian(2).unwrap(),
            dpi,
            NormSpec::linf(3),
        )
        .unwrap();
        let (val, v) = sub.pushforward_norm(&Vector::from_slice(&[0.3, -0.7])).unwrap();
        assert!((val - 0.7).abs() < 1e-9);
        assert!((v[0] - 0.3).abs() < 1e-9 && (v[1] + 0.7).abs() < 1e-9 && v[2].abs() <= 0.7 + 1e-9);
    }

    #[test]
    fn abelian_projection_with_l1() {
        let dpi = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let sub = SubmetryData::new(
            GroupSpec::abelian(2).unwrap(),
            GroupSpec::abelian(1).unwrap(),
            dpi,
            NormSpec::l1(2),
        )
        .unwrap();
        for w in [-2.0, 0.5, 3.0] {
            let (val, _) = sub.pushforward_norm(&Vector::from_slice(&[w])).unwrap();
            assert!((val - w.abs()).abs() < 1e-9);
        }
        let sub = SubmetryData::new(
            GroupSpec::abelian(2).unwrap(),
            GroupSpec::abelian(1).unwrap(),
            DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
            NormSpec::euclidean(2),
        )
        .unwrap();
        let (val, _) = sub.pushforward_norm(&Vector::from_slice(&[1.0])).unwrap();
        assert!((val - 0.5f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn dual_embedding_is_isometric() {
        let sub = SubmetryData::new(
            GroupSpec::abelian(3).unwrap(),
            GroupSpec::abelian(2).unwrap(),
            DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, -1.0]),
            NormSpec::root_sum(3),
        )
        .unwrap();
        let mut rng = rng_from_seed(11);
        for beta in [[1.0, 0.0], [0.3, -0.8], [-1.0, 2.0]] {
            let beta = DVector::from_column_slice(&beta);
            let sampled = sampled_dual_norm_of(
                |w| sub.pushforward_norm(&Vector::from_dvector(w.clone())).unwrap().0,
                &beta,
                &mut rng,
            );
            let exact = sub.pushforward_dual_norm(&Covector::from_dvector(beta)).unwrap();
            assert!((sampled - exact).abs() < 1e-6 * exact, "{sampled} vs {exact}");
        }
    }

    #[test]
    fn non_surjective_projection_is_rejected() {
        let r = SubmetryData::new(
            GroupSpec::abelian(2).unwrap(),
            GroupSpec::abelian(2).unwrap(),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]),
            NormSpec::l1(2),
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
