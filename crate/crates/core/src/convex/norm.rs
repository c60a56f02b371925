use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::set::ConvexSet;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{Covector, Vector};
use crate::polyhedral::Polyhedron;

/// Relative tolerance deciding ties and zeros for the analytic families.
const ACTIVE_TOL: f64 = 1e-12;

/// A norm on a polarization `V ≅ ℝⁿ` from a closed list of families.
///
/// * `Corner { axis }`: `‖v‖ = |v_axis| + |v|`; in the plane this is
///   `|x| + √(x² + y²)`.
/// * `Axial { axis }`: `‖v‖ = |v - v_axis e_axis| + |v|`; on `ℝ³` with
///   `axis = 0` this is `√(x₂² + x₃²) + √(x₁² + x₂² + x₃²)`.
/// * `RootSum`: `‖v‖ = √(|v|₁² + |v|₂²)`.
///
/// `|·|` is the euclidean norm of the coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec {
    Euclidean { dim: usize },
    L1 { dim: usize },
    LInf { dim: usize },
    Polyhedral(Arc<Polyhedron>),
    Corner { dim: usize, axis: usize },
    RootSum { dim: usize },
    Axial { dim: usize, axis: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityClass {
    Polyhedral,
    StrictlyConvex,
    StronglyConvex,
    SmoothStronglyConvex,
}

// planar kernel N(x, y) = |x| + √(x² + y²) shared by the corner and axial families

fn kernel_norm(x: f64, y: f64) -> f64 {
    x.abs() + x.hypot(y)
}

fn kernel_dual(a: f64, b: f64) -> f64 {
    if a.abs() <= b.abs() {
        b.abs()
    } else {
        (a * a + b * b) / (2.0 * a.abs())
    }
}

/// The unique `(x, y)` with `N(x, y) = 1` maximizing `ax + by`.
fn kernel_argmax(a: f64, b: f64) -> (f64, f64) {
    if a == 0.0 && b == 0.0 {
        (0.0, 0.0)
    } else if a.abs() <= b.abs() {
        (0.0, b.signum())
    } else {
        let q = b / a.abs();
        (a.signum() * 0.5 * (1.0 - q * q), q)
    }
}

/// Splits `v` into its `axis` coordinate and the remaining part.
fn split(v: &DVector<f64>, axis: usize) -> (f64, DVector<f64>) {
    let mut w = v.clone();
    let a = w[axis];
    w[axis] = 0.0;
    (a, w)
}

fn unit_or_zero(w: &DVector<f64>) -> DVector<f64> {
    let n = w.norm();
    if n > 0.0 {
        w / n
    } else {
        DVector::zeros(w.len())
    }
}

fn sign_box_vertices(u: &DVector<f64>, scale: f64) -> Vec<DVector<f64>> {
    let tol = ACTIVE_TOL * u.amax();
    let free: Vec<usize> = (0..u.len()).filter(|&i| u[i].abs() <= tol).collect();
    let base = u.map(|x| if x.abs() <= tol { 0.0 } else { x.signum() * scale });
    let mut out = Vec::with_capacity(1 << free.len());
    for mask in 0..(1usize << free.len()) {
        let mut p = base.clone();
        for (bit, &i) in free.iter().enumerate() {
            p[i] = if mask >> bit & 1 == 1 { -scale } else { scale };
        }
        out.push(p);
    }
    out
}

fn max_coordinate_vertices(u: &DVector<f64>, scale: f64) -> Vec<DVector<f64>> {
    let m = u.amax();
    (0..u.len())
        .filter(|&i| u[i].abs() >= m * (1.0 - ACTIVE_TOL))
        .map(|i| {
            let mut p = DVector::zeros(u.len());
            p[i] = u[i].signum() * scale;
            p
        })
        .collect()
}

/// Soft-threshold level `m = Σ (|η_i| − m)₊` for the root-sum dual.
fn threshold_level(eta: &DVector<f64>) -> f64 {
    let mut a: Vec<f64> = eta.iter().map(|x| x.abs()).collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let mut s = 0.0;
    for k in 1..=a.len() {
        s += a[k - 1];
        let m = s / (k as f64 + 1.0);
        if k == a.len() || a[k] <= m {
            return m;
        }
    }
    0.0
}

fn soft_threshold(eta: &DVector<f64>, m: f64) -> DVector<f64> {
    eta.map(|x| x.signum() * (x.abs() - m).max(0.0))
}

impl NormSpec {
    pub fn euclidean(dim: usize) -> Self {
        NormSpec::Euclidean { dim }
    }

    pub fn l1(dim: usize) -> Self {
        NormSpec::L1 { dim }
    }

    pub fn linf(dim: usize) -> Self {
        NormSpec::LInf { dim }
    }

    pub fn corner(dim: usize, axis: usize) -> Result<Self> {
        NormSpec::Corner { dim, axis }.validated()
    }

    pub fn axial(dim: usize, axis: usize) -> Result<Self> {
        NormSpec::Axial { dim, axis }.validated()
    }

    pub fn root_sum(dim: usize) -> Self {
        NormSpec::RootSum { dim }
    }

    pub fn polyhedral(p: Polyhedron) -> Self {
        NormSpec::Polyhedral(Arc::new(p))
    }

    fn validated(self) -> Result<Self> {
        if self.dim() == 0 {
            return Err(Error::InvalidInput("norm dimension must be positive".into()));
        }
        match self {
            NormSpec::Corner { dim, axis } | NormSpec::Axial { dim, axis } => {
                if dim < 2 {
                    return Err(Error::InvalidInput(format!(
                        "{} norm needs dimension at least 2",
                        self.family()
                    )));
                }
                if axis >= dim {
                    return Err(Error::InvalidInput(format!("axis {axis} out of range for dimension {dim}")));
                }
            }
            _ => {}
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::Euclidean { dim }
            | NormSpec::L1 { dim }
            | NormSpec::LInf { dim }
            | NormSpec::RootSum { dim }
            | NormSpec::Corner { dim, .. }
            | NormSpec::Axial { dim, .. } => *dim,
            NormSpec::Polyhedral(p) => p.dim(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            NormSpec::Euclidean { .. } => "euclidean",
            NormSpec::L1 { .. } => "l1",
            NormSpec::LInf { .. } => "linf",
            NormSpec::Polyhedral(_) => "polyhedral",
            NormSpec::Corner { .. } => "corner",
            NormSpec::RootSum { .. } => "root_sum",
            NormSpec::Axial { .. } => "axial",
        }
    }

    pub fn convexity_class(&self) -> ConvexityClass {
        match self {
            NormSpec::L1 { .. } | NormSpec::LInf { .. } | NormSpec::Polyhedral(_) => {
                ConvexityClass::Polyhedral
            }
            NormSpec::Euclidean { .. } => ConvexityClass::SmoothStronglyConvex,
            NormSpec::Corner { .. } | NormSpec::RootSum { .. } | NormSpec::Axial { .. } => {
                ConvexityClass::StronglyConvex
            }
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        self.convexity_class() == ConvexityClass::Polyhedral
    }

    /// Unit ball as a [`Polyhedron`]; polyhedral families only.
    pub fn polyhedron(&self) -> Result<Arc<Polyhedron>> {
        let n = self.dim();
        match self {
            NormSpec::Polyhedral(p) => Ok(p.clone()),
            NormSpec::L1 { .. } => {
                let verts: Vec<Vector> = (0..n)
                    .flat_map(|i| [Vector::basis(n, i), Vector::basis(n, i).scale(-1.0)])
                    .collect();
                Ok(Arc::new(Polyhedron::from_vertices(&verts)?))
            }
            NormSpec::LInf { .. } => {
                let f: Vec<Covector> = (0..n)
                    .flat_map(|i| [Covector::basis(n, i), Covector::basis(n, i).scale(-1.0)])
                    .collect();
                Ok(Arc::new(Polyhedron::from_functionals(&f)?))
            }
            _ => Err(Error::Unsupported(format!(
                "{} norm is not polyhedral",
                self.family()
            ))),
        }
    }

    pub(crate) fn norm_raw(&self, v: &DVector<f64>) -> f64 {
        match self {
            NormSpec::Euclidean { .. } => v.norm(),
            NormSpec::L1 { .. } => v.lp_norm(1),
            NormSpec::LInf { .. } => v.amax(),
            NormSpec::Polyhedral(p) => p
                .raw_functionals()
                .iter()
                .map(|f| f.dot(v))
                .fold(f64::NEG_INFINITY, f64::max),
            NormSpec::Corner { axis, .. } => {
                let (a, w) = split(v, *axis);
                kernel_norm(a, w.norm())
            }
            NormSpec::Axial { axis, .. } => {
                let (a, w) = split(v, *axis);
                kernel_norm(w.norm(), a)
            }
            NormSpec::RootSum { .. } => v.lp_norm(1).hypot(v.norm()),
        }
    }

    pub(crate) fn dual_norm_raw(&self, eta: &DVector<f64>) -> f64 {
        match self {
            NormSpec::Euclidean { .. } => eta.norm(),
            NormSpec::L1 { .. } => eta.amax(),
            NormSpec::LInf { .. } => eta.lp_norm(1),
            NormSpec::Polyhedral(p) => p
                .raw_vertices()
                .iter()
                .map(|v| v.dot(eta))
                .fold(f64::NEG_INFINITY, f64::max),
            NormSpec::Corner { axis, .. } => {
                let (a, w) = split(eta, *axis);
                kernel_dual(a, w.norm())
            }
            NormSpec::Axial { axis, .. } => {
                let (a, w) = split(eta, *axis);
                kernel_dual(w.norm(), a)
            }
            NormSpec::RootSum { .. } => {
                let m = threshold_level(eta);
                m.hypot(soft_threshold(eta, m).norm())
            }
        }
    }

    /// `dE*(η)` for the families whose dual energy is differentiable.
    pub(crate) fn gradient_dual_energy_raw(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(match self {
            NormSpec::Euclidean { .. } => eta.clone(),
            NormSpec::Corner { axis, .. } => {
                let (a, w) = split(eta, *axis);
                let (x, y) = kernel_argmax(a, w.norm());
                let mut v = unit_or_zero(&w) * y;
                v[*axis] = x;
                v * kernel_dual(a, w.norm())
            }
            NormSpec::Axial { axis, .. } => {
                let (a, w) = split(eta, *axis);
                let (x, y) = kernel_argmax(w.norm(), a);
                let mut v = unit_or_zero(&w) * x;
                v[*axis] = y;
                v * kernel_dual(w.norm(), a)
            }
            NormSpec::RootSum { .. } => soft_threshold(eta, threshold_level(eta)),
            _ => {
                return Err(Error::Unsupported(format!(
                    "dual energy of the {} norm is not differentiable",
                    self.family()
                )))
            }
        })
    }

    pub fn norm(&self, v: &Vector) -> Result<f64> {
        check_dim(self.dim(), v.dim())?;
        Ok(self.norm_raw(v.coords()))
    }

    pub fn dual_norm(&self, eta: &Covector) -> Result<f64> {
        check_dim(self.dim(), eta.dim())?;
        Ok(self.dual_norm_raw(eta.coords()))
    }

    /// `E(v) = ‖v‖²/2`.
    pub fn energy(&self, v: &Vector) -> Result<f64> {
        Ok(0.5 * self.norm(v)?.powi(2))
    }

    /// `E*(η) = ‖η‖_*²/2`.
    pub fn dual_energy(&self, eta: &Covector) -> Result<f64> {
        Ok(0.5 * self.dual_norm(eta)?.powi(2))
    }

    /// `∂_u E = {η : ‖η‖_* = ‖u‖, ⟨η, u⟩ = ‖u‖²}`, with `∂_0 E = {0}`.
    pub fn subdiff_energy(&self, u: &Vector) -> Result<ConvexSet> {
        check_dim(self.dim(), u.dim())?;
        let u = u.coords();
        let n = self.norm_raw(u);
        if n == 0.0 {
            return Ok(ConvexSet::Singleton(DVector::zeros(u.len())));
        }
        Ok(match self {
            NormSpec::Euclidean { .. } => ConvexSet::Singleton(u.clone()),
            NormSpec::L1 { .. } => ConvexSet::Polytope(sign_box_vertices(u, n)),
            NormSpec::LInf { .. } => ConvexSet::Polytope(max_coordinate_vertices(u, n)),
            NormSpec::Polyhedral(p) => {
                let f = p.raw_functionals();
                let active = p.active_functionals(&Vector::from_dvector(u.clone()));
                ConvexSet::Polytope(active.iter().map(|&k| &f[k] * n).collect())
            }
            NormSpec::Corner { axis, .. } => {
                let (a, w) = split(u, *axis);
                let e = DVector::from_fn(u.len(), |i, _| if i == *axis { 1.0 } else { 0.0 });
                let radial = u / u.norm();
                if a.abs() <= ACTIVE_TOL * w.amax() {
                    ConvexSet::Polytope(vec![(&radial + &e) * n, (&radial - &e) * n])
                } else {
                    ConvexSet::Singleton((radial + e * a.signum()) * n)
                }
            }
            NormSpec::Axial { axis, .. } => {
                let (a, w) = split(u, *axis);
                let radial = u / u.norm();
                if w.amax() <= ACTIVE_TOL * a.abs() {
                    let mut center = DVector::zeros(u.len());
                    center[*axis] = a;
                    ConvexSet::Support {
                        center,
                        radius: a.abs(),
                        axis: *axis,
                        approximate: false,
                    }
                } else {
                    ConvexSet::Singleton((radial + unit_or_zero(&w)) * n)
                }
            }
            NormSpec::RootSum { .. } => {
                let l1 = u.lp_norm(1);
                ConvexSet::Polytope(sign_box_vertices(u, l1).into_iter().map(|p| p + u).collect())
            }
        })
    }

    /// `∂_η E* = {v : ‖v‖ = ‖η‖_*, ⟨η, v⟩ = ‖η‖_*²}`: the face of the sphere of
    /// radius `‖η‖_*` exposed by `η`.
    pub fn subdiff_dual_energy(&self, eta: &Covector) -> Result<ConvexSet> {
        check_dim(self.dim(), eta.dim())?;
        let e = eta.coords();
        let r = self.dual_norm_raw(e);
        if r == 0.0 {
            return Ok(ConvexSet::Singleton(DVector::zeros(e.len())));
        }
        Ok(match self {
            NormSpec::L1 { .. } => ConvexSet::Polytope(max_coordinate_vertices(e, r)),
            NormSpec::LInf { .. } => ConvexSet::Polytope(sign_box_vertices(e, r)),
            NormSpec::Polyhedral(p) => {
                let face = p.face_of(eta)?;
                ConvexSet::Polytope(p.face_points(face.id, r))
            }
            _ => ConvexSet::Singleton(self.gradient_dual_energy_raw(e)?),
        })
    }

    /// `dE*(η)`; an error for polyhedral families.
    pub fn gradient_dual_energy(&self, eta: &Covector) -> Result<Vector> {
        check_dim(self.dim(), eta.dim())?;
        self.gradient_dual_energy_raw(eta.coords()).map(Vector::from_dvector)
    }

    /// Index of the smooth piece of `dE*` containing `η`. The gradient is
    /// analytic on each piece; pieces meet along the switching surfaces of
    /// the corner, axial and root-sum families.
    pub fn dual_regime(&self, eta: &Covector) -> u64 {
        let e = eta.coords();
        match self {
            NormSpec::Corner { axis, .. } => {
                let (a, w) = split(e, *axis);
                u64::from(a.abs() > w.norm())
            }
            NormSpec::Axial { axis, .. } => {
                let (a, w) = split(e, *axis);
                u64::from(w.norm() > a.abs())
            }
            NormSpec::RootSum { .. } => {
                let m = threshold_level(e);
                e.iter()
                    .enumerate()
                    .filter(|(_, x)| x.abs() > m)
                    .fold(0u64, |acc, (i, _)| acc | (1u64 << (i % 64)))
            }
            _ => 0,
        }
    }
}

/// Outcome of the three equivalent Fenchel conditions for a pair `(u, η)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualityCheck {
    /// `η ∈ ∂_u E`
    pub in_subdiff: bool,
    /// `E(u) + E*(η) = ⟨η, u⟩`
    pub fenchel_equality: bool,
    /// `u ∈ ∂_η E*`
    pub in_dual_subdiff: bool,
}

impl DualityCheck {
    pub fn agree(&self) -> bool {
        self.in_subdiff == self.fenchel_equality && self.fenchel_equality == self.in_dual_subdiff
    }

    pub fn all(&self) -> bool {
        self.in_subdiff && self.fenchel_equality && self.in_dual_subdiff
    }
}

/// Evaluates the three conditions independently: membership in the set
/// returned by [`NormSpec::subdiff_energy`], the Fenchel–Young equality, and
/// membership in [`NormSpec::subdiff_dual_energy`]. `tol` is scaled by
/// `max(1, ‖u‖², ‖η‖_*²)`.
pub fn check_duality_inversion(
    norm: &NormSpec,
    u: &Vector,
    eta: &Covector,
    tol: f64,
) -> Result<DualityCheck> {
    let nu = norm.norm(u)?;
    let ne = norm.dual_norm(eta)?;
    let scale = 1f64.max(nu * nu).max(ne * ne);
    let in_subdiff = norm
        .subdiff_energy(u)?
        .contains(eta.coords(), tol * scale.sqrt())?;
    let gap = 0.5 * nu * nu + 0.5 * ne * ne - eta.pair(u);
    let fenchel_equality = gap.abs() <= tol * scale;
    let in_dual_subdiff = norm
        .subdiff_dual_energy(eta)?
        .contains(u.coords(), tol * scale.sqrt())?;
    Ok(DualityCheck {
        in_subdiff,
        fenchel_equality,
        in_dual_subdiff,
    })
}

#[derive(Serialize, Deserialize)]
struct NormData {
    family: String,
    dim: usize,
    #[serde(default)]
    params: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct AxisParams {
    #[serde(default)]
    axis: usize,
}

impl Serialize for NormSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let params = match self {
            NormSpec::Corner { axis, .. } | NormSpec::Axial { axis, .. } => {
                serde_json::to_value(AxisParams { axis: *axis })
            }
            NormSpec::Polyhedral(p) => serde_json::to_value(p.as_ref()),
            _ => Ok(serde_json::Value::Object(Default::default())),
        }
        .map_err(S::Error::custom)?;
        NormData {
            family: self.family().to_string(),
            dim: self.dim(),
            params,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let data = NormData::deserialize(d)?;
        let params = if data.params.is_null() {
            serde_json::Value::Object(Default::default())
        } else {
            data.params
        };
        let axis = || -> std::result::Result<usize, D::Error> {
            serde_json::from_value::<AxisParams>(params.clone())
                .map(|p| p.axis)
                .map_err(D::Error::custom)
        };
        let dim = data.dim;
        let spec = match data.family.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => NormSpec::Euclidean { dim },
            "l1" => NormSpec::L1 { dim },
            "linf" | "max" => NormSpec::LInf { dim },
            "root_sum" | "rootsum" => NormSpec::RootSum { dim },
            "corner" => NormSpec::Corner { dim, axis: axis()? },
            "axial" | "so3" => NormSpec::Axial { dim, axis: axis()? },
            "polyhedral" => {
                let p: Polyhedron = serde_json::from_value(params).map_err(D::Error::custom)?;
                if p.dim() != dim {
                    return Err(D::Error::custom(format!(
                        "polyhedron has dimension {}, norm declares {dim}",
                        p.dim()
                    )));
                }
                NormSpec::Polyhedral(Arc::new(p))
            }
            other => return Err(D::Error::custom(format!("unknown norm family '{other}'"))),
        };
        spec.validated().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::from_slice(x)
    }
    fn c(x: &[f64]) -> Covector {
        Covector::from_slice(x)
    }

    #[test]
    fn energies() {
        assert_eq!(NormSpec::linf(3).energy(&v(&[0.0, 0.0, 1.0])).unwrap(), 0.5);
        let corner = NormSpec::corner(2, 0).unwrap();
        assert_eq!(corner.energy(&v(&[1.0, 0.0])).unwrap(), 2.0);
        assert_eq!(NormSpec::l1(2).energy(&v(&[3.0, -4.0])).unwrap(), 24.5);
        assert!(NormSpec::l1(2).energy(&v(&[1.0])).is_err());
    }

    #[test]
    fn dual_norms() {
        assert_eq!(NormSpec::l1(2).dual_norm(&c(&[3.0, -4.0])).unwrap(), 4.0);
        let corner = NormSpec::corner(2, 0).unwrap();
        assert_eq!(corner.dual_norm(&c(&[0.5, 1.0])).unwrap(), 1.0);
        for n in [
            NormSpec::euclidean(3),
            NormSpec::root_sum(3),
            NormSpec::axial(3, 0).unwrap(),
        ] {
            assert_eq!(n.dual_norm(&c(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        }
    }

    #[test]
    fn corner_gradient_is_the_f_field() {
        let corner = NormSpec::corner(2, 0).unwrap();
        let g = corner.gradient_dual_energy(&c(&[0.5, 1.0])).unwrap();
        assert_eq!(g.to_vec(), vec![0.0, 1.0]);
        // second regime: sign(η₁)((1 - q²)/2, q) scaled by the dual norm
        let eta = c(&[2.0, 1.0]);
        let g = corner.gradient_dual_energy(&eta).unwrap();
        let r = corner.dual_norm(&eta).unwrap();
        assert!((g[0] - r * 0.5 * (1.0 - 0.25)).abs() < 1e-15);
        assert!((g[1] - r * 0.5).abs() < 1e-15);
    }

    #[test]
    fn root_sum_threshold() {
        let n = NormSpec::root_sum(2);
        // η = ∂E at e₁: |e₁|₁·signbox(e₁) + e₁ ∋ (2, s), |s| ≤ 1
        let eta = c(&[2.0, 0.5]);
        let g = n.gradient_dual_energy(&eta).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-15 && g[1] == 0.0);
        assert!((n.dual_norm(&eta).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!((n.norm(&v(&[1.0, 0.0])).unwrap() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn heisenberg_max_norm_subdifferential_at_x3() {
        let n = NormSpec::linf(3);
        let k = n.subdiff_energy(&v(&[0.0, 0.0, 1.0])).unwrap();
        assert!(k.contains(&DVector::from_column_slice(&[0.0, 0.0, 1.0]), 1e-12).unwrap());
    }

    #[test]
    fn axial_subdifferential_contains_the_square() {
        let n = NormSpec::axial(3, 0).unwrap();
        let k = n.subdiff_energy(&v(&[1.0, 0.0, 0.0])).unwrap();
        for (a, b) in [(0.49, 0.49), (-0.49, 0.3), (0.0, -0.49)] {
            assert!(k.contains(&DVector::from_column_slice(&[1.0, a, b]), 1e-12).unwrap());
        }
    }

    #[test]
    fn l1_dual_faces() {
        let n = NormSpec::l1(2);
        let k = n.subdiff_dual_energy(&c(&[1.0, 1.0])).unwrap();
        assert_eq!(
            k,
            ConvexSet::Polytope(vec![
                DVector::from_column_slice(&[1.0, 0.0]),
                DVector::from_column_slice(&[0.0, 1.0])
            ])
        );
        let k = n.subdiff_dual_energy(&c(&[1.0, 0.0])).unwrap();
        assert!(k.is_singleton());
    }

    #[test]
    fn inversion_false_for_orthogonal_pair() {
        let chk = check_duality_inversion(&NormSpec::euclidean(2), &v(&[1.0, 0.0]), &c(&[0.0, 1.0]), 1e-9)
            .unwrap();
        assert!(!chk.in_subdiff && !chk.fenchel_equality && !chk.in_dual_subdiff);
    }

    #[test]
    fn json_schema() {
        let n = NormSpec::axial(3, 0).unwrap();
        let text = serde_json::to_string(&n).unwrap();
        assert_eq!(text, r#"{"family":"axial","dim":3,"params":{"axis":0}}"#);
        let back: NormSpec = serde_json::from_str(r#"{"family":"so3","dim":3}"#).unwrap();
        assert_eq!(back, n);
        let bad = serde_json::from_str::<NormSpec>(r#"{"family":"corner","dim":2,"params":{"axis":5}}"#);
        assert!(bad.is_err());
        let poly = NormSpec::polyhedral(
            Polyhedron::from_vertices(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])])
                .unwrap(),
        );
        let back: NormSpec = serde_json::from_str(&serde_json::to_string(&poly).unwrap()).unwrap();
        assert_eq!(back, poly);
    }

    #[test]
    fn convexity_classes() {
        assert_eq!(NormSpec::l1(2).convexity_class(), ConvexityClass::Polyhedral);
        assert_eq!(NormSpec::root_sum(3).convexity_class(), ConvexityClass::StronglyConvex);
        assert_eq!(
            NormSpec::euclidean(2).convexity_class(),
            ConvexityClass::SmoothStronglyConvex
        );
        assert!(NormSpec::euclidean(2).polyhedron().is_err());
    }
}
