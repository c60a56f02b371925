use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{rank, Covector, Vector};

/// How `exp` is evaluated in the chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpKind {
    /// Nilpotent chart matrices: the exponential series terminates.
    Unipotent,
    /// `[[e^b, a(e^b − 1)/b], [0, 1]]` for `X = a·E₁₂ + b·E₁₁`.
    Affine,
    /// Rodrigues formula for skew-symmetric 3×3 matrices.
    Rotation,
    /// Taylor series with scaling and squaring.
    Series,
}

/// A Lie algebra with basis `e_0..e_{n-1}`, structure constants
/// `[e_i, e_j] = Σ_k c^k_{ij} e_k`, a polarization given by a subset of basis
/// indices and a faithful matrix chart `e_i ↦ M_i`.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    name: Arc<str>,
    dim: usize,
    constants: Vec<(usize, usize, usize, f64)>,
    polarization: Vec<usize>,
    chart_basis: Vec<DMatrix<f64>>,
    exp_kind: ExpKind,
    /// `ad_basis[i][(k, j)] = c^k_{ij}`
    ad_basis: Vec<DMatrix<f64>>,
    /// Left inverse of the chart map `ℝⁿ → matrices` (flattened column-major).
    pullback: DMatrix<f64>,
    chart_map: DMatrix<f64>,
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.dim == other.dim
            && self.constants == other.constants
            && self.polarization == other.polarization
            && self.chart_basis == other.chart_basis
            && self.exp_kind == other.exp_kind
    }
}

#[derive(Serialize, Deserialize)]
struct GroupData {
    name: String,
    dim: usize,
    #[serde(default)]
    structure_constants: Vec<(usize, usize, usize, f64)>,
    polarization: Vec<usize>,
    chart_basis: Vec<Vec<Vec<f64>>>,
    #[serde(default = "default_exp")]
    exp: ExpKind,
}

fn default_exp() -> ExpKind {
    ExpKind::Series
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GroupData {
            name: self.name.to_string(),
            dim: self.dim,
            structure_constants: self.constants.clone(),
            polarization: self.polarization.clone(),
            chart_basis: self
                .chart_basis
                .iter()
                .map(|m| (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect())
                .collect(),
            exp: self.exp_kind,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let data = GroupData::deserialize(d)?;
        let mut chart = Vec::with_capacity(data.chart_basis.len());
        for rows in &data.chart_basis {
            let n = rows.len();
            if n == 0 || rows.iter().any(|r| r.len() != n) {
                return Err(D::Error::custom("chart basis matrices must be square"));
            }
            chart.push(DMatrix::from_fn(n, n, |i, j| rows[i][j]));
        }
        GroupSpec::new(
            &data.name,
            data.dim,
            data.structure_constants,
            data.polarization,
            chart,
            data.exp,
        )
        .map_err(D::Error::custom)
    }
}

fn flatten(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

impl GroupSpec {
    /// Validates and assembles a group description. Structure constants are
    /// triples `(i, j, k, c)` meaning `[e_i, e_j] ∋ c·e_k`; the antisymmetric
    /// completion is implied.
    pub fn new(
        name: &str,
        dim: usize,
        constants: Vec<(usize, usize, usize, f64)>,
        polarization: Vec<usize>,
        chart_basis: Vec<DMatrix<f64>>,
        exp_kind: ExpKind,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if dim == 0 {
            return bad("algebra dimension must be positive".into());
        }
        if chart_basis.len() != dim {
            return bad(format!("{} chart matrices for a {dim}-dimensional algebra", chart_basis.len()));
        }
        let size = chart_basis[0].nrows();
        if chart_basis.iter().any(|m| m.nrows() != size || m.ncols() != size) {
            return bad("chart matrices must share one square shape".into());
        }
        let mut pol = polarization.clone();
        pol.sort_unstable();
        pol.dedup();
        if pol.len() != polarization.len() || pol.iter().any(|&i| i >= dim) || pol.is_empty() {
            return bad("polarization must list distinct basis indices".into());
        }
        let mut ad_basis = vec![DMatrix::zeros(dim, dim); dim];
        let mut canonical = Vec::new();
        for &(i, j, k, c) in &constants {
            if i >= dim || j >= dim || k >= dim || !c.is_finite() {
                return bad(format!("structure constant ({i}, {j}, {k}, {c}) out of range"));
            }
            if i == j {
                if c != 0.0 {
                    return bad(format!("[e_{i}, e_{i}] must vanish"));
                }
                continue;
            }
            let (a, b, s) = if i < j { (i, j, c) } else { (j, i, -c) };
            ad_basis[a][(k, b)] += s;
            ad_basis[b][(k, a)] -= s;
            canonical.push((a, b, k, s));
        }
        let chart_map = DMatrix::from_columns(&chart_basis.iter().map(flatten).collect::<Vec<_>>());
        if rank(&chart_map, 1e-12) < dim {
            return bad("chart matrices are linearly dependent".into());
        }
        let gram = chart_map.transpose() * &chart_map;
        let pullback = gram
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("singular chart Gram matrix".into()))?
            * chart_map.transpose();
        let spec = GroupSpec {
            name: Arc::from(name),
            dim,
            constants: canonical,
            polarization,
            chart_basis,
            exp_kind,
            ad_basis,
            pullback,
            chart_map,
        };
        let jac = spec.jacobi_residual();
        if jac > 1e-12 {
            return bad(format!("Jacobi identity fails by {jac:e}"));
        }
        let chart = spec.chart_residual();
        if chart > 1e-12 {
            return bad(format!("chart commutators disagree with structure constants by {chart:e}"));
        }
        Ok(spec)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn polarization(&self) -> &[usize] {
        &self.polarization
    }

    /// Dimension of `V`.
    pub fn rank_dim(&self) -> usize {
        self.polarization.len()
    }

    pub fn chart_size(&self) -> usize {
        self.chart_basis[0].nrows()
    }

    pub fn chart_basis(&self) -> &[DMatrix<f64>] {
        &self.chart_basis
    }

    pub fn exp_kind(&self) -> ExpKind {
        self.exp_kind
    }

    pub fn structure_constants(&self) -> &[(usize, usize, usize, f64)] {
        &self.constants
    }

    /// Whether the polarization is all of `𝔤`.
    pub fn is_finsler(&self) -> bool {
        self.polarization.len() == self.dim
    }

    pub fn is_abelian(&self) -> bool {
        self.ad_basis.iter().all(|m| m.iter().all(|&x| x == 0.0))
    }

    /// Matrix of `ad_X`.
    pub fn ad_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, a) in self.ad_basis.iter().enumerate() {
            if x[i] != 0.0 {
                m += a * x[i];
            }
        }
        m
    }

    /// `[X, Y]` from the structure constants.
    pub fn ad(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.dim())?;
        check_dim(self.dim, y.dim())?;
        Ok(Vector::from_dvector(self.ad_matrix(x.coords()) * y.coords()))
    }

    pub(crate) fn bracket_raw(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        self.ad_matrix(x) * y
    }

    /// Largest violation of the Jacobi identity over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let e = |i: usize| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 });
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (a, b, c) = (e(i), e(j), e(k));
                    let s = self.bracket_raw(&a, &self.bracket_raw(&b, &c))
                        + self.bracket_raw(&b, &self.bracket_raw(&c, &a))
                        + self.bracket_raw(&c, &self.bracket_raw(&a, &b));
                    worst = worst.max(s.amax());
                }
            }
        }
        worst
    }

    /// Largest violation of `[M_i, M_j] = Σ c^k_{ij} M_k` in the chart.
    pub fn chart_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let (a, b) = (&self.chart_basis[i], &self.chart_basis[j]);
                let comm = a * b - b * a;
                let mut expected = DMatrix::zeros(comm.nrows(), comm.ncols());
                for k in 0..self.dim {
                    expected += &self.chart_basis[k] * self.ad_basis[i][(k, j)];
                }
                worst = worst.max((comm - expected).amax());
            }
        }
        worst
    }

    /// Dimensions of `V ⊆ V + [V, V] ⊆ ...` until the flag stabilizes.
    pub fn flag_dimensions(&self) -> Vec<usize> {
        let n = self.dim;
        let mut span: Vec<DVector<f64>> = self
            .polarization
            .iter()
            .map(|&i| DVector::from_fn(n, |k, _| if k == i { 1.0 } else { 0.0 }))
            .collect();
        let layer0 = span.clone();
        let mut dims = vec![rank(&DMatrix::from_columns(&span), 1e-10)];
        loop {
            let mut next = span.clone();
            for a in &layer0 {
                for b in &span {
                    next.push(self.bracket_raw(a, b));
                }
            }
            let r = rank(&DMatrix::from_columns(&next), 1e-10);
            if r == *dims.last().unwrap() {
                break;
            }
            dims.push(r);
            span = next;
        }
        dims
    }

    pub fn is_bracket_generating(&self) -> bool {
        self.flag_dimensions().last() == Some(&self.dim)
    }

    /// Chart matrix `Σ x_i M_i`.
    pub fn chart_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.chart_size();
        let mut m = DMatrix::zeros(n, n);
        for (i, b) in self.chart_basis.iter().enumerate() {
            if x[i] != 0.0 {
                m += b * x[i];
            }
        }
        m
    }

    /// Algebra coordinates of a chart matrix; errors when the matrix is not
    /// in the span of the chart basis within `1e-9`.
    pub fn pull_back(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        let flat = flatten(m);
        let x = &self.pullback * &flat;
        let residual = (&self.chart_map * &x - &flat).amax();
        if residual > 1e-9 * (1.0 + flat.amax()) {
            return Err(Error::Consistency(format!(
                "matrix is outside the algebra chart (residual {residual:e})"
            )));
        }
        Ok(x)
    }

    /// `V → 𝔤`, zero-padding the polarization coordinates.
    pub fn embed(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut x = DVector::zeros(self.dim);
        for (j, &i) in self.polarization.iter().enumerate() {
            x[i] = v[j];
        }
        x
    }

    /// Restriction `𝔤* → V*`.
    pub fn restrict(&self, l: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.polarization.len(), self.polarization.iter().map(|&i| l[i]))
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement {
            group: self.name.clone(),
            matrix: DMatrix::identity(self.chart_size(), self.chart_size()),
        }
    }

    pub(crate) fn exp_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.chart_matrix(x);
        let n = m.nrows();
        match self.exp_kind {
            ExpKind::Unipotent => {
                let mut out = DMatrix::identity(n, n);
                let mut term = DMatrix::identity(n, n);
                for k in 1..=n {
                    term = &term * &m / k as f64;
                    if term.iter().all(|&v| v == 0.0) {
                        break;
                    }
                    out += &term;
                }
                out
            }
            ExpKind::Affine => {
                let (b, a) = (m[(0, 0)], m[(0, 1)]);
                let phi = if b.abs() < 1e-300 { 1.0 } else { b.exp_m1() / b };
                let mut out = DMatrix::identity(2, 2);
                out[(0, 0)] = b.exp();
                out[(0, 1)] = a * phi;
                out
            }
            ExpKind::Rotation => {
                let theta2 = 0.5 * m.norm_squared();
                let theta = theta2.sqrt();
                let (s, c) = if theta < 1e-4 {
                    (1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0, 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0)
                } else {
                    (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
                };
                DMatrix::identity(3, 3) + &m * s + &m * &m * c
            }
            ExpKind::Series => {
                let norm1 = m.iter().map(|v| v.abs()).fold(0.0, f64::max) * n as f64;
                let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
                let a = &m / 2f64.powi(squarings);
                let mut out = DMatrix::identity(n, n);
                let mut term = DMatrix::identity(n, n);
                for k in 1..=20 {
                    term = &term * &a / k as f64;
                    out += &term;
                }
                for _ in 0..squarings {
                    out = &out * &out;
                }
                out
            }
        }
    }

    pub fn exp(&self, x: &Vector) -> Result<GroupElement> {
        check_dim(self.dim, x.dim())?;
        Ok(GroupElement {
            group: self.name.clone(),
            matrix: self.exp_matrix(x.coords()),
        })
    }

    pub(crate) fn element(&self, matrix: DMatrix<f64>) -> GroupElement {
        GroupElement {
            group: self.name.clone(),
            matrix,
        }
    }

    /// Wraps a chart matrix after checking it lies on the group within `1e-9`.
    pub fn element_from_matrix(&self, matrix: DMatrix<f64>) -> Result<GroupElement> {
        let n = self.chart_size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidInput(format!("expected a {n}×{n} chart matrix")));
        }
        let g = self.element(matrix);
        let dev = self.group_deviation(&g);
        if !(dev <= 1e-9) {
            return Err(Error::InvalidInput(format!(
                "matrix is not an element of {} (deviation {dev:e})",
                self.name
            )));
        }
        Ok(g)
    }

    /// Distance of a chart matrix from the group variety, by chart type.
    pub fn group_deviation(&self, g: &GroupElement) -> f64 {
        let m = &g.matrix;
        let n = m.nrows();
        if !m.iter().all(|v| v.is_finite()) {
            return f64::INFINITY;
        }
        match self.exp_kind {
            ExpKind::Rotation => {
                let orth = (m * m.transpose() - DMatrix::identity(n, n)).amax();
                let det = m.determinant();
                if det > 0.0 {
                    orth.max((det - 1.0).abs())
                } else {
                    f64::INFINITY
                }
            }
            ExpKind::Affine => {
                if m[(0, 0)] <= 0.0 {
                    return f64::INFINITY;
                }
                m[(1, 0)].abs().max((m[(1, 1)] - 1.0).abs())
            }
            ExpKind::Unipotent => {
                let mut dev: f64 = 0.0;
                for i in 0..n {
                    dev = dev.max((m[(i, i)] - 1.0).abs());
                    for j in 0..i {
                        dev = dev.max(m[(i, j)].abs());
                    }
                }
                dev
            }
            ExpKind::Series => {
                if m.determinant().abs() > 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Nearest point of the group variety; used to remove drift of one-step
    /// integrators.
    pub(crate) fn retract(&self, m: DMatrix<f64>) -> DMatrix<f64> {
        let n = m.nrows();
        match self.exp_kind {
            ExpKind::Rotation => {
                let svd = m.svd(true, true);
                let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
                u * vt
            }
            ExpKind::Affine => {
                let mut m = m;
                m[(1, 0)] = 0.0;
                m[(1, 1)] = 1.0;
                m
            }
            ExpKind::Unipotent => {
                let mut m = m;
                for i in 0..n {
                    m[(i, i)] = 1.0;
                    for j in 0..i {
                        m[(i, j)] = 0.0;
                    }
                }
                m
            }
            ExpKind::Series => m,
        }
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.element(&a.matrix * &b.matrix)
    }

    pub fn inverse(&self, g: &GroupElement) -> GroupElement {
        let inv = match self.exp_kind {
            ExpKind::Rotation => g.matrix.transpose(),
            _ => g
                .matrix
                .clone()
                .try_inverse()
                .expect("group elements are invertible"),
        };
        self.element(inv)
    }

    /// Matrix of `Ad_g` in the algebra basis (column `i` is `Ad_g e_i`).
    pub fn adjoint_matrix(&self, g: &GroupElement) -> Result<DMatrix<f64>> {
        let ginv = self.inverse(g);
        let cols = self
            .chart_basis
            .iter()
            .map(|b| self.pull_back(&(&g.matrix * b * &ginv.matrix)))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_columns(&cols))
    }

    /// `Ad_g Y = g M(Y) g⁻¹` pulled back to algebra coordinates.
    #[allow(non_snake_case)]
    pub fn Ad(&self, g: &GroupElement, y: &Vector) -> Result<Vector> {
        check_dim(self.dim, y.dim())?;
        let ginv = self.inverse(g);
        let m = &g.matrix * self.chart_matrix(y.coords()) * &ginv.matrix;
        self.pull_back(&m).map(Vector::from_dvector)
    }

    /// The dual point `λ ∘ Ad_g |_V`.
    pub fn coadjoint_dual_point(&self, lambda: &Covector, g: &GroupElement) -> Result<Covector> {
        check_dim(self.dim, lambda.dim())?;
        let ad = self.adjoint_matrix(g)?;
        Ok(Covector::from_dvector(self.restrict(&(ad.transpose() * lambda.coords()))))
    }

    /// Logarithm for unipotent charts (finite series).
    pub fn log_unipotent(&self, g: &GroupElement) -> Result<Vector> {
        if self.exp_kind != ExpKind::Unipotent {
            return Err(Error::Unsupported(format!(
                "logarithm is only available for unipotent charts, not {}",
                self.name
            )));
        }
        let n = self.chart_size();
        let nil = &g.matrix - DMatrix::identity(n, n);
        let mut out = DMatrix::zeros(n, n);
        let mut term = DMatrix::identity(n, n);
        for k in 1..=n {
            term = &term * &nil;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out += &term * (sign / k as f64);
        }
        self.pull_back(&out).map(Vector::from_dvector)
    }
}

/// A point of a matrix group in its faithful chart.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    group: Arc<str>,
    matrix: DMatrix<f64>,
}

impl GroupElement {
    pub fn group(&self) -> &str {
        &self.group
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Chart entries in row-major order.
    pub fn row_major(&self) -> Vec<f64> {
        let m = &self.matrix;
        (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)]))
            .collect()
    }

    pub fn distance(&self, other: &GroupElement) -> f64 {
        crate::linalg::frobenius_distance(&self.matrix, &other.matrix)
    }
}
