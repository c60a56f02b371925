//! Polyhedral norms: the vertex / functional description of a centrally
//! symmetric unit ball, its face lattice, stars of supporting covectors and
//! a Lebesgue number for the star covering of the dual sphere.
//!
//! A face of the unit sphere `S` is identified by the sorted list of indices
//! of the ball vertices it contains. Face ids index into the canonical list
//! returned by [`Polyhedron::faces`], which is sorted by dimension and then
//! by vertex list, so ids are stable for a given input.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{affine_rank, rank, Covector, Vector};
use crate::lp;

/// Tolerance used when deciding whether a point lies on a supporting
/// hyperplane during hull computations.
const HULL_TOL: f64 = 1e-9;
/// Relative support gap below which a vertex belongs to the face exposed by a
/// covector.
pub const FACE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Face {
    pub id: usize,
    /// Indices into [`Polyhedron::vertices`].
    pub vertices: Vec<usize>,
    /// Indices into [`Polyhedron::functionals`] of the facets containing the face.
    pub facets: Vec<usize>,
    /// Covector on the unit dual sphere exposing exactly this face
    /// (barycenter of the facet functionals above).
    pub witness: Covector,
    pub dimension: usize,
}

#[derive(Clone, Debug)]
pub struct Polyhedron {
    dim: usize,
    vertices: Vec<DVector<f64>>,
    functionals: Vec<DVector<f64>>,
    faces: Vec<Face>,
    lookup: BTreeMap<Vec<usize>, usize>,
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.vertices == other.vertices
            && self.functionals == other.functionals
    }
}

#[derive(Serialize, Deserialize)]
struct PolyhedronData {
    #[serde(default)]
    vertices: Vec<Vec<f64>>,
    #[serde(default)]
    functionals: Vec<Vec<f64>>,
}

impl Serialize for Polyhedron {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyhedronData {
            vertices: self.vertices.iter().map(|v| v.as_slice().to_vec()).collect(),
            functionals: self
                .functionals
                .iter()
                .map(|v| v.as_slice().to_vec())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polyhedron {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let data = PolyhedronData::deserialize(d)?;
        let to_vectors = |rows: &[Vec<f64>]| rows.iter().map(|r| Vector::from_slice(r)).collect::<Vec<_>>();
        let built = if !data.vertices.is_empty() {
            Polyhedron::from_vertices(&to_vectors(&data.vertices))
        } else {
            let f: Vec<Covector> = data.functionals.iter().map(|r| Covector::from_slice(r)).collect();
            Polyhedron::from_functionals(&f)
        };
        built.map_err(serde::de::Error::custom)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Hyperplanes `{x : ⟨f, x⟩ = 1}` supporting `conv(points)`, for point sets
/// whose hull contains the origin in its interior.
fn supporting_hyperplanes(points: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let mut found: Vec<DVector<f64>> = Vec::new();
    let ones = DVector::from_element(dim, 1.0);
    for combo in combinations(points.len(), dim) {
        let rows: Vec<_> = combo.iter().map(|&i| points[i].transpose()).collect();
        let m = DMatrix::from_rows(&rows);
        let Some(f) = m.lu().solve(&ones) else {
            continue;
        };
        if !f.iter().all(|x| x.is_finite()) {
            continue;
        }
        // numerical noise from nearly singular systems
        if combo.iter().any(|&i| (points[i].dot(&f) - 1.0).abs() > HULL_TOL) {
            continue;
        }
        if points.iter().all(|p| p.dot(&f) <= 1.0 + HULL_TOL)
            && !found.iter().any(|g| (g - &f).amax() <= HULL_TOL)
        {
            found.push(f);
        }
    }
    found
}

impl Polyhedron {
    /// Builds the ball `conv(vertices)`; non-extreme input points are dropped.
    pub fn from_vertices(points: &[Vector]) -> Result<Self> {
        let pts: Vec<DVector<f64>> = points.iter().map(|p| p.coords().clone()).collect();
        Self::from_points(pts)
    }

    /// Builds the ball `{v : λ(v) ≤ 1 for all λ in functionals}`; redundant
    /// functionals are dropped.
    pub fn from_functionals(functionals: &[Covector]) -> Result<Self> {
        let f: Vec<DVector<f64>> = functionals.iter().map(|p| p.coords().clone()).collect();
        let dim = check_point_set(&f, "functional")?;
        // vertices of P are the facets of the dual ball conv(Λ)
        let verts = supporting_hyperplanes(&f, dim);
        if verts.is_empty() {
            return Err(Error::Construction("functionals do not bound a polytope".into()));
        }
        Self::from_points(verts)
    }

    fn from_points(pts: Vec<DVector<f64>>) -> Result<Self> {
        let dim = check_point_set(&pts, "vertex")?;
        for p in &pts {
            let neg = -p;
            if !lp::in_convex_hull(&pts, &neg, 1e-9)? {
                return Err(Error::Construction(format!(
                    "point set is not centrally symmetric: -{:?} is outside the hull",
                    p.as_slice()
                )));
            }
        }
        let functionals = supporting_hyperplanes(&pts, dim);
        if functionals.is_empty() {
            return Err(Error::Construction("no supporting hyperplanes found".into()));
        }
        // keep extreme points only, preserving input order; drop duplicates
        let mut vertices: Vec<DVector<f64>> = Vec::new();
        for p in &pts {
            if vertices.iter().any(|q| (q - p).amax() <= HULL_TOL) {
                continue;
            }
            let active: Vec<_> = functionals
                .iter()
                .filter(|f| (f.dot(p) - 1.0).abs() <= HULL_TOL)
                .map(|f| f.transpose())
                .collect();
            if !active.is_empty() && rank(&DMatrix::from_rows(&active), 1e-9) == dim {
                vertices.push(p.clone());
            }
        }
        let mut poly = Polyhedron {
            dim,
            vertices,
            functionals,
            faces: Vec::new(),
            lookup: BTreeMap::new(),
        };
        poly.build_faces();
        Ok(poly)
    }

    fn build_faces(&mut self) {
        let facet_sets: Vec<Vec<usize>> = self
            .functionals
            .iter()
            .map(|f| {
                (0..self.vertices.len())
                    .filter(|&i| f.dot(&self.vertices[i]) >= 1.0 - HULL_TOL)
                    .collect()
            })
            .collect();
        let mut all: BTreeSet<Vec<usize>> = facet_sets.iter().cloned().collect();
        loop {
            let current: Vec<Vec<usize>> = all.iter().cloned().collect();
            let mut added = false;
            for (a_idx, a) in current.iter().enumerate() {
                for b in &current[a_idx + 1..] {
                    let inter: Vec<usize> = a.iter().copied().filter(|i| b.contains(i)).collect();
                    if !inter.is_empty() && all.insert(inter) {
                        added = true;
                    }
                }
            }
            if !added {
                break;
            }
        }
        let mut faces: Vec<Face> = all
            .into_iter()
            .map(|verts| {
                let facets: Vec<usize> = facet_sets
                    .iter()
                    .enumerate()
                    .filter(|(_, fs)| verts.iter().all(|v| fs.contains(v)))
                    .map(|(k, _)| k)
                    .collect();
                let mut witness = DVector::zeros(self.dim);
                for &k in &facets {
                    witness += &self.functionals[k];
                }
                witness /= facets.len() as f64;
                let refs: Vec<&DVector<f64>> = verts.iter().map(|&i| &self.vertices[i]).collect();
                let dimension = affine_rank(&refs, 1e-9);
                Face {
                    id: 0,
                    vertices: verts,
                    facets,
                    witness: Covector::from_dvector(witness),
                    dimension,
                }
            })
            .collect();
        faces.sort_by(|a, b| {
            a.dimension
                .cmp(&b.dimension)
                .then_with(|| a.vertices.cmp(&b.vertices))
        });
        self.lookup.clear();
        for (id, f) in faces.iter_mut().enumerate() {
            f.id = id;
            self.lookup.insert(f.vertices.clone(), id);
        }
        self.faces = faces;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> Vec<Vector> {
        self.vertices.iter().map(|v| Vector::from_dvector(v.clone())).collect()
    }

    pub fn functionals(&self) -> Vec<Covector> {
        self.functionals
            .iter()
            .map(|v| Covector::from_dvector(v.clone()))
            .collect()
    }

    pub(crate) fn raw_vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub(crate) fn raw_functionals(&self) -> &[DVector<f64>] {
        &self.functionals
    }

    /// `‖v‖_P = max_{λ ∈ Λ_P} λ(v)`.
    pub fn norm(&self, v: &Vector) -> f64 {
        self.functionals
            .iter()
            .map(|f| f.dot(v.coords()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gauge of `conv(vertices)` evaluated through the vertex list, i.e. the
    /// smallest `α` with `v/α` in the hull. Agrees with [`Self::norm`].
    pub fn gauge_from_vertices(&self, v: &Vector) -> Result<f64> {
        let zero = DVector::zeros(self.dim);
        if v.coords() == &zero {
            return Ok(0.0);
        }
        let a = DMatrix::from_columns(&self.vertices);
        // min Σ w_i  s.t.  Σ w_i p_i = v, w ≥ 0
        let mut pb = minilp::Problem::new(minilp::OptimizationDirection::Minimize);
        let w: Vec<_> = (0..a.ncols())
            .map(|_| pb.add_var(1.0, (0.0, f64::INFINITY)))
            .collect();
        for r in 0..self.dim {
            let row: Vec<_> = (0..a.ncols()).map(|c| (w[c], a[(r, c)])).collect();
            pb.add_constraint(&row, minilp::ComparisonOp::Eq, v[r]);
        }
        let sol = pb
            .solve()
            .map_err(|e| Error::Consistency(format!("gauge LP failed: {e}")))?;
        Ok(sol.objective())
    }

    /// `‖η‖_* = max over ball vertices of ⟨η, v⟩`.
    pub fn dual_norm(&self, eta: &Covector) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(eta.coords()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of functionals attaining `‖v‖_P` (relative tolerance).
    pub fn active_functionals(&self, v: &Vector) -> Vec<usize> {
        let n = self.norm(v);
        self.functionals
            .iter()
            .enumerate()
            .filter(|(_, f)| f.dot(v.coords()) >= n - FACE_TOL * n.abs().max(1e-300))
            .map(|(k, _)| k)
            .collect()
    }

    /// Indices of ball vertices attaining `‖η‖_*` (relative tolerance).
    pub fn active_vertices(&self, eta: &Covector) -> Vec<usize> {
        let n = self.dual_norm(eta);
        self.vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.dot(eta.coords()) >= n - FACE_TOL * n.abs())
            .map(|(k, _)| k)
            .collect()
    }

    /// Complete list of faces of the unit sphere, all dimensions.
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Same as [`Self::faces`]; named after the operation it implements.
    pub fn enumerate_faces(&self) -> Vec<Face> {
        self.faces.clone()
    }

    pub fn face(&self, id: usize) -> &Face {
        &self.faces[id]
    }

    /// Maximal faces (facets), one per supporting functional.
    pub fn facet_ids(&self) -> Vec<usize> {
        (0..self.functionals.len())
            .map(|k| self.smallest_face_containing(&self.facet_vertex_set(k)))
            .collect()
    }

    fn facet_vertex_set(&self, k: usize) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| self.functionals[k].dot(&self.vertices[i]) >= 1.0 - HULL_TOL)
            .collect()
    }

    /// Smallest face whose vertex set contains `verts`.
    pub fn smallest_face_containing(&self, verts: &[usize]) -> usize {
        if let Some(&id) = self.lookup.get(verts) {
            return id;
        }
        let facets: Vec<usize> = (0..self.functionals.len())
            .filter(|&k| {
                verts
                    .iter()
                    .all(|&i| self.functionals[k].dot(&self.vertices[i]) >= 1.0 - HULL_TOL)
            })
            .collect();
        let inter: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| {
                facets
                    .iter()
                    .all(|&k| self.functionals[k].dot(&self.vertices[i]) >= 1.0 - HULL_TOL)
            })
            .collect();
        // `inter` is an intersection of facets, hence a face
        self.lookup[&inter]
    }

    /// The face of `S` exposed by `ξ` (scale invariant in `ξ`).
    pub fn face_of(&self, xi: &Covector) -> Result<&Face> {
        check_dim(self.dim, xi.dim())?;
        if xi.is_zero() {
            return Err(Error::InvalidInput("face_of: zero covector".into()));
        }
        let verts = self.active_vertices(xi);
        Ok(&self.faces[self.smallest_face_containing(&verts)])
    }

    /// Smallest face of `S` containing `v / ‖v‖` (v ≠ 0).
    pub fn carrier_face(&self, v: &Vector) -> Result<&Face> {
        check_dim(self.dim, v.dim())?;
        if v.is_zero() {
            return Err(Error::InvalidInput("carrier_face: zero vector".into()));
        }
        let facets = self.active_functionals(v);
        let verts: Vec<usize> = (0..self.vertices.len())
            .filter(|&i| {
                facets
                    .iter()
                    .all(|&k| self.functionals[k].dot(&self.vertices[i]) >= 1.0 - HULL_TOL)
            })
            .collect();
        Ok(&self.faces[self.smallest_face_containing(&verts)])
    }

    /// Whether `u / r` lies in the face `face_id` (so `u ∈ r·F`).
    pub fn face_contains_scaled(&self, face_id: usize, u: &Vector, r: f64) -> bool {
        let face = &self.faces[face_id];
        let tol = FACE_TOL * r.abs().max(1e-300);
        (self.norm(u) - r).abs() <= tol
            && face
                .facets
                .iter()
                .all(|&k| self.functionals[k].dot(u.coords()) >= r - tol)
    }

    /// Points of the face, scaled by `r`.
    pub fn face_points(&self, face_id: usize, r: f64) -> Vec<DVector<f64>> {
        self.faces[face_id]
            .vertices
            .iter()
            .map(|&i| &self.vertices[i] * r)
            .collect()
    }

    /// `ξ ∈ star(η)` iff the face exposed by `ξ` lies inside the face exposed
    /// by `η`.
    pub fn star_contains(&self, eta: &Covector, xi: &Covector) -> Result<bool> {
        let outer = self.face_of(eta)?;
        let inner = self.face_of(xi)?;
        Ok(inner.vertices.iter().all(|v| outer.vertices.contains(v)))
    }

    /// The unit ball of the dual norm, `conv(Λ_P)`, as a polyhedron in `V*`
    /// coordinates. Its vertices are the functionals of `self` in order.
    pub fn dual(&self) -> Result<Polyhedron> {
        Polyhedron::from_points(self.functionals.clone())
    }

    /// Star covering of the unit dual sphere by the stars of one supporting
    /// covector per facet, with a Lebesgue number for `‖·‖_*` arc length.
    pub fn star_covering(&self) -> Result<StarCovering> {
        let dual = self.dual()?;
        let base: Vec<Covector> = self.functionals();
        let base_faces = self.facet_ids();
        let gauge = &self.vertices;
        let mut delta = f64::INFINITY;
        for g in dual.faces() {
            let g_pts: Vec<DVector<f64>> = g.vertices.iter().map(|&i| dual.vertices[i].clone()).collect();
            for h in dual.faces() {
                if h.vertices.iter().any(|v| g.vertices.contains(v)) {
                    continue;
                }
                let h_pts: Vec<DVector<f64>> =
                    h.vertices.iter().map(|&i| dual.vertices[i].clone()).collect();
                let d = lp::polytope_distance(&g_pts, &h_pts, gauge)?;
                delta = delta.min(d);
            }
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::Consistency(format!("non-positive Lebesgue bound {delta}")));
        }
        Ok(StarCovering {
            base,
            base_faces,
            delta,
        })
    }
}

fn check_point_set(pts: &[DVector<f64>], what: &str) -> Result<usize> {
    let Some(first) = pts.first() else {
        return Err(Error::Construction(format!("empty {what} list")));
    };
    let dim = first.len();
    if dim == 0 {
        return Err(Error::Construction("zero-dimensional space".into()));
    }
    if dim > 4 {
        return Err(Error::Unsupported(format!(
            "polyhedra are supported up to dimension 4, got {dim}"
        )));
    }
    for p in pts {
        check_dim(dim, p.len())?;
        if !p.iter().all(|x| x.is_finite()) {
            return Err(Error::Construction(format!("non-finite {what}")));
        }
    }
    if rank(&DMatrix::from_columns(pts), 1e-9) < dim {
        return Err(Error::Construction(format!(
            "{what} set is not full-dimensional"
        )));
    }
    Ok(dim)
}

/// Open covering of the unit dual sphere by stars, with Lebesgue number
/// `delta` for arcs measured in the dual norm.
#[derive(Clone, Debug, Serialize)]
pub struct StarCovering {
    pub base: Vec<Covector>,
    /// Face id (in the primal polyhedron) of the facet each base covector exposes.
    pub base_faces: Vec<usize>,
    pub delta: f64,
}

impl StarCovering {
    /// Indices `i` with `ξ ∈ star(base_i)`.
    pub fn stars_containing(&self, poly: &Polyhedron, xi: &Covector) -> Result<Vec<usize>> {
        let inner = poly.face_of(xi)?;
        Ok(self
            .base_faces
            .iter()
            .enumerate()
            .filter(|(_, &fid)| {
                let outer = &poly.faces[fid];
                inner.vertices.iter().all(|v| outer.vertices.contains(v))
            })
            .map(|(i, _)| i)
            .collect())
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

    fn l1_ball_2d() -> Polyhedron {
        Polyhedron::from_vertices(&[v(&[1.0, 0.0]), v(&[-1.0, 0.0]), v(&[0.0, 1.0]), v(&[0.0, -1.0])])
            .unwrap()
    }

    #[test]
    fn diamond_functionals_are_the_four_sign_covectors() {
        let p = l1_ball_2d();
        let mut f: Vec<Vec<f64>> = p.functionals().iter().map(|f| f.to_vec()).collect();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = vec![
            vec![-1.0, -1.0],
            vec![-1.0, 1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
        ];
        for (a, b) in f.iter().zip(&expected) {
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn interior_points_are_dropped() {
        let p = Polyhedron::from_vertices(&[
            v(&[1.0, 0.0]),
            v(&[-1.0, 0.0]),
            v(&[0.0, 1.0]),
            v(&[0.0, -1.0]),
            v(&[0.2, 0.1]),
            v(&[-0.2, -0.1]),
            v(&[0.5, 0.5]),
            v(&[-0.5, -0.5]),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn square_from_functionals_is_max_norm() {
        let p = Polyhedron::from_functionals(&[
            c(&[1.0, 0.0]),
            c(&[-1.0, 0.0]),
            c(&[0.0, 1.0]),
            c(&[0.0, -1.0]),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert!((p.norm(&v(&[0.3, -0.7])) - 0.7).abs() < 1e-12);
        assert!((p.dual_norm(&c(&[3.0, -4.0])) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn construction_errors() {
        let asym = Polyhedron::from_vertices(&[v(&[1.0, 0.0]), v(&[0.0, 1.0]), v(&[-1.0, -1.0])]);
        assert!(matches!(asym, Err(Error::Construction(_))));
        let flat = Polyhedron::from_vertices(&[v(&[1.0, 1.0]), v(&[-1.0, -1.0])]);
        assert!(matches!(flat, Err(Error::Construction(_))));
        assert!(matches!(Polyhedron::from_vertices(&[]), Err(Error::Construction(_))));
    }

    #[test]
    fn face_of_is_scale_invariant() {
        let p = l1_ball_2d();
        let a = p.face_of(&c(&[1.0, 1.0])).unwrap().id;
        let b = p.face_of(&c(&[2.0, 2.0])).unwrap().id;
        assert_eq!(a, b);
        assert_eq!(p.face(a).vertices.len(), 2);
        assert!(p.face_of(&c(&[0.0, 0.0])).is_err());
    }

    #[test]
    fn stars_on_the_diamond() {
        let p = l1_ball_2d();
        assert!(p.star_contains(&c(&[1.0, 1.0]), &c(&[1.0, 0.3])).unwrap());
        assert!(!p.star_contains(&c(&[1.0, 1.0]), &c(&[1.0, -1.0])).unwrap());
        assert!(p.star_contains(&c(&[0.2, 0.7]), &c(&[0.2, 0.7])).unwrap());
    }

    #[test]
    fn witnesses_expose_their_faces() {
        let p = l1_ball_2d();
        for f in p.faces() {
            assert_eq!(p.face_of(&f.witness).unwrap().id, f.id);
            assert!((p.dual_norm(&f.witness) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dual_of_dual_recovers_vertices() {
        let p = l1_ball_2d();
        let d = p.dual().unwrap();
        let back = d.functionals();
        assert_eq!(back.len(), p.vertices().len());
        for b in back {
            assert!(p
                .vertices()
                .iter()
                .any(|w| (w.coords() - b.coords()).amax() < 1e-12));
        }
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(8, 3).len(), 56);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}
