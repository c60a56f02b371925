//! Coordinate vectors for a polarization `V` and its dual `V*`.
//!
//! Both wrap a dense `DVector<f64>`; the newtypes only exist so that a
//! pairing `⟨η, v⟩` cannot be formed between two vectors of the same side.

use std::ops::Index;

use nalgebra::DVector;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

macro_rules! coord_type {
    ($name:ident) => {
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name(DVector<f64>);

        impl $name {
            pub fn new(coords: Vec<f64>) -> Self {
                Self(DVector::from_vec(coords))
            }

            pub fn from_slice(coords: &[f64]) -> Self {
                Self(DVector::from_column_slice(coords))
            }

            pub fn from_dvector(coords: DVector<f64>) -> Self {
                Self(coords)
            }

            pub fn zeros(dim: usize) -> Self {
                Self(DVector::zeros(dim))
            }

            /// The `i`-th coordinate basis element.
            pub fn basis(dim: usize, i: usize) -> Self {
                let mut v = DVector::zeros(dim);
                v[i] = 1.0;
                Self(v)
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn coords(&self) -> &DVector<f64> {
                &self.0
            }

            pub fn into_dvector(self) -> DVector<f64> {
                self.0
            }

            pub fn as_slice(&self) -> &[f64] {
                self.0.as_slice()
            }

            pub fn to_vec(&self) -> Vec<f64> {
                self.0.as_slice().to_vec()
            }

            pub fn scale(&self, alpha: f64) -> Self {
                Self(&self.0 * alpha)
            }

            pub fn add(&self, other: &Self) -> Self {
                Self(&self.0 + &other.0)
            }

            pub fn sub(&self, other: &Self) -> Self {
                Self(&self.0 - &other.0)
            }

            pub fn euclidean_norm(&self) -> f64 {
                self.0.norm()
            }

            pub fn max_abs(&self) -> f64 {
                self.0.amax()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|&x| x == 0.0)
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|x| x.is_finite())
            }
        }

        impl Index<usize> for $name {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                self.0.as_slice().serialize(s)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                Vec::<f64>::deserialize(d).map(Self::new)
            }
        }
    };
}

coord_type!(Vector);
coord_type!(Covector);

impl Covector {
    /// Duality pairing `⟨η, v⟩` (coordinate dot product in dual bases).
    pub fn pair(&self, v: &Vector) -> f64 {
        self.0.dot(&v.0)
    }
}

impl Vector {
    /// Riesz identification through the coordinate inner product.
    pub fn flat(&self) -> Covector {
        Covector(self.0.clone())
    }
}

impl Covector {
    /// Inverse of [`Vector::flat`].
    pub fn sharp(&self) -> Vector {
        Vector(self.0.clone())
    }
}

/// Frobenius distance between two chart matrices.
pub fn frobenius_distance(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).norm()
}

/// Numerical rank via SVD with an absolute singular value cutoff.
pub fn rank(m: &nalgebra::DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Affine rank of a point set (dimension of its affine hull).
pub fn affine_rank(points: &[&DVector<f64>], tol: f64) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = points[0];
    let cols: Vec<DVector<f64>> = points[1..].iter().map(|p| *p - base).collect();
    rank(&nalgebra::DMatrix::from_columns(&cols), tol)
}
