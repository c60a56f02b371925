use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lp;

/// A nonempty compact convex subset of `V` or `V*`, in coordinates.
#[derive(Clone, Debug, PartialEq)]
pub enum ConvexSet {
    Singleton(DVector<f64>),
    /// Convex hull of the listed points.
    Polytope(Vec<DVector<f64>>),
    /// `center + radius · B`, where `B` is the euclidean unit ball of the
    /// coordinate hyperplane orthogonal to `axis`.
    Support {
        center: DVector<f64>,
        radius: f64,
        axis: usize,
        approximate: bool,
    },
}

#[derive(Serialize, Deserialize)]
struct SupportSample {
    direction: Vec<f64>,
    value: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum SetData {
    Point {
        point: Vec<f64>,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Support {
        center: Vec<f64>,
        radius: f64,
        axis: usize,
        #[serde(default)]
        approximate: bool,
        #[serde(default)]
        support_samples: Vec<SupportSample>,
    },
}

impl Serialize for ConvexSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let data = match self {
            ConvexSet::Singleton(p) => SetData::Point {
                point: p.as_slice().to_vec(),
            },
            ConvexSet::Polytope(v) => SetData::Polytope {
                vertices: v.iter().map(|p| p.as_slice().to_vec()).collect(),
            },
            ConvexSet::Support {
                center,
                radius,
                axis,
                approximate,
            } => {
                let n = center.len();
                let support_samples = (0..n)
                    .flat_map(|i| [1.0, -1.0].map(|s| (i, s)))
                    .map(|(i, s)| {
                        let mut d = DVector::zeros(n);
                        d[i] = s;
                        SupportSample {
                            value: self.support(&d),
                            direction: d.as_slice().to_vec(),
                        }
                    })
                    .collect();
                SetData::Support {
                    center: center.as_slice().to_vec(),
                    radius: *radius,
                    axis: *axis,
                    approximate: *approximate,
                    support_samples,
                }
            }
        };
        data.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let set = match SetData::deserialize(d)? {
            SetData::Point { point } => ConvexSet::Singleton(DVector::from_vec(point)),
            SetData::Polytope { vertices } => {
                if vertices.is_empty() {
                    return Err(D::Error::custom("empty polytope"));
                }
                ConvexSet::Polytope(vertices.into_iter().map(DVector::from_vec).collect())
            }
            SetData::Support {
                center,
                radius,
                axis,
                approximate,
                ..
            } => {
                if axis >= center.len() || !(radius >= 0.0) {
                    return Err(D::Error::custom("invalid support set"));
                }
                ConvexSet::Support {
                    center: DVector::from_vec(center),
                    radius,
                    axis,
                    approximate,
                }
            }
        };
        Ok(set)
    }
}

fn off_axis(v: &DVector<f64>, axis: usize) -> DVector<f64> {
    let mut w = v.clone();
    w[axis] = 0.0;
    w
}

impl ConvexSet {
    pub fn point(p: DVector<f64>) -> Self {
        ConvexSet::Singleton(p)
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Singleton(p) => p.len(),
            ConvexSet::Polytope(v) => v[0].len(),
            ConvexSet::Support { center, .. } => center.len(),
        }
    }

    pub fn is_singleton(&self) -> bool {
        match self {
            ConvexSet::Singleton(_) => true,
            ConvexSet::Polytope(v) => v.iter().all(|p| (p - &v[0]).amax() <= 1e-12 * (1.0 + v[0].amax())),
            ConvexSet::Support { radius, .. } => *radius == 0.0,
        }
    }

    pub fn is_approximate(&self) -> bool {
        matches!(self, ConvexSet::Support { approximate: true, .. })
    }

    /// Support function `h(d) = max_{x ∈ K} ⟨d, x⟩`.
    pub fn support(&self, d: &DVector<f64>) -> f64 {
        match self {
            ConvexSet::Singleton(p) => p.dot(d),
            ConvexSet::Polytope(v) => v.iter().map(|p| p.dot(d)).fold(f64::NEG_INFINITY, f64::max),
            ConvexSet::Support {
                center,
                radius,
                axis,
                ..
            } => center.dot(d) + radius * off_axis(d, *axis).norm(),
        }
    }

    /// Containment up to `tol`: infinity-norm distance for points and the
    /// disk, l1 slack for polytopes.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            ConvexSet::Singleton(p) => (p - x).amax() <= tol,
            ConvexSet::Polytope(v) => lp::in_convex_hull(v, x, tol)?,
            ConvexSet::Support {
                center,
                radius,
                axis,
                ..
            } => {
                let d = x - center;
                d[*axis].abs() <= tol && off_axis(&d, *axis).norm() <= radius + tol
            }
        })
    }

    /// Finitely many points of the set whose hull is the set (exactly for
    /// points and polytopes; for the disk, the center and `2(n-1)` rim points).
    pub fn representatives(&self) -> Vec<DVector<f64>> {
        match self {
            ConvexSet::Singleton(p) => vec![p.clone()],
            ConvexSet::Polytope(v) => v.clone(),
            ConvexSet::Support {
                center,
                radius,
                axis,
                ..
            } => {
                let mut out = vec![center.clone()];
                for i in (0..center.len()).filter(|i| i != axis) {
                    for s in [1.0, -1.0] {
                        let mut p = center.clone();
                        p[i] += s * radius;
                        out.push(p);
                    }
                }
                out
            }
        }
    }

    /// A random point of the set. Polytopes use flat Dirichlet weights on the
    /// listed points; the disk is sampled uniformly.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        match self {
            ConvexSet::Singleton(p) => p.clone(),
            ConvexSet::Polytope(v) => {
                let w: Vec<f64> = v.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                let total: f64 = w.iter().sum();
                let mut out = DVector::zeros(v[0].len());
                for (p, wi) in v.iter().zip(&w) {
                    out += p * (wi / total);
                }
                out
            }
            ConvexSet::Support {
                center,
                radius,
                axis,
                ..
            } => {
                let n = center.len();
                if n == 1 {
                    return center.clone();
                }
                let mut d = DVector::from_fn(n, |_, _| crate::sampling::standard_normal(rng));
                d[*axis] = 0.0;
                let norm = d.norm();
                if norm == 0.0 {
                    return center.clone();
                }
                let rho = radius * rng.gen::<f64>().powf(1.0 / (n - 1) as f64);
                center + d * (rho / norm)
            }
        }
    }

    pub fn scale(&self, alpha: f64) -> Self {
        match self {
            ConvexSet::Singleton(p) => ConvexSet::Singleton(p * alpha),
            ConvexSet::Polytope(v) => ConvexSet::Polytope(v.iter().map(|p| p * alpha).collect()),
            ConvexSet::Support {
                center,
                radius,
                axis,
                approximate,
            } => ConvexSet::Support {
                center: center * alpha,
                radius: radius * alpha.abs(),
                axis: *axis,
                approximate: *approximate,
            },
        }
    }

    /// Minkowski sum `K + L`.
    pub fn minkowski_sum(&self, other: &ConvexSet) -> Result<ConvexSet> {
        check_dim(self.dim(), other.dim())?;
        use ConvexSet::*;
        Ok(match (self, other) {
            (Singleton(p), k) | (k, Singleton(p)) => match k {
                Singleton(q) => Singleton(p + q),
                Polytope(v) => Polytope(v.iter().map(|q| p + q).collect()),
                Support {
                    center,
                    radius,
                    axis,
                    approximate,
                } => Support {
                    center: center + p,
                    radius: *radius,
                    axis: *axis,
                    approximate: *approximate,
                },
            },
            (Polytope(a), Polytope(b)) => {
                let mut out: Vec<DVector<f64>> = Vec::with_capacity(a.len() * b.len());
                for p in a {
                    for q in b {
                        let s = p + q;
                        if !out.iter().any(|o| (o - &s).amax() <= 1e-15) {
                            out.push(s);
                        }
                    }
                }
                Polytope(out)
            }
            (
                Support {
                    center: c1,
                    radius: r1,
                    axis: a1,
                    approximate: x1,
                },
                Support {
                    center: c2,
                    radius: r2,
                    axis: a2,
                    approximate: x2,
                },
            ) if a1 == a2 => Support {
                center: c1 + c2,
                radius: r1 + r2,
                axis: *a1,
                approximate: *x1 || *x2,
            },
            _ => {
                return Err(Error::Unsupported(
                    "Minkowski sum of a disk with a polytope or a differently oriented disk".into(),
                ))
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dv(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    #[test]
    fn support_of_disk() {
        let k = ConvexSet::Support {
            center: dv(&[1.0, 0.0, 0.0]),
            radius: 1.0,
            axis: 0,
            approximate: false,
        };
        assert!((k.support(&dv(&[0.0, 3.0, 4.0])) - 5.0).abs() < 1e-15);
        assert!((k.support(&dv(&[2.0, 0.0, 0.0])) - 2.0).abs() < 1e-15);
        assert!(k.contains(&dv(&[1.0, 0.4, -0.4]), 1e-9).unwrap());
        assert!(!k.contains(&dv(&[1.0, 0.8, 0.8]), 1e-9).unwrap());
        assert!(!k.contains(&dv(&[1.1, 0.0, 0.0]), 1e-9).unwrap());
    }

    #[test]
    fn samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sets = [
            ConvexSet::Polytope(vec![dv(&[1.0, 0.0]), dv(&[0.0, 1.0]), dv(&[-1.0, -1.0])]),
            ConvexSet::Support {
                center: dv(&[0.0, 2.0, 0.0]),
                radius: 0.5,
                axis: 1,
                approximate: false,
            },
        ];
        for k in &sets {
            for _ in 0..50 {
                let p = k.sample(&mut rng);
                assert!(k.contains(&p, 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn minkowski_sum_of_segment_and_point() {
        let a = ConvexSet::Polytope(vec![dv(&[1.0, 1.0]), dv(&[1.0, -1.0])]);
        let b = ConvexSet::Singleton(dv(&[1.0, 0.0]));
        let s = a.minkowski_sum(&b).unwrap();
        assert_eq!(s, ConvexSet::Polytope(vec![dv(&[2.0, 1.0]), dv(&[2.0, -1.0])]));
    }

    #[test]
    fn json_round_trip() {
        let sets = [
            ConvexSet::Singleton(dv(&[1.0, 2.0])),
            ConvexSet::Polytope(vec![dv(&[1.0, 0.0]), dv(&[0.0, 1.0])]),
            ConvexSet::Support {
                center: dv(&[1.0, 0.0, 0.0]),
                radius: 1.0,
                axis: 0,
                approximate: false,
            },
        ];
        for k in sets {
            let text = serde_json::to_string(&k).unwrap();
            let back: ConvexSet = serde_json::from_str(&text).unwrap();
            assert_eq!(back, k);
        }
        let text = serde_json::to_string(&ConvexSet::Singleton(dv(&[1.0]))).unwrap();
        assert_eq!(text, r#"{"kind":"point","point":[1.0]}"#);
    }
}
