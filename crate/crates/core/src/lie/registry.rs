//! The shipped groups.
//!
//! | name | chart | basis |
//! |---|---|---|
//! | `abelian<n>` | `(n+1)×(n+1)` translations | `e_i = E_{i,n}` |
//! | `heisenberg` | upper unitriangular 3×3 | `X₁ = E₁₂, X₂ = E₂₃, X₃ = E₁₃` |
//! | `heisenberg_carnot` | same, polarization `span(X₁, X₂)` | |
//! | `affine` | `[[t, x], [0, 1]]`, `t > 0` | `e₁ = E₁₂` (translation), `e₂ = E₁₁` (scaling) |
//! | `so3` | rotations | `e₁ = E₁₂ − E₂₁, e₂ = E₁₃ − E₃₁, e₃ = E₂₃ − E₃₂` |
//!
//! `E_ij` are matrix units with 1-based indices. In the affine chart the
//! matrix `[[t, x], [0, 1]]` is the pair `(x, t)` with product
//! `(x, t)·(y, s) = (x + ty, ts)`.

use nalgebra::DMatrix;

use super::group::{ExpKind, GroupSpec};
use crate::error::{Error, Result};

fn unit(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

impl GroupSpec {
    pub fn abelian(n: usize) -> Result<Self> {
        let chart = (0..n).map(|i| unit(n + 1, i, n)).collect();
        GroupSpec::new(&format!("abelian{n}"), n, vec![], (0..n).collect(), chart, ExpKind::Unipotent)
    }

    fn heisenberg_with(name: &str, polarization: Vec<usize>) -> Result<Self> {
        let chart = vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)];
        GroupSpec::new(name, 3, vec![(0, 1, 2, 1.0)], polarization, chart, ExpKind::Unipotent)
    }

    /// Heisenberg group with polarization the whole algebra.
    pub fn heisenberg() -> Result<Self> {
        Self::heisenberg_with("heisenberg", vec![0, 1, 2])
    }

    /// Heisenberg group with polarization the first layer `span(X₁, X₂)`.
    pub fn heisenberg_carnot() -> Result<Self> {
        Self::heisenberg_with("heisenberg_carnot", vec![0, 1])
    }

    pub fn affine() -> Result<Self> {
        let chart = vec![unit(2, 0, 1), unit(2, 0, 0)];
        GroupSpec::new("affine", 2, vec![(0, 1, 0, -1.0)], vec![0, 1], chart, ExpKind::Affine)
    }

    pub fn so3() -> Result<Self> {
        let skew = |i, j| unit(3, i, j) - unit(3, j, i);
        let chart = vec![skew(0, 1), skew(0, 2), skew(1, 2)];
        GroupSpec::new(
            "so3",
            3,
            vec![(0, 1, 2, -1.0), (0, 2, 1, 1.0), (1, 2, 0, -1.0)],
            vec![0, 1, 2],
            chart,
            ExpKind::Rotation,
        )
    }

    /// Looks up a shipped group by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "heisenberg" => Self::heisenberg(),
            "heisenberg_carnot" => Self::heisenberg_carnot(),
            "affine" => Self::affine(),
            "so3" => Self::so3(),
            _ => match name.strip_prefix("abelian").map(str::parse::<usize>) {
                Some(Ok(n)) if n >= 1 => Self::abelian(n),
                _ => Err(Error::InvalidInput(format!("unknown group '{name}'"))),
            },
        }
    }

    pub fn registry_names() -> &'static [&'static str] {
        &["abelian<n>", "heisenberg", "heisenberg_carnot", "affine", "so3"]
    }
}
