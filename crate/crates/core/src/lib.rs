//! Normal curves of sub-Finsler Lie groups.
//!
//! A sub-Finsler Lie group is a Lie group `G` with a bracket-generating
//! subspace `V` of its Lie algebra and a norm on `V`. A horizontal curve with
//! control `u(t) ∈ V` is *normal* with covector `λ ∈ 𝔤*` when
//! `λ ∘ Ad_{γ(t)}|_V ∈ ∂_{u(t)} E`, `E = ‖·‖²/2`.
//!
//! * [`convex`]: norms, energies, dual norms, subdifferentials.
//! * [`polyhedral`]: face lattices, stars and Lebesgue numbers of polyhedral balls.
//! * [`lie`]: matrix Lie groups from structure constants, `exp`, `Ad`, `ad`, submetries.
//! * [`flow`]: integration of the normal inclusion and branching detection.
//! * [`certify`]: face-stability windows and related certificates.
//! * [`scenario`]: JSON scenarios driving the command line tool.

pub mod certify;
pub mod convex;
pub mod error;
pub mod flow;
pub mod lie;
pub mod linalg;
pub mod lp;
pub mod polyhedral;
pub mod sampling;
pub mod scenario;

pub use convex::{ConvexSet, ConvexityClass, NormSpec};
pub use error::{Error, Result};
pub use linalg::{Covector, Vector};
pub use polyhedral::{Face, Polyhedron, StarCovering};
