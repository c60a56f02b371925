//! Norms on a polarization, their energies `E = ‖·‖²/2`, dual norms, Fenchel
//! conjugates and subdifferentials.

mod norm;
pub mod sampled;
mod set;

pub use norm::{check_duality_inversion, ConvexityClass, DualityCheck, NormSpec};
pub use set::ConvexSet;
