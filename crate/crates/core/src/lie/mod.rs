//! Matrix Lie groups given by structure constants and a faithful chart:
//! brackets, exponentials, adjoint actions, and submetries onto quotients.

mod group;
mod registry;
mod submetry;

pub use group::{ExpKind, GroupElement, GroupSpec};
pub use submetry::SubmetryData;
