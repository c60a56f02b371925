//! Integration of the normal inclusion `ξ(t) = λ ∘ Ad_{γ(t)}|_V ∈ ∂_u E`.

mod integrate;
mod trajectory;

use serde::{Deserialize, Serialize};

pub use integrate::{dual_derivative, integrate, integrate_polyhedral, integrate_smooth, FlowSettings};
pub use trajectory::{ControlSegment, FaceEvent, SelectionRule, Trajectory, TrajectoryMetadata};

use crate::error::{Error, Result};

/// First time at which two curves on a common grid separate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchWitness {
    pub t: f64,
    pub separation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    /// Last grid time up to which the curves agree within `agree_tol`.
    pub coincidence_horizon: f64,
    /// First grid time with separation above `split_tol`.
    pub witness: Option<BranchWitness>,
    pub max_separation: f64,
    pub agree_tol: f64,
    pub split_tol: f64,
    pub branched: bool,
}

pub const DEFAULT_AGREE_TOL: f64 = 1e-6;
pub const DEFAULT_SPLIT_TOL: f64 = 1e-3;

/// Compares two trajectories sample by sample in the Frobenius distance of
/// the chart.
pub fn detect_branching(a: &Trajectory, b: &Trajectory, agree_tol: f64, split_tol: f64) -> Result<BranchReport> {
    if a.group != b.group {
        return Err(Error::InvalidInput("trajectories live on different groups".into()));
    }
    if a.len() != b.len() || (a.step - b.step).abs() > 1e-15 * a.step.abs().max(1.0) {
        return Err(Error::InvalidInput("trajectories must share the time grid".into()));
    }
    let mut coincidence_horizon = 0.0;
    let mut agreeing = true;
    let mut witness = None;
    let mut max_separation: f64 = 0.0;
    for i in 0..a.len() {
        let d = a.points[i].distance(&b.points[i]);
        max_separation = max_separation.max(d);
        if agreeing && d <= agree_tol {
            coincidence_horizon = a.times[i];
        } else {
            agreeing = false;
        }
        if witness.is_none() && d > split_tol {
            witness = Some(BranchWitness { t: a.times[i], separation: d });
        }
    }
    Ok(BranchReport {
        coincidence_horizon,
        branched: witness.is_some(),
        witness,
        max_separation,
        agree_tol,
        split_tol,
    })
}

/// Largest relative deviation of `‖u(t)‖` from the initial speed.
pub fn check_constant_speed(traj: &Trajectory) -> f64 {
    let r = traj.speed;
    traj.controls
        .iter()
        .map(|u| (traj.norm.norm_raw(u.coords()) - r).abs() / r.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

/// Largest relative deviation of `‖ξ(t)‖_*` from the initial speed.
pub fn check_dual_sphere(traj: &Trajectory) -> f64 {
    let r = traj.speed;
    traj.duals
        .iter()
        .map(|xi| (traj.norm.dual_norm_raw(xi.coords()) - r).abs() / r.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}
