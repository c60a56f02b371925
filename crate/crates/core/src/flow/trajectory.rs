use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::convex::NormSpec;
use crate::error::{Error, Result};
use crate::lie::{GroupElement, GroupSpec};
use crate::linalg::{Covector, Vector};

/// A change of the active face (polyhedral path) or of the smooth piece of
/// `dE*` (smooth path) at time `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceEvent {
    pub t: f64,
    pub from_face: i64,
    pub to_face: i64,
}

/// A maximal interval of constant control on the polyhedral path, starting
/// at `start` and ending at the next segment (or the horizon).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlSegment {
    pub start: f64,
    pub control: Vector,
}

/// How a control is picked from a set-valued face.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionRule {
    /// Keep the previous control while it stays admissible, otherwise take
    /// the barycenter of the new face.
    #[default]
    Persistent,
    Barycenter,
    /// The vertex with the smallest index.
    VertexIndexMin,
}

impl SelectionRule {
    pub fn name(&self) -> &'static str {
        match self {
            SelectionRule::Persistent => "persistent",
            SelectionRule::Barycenter => "barycenter",
            SelectionRule::VertexIndexMin => "vertex_index_min",
        }
    }
}

/// Samples of a normal curve on a uniform grid.
///
/// `controls[i]` is the control used on `[t_i, t_{i+1})` and
/// `duals[i] = λ ∘ Ad_{γ(t_i)}|_V`. `faces[i]` is the id of the face of the
/// unit sphere exposed by `duals[i]`, or `-1` on the smooth path.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub group: String,
    pub norm: NormSpec,
    pub lambda: Covector,
    pub step: f64,
    pub rule: String,
    /// `‖ξ(0)‖_*`, the speed of the curve.
    pub speed: f64,
    pub times: Vec<f64>,
    pub points: Vec<GroupElement>,
    pub controls: Vec<Vector>,
    pub duals: Vec<Covector>,
    pub faces: Vec<i64>,
    pub events: Vec<FaceEvent>,
    /// Exact switching record; empty on the smooth path.
    pub segments: Vec<ControlSegment>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub group: String,
    pub norm: NormSpec,
    pub lambda: Covector,
    pub h: f64,
    pub horizon: f64,
    pub rule: String,
    pub speed: f64,
    pub samples: usize,
    pub events: Vec<FaceEvent>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn end(&self) -> &GroupElement {
        self.points.last().expect("trajectories are nonempty")
    }

    /// Length `∫ ‖u‖`, with the left-endpoint rule on the grid.
    pub fn length(&self) -> f64 {
        self.controls
            .iter()
            .take(self.len().saturating_sub(1))
            .map(|u| self.norm.norm_raw(u.coords()))
            .sum::<f64>()
            * self.step
    }

    /// The one-parameter curve `t ↦ g0·exp(t u)`, `u ∈ V`, on the grid of
    /// step `h` up to `horizon`. It carries no covector.
    pub fn one_parameter(
        spec: &GroupSpec,
        norm: &NormSpec,
        g0: &GroupElement,
        u: &Vector,
        horizon: f64,
        h: f64,
    ) -> Result<Trajectory> {
        let n = grid_len(horizon, h)?;
        crate::error::check_dim(spec.rank_dim(), u.dim())?;
        let x = spec.embed(u.coords());
        let mut traj = Trajectory {
            group: spec.name().to_string(),
            norm: norm.clone(),
            lambda: Covector::zeros(spec.dim()),
            step: h,
            rule: "one_parameter".into(),
            speed: norm.norm(u)?,
            times: Vec::with_capacity(n + 1),
            points: Vec::with_capacity(n + 1),
            controls: Vec::with_capacity(n + 1),
            duals: Vec::with_capacity(n + 1),
            faces: Vec::with_capacity(n + 1),
            events: vec![],
            segments: vec![ControlSegment { start: 0.0, control: u.clone() }],
        };
        for i in 0..=n {
            let t = i as f64 * h;
            let g = spec.mul(g0, &spec.exp(&crate::linalg::Vector::from_dvector(&x * t))?);
            traj.times.push(t);
            traj.points.push(g);
            traj.controls.push(u.clone());
            traj.duals.push(Covector::zeros(spec.rank_dim()));
            traj.faces.push(-1);
        }
        Ok(traj)
    }

    /// Constant-control pieces: the exact record when present, otherwise
    /// runs of equal grid controls.
    pub fn control_segments(&self) -> Vec<ControlSegment> {
        if !self.segments.is_empty() {
            return self.segments.clone();
        }
        let mut out: Vec<ControlSegment> = Vec::new();
        for (t, u) in self.times.iter().zip(&self.controls) {
            if out.last().map_or(true, |s| s.control != *u) {
                out.push(ControlSegment { start: *t, control: u.clone() });
            }
        }
        out
    }

    pub fn metadata(&self) -> TrajectoryMetadata {
        TrajectoryMetadata {
            group: self.group.clone(),
            norm: self.norm.clone(),
            lambda: self.lambda.clone(),
            h: self.step,
            horizon: self.horizon(),
            rule: self.rule.clone(),
            speed: self.speed,
            samples: self.len(),
            events: self.events.clone(),
        }
    }

    /// CSV with columns `t, g_11.., u_1.., xi_1.., face_id` (chart entries in
    /// row-major order).
    pub fn to_csv(&self) -> String {
        let size = self.points.first().map(|g| g.matrix().nrows()).unwrap_or(0);
        let vdim = self.controls.first().map(|u| u.dim()).unwrap_or(0);
        let mut header = vec!["t".to_string()];
        for i in 1..=size {
            for j in 1..=size {
                header.push(format!("g{i}{j}"));
            }
        }
        header.extend((1..=vdim).map(|k| format!("u{k}")));
        header.extend((1..=vdim).map(|k| format!("xi{k}")));
        header.push("face_id".into());
        let mut out = header.join(",");
        out.push('\n');
        for i in 0..self.len() {
            let mut row = format!("{:e}", self.times[i]);
            for x in self.points[i].row_major() {
                let _ = write!(row, ",{x:e}");
            }
            for x in self.controls[i].as_slice() {
                let _ = write!(row, ",{x:e}");
            }
            for x in self.duals[i].as_slice() {
                let _ = write!(row, ",{x:e}");
            }
            let _ = write!(row, ",{}", self.faces[i]);
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write_files(&self, dir: &Path, stem: &str) -> Result<()> {
        let io = |e: std::io::Error| Error::Io(format!("cannot write output: {e}"));
        std::fs::create_dir_all(dir).map_err(io)?;
        std::fs::write(dir.join(format!("{stem}.csv")), self.to_csv()).map_err(io)?;
        let meta = serde_json::to_string_pretty(&self.metadata())
            .map_err(|e| Error::Consistency(e.to_string()))?;
        std::fs::write(dir.join(format!("{stem}.json")), meta + "\n").map_err(io)?;
        Ok(())
    }
}

pub(crate) fn grid_len(horizon: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be nonnegative, got {horizon}")));
    }
    let n = (horizon / h).round();
    if n > 5e7 {
        return Err(Error::InvalidInput(format!("{n} steps exceed the sample budget")));
    }
    Ok(n as usize)
}
