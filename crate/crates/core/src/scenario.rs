//! Scenario files: a flat JSON configuration naming one command and its
//! inputs, and the runner that writes the command's output files.

use std::fmt;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::certify::{self, MSettings, StabilityCertificate};
use crate::convex::NormSpec;
use crate::error::Error;
use crate::flow::{self, BranchReport, FlowSettings, SelectionRule, Trajectory};
use crate::lie::{GroupElement, GroupSpec, SubmetryData};
use crate::linalg::{Covector, Vector};
use crate::sampling::{rng_from_seed, standard_normal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Integrate,
    Branch,
    Certify,
    Shortcut,
    Faces,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Integrate => "integrate",
            Command::Branch => "branch",
            Command::Certify => "certify",
            Command::Shortcut => "shortcut",
            Command::Faces => "faces",
        }
    }
}

/// A registry name or an inline group description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Spec(GroupSpec),
}

impl GroupRef {
    pub fn resolve(&self) -> crate::Result<GroupSpec> {
        match self {
            GroupRef::Name(n) => GroupSpec::by_name(n),
            GroupRef::Spec(s) => Ok(s.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Stem of every output file.
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm: Option<NormSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    /// Two covectors for `branch`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<Vec<f64>>>,
    /// Chart matrix of the start point, row-major; identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<SelectionRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_control: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_switches: Option<usize>,
    /// `branch`: also compare each curve with `t ↦ g₀ exp(t u)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_control: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agree_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_piece: Option<usize>,
    /// `certify`: number of random covectors with `N*(λ) = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// `certify`: auxiliary norm on the algebra; max-norm by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_norm: Option<NormSpec>,
    /// `certify`: also run the abelianized minimality check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abelianized: Option<bool>,
}

#[derive(Debug)]
pub enum ScenarioError {
    Config(String),
    Numeric(Error),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            ScenarioError::Numeric(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ScenarioError::Config(_) => "config",
            ScenarioError::Numeric(_) => "numeric",
        }
    }

    /// Diagnostic JSON written as `error.json`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            ScenarioError::Numeric(Error::FaceThrashing { events, t, .. }) => {
                v["t"] = serde_json::json!(t);
                v["events"] = serde_json::to_value(events).unwrap_or_default();
            }
            ScenarioError::Numeric(Error::Integration { t, .. }) => {
                v["t"] = serde_json::json!(t);
            }
            _ => {}
        }
        v
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Config(m) => write!(f, "config error: {m}"),
            ScenarioError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

impl From<Error> for ScenarioError {
    fn from(e: Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } | Error::InvalidInput(_) | Error::Unsupported(_) => {
                ScenarioError::Config(e.to_string())
            }
            _ => ScenarioError::Numeric(e),
        }
    }
}

type SResult<T> = std::result::Result<T, ScenarioError>;

fn missing(field: &str, cmd: Command) -> ScenarioError {
    ScenarioError::Config(format!("'{}' needs the field '{field}'", cmd.name()))
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> SResult<Self> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> SResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configs serialize") + "\n"
    }

    /// Fills the command from the caller when the file leaves it open;
    /// rejects a conflicting one.
    pub fn with_command(mut self, cmd: Command) -> SResult<Self> {
        match self.command {
            Some(c) if c != cmd => Err(ScenarioError::Config(format!(
                "config is a '{}' scenario, not '{}'",
                c.name(),
                cmd.name()
            ))),
            _ => {
                self.command = Some(cmd);
                Ok(self)
            }
        }
    }

    fn cmd(&self) -> SResult<Command> {
        self.command
            .ok_or_else(|| ScenarioError::Config("no command given".into()))
    }

    fn group(&self) -> SResult<GroupSpec> {
        let cmd = self.cmd()?;
        Ok(self.group.as_ref().ok_or_else(|| missing("group", cmd))?.resolve()?)
    }

    fn norm(&self) -> SResult<NormSpec> {
        self.norm.clone().ok_or_else(|| missing("norm", self.cmd().unwrap_or(Command::Integrate)))
    }

    fn start(&self, spec: &GroupSpec) -> SResult<GroupElement> {
        match &self.start {
            None => Ok(spec.identity()),
            Some(rows) => {
                let n = spec.chart_size();
                if rows.len() != n * n {
                    return Err(ScenarioError::Config(format!("start needs {} entries", n * n)));
                }
                Ok(spec.element_from_matrix(DMatrix::from_row_slice(n, n, rows))?)
            }
        }
    }

    fn settings(&self) -> SResult<FlowSettings> {
        let cmd = self.cmd()?;
        let horizon = self.horizon.ok_or_else(|| missing("horizon", cmd))?;
        let step = self.step.ok_or_else(|| missing("step", cmd))?;
        let mut s = FlowSettings::new(horizon, step).with_rule(self.rule.unwrap_or_default());
        if let Some(u) = &self.start_control {
            s = s.with_start_control(Vector::from_slice(u));
        }
        if let Some(m) = self.max_switches {
            s.max_switches = m;
        }
        Ok(s)
    }
}

/// What a run produced: the files written and every integrated trajectory.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub trajectories: Vec<Trajectory>,
}

struct Writer<'a> {
    dir: &'a Path,
    summary: RunSummary,
}

impl Writer<'_> {
    fn json<T: Serialize>(&mut self, file: &str, value: &T) -> SResult<()> {
        let text = serde_json::to_string_pretty(value)
            .map_err(|e| ScenarioError::Numeric(Error::Consistency(e.to_string())))?;
        self.text(file, &(text + "\n"))
    }

    fn text(&mut self, file: &str, text: &str) -> SResult<()> {
        let path = self.dir.join(file);
        std::fs::write(&path, text)
            .map_err(|e| ScenarioError::Numeric(Error::Io(format!("{}: {e}", path.display()))))?;
        self.summary.files.push(path);
        Ok(())
    }

    fn trajectory(&mut self, stem: &str, traj: Trajectory) -> SResult<()> {
        traj.write_files(self.dir, stem)?;
        self.summary.files.push(self.dir.join(format!("{stem}.csv")));
        self.summary.files.push(self.dir.join(format!("{stem}.json")));
        self.summary.trajectories.push(traj);
        Ok(())
    }
}

#[derive(Serialize)]
struct IntegrateSummary {
    samples: usize,
    events: usize,
    speed: f64,
    length: f64,
    speed_deviation: f64,
    dual_sphere_deviation: f64,
    end: Vec<f64>,
}

fn integrate_summary(traj: &Trajectory) -> IntegrateSummary {
    IntegrateSummary {
        samples: traj.len(),
        events: traj.events.len(),
        speed: traj.speed,
        length: traj.length(),
        speed_deviation: flow::check_constant_speed(traj) * traj.speed,
        dual_sphere_deviation: flow::check_dual_sphere(traj) * traj.speed,
        end: traj.end().row_major(),
    }
}

#[derive(Serialize)]
struct BranchOutput {
    pair: BranchReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<[BranchReport; 2]>,
}

#[derive(Serialize)]
struct CertifyOutput {
    group: String,
    norm: NormSpec,
    delta: f64,
    all_verdicts: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    short_bound: Option<certify::ShortBound>,
    certificates: Vec<StabilityCertificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    abelianized: Vec<certify::WindowReport>,
}

#[derive(Serialize)]
struct FacesOutput {
    polyhedron: crate::Polyhedron,
    faces: Vec<crate::Face>,
    star_covering: crate::StarCovering,
}

fn covector(spec: &GroupSpec, v: &[f64]) -> SResult<Covector> {
    if v.len() != spec.dim() {
        return Err(ScenarioError::Config(format!(
            "covector has {} entries, the algebra has dimension {}",
            v.len(),
            spec.dim()
        )));
    }
    Ok(Covector::from_slice(v))
}

/// Runs the scenario and writes its outputs, including `<name>.config.json`
/// (the config as run), into `out`.
pub fn run(config: &ScenarioConfig, out: &Path) -> SResult<RunSummary> {
    let cmd = config.cmd()?;
    if config.name.is_empty() || config.name.contains(['/', '\\']) {
        return Err(ScenarioError::Config("name must be a plain file stem".into()));
    }
    std::fs::create_dir_all(out)
        .map_err(|e| ScenarioError::Numeric(Error::Io(format!("{}: {e}", out.display()))))?;
    let mut w = Writer {
        dir: out,
        summary: RunSummary::default(),
    };
    let name = config.name.as_str();
    w.text(&format!("{name}.config.json"), &config.to_json())?;
    match cmd {
        Command::Integrate => {
            let spec = config.group()?;
            let norm = config.norm()?;
            let lambda = covector(&spec, config.lambda.as_deref().ok_or_else(|| missing("lambda", cmd))?)?;
            let g0 = config.start(&spec)?;
            let traj = flow::integrate(&spec, &norm, &lambda, &g0, &config.settings()?)?;
            w.json(&format!("{name}.summary.json"), &integrate_summary(&traj))?;
            w.trajectory(name, traj)?;
        }
        Command::Branch => {
            let spec = config.group()?;
            let norm = config.norm()?;
            let lambdas = config.lambdas.as_ref().ok_or_else(|| missing("lambdas", cmd))?;
            if lambdas.len() != 2 {
                return Err(ScenarioError::Config("'lambdas' needs exactly two covectors".into()));
            }
            let g0 = config.start(&spec)?;
            let settings = config.settings()?;
            let agree = config.agree_tol.unwrap_or(flow::DEFAULT_AGREE_TOL);
            let split = config.split_tol.unwrap_or(flow::DEFAULT_SPLIT_TOL);
            let a = flow::integrate(&spec, &norm, &covector(&spec, &lambdas[0])?, &g0, &settings)?;
            let b = flow::integrate(&spec, &norm, &covector(&spec, &lambdas[1])?, &g0, &settings)?;
            let pair = flow::detect_branching(&a, &b, agree, split)?;
            let reference = match &config.reference_control {
                None => None,
                Some(u) => {
                    let line =
                        Trajectory::one_parameter(&spec, &norm, &g0, &Vector::from_slice(u), settings.horizon, settings.step)?;
                    Some([
                        flow::detect_branching(&a, &line, agree, split)?,
                        flow::detect_branching(&b, &line, agree, split)?,
                    ])
                }
            };
            w.json(&format!("{name}.branch.json"), &BranchOutput { pair, reference })?;
            w.trajectory(&format!("{name}_a"), a)?;
            w.trajectory(&format!("{name}_b"), b)?;
        }
        Command::Certify => {
            let spec = config.group()?;
            let norm = config.norm()?;
            let aux = config.aux_norm.clone().unwrap_or_else(|| NormSpec::linf(spec.dim()));
            let settings = config.settings()?;
            let g0 = config.start(&spec)?;
            let mset = MSettings {
                seed: config.seed,
                ..MSettings::default()
            };
            let mut lambdas = Vec::new();
            if let Some(l) = &config.lambda {
                lambdas.push(covector(&spec, l)?);
            }
            let mut rng = rng_from_seed(config.seed);
            for _ in 0..config.samples.unwrap_or(0) {
                let raw = Covector::from_dvector(nalgebra::DVector::from_fn(spec.dim(), |_, _| standard_normal(&mut rng)));
                let s = aux.dual_norm(&raw)?;
                lambdas.push(raw.scale(1.0 / s));
            }
            if lambdas.is_empty() {
                return Err(ScenarioError::Config("'certify' needs 'lambda' or 'samples'".into()));
            }
            let delta = norm.polyhedron()?.star_covering()?.delta;
            let short_bound = if spec.is_finsler() {
                Some(certify::finsler_short_bound(&spec, &norm, &aux, mset.clone())?)
            } else {
                None
            };
            let sub = if config.abelianized.unwrap_or(false) {
                Some(SubmetryData::abelianization(spec.clone(), norm.clone())?)
            } else {
                None
            };
            let mut certificates = Vec::new();
            let mut abelianized = Vec::new();
            let mut trajectories = Vec::new();
            for lambda in &lambdas {
                let traj = flow::integrate(&spec, &norm, lambda, &g0, &settings)?;
                let cert = certify::certify_face_stability(&spec, &traj, &aux, mset.clone())?;
                if let Some(sub) = &sub {
                    abelianized.push(certify::abelianized_minimality(&traj, sub, cert.window)?);
                }
                certificates.push(cert);
                trajectories.push(traj);
            }
            let all_verdicts = certificates.iter().all(|c| c.verdict) && abelianized.iter().all(|r| r.verdict);
            w.json(
                &format!("{name}.certificate.json"),
                &CertifyOutput {
                    group: spec.name().to_string(),
                    norm,
                    delta,
                    all_verdicts,
                    short_bound,
                    certificates,
                    abelianized,
                },
            )?;
            if let Some(first) = trajectories.into_iter().next() {
                w.trajectory(name, first)?;
            }
        }
        Command::Shortcut => {
            let eps = config.epsilon.ok_or_else(|| missing("epsilon", cmd))?;
            let (traj, record) = certify::heisenberg_shortcut(eps, config.samples_per_piece.unwrap_or(100))?;
            w.json(&format!("{name}.shortcut.json"), &record)?;
            w.trajectory(name, traj)?;
        }
        Command::Faces => {
            let norm = config.norm()?;
            let poly = norm.polyhedron()?;
            let star_covering = poly.star_covering()?;
            let faces = poly.faces().to_vec();
            w.json(
                &format!("{name}.faces.json"),
                &FacesOutput {
                    polyhedron: (*poly).clone(),
                    faces,
                    star_covering,
                },
            )?;
        }
    }
    Ok(w.summary)
}

/// Runs and, on failure, writes `error.json` into `out` before returning
/// the error.
pub fn run_or_report(config: &ScenarioConfig, out: &Path) -> SResult<RunSummary> {
    run(config, out).inspect_err(|e| {
        if std::fs::create_dir_all(out).is_ok() {
            let text = serde_json::to_string_pretty(&e.to_json()).unwrap_or_default();
            let _ = std::fs::write(out.join("error.json"), text + "\n");
        }
    })
}
