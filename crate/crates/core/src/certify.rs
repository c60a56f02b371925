//! Quantitative certificates: the dual-curve speed bound `M(r)`, face
//! stability windows, the short-length bound for polyhedral Finsler groups,
//! the abelianized minimality check and the Heisenberg shortcut.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convex::NormSpec;
use crate::error::{check_dim, Error, Result};
use crate::flow::{ControlSegment, Trajectory};
use crate::lie::{GroupElement, GroupSpec, SubmetryData};
use crate::linalg::{Covector, Vector};
use crate::polyhedral::Polyhedron;
use crate::sampling::{rng_from_seed, unit_direction};

/// Safety factor applied to every sampled maximum.
pub const SAMPLED_INFLATION: f64 = 1.1;

const CENTER_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MMethod {
    /// Exact: abelian, or central brackets maximized over vertex pairs.
    Analytic,
    /// Maximum over sampled pairs and/or sampled ball points, inflated.
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MResolution {
    pub ladder_step: f64,
    pub levels: usize,
    pub group_samples: usize,
    pub pair_samples: usize,
    pub inflation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MRecord {
    pub value: f64,
    pub method: MMethod,
    pub resolution: Option<MResolution>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MSettings {
    /// Radii of the sampled balls are multiples of this step.
    pub ladder_step: f64,
    /// Group elements per ladder level.
    pub group_samples: usize,
    /// Exponential factors in each sampled ball point.
    pub pieces: usize,
    /// Unit pairs `(X, Y)` when the auxiliary norm is not polyhedral.
    pub pair_samples: usize,
    pub seed: u64,
    /// Ladder levels beyond this are refused.
    pub max_levels: usize,
}

impl Default for MSettings {
    fn default() -> Self {
        MSettings {
            ladder_step: 0.25,
            group_samples: 128,
            pieces: 3,
            pair_samples: 2000,
            seed: 0,
            max_levels: 400,
        }
    }
}

fn brackets_central(spec: &GroupSpec) -> bool {
    let n = spec.dim();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let b = spec.bracket_raw(&DVector::from_fn(n, |k, _| f64::from(k == i)), &DVector::from_fn(n, |k, _| f64::from(k == j)));
            spec.ad_matrix(&b).amax() <= CENTER_TOL
        })
    })
}

/// Caches the per-level maxima of `N(Ad_g ad_X Y)` so that repeated calls
/// at growing radii reuse earlier work. Values are nondecreasing in `r`.
pub struct MProfile<'a> {
    spec: &'a GroupSpec,
    aux: &'a NormSpec,
    metric: &'a NormSpec,
    settings: MSettings,
    /// `[X, Y]` for the unit pairs, shared by all levels.
    brackets: Vec<DVector<f64>>,
    exact_pairs: bool,
    kind: ProfileKind,
    levels: Vec<f64>,
}

enum ProfileKind {
    Abelian,
    Central(f64),
    Ball,
}

impl<'a> MProfile<'a> {
    /// `aux` is the norm `N` on the whole algebra; `metric` is the norm on
    /// the polarization that defines the balls `B̄(1, r)`.
    pub fn new(spec: &'a GroupSpec, aux: &'a NormSpec, metric: &'a NormSpec, settings: MSettings) -> Result<Self> {
        check_dim(spec.dim(), aux.dim())?;
        check_dim(spec.rank_dim(), metric.dim())?;
        if !(settings.ladder_step > 0.0) || settings.group_samples == 0 || settings.pieces == 0 {
            return Err(Error::InvalidInput("M(r) sampling settings must be positive".into()));
        }
        let exact_pairs = aux.is_polyhedral();
        let units: Vec<DVector<f64>> = if exact_pairs {
            aux.polyhedron()?.raw_vertices().to_vec()
        } else {
            let mut rng = rng_from_seed(settings.seed ^ 0x5eed_0000);
            (0..2 * settings.pair_samples)
                .map(|_| {
                    let d = unit_direction(&mut rng, spec.dim());
                    let s = aux.norm_raw(&d);
                    d / s
                })
                .collect()
        };
        let brackets: Vec<DVector<f64>> = if exact_pairs {
            units
                .iter()
                .flat_map(|x| units.iter().map(move |y| (x, y)))
                .map(|(x, y)| spec.bracket_raw(x, y))
                .collect()
        } else {
            units.chunks(2).map(|p| spec.bracket_raw(&p[0], &p[1])).collect()
        };
        let kind = if spec.is_abelian() {
            ProfileKind::Abelian
        } else if brackets_central(spec) {
            ProfileKind::Central(brackets.iter().map(|b| aux.norm_raw(b)).fold(0.0, f64::max))
        } else {
            ProfileKind::Ball
        };
        Ok(MProfile {
            spec,
            aux,
            metric,
            settings,
            brackets,
            exact_pairs,
            kind,
            levels: Vec::new(),
        })
    }

    fn inner(&self, ad: &DMatrix<f64>) -> f64 {
        self.brackets
            .iter()
            .map(|b| self.aux.norm_raw(&(ad * b)))
            .fold(0.0, f64::max)
    }

    fn sample_level(&self, k: usize) -> f64 {
        let spec = self.spec;
        if k == 0 {
            return self.inner(&DMatrix::identity(spec.dim(), spec.dim()));
        }
        let rho = k as f64 * self.settings.ladder_step;
        let mut rng = rng_from_seed(self.settings.seed.wrapping_add(k as u64));
        let m = spec.rank_dim();
        let points: Vec<DMatrix<f64>> = (0..self.settings.group_samples)
            .map(|_| {
                let weights: Vec<f64> = (0..self.settings.pieces)
                    .map(|_| -(1.0 - rng.gen::<f64>()).ln())
                    .collect();
                let total: f64 = weights.iter().sum();
                let mut g = DMatrix::identity(spec.chart_size(), spec.chart_size());
                for w in weights {
                    let d = unit_direction(&mut rng, m);
                    let u = &d * (rho * w / total / self.metric.norm_raw(&d));
                    g *= spec.exp_matrix(&spec.embed(&u));
                }
                g
            })
            .collect();
        points
            .par_iter()
            .map(|g| match spec.adjoint_matrix(&spec.element(g.clone())) {
                Ok(ad) => self.inner(&ad),
                Err(_) => f64::INFINITY,
            })
            .reduce(|| 0.0, f64::max)
    }

    fn resolution(&self, levels: usize) -> Option<MResolution> {
        match self.kind {
            ProfileKind::Abelian => None,
            ProfileKind::Central(_) if self.exact_pairs => None,
            ProfileKind::Central(_) => Some(MResolution {
                ladder_step: 0.0,
                levels: 0,
                group_samples: 0,
                pair_samples: self.brackets.len(),
                inflation: SAMPLED_INFLATION,
            }),
            ProfileKind::Ball => Some(MResolution {
                ladder_step: self.settings.ladder_step,
                levels,
                group_samples: self.settings.group_samples,
                pair_samples: self.brackets.len(),
                inflation: SAMPLED_INFLATION,
            }),
        }
    }

    /// `M(r) = max N(Ad_g ad_X Y)` over `g ∈ B̄(1, r)` and `N(X) = N(Y) = 1`.
    pub fn value(&mut self, r: f64) -> Result<MRecord> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidInput(format!("radius must be nonnegative, got {r}")));
        }
        let inflation = if self.exact_pairs { 1.0 } else { SAMPLED_INFLATION };
        match self.kind {
            ProfileKind::Abelian => Ok(MRecord {
                value: 0.0,
                method: MMethod::Analytic,
                resolution: None,
            }),
            ProfileKind::Central(v) => Ok(MRecord {
                value: v * inflation,
                method: if self.exact_pairs { MMethod::Analytic } else { MMethod::Sampled },
                resolution: self.resolution(0),
            }),
            ProfileKind::Ball => {
                let k = (r / self.settings.ladder_step - 1e-12).ceil().max(0.0) as usize;
                if k >= self.settings.max_levels {
                    return Err(Error::Unsupported(format!(
                        "M({r}) needs {k} ladder levels, above the budget {}",
                        self.settings.max_levels
                    )));
                }
                while self.levels.len() <= k {
                    let v = self.sample_level(self.levels.len());
                    let prev = self.levels.last().copied().unwrap_or(0.0);
                    self.levels.push(prev.max(v));
                }
                Ok(MRecord {
                    value: self.levels[k] * SAMPLED_INFLATION,
                    method: MMethod::Sampled,
                    resolution: self.resolution(k + 1),
                })
            }
        }
    }
}

/// One-shot [`MProfile::value`].
pub fn m_of_r(spec: &GroupSpec, aux: &NormSpec, metric: &NormSpec, r: f64, settings: MSettings) -> Result<MRecord> {
    MProfile::new(spec, aux, metric, settings)?.value(r)
}

/// `w = δ / (N*(λ)·M)`; infinite when `M = 0`.
pub fn stability_window(delta: f64, n_star_lambda: f64, m: f64) -> Result<f64> {
    if !(n_star_lambda > 0.0) {
        return Err(Error::InvalidInput("N*(λ) must be positive".into()));
    }
    if !(delta > 0.0) || !(m >= 0.0) {
        return Err(Error::InvalidInput("δ must be positive and M nonnegative".into()));
    }
    Ok(if m == 0.0 { f64::INFINITY } else { delta / (n_star_lambda * m) })
}

/// Smallest `c` with `N(v) ≤ c‖v‖` on the polarization.
pub fn normalization(spec: &GroupSpec, aux: &NormSpec, metric: &NormSpec, seed: u64) -> Result<f64> {
    check_dim(spec.dim(), aux.dim())?;
    check_dim(spec.rank_dim(), metric.dim())?;
    if metric.is_polyhedral() {
        let p = metric.polyhedron()?;
        return Ok(p
            .raw_vertices()
            .iter()
            .map(|v| aux.norm_raw(&spec.embed(v)))
            .fold(0.0, f64::max));
    }
    let mut rng = rng_from_seed(seed);
    let best = (0..4000)
        .map(|_| {
            let d = unit_direction(&mut rng, spec.rank_dim());
            aux.norm_raw(&spec.embed(&d)) / metric.norm_raw(&d)
        })
        .fold(0.0, f64::max);
    Ok(best * SAMPLED_INFLATION)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowViolation {
    pub start: f64,
    pub end: f64,
    /// Carrier face ids of the controls met by the window.
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub window: f64,
    pub windows_checked: usize,
    pub verdict: bool,
    pub violations: Vec<WindowViolation>,
}

const MAX_REPORTED: usize = 20;

/// Checks that on every interval of length `w` inside `[0, T]` the controls
/// lie in one common face of the unit sphere of `poly`. Switches exactly at
/// a window edge do not count.
pub fn check_windows(segments: &[ControlSegment], horizon: f64, w: f64, poly: &Polyhedron) -> Result<WindowReport> {
    if !(w > 0.0) {
        return Err(Error::InvalidInput(format!("window must be positive, got {w}")));
    }
    let facets: Vec<Option<(usize, Vec<usize>)>> = segments
        .iter()
        .map(|s| {
            if s.control.is_zero() {
                Ok(None)
            } else {
                poly.carrier_face(&s.control).map(|f| Some((f.id, f.facets.clone())))
            }
        })
        .collect::<Result<_>>()?;
    let last_start = (horizon - w).max(0.0);
    let eps = 1e-12 * horizon.max(1.0);
    let mut report = WindowReport {
        window: w,
        windows_checked: 0,
        verdict: true,
        violations: Vec::new(),
    };
    for i in 0..segments.len() {
        let s_i = segments[i].start;
        if s_i > last_start + eps {
            break;
        }
        let next = segments.get(i + 1).map_or(horizon, |s| s.start);
        let reach = next.min(last_start) + w;
        let mut common: Option<Vec<usize>> = None;
        let mut ids = Vec::new();
        for (s, f) in segments[i..].iter().zip(&facets[i..]) {
            if s.start >= reach - eps && s.start > s_i {
                break;
            }
            let Some((id, fs)) = f else { continue };
            if !ids.contains(id) {
                ids.push(*id);
            }
            common = Some(match common {
                None => fs.clone(),
                Some(c) => c.into_iter().filter(|k| fs.contains(k)).collect(),
            });
        }
        report.windows_checked += 1;
        if common.is_some_and(|c| c.is_empty()) {
            report.verdict = false;
            if report.violations.len() < MAX_REPORTED {
                report.violations.push(WindowViolation {
                    start: s_i,
                    end: reach,
                    faces: ids,
                });
            }
        }
    }
    Ok(report)
}

/// [`check_windows`] over the control segments of a polyhedral trajectory.
pub fn verify_face_stability(traj: &Trajectory, w: f64) -> Result<WindowReport> {
    let poly = traj.norm.polyhedron()?;
    check_windows(&traj.control_segments(), traj.horizon(), w, &poly)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub delta: f64,
    /// The auxiliary norm `N` on the algebra.
    #[serde(rename = "N")]
    pub aux: NormSpec,
    /// `c` with `N ≤ c‖·‖` on the polarization; `N/c` is used in the bound.
    pub normalization: f64,
    /// `N*(λ ∘ Ad_{γ(0)})`, before normalization.
    pub n_star_lambda: f64,
    #[serde(rename = "M")]
    pub m: MRecord,
    /// Radius of the ball containing `γ(0)⁻¹γ`, the length of the curve.
    pub radius: f64,
    pub lambda: Covector,
    /// Serialized as `null` when unbounded.
    pub window: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    pub windows_checked: usize,
    pub verdict: bool,
    pub violations: Vec<WindowViolation>,
}

/// Runs the full pipeline on a polyhedral trajectory: δ from the star
/// covering, `N*(λ)`, `M` at the curve length, the window, and the check.
///
/// The curve is left-translated to start at the identity, which replaces
/// `λ` by `λ ∘ Ad_{γ(0)}` and leaves controls and faces unchanged.
pub fn certify_face_stability(
    spec: &GroupSpec,
    traj: &Trajectory,
    aux: &NormSpec,
    settings: MSettings,
) -> Result<StabilityCertificate> {
    let poly = traj.norm.polyhedron()?;
    let delta = poly.star_covering()?.delta;
    let g0 = traj.points.first().ok_or_else(|| Error::InvalidInput("empty trajectory".into()))?;
    let lambda0 = Covector::from_dvector(spec.adjoint_matrix(g0)?.transpose() * traj.lambda.coords());
    let n_star_lambda = aux.dual_norm(&lambda0)?;
    let c = normalization(spec, aux, &traj.norm, settings.seed)?;
    let radius = traj.speed * traj.horizon();
    let m = m_of_r(spec, aux, &traj.norm, radius, settings)?;
    let window = stability_window(delta, c * n_star_lambda, c * m.value)?;
    let report = verify_face_stability(traj, window)?;
    Ok(StabilityCertificate {
        delta,
        aux: aux.clone(),
        normalization: c,
        n_star_lambda,
        m,
        radius,
        lambda: traj.lambda.clone(),
        window,
        notice: window
            .is_infinite()
            .then(|| "M = 0, the window is unbounded and the whole curve is one window".to_string()),
        windows_checked: report.windows_checked,
        verdict: report.verdict,
        violations: report.violations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortBound {
    /// Supremum of lengths `L` with `δ > c²·a·L·M(L)`.
    pub l_bar: f64,
    pub delta: f64,
    pub normalization: f64,
    /// `max N*(f)` over the facet functionals `f` of the unit ball.
    pub dual_factor: f64,
    #[serde(rename = "M")]
    pub m: MRecord,
}

/// Length below which every normal curve of a polyhedral Finsler group has
/// its control in one face.
///
/// A curve of length `L` on `[0, 1]` has `‖λ‖_* = L`, hence
/// `N*(λ) ≤ a·L`; the window covers `[0, 1]` once `c²·a·L·M(L) < δ`.
pub fn finsler_short_bound(spec: &GroupSpec, norm: &NormSpec, aux: &NormSpec, settings: MSettings) -> Result<ShortBound> {
    if !spec.is_finsler() {
        return Err(Error::InvalidInput(format!("{} is not Finsler", spec.name())));
    }
    let poly = norm.polyhedron()?;
    let delta = poly.star_covering()?.delta;
    let c = normalization(spec, aux, norm, settings.seed)?;
    let a = poly
        .raw_functionals()
        .iter()
        .map(|f| aux.dual_norm_raw(f))
        .fold(0.0, f64::max);
    let mut profile = MProfile::new(spec, aux, norm, settings)?;
    let bound = |l: f64, profile: &mut MProfile| -> Result<(f64, MRecord)> {
        let m = profile.value(l)?;
        Ok((c * c * a * l * m.value, m))
    };
    let m0 = profile.value(0.0)?;
    if m0.value == 0.0 {
        return Ok(ShortBound {
            l_bar: f64::INFINITY,
            delta,
            normalization: c,
            dual_factor: a,
            m: m0,
        });
    }
    let mut hi = delta / (c * c * a * m0.value);
    let (mut lo, mut m_lo) = (0.0, m0.clone());
    let (_, m_hi) = bound(hi, &mut profile)?;
    if m_hi.value == m0.value {
        // M is constant on [0, hi], so hi is the supremum
        return Ok(ShortBound {
            l_bar: hi,
            delta,
            normalization: c,
            dual_factor: a,
            m: m_hi,
        });
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let (v, m) = bound(mid, &mut profile)?;
        if v < delta {
            lo = mid;
            m_lo = m;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(ShortBound {
        l_bar: lo,
        delta,
        normalization: c,
        dual_factor: a,
        m: m_lo,
    })
}

/// Projects the trajectory through the submetry and checks that on every
/// window of length `w` the projected controls stay in one face of the
/// pushforward ball, so the projection is a norm-straight segment there.
pub fn abelianized_minimality(traj: &Trajectory, sub: &SubmetryData, w: f64) -> Result<WindowReport> {
    if traj.group != sub.source().name() {
        return Err(Error::InvalidInput(format!(
            "trajectory lives on {}, submetry starts at {}",
            traj.group,
            sub.source().name()
        )));
    }
    let segments = traj
        .control_segments()
        .into_iter()
        .map(|s| {
            Ok(ControlSegment {
                start: s.start,
                control: sub.project_control(&s.control)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if sub.norm().is_polyhedral() {
        let poly = sub.pushforward_polyhedron()?;
        return check_windows(&segments, traj.horizon(), w, &poly);
    }
    // strictly convex pushforward: faces are points, so directions must agree
    let horizon = traj.horizon();
    let last_start = (horizon - w).max(0.0);
    let dir = |v: &Vector| -> Option<DVector<f64>> {
        let n = v.euclidean_norm();
        (n > 0.0).then(|| v.coords() / n)
    };
    let mut report = WindowReport {
        window: w,
        windows_checked: 0,
        verdict: true,
        violations: Vec::new(),
    };
    for i in 0..segments.len() {
        if segments[i].start > last_start {
            break;
        }
        let next = segments.get(i + 1).map_or(horizon, |s| s.start);
        let reach = next.min(last_start) + w;
        let d0 = dir(&segments[i].control);
        let ok = segments[i..]
            .iter()
            .take_while(|s| s.start < reach || s.start == segments[i].start)
            .all(|s| match (&d0, dir(&s.control)) {
                (Some(a), Some(b)) => (a - b).amax() <= 1e-9,
                _ => true,
            });
        report.windows_checked += 1;
        if !ok {
            report.verdict = false;
            if report.violations.len() < MAX_REPORTED {
                report.violations.push(WindowViolation {
                    start: segments[i].start,
                    end: reach,
                    faces: vec![],
                });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortcutRecord {
    pub epsilon: f64,
    pub beta: f64,
    /// Length `4β` of the four-piece curve.
    pub length: f64,
    /// Length `ε` of `σ(t) = exp(t X₃)` on `[0, ε]`.
    pub sigma_length: f64,
    pub shorter: bool,
    /// Endpoint by exact concatenation of exponentials, row-major.
    pub endpoint: Vec<f64>,
    /// `exp(ε X₃)`, row-major.
    pub target: Vec<f64>,
    pub endpoint_error: f64,
    /// `4β + β² − ε`.
    pub equation_residual: f64,
    /// Corners of the projection to `span(X₁, X₂)`, closed loop.
    pub planar_loop: Vec<[f64; 2]>,
    pub planar_area: f64,
}

/// The four controls `±X₁ + X₃, ±X₂ + X₃` of the shortcut, in order.
pub fn shortcut_controls() -> [Vector; 4] {
    [
        Vector::from_slice(&[1.0, 0.0, 1.0]),
        Vector::from_slice(&[0.0, 1.0, 1.0]),
        Vector::from_slice(&[-1.0, 0.0, 1.0]),
        Vector::from_slice(&[0.0, -1.0, 1.0]),
    ]
}

/// Positive root of `β² + 4β = ε`, in a cancellation-free form.
pub fn shortcut_beta(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("ε must be positive, got {epsilon}")));
    }
    Ok(epsilon / (2.0 + (4.0 + epsilon).sqrt()))
}

/// Horizontal curve in the Heisenberg group with the max-norm on the full
/// algebra, from the identity to `exp(ε X₃)`, of length `4β < ε`. Each of
/// the four pieces is sampled with `samples_per_piece` steps.
pub fn heisenberg_shortcut(epsilon: f64, samples_per_piece: usize) -> Result<(Trajectory, ShortcutRecord)> {
    let beta = shortcut_beta(epsilon)?;
    if samples_per_piece == 0 {
        return Err(Error::InvalidInput("need at least one sample per piece".into()));
    }
    let spec = GroupSpec::heisenberg()?;
    let norm = NormSpec::linf(3);
    let h = beta / samples_per_piece as f64;
    let controls = shortcut_controls();
    let mut traj = Trajectory {
        group: spec.name().to_string(),
        norm: norm.clone(),
        lambda: Covector::zeros(3),
        step: h,
        rule: "shortcut".into(),
        speed: 1.0,
        times: Vec::new(),
        points: Vec::new(),
        controls: Vec::new(),
        duals: Vec::new(),
        faces: Vec::new(),
        events: Vec::new(),
        segments: Vec::new(),
    };
    let poly = norm.polyhedron()?;
    let mut corner = spec.identity();
    let mut corners = vec![corner.clone()];
    for (p, u) in controls.iter().enumerate() {
        traj.segments.push(ControlSegment {
            start: p as f64 * beta,
            control: u.clone(),
        });
        let face = poly.carrier_face(u)?.id as i64;
        for k in 0..samples_per_piece {
            let s = k as f64 * h;
            traj.times.push(p as f64 * beta + s);
            traj.points.push(spec.mul(&corner, &spec.exp(&u.scale(s))?));
            traj.controls.push(u.clone());
            traj.duals.push(Covector::zeros(3));
            traj.faces.push(face);
        }
        corner = spec.mul(&corner, &spec.exp(&u.scale(beta))?);
        corners.push(corner.clone());
    }
    traj.times.push(4.0 * beta);
    traj.points.push(corner.clone());
    traj.controls.push(controls[3].clone());
    traj.duals.push(Covector::zeros(3));
    traj.faces.push(poly.carrier_face(&controls[3])?.id as i64);

    let target = spec.exp(&Vector::from_slice(&[0.0, 0.0, epsilon]))?;
    let planar_loop: Vec<[f64; 2]> = corners.iter().map(|g| [g.matrix()[(0, 1)], g.matrix()[(1, 2)]]).collect();
    let planar_area = 0.5
        * planar_loop
            .windows(2)
            .map(|w| w[0][0] * w[1][1] - w[1][0] * w[0][1])
            .sum::<f64>();
    let length = 4.0 * beta;
    let record = ShortcutRecord {
        epsilon,
        beta,
        length,
        sigma_length: epsilon,
        shorter: length < epsilon,
        endpoint: corner.row_major(),
        target: target.row_major(),
        endpoint_error: corner.distance(&target),
        equation_residual: 4.0 * beta + beta * beta - epsilon,
        planar_loop,
        planar_area,
    };
    Ok((traj, record))
}

/// The Heisenberg element `exp(ε X₃)`, the endpoint of `σ` at time `ε`.
pub fn sigma_endpoint(epsilon: f64) -> Result<GroupElement> {
    GroupSpec::heisenberg()?.exp(&Vector::from_slice(&[0.0, 0.0, epsilon]))
}
