use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::trajectory::{grid_len, ControlSegment, FaceEvent, SelectionRule, Trajectory};
use crate::convex::{ConvexityClass, NormSpec};
use crate::error::{check_dim, Error, Result};
use crate::lie::{GroupElement, GroupSpec};
use crate::linalg::{Covector, Vector};
use crate::polyhedral::Polyhedron;

/// Integration parameters shared by both paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowSettings {
    pub horizon: f64,
    pub step: f64,
    #[serde(default)]
    pub rule: SelectionRule,
    /// Control at `t = 0` when the initial face is set-valued (polyhedral path).
    #[serde(default)]
    pub start_control: Option<Vector>,
    #[serde(default = "default_max_switches")]
    pub max_switches: usize,
}

fn default_max_switches() -> usize {
    10_000
}

impl FlowSettings {
    pub fn new(horizon: f64, step: f64) -> Self {
        FlowSettings {
            horizon,
            step,
            rule: SelectionRule::Persistent,
            start_control: None,
            max_switches: default_max_switches(),
        }
    }

    pub fn with_rule(mut self, rule: SelectionRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn with_start_control(mut self, u: Vector) -> Self {
        self.start_control = Some(u);
        self
    }
}

/// Event localization resolution relative to the step.
const EVENT_RESOLUTION: f64 = 1e-3;

fn dual_point(spec: &GroupSpec, lambda: &DVector<f64>, g: &DMatrix<f64>) -> Result<DVector<f64>> {
    let ad = spec.adjoint_matrix(&spec.element(g.clone()))?;
    Ok(spec.restrict(&(ad.transpose() * lambda)))
}

/// The derivative of the dual curve, `Y ↦ λ(Ad_g [u, Y])` on `V`.
pub fn dual_derivative(spec: &GroupSpec, lambda: &Covector, g: &GroupElement, u: &Vector) -> Result<Covector> {
    check_dim(spec.dim(), lambda.dim())?;
    check_dim(spec.rank_dim(), u.dim())?;
    let ad_u = spec.ad_matrix(&spec.embed(u.coords()));
    let m = spec.adjoint_matrix(g)? * ad_u;
    Ok(Covector::from_dvector(spec.restrict(&(m.transpose() * lambda.coords()))))
}

/// Dispatches on the convexity class of the norm.
pub fn integrate(
    spec: &GroupSpec,
    norm: &NormSpec,
    lambda: &Covector,
    g0: &GroupElement,
    settings: &FlowSettings,
) -> Result<Trajectory> {
    if norm.convexity_class() == ConvexityClass::Polyhedral {
        integrate_polyhedral(spec, norm, lambda, g0, settings)
    } else {
        integrate_smooth(spec, norm, lambda, g0, settings.horizon, settings.step)
    }
}

fn check_inputs(spec: &GroupSpec, norm: &NormSpec, lambda: &Covector, g0: &GroupElement) -> Result<()> {
    check_dim(spec.dim(), lambda.dim())?;
    check_dim(spec.rank_dim(), norm.dim())?;
    if g0.group() != spec.name() {
        return Err(Error::InvalidInput(format!(
            "start point belongs to {}, not {}",
            g0.group(),
            spec.name()
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::InvalidInput("covector has non-finite entries".into()));
    }
    Ok(())
}

/// Classical fourth-order Runge–Kutta for `γ' = γ·u(γ)`,
/// `u(γ) = dE*(λ ∘ Ad_γ|_V)`, in the matrix chart.
///
/// Steps that cross a switching surface of `dE*` are split at the crossing,
/// located by bisection to `h·10⁻³`, and recorded as events.
pub fn integrate_smooth(
    spec: &GroupSpec,
    norm: &NormSpec,
    lambda: &Covector,
    g0: &GroupElement,
    horizon: f64,
    h: f64,
) -> Result<Trajectory> {
    check_inputs(spec, norm, lambda, g0)?;
    if norm.is_polyhedral() {
        return Err(Error::Unsupported(
            "the smooth integrator needs a differentiable dual energy".into(),
        ));
    }
    let n = grid_len(horizon, h)?;
    let lam = lambda.coords().clone();
    let control = |g: &DMatrix<f64>, t: f64| -> Result<DVector<f64>> {
        let xi = dual_point(spec, &lam, g)?;
        let u = norm.gradient_dual_energy_raw(&xi)?;
        if !u.iter().all(|x| x.is_finite()) {
            return Err(Error::Integration {
                t,
                reason: "dE* is not finite at the dual point".into(),
            });
        }
        Ok(u)
    };
    let field = |g: &DMatrix<f64>, t: f64| -> Result<DMatrix<f64>> {
        Ok(g * spec.chart_matrix(&spec.embed(&control(g, t)?)))
    };
    let rk4 = |g: &DMatrix<f64>, t: f64, s: f64| -> Result<DMatrix<f64>> {
        let k1 = field(g, t)?;
        let k2 = field(&(g + &k1 * (0.5 * s)), t)?;
        let k3 = field(&(g + &k2 * (0.5 * s)), t)?;
        let k4 = field(&(g + &k3 * s), t)?;
        Ok(spec.retract(g + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (s / 6.0)))
    };
    let regime = |g: &DMatrix<f64>| -> Result<u64> {
        Ok(norm.dual_regime(&Covector::from_dvector(dual_point(spec, &lam, g)?)))
    };

    let xi0 = dual_point(spec, &lam, g0.matrix())?;
    let speed = norm.dual_norm_raw(&xi0);
    let mut traj = empty_trajectory(spec, norm, lambda, h, "smooth", speed, n);
    let mut g = g0.matrix().clone();
    for i in 0..=n {
        let t = i as f64 * h;
        let xi = dual_point(spec, &lam, &g)?;
        let u = control(&g, t)?;
        traj.times.push(t);
        traj.points.push(spec.element(g.clone()));
        traj.controls.push(Vector::from_dvector(u));
        traj.duals.push(Covector::from_dvector(xi));
        traj.faces.push(-1);
        if i == n {
            break;
        }
        let r0 = regime(&g)?;
        let mut next = rk4(&g, t, h)?;
        if regime(&next)? != r0 {
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > h * EVENT_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                if regime(&rk4(&g, t, mid)?)? == r0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let mid_point = rk4(&g, t, hi)?;
            traj.events.push(FaceEvent {
                t: t + hi,
                from_face: r0 as i64,
                to_face: regime(&mid_point)? as i64,
            });
            next = if h - hi > 0.0 { rk4(&mid_point, t + hi, h - hi)? } else { mid_point };
        }
        if !next.iter().all(|x| x.is_finite()) {
            return Err(Error::Integration {
                t: t + h,
                reason: "state left the finite range".into(),
            });
        }
        g = next;
    }
    Ok(traj)
}

fn empty_trajectory(
    spec: &GroupSpec,
    norm: &NormSpec,
    lambda: &Covector,
    h: f64,
    rule: &str,
    speed: f64,
    n: usize,
) -> Trajectory {
    Trajectory {
        group: spec.name().to_string(),
        norm: norm.clone(),
        lambda: lambda.clone(),
        step: h,
        rule: rule.to_string(),
        speed,
        times: Vec::with_capacity(n + 1),
        points: Vec::with_capacity(n + 1),
        controls: Vec::with_capacity(n + 1),
        duals: Vec::with_capacity(n + 1),
        faces: Vec::with_capacity(n + 1),
        events: Vec::new(),
        segments: Vec::new(),
    }
}

struct PolyState<'a> {
    spec: &'a GroupSpec,
    poly: &'a Polyhedron,
    lam: DVector<f64>,
    rule: SelectionRule,
}

impl PolyState<'_> {
    fn xi(&self, g: &DMatrix<f64>) -> Result<DVector<f64>> {
        dual_point(self.spec, &self.lam, g)
    }

    fn face(&self, xi: &DVector<f64>) -> Result<usize> {
        Ok(self.poly.face_of(&Covector::from_dvector(xi.clone()))?.id)
    }

    fn admissible(&self, u: &DVector<f64>, face: usize) -> bool {
        let carrier = match self.poly.carrier_face(&Vector::from_dvector(u.clone())) {
            Ok(f) => f,
            Err(_) => return false,
        };
        let outer = &self.poly.face(face).vertices;
        carrier.vertices.iter().all(|v| outer.contains(v))
    }

    fn pick(&self, face: usize, r: f64) -> DVector<f64> {
        let pts = self.poly.face_points(face, r);
        match self.rule {
            SelectionRule::VertexIndexMin => pts[0].clone(),
            _ => pts.iter().fold(DVector::zeros(pts[0].len()), |a, p| a + p) / pts.len() as f64,
        }
    }

    /// Control the rule wants at dual point `xi` given the current control.
    fn desired(&self, xi: &DVector<f64>, current: &DVector<f64>, r: f64) -> Result<DVector<f64>> {
        let face = self.face(xi)?;
        Ok(match self.rule {
            SelectionRule::Persistent if self.admissible(current, face) => current.clone(),
            _ => self.pick(face, r),
        })
    }
}

fn same(a: &DVector<f64>, b: &DVector<f64>) -> bool {
    (a - b).amax() <= 1e-12 * (1.0 + a.amax())
}

/// Event-driven integration of the normal inclusion for polyhedral norms.
///
/// Between events the control is constant and the curve advances by exact
/// exponentials. An event fires when the selection rule asks for a
/// different control (for `Persistent`: when the current control leaves the
/// face exposed by `ξ(t)`); it is located by bisection to `h·10⁻³`.
pub fn integrate_polyhedral(
    spec: &GroupSpec,
    norm: &NormSpec,
    lambda: &Covector,
    g0: &GroupElement,
    settings: &FlowSettings,
) -> Result<Trajectory> {
    check_inputs(spec, norm, lambda, g0)?;
    let poly = norm.polyhedron()?;
    let h = settings.step;
    let n = grid_len(settings.horizon, h)?;
    let state = PolyState {
        spec,
        poly: &poly,
        lam: lambda.coords().clone(),
        rule: settings.rule,
    };
    let xi0 = state.xi(g0.matrix())?;
    let r = norm.dual_norm_raw(&xi0);
    if r == 0.0 {
        return Err(Error::InvalidInput(
            "λ vanishes on the polarization along the curve: no normal control".into(),
        ));
    }
    let face0 = state.face(&xi0)?;
    let mut u = match &settings.start_control {
        Some(u0) => {
            check_dim(spec.rank_dim(), u0.dim())?;
            let scaled = u0.coords() * (r / norm.norm_raw(u0.coords()));
            if !state.admissible(&scaled, face0) {
                return Err(Error::InvalidInput(
                    "start control is not in the face exposed by λ".into(),
                ));
            }
            scaled
        }
        None => state.pick(face0, r),
    };
    if settings.rule != SelectionRule::Persistent && settings.start_control.is_none() {
        u = state.desired(&xi0, &u, r)?;
    }
    let mut traj = empty_trajectory(spec, norm, lambda, h, settings.rule.name(), r, n);
    traj.segments.push(ControlSegment {
        start: 0.0,
        control: Vector::from_dvector(u.clone()),
    });
    let advance = |g: &DMatrix<f64>, u: &DVector<f64>, s: f64| -> DMatrix<f64> {
        g * spec.exp_matrix(&spec.embed(&(u * s)))
    };
    let mut g = g0.matrix().clone();
    for i in 0..=n {
        let t = i as f64 * h;
        let xi = state.xi(&g)?;
        traj.times.push(t);
        traj.points.push(spec.element(g.clone()));
        traj.controls.push(Vector::from_dvector(u.clone()));
        traj.faces.push(state.face(&xi)? as i64);
        traj.duals.push(Covector::from_dvector(xi));
        if i == n {
            break;
        }
        let mut elapsed = 0.0;
        while elapsed < h {
            let remaining = h - elapsed;
            let trial = advance(&g, &u, remaining);
            if same(&state.desired(&state.xi(&trial)?, &u, r)?, &u) {
                g = trial;
                break;
            }
            let (mut lo, mut hi) = (0.0, remaining);
            while hi - lo > h * EVENT_RESOLUTION {
                let mid = 0.5 * (lo + hi);
                let probe = advance(&g, &u, mid);
                if same(&state.desired(&state.xi(&probe)?, &u, r)?, &u) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let from_face = state.face(&state.xi(&advance(&g, &u, lo))?)? as i64;
            g = advance(&g, &u, hi);
            let xi = state.xi(&g)?;
            let to_face = state.face(&xi)? as i64;
            u = state.desired(&xi, &u, r)?;
            elapsed += hi;
            traj.events.push(FaceEvent {
                t: t + elapsed,
                from_face,
                to_face,
            });
            traj.segments.push(ControlSegment {
                start: t + elapsed,
                control: Vector::from_dvector(u.clone()),
            });
            if traj.events.len() > settings.max_switches {
                return Err(Error::FaceThrashing {
                    t: t + elapsed,
                    switches: traj.events.len(),
                    events: traj.events.clone(),
                });
            }
        }
    }
    Ok(traj)
}
