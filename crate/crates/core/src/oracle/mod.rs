//! Direct numerical integration of the equations of motion with detection of
//! the next mirror crossing. Used only to validate the geometric billiard map.

mod dopri;

pub use dopri::DenseStep;

use crate::geom2d::{Conic, Point, Vec2};
use dopri::{State, Stepper};

/// Central force with the center at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    /// Potential `α/r`, attractive for `α < 0`.
    Kepler { m: f64, alpha: f64 },
    /// Potential `k r²/2`.
    Hooke { m: f64, k: f64 },
}

impl System {
    fn validate(&self) -> Result<(), OracleError> {
        let (m, c) = match *self {
            System::Kepler { m, alpha } => (m, -alpha),
            System::Hooke { m, k } => (m, k),
        };
        if m.is_finite() && m > 0.0 && c.is_finite() && c > 0.0 {
            Ok(())
        } else {
            Err(OracleError::InvalidParameter("need m > 0 and an attractive force"))
        }
    }

    fn acceleration(&self, p: Point) -> Vec2 {
        match *self {
            System::Kepler { m, alpha } => {
                let r2 = p.norm_sq();
                p * (alpha / (m * r2 * r2.sqrt()))
            }
            System::Hooke { m, k } => p * (-k / m),
        }
    }

    pub fn energy(&self, s: &PhaseState) -> f64 {
        match *self {
            System::Kepler { m, alpha } => 0.5 * m * s.vel.norm_sq() + alpha / s.pos.norm(),
            System::Hooke { m, k } => 0.5 * m * s.vel.norm_sq() + 0.5 * k * s.pos.norm_sq(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub pos: Point,
    pub vel: Vec2,
    pub t: f64,
}

impl PhaseState {
    pub fn new(pos: Point, vel: Vec2) -> Self {
        Self { pos, vel, t: 0.0 }
    }

    fn from_vector(y: &State, t: f64) -> Self {
        Self {
            pos: Vec2::new(y[0], y[1]),
            vel: Vec2::new(y[2], y[3]),
            t,
        }
    }

    fn to_vector(self) -> State {
        [self.pos.x, self.pos.y, self.vel.x, self.vel.y]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("no mirror crossing before t = {t}")]
    NoImpact { t: f64 },
    #[error("trajectory came within {radius:e} of the Kepler center")]
    SingularityApproach { radius: f64 },
    #[error("motion is tangent to the mirror at ({}, {})", point.x, point.y)]
    Grazing { point: Point },
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Absolute and relative per-step tolerance.
    pub tol: f64,
    /// Give up after this much time without a crossing.
    pub max_time: f64,
    /// Target `|implicit|` at the refined impact.
    pub event_residual: f64,
    /// Kepler radius counted as a collision.
    pub min_radius: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_time: 1e3,
            event_residual: 1e-11,
            min_radius: 1e-9,
        }
    }
}

/// The accepted steps of one flight arc.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DenseTrajectory {
    pub steps: Vec<DenseStep>,
}

impl DenseTrajectory {
    /// State at time `t`, clamped to the covered interval.
    pub fn at(&self, t: f64) -> Option<PhaseState> {
        let i = self.steps.partition_point(|s| s.t1() < t).min(self.steps.len().checked_sub(1)?);
        let s = &self.steps[i];
        let theta = ((t - s.t0) / s.h).clamp(0.0, 1.0);
        Some(PhaseState::from_vector(&s.at(theta), t))
    }

    /// Positions at `n + 1` equally spaced times.
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let (Some(first), Some(last)) = (self.steps.first(), self.steps.last()) else {
            return Vec::new();
        };
        let (t0, t1) = (first.t0, last.t1());
        (0..=n.max(1))
            .filter_map(|i| self.at(t0 + (t1 - t0) * i as f64 / n.max(1) as f64).map(|s| s.pos))
            .collect()
    }
}

/// Result of one flight arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Impact {
    pub state: PhaseState,
    pub arc: DenseTrajectory,
    /// `|E_impact / E_start - 1|`.
    pub energy_drift: f64,
}

/// Sub-samples per step scanned for sign changes, so that an entry and exit
/// within one step are not missed.
const SCAN: usize = 8;

/// Integrate from `s` until the motion crosses `boundary` from the side it
/// starts on (or, starting on the mirror, the side it moves into) to the other.
///
/// The crossing is bracketed on the dense output, bisected to `1e-9` in the
/// step fraction and polished by Newton steps on the implicit.
pub fn integrate_until_boundary(
    system: &System,
    s: &PhaseState,
    boundary: &Conic,
    opts: &OracleOptions,
) -> Result<Impact, OracleError> {
    system.validate()?;
    let g = |y: &State| boundary.eval(Vec2::new(y[0], y[1]));
    let grad = boundary.gradient(s.pos);
    let g0 = boundary.eval(s.pos);
    let speed = s.vel.norm();
    let on_mirror = g0.abs() <= 1e-9 * (grad.norm() * s.pos.norm()).max(1.0);
    let side = if on_mirror {
        let along = grad.dot(s.vel);
        if along.abs() <= 1e-9 * grad.norm() * speed {
            return Err(OracleError::Grazing { point: s.pos });
        }
        along.signum()
    } else {
        g0.signum()
    };
    let stepper = Stepper {
        f: |y: &State| {
            let a = system.acceleration(Vec2::new(y[0], y[1]));
            [y[2], y[3], a.x, a.y]
        },
        atol: opts.tol,
        rtol: opts.tol,
        h_max: 0.05 * characteristic_time(system, s),
    };
    let e0 = system.energy(s);
    let mut arc = DenseTrajectory::default();
    let (mut t, mut y) = (s.t, s.to_vector());
    let mut h = 1e-3 * stepper.h_max;
    // left the mirror: the implicit has clearly taken the sign of the flight side
    let mut armed = !on_mirror;
    let arm_level = 1e-9 * (grad.norm() * s.pos.norm()).max(1.0);
    while t - s.t < opts.max_time {
        let step = stepper.step(t, &y, h).ok_or(OracleError::StepSizeUnderflow { t })?;
        let dense = step.dense;
        arc.steps.push(dense);
        if let System::Kepler { .. } = system {
            let r = Vec2::new(step.y[0], step.y[1]).norm();
            if r < opts.min_radius {
                return Err(OracleError::SingularityApproach { radius: r });
            }
        }
        let mut prev = 0.0;
        for k in 1..=SCAN {
            let theta = k as f64 / SCAN as f64;
            let v = g(&dense.at(theta)) * side;
            if !armed {
                if v > arm_level {
                    armed = true;
                }
            } else if v <= 0.0 {
                let state = refine(&dense, prev, theta, side, &g, boundary, opts);
                let n = boundary.gradient(state.pos);
                if n.dot(state.vel).abs() <= 1e-7 * n.norm() * state.vel.norm() {
                    return Err(OracleError::Grazing { point: state.pos });
                }
                let e1 = system.energy(&state);
                return Ok(Impact {
                    state,
                    arc,
                    energy_drift: (e1 / e0 - 1.0).abs(),
                });
            }
            prev = theta;
        }
        t = dense.t1();
        y = step.y;
        h = step.h_next;
    }
    if !armed {
        return Err(OracleError::Grazing { point: s.pos });
    }
    Err(OracleError::NoImpact { t })
}

fn characteristic_time(system: &System, s: &PhaseState) -> f64 {
    match *system {
        System::Hooke { m, k } => (m / k).sqrt(),
        System::Kepler { m, alpha } => {
            // time scale of the orbit at the current radius
            let r = s.pos.norm();
            (m * r * r * r / -alpha).sqrt()
        }
    }
}

fn refine(
    dense: &DenseStep,
    mut lo: f64,
    mut hi: f64,
    side: f64,
    g: &impl Fn(&State) -> f64,
    boundary: &Conic,
    opts: &OracleOptions,
) -> PhaseState {
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if g(&dense.at(mid)) * side > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut theta = hi;
    for _ in 0..8 {
        let y = dense.at(theta);
        let v = g(&y);
        if v.abs() <= opts.event_residual {
            break;
        }
        let rate = boundary.gradient(Vec2::new(y[0], y[1])).dot(Vec2::new(y[2], y[3])) * dense.h;
        if rate == 0.0 {
            break;
        }
        let next = theta - v / rate;
        if !(lo - 1e-6..=hi + 1e-6).contains(&next) {
            break;
        }
        theta = next;
    }
    PhaseState::from_vector(&dense.at(theta), dense.t0 + theta * dense.h)
}

/// Velocity mirrored in the tangent of `boundary` at `pos`.
pub fn reflect_velocity(s: &PhaseState, boundary: &Conic) -> PhaseState {
    let n = boundary.gradient(s.pos).normalized().unwrap_or(Vec2::ZERO);
    PhaseState {
        vel: s.vel - n * (2.0 * s.vel.dot(n)),
        ..*s
    }
}

/// Reflect at the mirror, then integrate to the next impact.
pub fn oracle_billiard_step(
    system: &System,
    s: &PhaseState,
    boundary: &Conic,
    opts: &OracleOptions,
) -> Result<(PhaseState, Impact), OracleError> {
    let reflected = reflect_velocity(s, boundary);
    let impact = integrate_until_boundary(system, &reflected, boundary, opts)?;
    Ok((reflected, impact))
}
