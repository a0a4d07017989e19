use super::cassini::{cassini_residual, CassiniOval};
use super::orbit::{hooke_semimajor, orbit_conic_h, orbit_from_uw};
use super::{HookeBoundary, HookeError, HookeOrbit};
use crate::geom2d::{conic_conic_intersections_with, GeomError, Point};
use crate::Orientation;

/// Two intersections closer than this count as one tangential contact.
const GRAZING_GAP: f64 = 1e-7;
/// Distance within which the current point is recognised among the intersections.
const MATCH_TOL: f64 = 1e-6;
/// `|n_orbit × n_mirror|` below which a crossing counts as tangential.
const GRAZING_SINE: f64 = 1e-7;

/// A flight orbit leaving the mirror at `point`; `index` counts reflections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HookeState {
    pub orbit: HookeOrbit,
    pub point: Point,
    pub index: usize,
}

impl HookeState {
    /// Start on the orbit `(focus, E/k)` at its `which`-th intersection with
    /// the mirror (sorted by `x`, then `y`), leaving into the flight side.
    pub fn from_focus(
        focus: Point,
        e_over_k: f64,
        boundary: &HookeBoundary,
        which: usize,
    ) -> Result<Self, HookeError> {
        let probe = probe_orbit(focus, e_over_k)?;
        let pts = conic_conic_intersections_with(&orbit_conic_h(&probe)?, boundary.implicit(), &boundary.tol)?;
        let point = *pts.get(which).ok_or(HookeError::NoIntersection)?;
        Self::at_point(focus, e_over_k, point, boundary)
    }

    /// Start at a given mirror point, leaving into the flight side.
    pub fn at_point(focus: Point, e_over_k: f64, point: Point, boundary: &HookeBoundary) -> Result<Self, HookeError> {
        let orientation = outgoing_orientation_h(focus, e_over_k, point, boundary)?;
        Ok(Self {
            orbit: HookeOrbit::new(focus, e_over_k, orientation)?,
            point,
            index: 0,
        })
    }
}

fn probe_orbit(focus: Point, e_over_k: f64) -> Result<HookeOrbit, HookeError> {
    HookeOrbit::new(focus, e_over_k, Orientation::Counterclockwise)
        .or_else(|_| HookeOrbit::new(focus, e_over_k, Orientation::DegenerateSegment))
}

/// Invariants measured at one state of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HookeStepReport {
    pub index: usize,
    /// Residual of `F_i` on the oval through `F_0`, divided by `R_H⁴`.
    pub cassini_residual: f64,
    pub a_h: f64,
    pub e_over_k: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HookeTrajectory {
    pub states: Vec<HookeState>,
    pub reports: Vec<HookeStepReport>,
    /// The oval through the first focus, `None` for an empty trajectory.
    pub oval: Option<CassiniOval>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bounce {index}: {source}")]
pub struct HookeTrajectoryError {
    pub index: usize,
    pub source: HookeError,
    /// States computed before the failure.
    pub partial: HookeTrajectory,
}

/// Orientation for the orbit `(focus, E/k)` whose motion leaves the mirror at
/// `point` into the flight side.
pub fn outgoing_orientation_h(
    focus: Point,
    e_over_k: f64,
    point: Point,
    boundary: &HookeBoundary,
) -> Result<Orientation, HookeError> {
    let probe = probe_orbit(focus, e_over_k)?;
    if probe.is_segment() {
        return Ok(Orientation::DegenerateSegment);
    }
    let g = boundary.implicit().gradient(point);
    let t = probe.scaled_velocity_at(point);
    let along = g.dot(t);
    if along.abs() <= 1e-9 * g.norm() * t.norm() {
        return Err(HookeError::GrazingOrbit { point });
    }
    Ok(if along.signum() == boundary.flight_side_sign() {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    })
}

/// First crossing of the mirror after leaving `s.point`.
///
/// Orbit and mirror are both centered, so they meet in up to two antipodal
/// pairs. With `z(τ) = u cos τ + w sin τ`, `u = P`, `w = v/ω`, the next point is
/// the intersection with the smallest phase `τ > 0`. A segment returns to `P`.
pub fn next_reflection_point_h(s: &HookeState, boundary: &HookeBoundary) -> Result<Point, HookeError> {
    let o = &s.orbit;
    if o.is_segment() {
        return Ok(s.point);
    }
    let pts = conic_conic_intersections_with(&orbit_conic_h(o)?, boundary.implicit(), &boundary.tol)?;
    if pts.len() < 2 {
        return match pts.first() {
            Some(&point) => Err(HookeError::GrazingOrbit { point }),
            None => Err(HookeError::NoIntersection),
        };
    }
    let u = s.point;
    let w = o.scaled_velocity_at(u);
    let det = u.cross(w);
    let phase = |q: Point| {
        let c = q.cross(w) / det;
        let sn = u.cross(q) / det;
        sn.atan2(c).rem_euclid(std::f64::consts::TAU)
    };
    let mut others: Vec<(f64, Point)> = pts
        .iter()
        .filter(|q| q.distance(u) > MATCH_TOL)
        .map(|&q| (phase(q), q))
        .collect();
    others.sort_by(|x, y| x.0.total_cmp(&y.0));
    let &(_, q) = others.first().ok_or(HookeError::NoIntersection)?;
    if others.get(1).is_some_and(|(_, q2)| q2.distance(q) <= GRAZING_GAP) {
        return Err(HookeError::GrazingOrbit { point: q });
    }
    let n_orbit = orbit_conic_h(o)?.gradient(q).normalized();
    let n_mirror = boundary.implicit().gradient(q).normalized();
    match (n_orbit, n_mirror) {
        (Some(a), Some(b)) if a.cross(b).abs() > GRAZING_SINE => Ok(q),
        _ => Err(HookeError::GrazingOrbit { point: q }),
    }
}

/// Orbit after reflecting the velocity at `p` in the mirror tangent, with
/// `E/k` carried over unchanged.
pub fn reflect_orbit_h(o: &HookeOrbit, boundary: &HookeBoundary, p: Point) -> Result<HookeOrbit, HookeError> {
    let n = boundary
        .implicit()
        .gradient(p)
        .normalized()
        .ok_or(HookeError::Geom(GeomError::SingularPoint))?;
    let w_in = match o.orientation {
        // arriving at P on the way back towards the center
        Orientation::DegenerateSegment => -o.scaled_velocity_at(p),
        _ => o.scaled_velocity_at(p),
    };
    let w_out = w_in - n * (2.0 * w_in.dot(n));
    orbit_from_uw(p, w_out, o.e_over_k)
}

/// Reflect at `p`, then follow the new orbit to the next mirror point.
pub fn billiard_step_h(o: &HookeOrbit, boundary: &HookeBoundary, p: Point) -> Result<(HookeOrbit, Point), HookeError> {
    let orbit = reflect_orbit_h(o, boundary, p)?;
    let s = HookeState { orbit, point: p, index: 0 };
    let q = next_reflection_point_h(&s, boundary)?;
    Ok((orbit, q))
}

fn report(s: &HookeState, oval: &CassiniOval) -> HookeStepReport {
    HookeStepReport {
        index: s.index,
        cassini_residual: cassini_residual(s.orbit.focus, oval) / oval.r.powi(4),
        a_h: hooke_semimajor(&s.orbit),
        e_over_k: s.orbit.e_over_k,
    }
}

/// `n` reflections starting from `s0`.
pub fn hooke_trajectory(
    s0: HookeState,
    boundary: &HookeBoundary,
    n: usize,
) -> Result<HookeTrajectory, HookeTrajectoryError> {
    let oval = CassiniOval::through(boundary.c_h(), s0.orbit.focus);
    let mut traj = HookeTrajectory {
        states: Vec::with_capacity(n + 1),
        reports: Vec::with_capacity(n + 1),
        oval: oval.as_ref().ok().copied(),
    };
    let oval = match oval {
        Ok(v) => v,
        Err(source) => return Err(HookeTrajectoryError { index: 0, source, partial: traj }),
    };
    traj.reports.push(report(&s0, &oval));
    traj.states.push(s0);
    let mut s = s0;
    for _ in 0..n {
        let step = next_reflection_point_h(&s, boundary)
            .and_then(|p| reflect_orbit_h(&s.orbit, boundary, p).map(|o| (p, o)));
        let (point, orbit) = match step {
            Ok(v) => v,
            Err(source) => {
                return Err(HookeTrajectoryError {
                    index: s.index + 1,
                    source,
                    partial: traj,
                })
            }
        };
        s = HookeState {
            orbit,
            point,
            index: s.index + 1,
        };
        traj.reports.push(report(&s, &oval));
        traj.states.push(s);
    }
    Ok(traj)
}
