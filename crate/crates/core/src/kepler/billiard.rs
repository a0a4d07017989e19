use super::orbit::orbit_implicit;
use super::{KeplerBoundary, KeplerError, KeplerOrbit};
use crate::geom2d::{circle_circle_intersections, conic_conic_intersections_with, reflect_across_line, Line, Point, Vec2};
use crate::Orientation;

/// Two intersections closer than this count as one tangential contact.
const GRAZING_GAP: f64 = 1e-7;
/// Distance within which the current point is recognised among the intersections.
const MATCH_TOL: f64 = 1e-6;

/// A flight orbit leaving the mirror at `point`; `index` counts reflections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilliardState {
    pub orbit: KeplerOrbit,
    pub point: Point,
    pub index: usize,
}

impl BilliardState {
    /// Start on the orbit `(focus, a)` at its `which`-th intersection with the
    /// mirror (intersections sorted by `x`, then `y`), leaving into the flight side.
    pub fn from_focus(
        focus: Point,
        a: f64,
        boundary: &KeplerBoundary,
        which: usize,
    ) -> Result<Self, KeplerError> {
        let probe = KeplerOrbit::new(focus, a, Orientation::Counterclockwise)?;
        let pts = conic_conic_intersections_with(&orbit_implicit(&probe)?, boundary.implicit(), &boundary.tol)?;
        let point = *pts.get(which).ok_or(KeplerError::NoIntersection)?;
        Self::at_point(focus, a, point, boundary)
    }

    /// Start at a given mirror point, leaving into the flight side.
    pub fn at_point(focus: Point, a: f64, point: Point, boundary: &KeplerBoundary) -> Result<Self, KeplerError> {
        let orientation = outgoing_orientation(focus, a, point, boundary)?;
        Ok(Self {
            orbit: KeplerOrbit::new(focus, a, orientation)?,
            point,
            index: 0,
        })
    }
}

/// Invariants measured at one state of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub index: usize,
    /// `|F' F_i|`.
    pub radius: f64,
    pub a: f64,
    /// `| |P F_{i-1}| - |P F_i| |` at the reflection producing this state, zero for the start.
    pub focal_distance_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub states: Vec<BilliardState>,
    pub reports: Vec<StepReport>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bounce {index}: {source}")]
pub struct TrajectoryError {
    pub index: usize,
    pub source: KeplerError,
    /// States computed before the failure.
    pub partial: Trajectory,
}

/// Unit tangent of the orbit at `p` in the direction of motion; for segments
/// the direction pointing away from the center.
fn motion_direction(o: &KeplerOrbit, p: Point) -> Vec2 {
    let r = p.norm();
    match o.orientation {
        Orientation::DegenerateSegment => p / r,
        s => {
            let n = p / r + (p - o.focus).normalized().unwrap_or(p / r);
            n.perp().normalized().unwrap_or_else(|| p.perp() / r) * s.sign()
        }
    }
}

/// Orientation for the orbit with second focus `focus` and semimajor axis `a`
/// whose motion leaves the mirror at `point` into the flight side.
pub fn outgoing_orientation(
    focus: Point,
    a: f64,
    point: Point,
    boundary: &KeplerBoundary,
) -> Result<Orientation, KeplerError> {
    if KeplerOrbit::new(focus, a, Orientation::DegenerateSegment).is_ok() {
        return Ok(Orientation::DegenerateSegment);
    }
    let probe = KeplerOrbit::new(focus, a, Orientation::Counterclockwise)?;
    let g = boundary.implicit().gradient(point);
    let t = motion_direction(&probe, point);
    let along = g.dot(t);
    if along.abs() <= 1e-9 * g.norm() {
        return Err(KeplerError::GrazingOrbit { point });
    }
    Ok(if along.signum() == boundary.flight_side_sign() {
        Orientation::Counterclockwise
    } else {
        Orientation::Clockwise
    })
}

/// The other intersection of the flight orbit with the mirror.
///
/// Segment orbits hit the mirror where their ray from the center crosses it.
pub fn next_reflection_point(s: &BilliardState, boundary: &KeplerBoundary) -> Result<Point, KeplerError> {
    let o = &s.orbit;
    if o.is_segment() {
        let u = o.focus / o.focus.norm();
        let (qa, qb, qc) = boundary.implicit().restrict_to_line(Vec2::ZERO, u);
        let disc = qb * qb - 4.0 * qa * qc;
        if disc < 0.0 || qa == 0.0 {
            return Err(KeplerError::NoIntersection);
        }
        let sq = disc.sqrt();
        let q = -0.5 * (qb + qb.signum() * sq);
        let mut ts: Vec<f64> = [q / qa, if q != 0.0 { qc / q } else { 0.0 }]
            .into_iter()
            .filter(|t| *t > 0.0 && *t <= 2.0 * o.a * (1.0 + 1e-12))
            .collect();
        ts.sort_by(f64::total_cmp);
        return ts.first().map(|t| u * *t).ok_or(KeplerError::NoIntersection);
    }
    let k = orbit_implicit(o)?;
    let pts = conic_conic_intersections_with(&k, boundary.implicit(), &boundary.tol)?;
    match pts.len() {
        0 => Err(KeplerError::NoIntersection),
        1 => Err(KeplerError::GrazingOrbit { point: pts[0] }),
        n => {
            if n == 2 && pts[0].distance(pts[1]) <= GRAZING_GAP {
                return Err(KeplerError::GrazingOrbit { point: pts[0] });
            }
            let (here, other): (Vec<Point>, Vec<Point>) =
                pts.iter().partition(|p| p.distance(s.point) <= MATCH_TOL);
            if here.len() == 1 && other.len() == 1 {
                Ok(other[0])
            } else {
                Err(KeplerError::Ambiguous { count: n })
            }
        }
    }
}

/// Reflected orbit at the mirror point `p`: `F_{i+1}` is the mirror image of
/// `F_i` in the line `F'P`. The orientation follows the reflected velocity.
pub fn reflect_orbit(o: &KeplerOrbit, boundary: &KeplerBoundary, p: Point) -> Result<KeplerOrbit, KeplerError> {
    let fp = boundary.second_focus();
    let dir = p - fp;
    if dir.norm() <= 1e-14 * (1.0 + fp.norm()) {
        return Err(KeplerError::DegenerateLine);
    }
    let through_origin = Line::through_with_direction(Vec2::ZERO, dir)?;
    let focus = fp + reflect_across_line(o.focus - fp, &through_origin);

    let n = boundary
        .implicit()
        .gradient(p)
        .normalized()
        .ok_or(KeplerError::Geom(crate::geom2d::GeomError::SingularPoint))?;
    let incoming = match o.orientation {
        Orientation::DegenerateSegment => -p / p.norm(),
        _ => motion_direction(o, p),
    };
    let outgoing = incoming - n * (2.0 * incoming.dot(n));
    let orientation = if 2.0 * o.a - focus.norm() <= 1e-12 * 2.0 * o.a {
        Orientation::DegenerateSegment
    } else {
        match Orientation::from_angular_momentum(p.cross(outgoing)) {
            Orientation::DegenerateSegment => Orientation::Counterclockwise,
            s => s,
        }
    };
    KeplerOrbit::new(focus, o.a, orientation)
}

/// Second focus after reflection at `p` by the two-circle construction: the
/// intersection, other than `F_i`, of the circle about the mirror image `F_P`
/// of the center in the tangent at `p` through `F_i`, and the circle about `p`
/// through `F_i`.
pub fn reflect_orbit_two_circle(
    o: &KeplerOrbit,
    boundary: &KeplerBoundary,
    p: Point,
) -> Result<Point, KeplerError> {
    let tangent = boundary.implicit().tangent_line_at(p, &boundary.tol)?;
    let f_p = reflect_across_line(Vec2::ZERO, &tangent);
    let pts = circle_circle_intersections(f_p, f_p.distance(o.focus), p, p.distance(o.focus))?;
    pts.into_iter()
        .max_by(|x, y| x.distance(o.focus).total_cmp(&y.distance(o.focus)))
        .ok_or(KeplerError::NoIntersection)
}

fn report(s: &BilliardState, boundary: &KeplerBoundary, defect: f64) -> StepReport {
    StepReport {
        index: s.index,
        radius: s.orbit.focus.distance(boundary.second_focus()),
        a: s.orbit.a,
        focal_distance_defect: defect,
    }
}

/// `n` reflections starting from `s0`. Stops with [`KeplerError::CollisionLimit`]
/// when an elliptic orbit reflects into a collision segment.
pub fn billiard_trajectory(
    s0: BilliardState,
    boundary: &KeplerBoundary,
    n: usize,
) -> Result<Trajectory, TrajectoryError> {
    let mut traj = Trajectory {
        states: Vec::with_capacity(n + 1),
        reports: Vec::with_capacity(n + 1),
    };
    traj.reports.push(report(&s0, boundary, 0.0));
    traj.states.push(s0);
    let mut s = s0;
    for _ in 0..n {
        let step = next_reflection_point(&s, boundary)
            .and_then(|p| reflect_orbit(&s.orbit, boundary, p).map(|o| (p, o)));
        let (p, orbit) = match step {
            Ok((_, o)) if o.is_segment() && !s.orbit.is_segment() => {
                return Err(TrajectoryError {
                    index: s.index + 1,
                    source: KeplerError::CollisionLimit,
                    partial: traj,
                })
            }
            Ok(v) => v,
            Err(source) => {
                return Err(TrajectoryError {
                    index: s.index + 1,
                    source,
                    partial: traj,
                })
            }
        };
        let defect = (p.distance(s.orbit.focus) - p.distance(orbit.focus)).abs();
        s = BilliardState {
            orbit,
            point: p,
            index: s.index + 1,
        };
        traj.reports.push(report(&s, boundary, defect));
        traj.states.push(s);
    }
    Ok(traj)
}
