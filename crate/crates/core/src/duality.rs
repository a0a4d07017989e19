//! The complex square map `z ↦ z²` carries Hooke billiards at a centered conic
//! to Kepler billiards at a conic with a focus at the origin.
//!
//! A Hooke ellipse with foci `±F` and energy ratio `E/k` maps to the Kepler
//! ellipse with second focus `F²` and semimajor axis `a = E/k`; the mirror with
//! foci `(±c_H, 0)` and semimajor axis `a_H` maps to the mirror with foci `0`,
//! `(c_H², 0)` and `a_K = |a_H² - c_H²/2|`.

use crate::geom2d::{Point, Vec2};
use crate::hooke::{HookeBoundary, HookeError, HookeOrbit, HookeState, HookeTrajectory};
use crate::kepler::{BilliardState, KeplerBoundary, KeplerError, KeplerOrbit, Trajectory};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DualityError {
    #[error("segment orbits are not transported")]
    DegenerateOrbit,
    #[error("mirror image degenerates to a line")]
    DegenerateBoundary,
    #[error("image points do not fit a single focused conic (residual {residual:e})")]
    InconsistentImage { residual: f64 },
    #[error("trajectories have {hooke} and {kepler} states")]
    LengthMismatch { hooke: usize, kepler: usize },
    #[error(transparent)]
    Kepler(#[from] KeplerError),
    #[error(transparent)]
    Hooke(#[from] HookeError),
}

/// `(x² - y², 2xy)`.
#[inline]
pub fn square_map(z: Point) -> Point {
    Vec2::new(z.x * z.x - z.y * z.y, 2.0 * z.x * z.y)
}

/// Which preimage of [`square_map`] to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiftBranch {
    /// The principal root: `x > 0`, or `x = 0` and `y ≥ 0`.
    Right,
    /// Its negative.
    Left,
}

/// A square root of `q` on the requested branch.
pub fn sqrt_lift(q: Point, branch: LiftBranch) -> Point {
    let r = q.norm();
    let root = if r == 0.0 {
        Vec2::ZERO
    } else if q.x >= 0.0 {
        let x = (0.5 * (r + q.x)).sqrt();
        Vec2::new(x, q.y / (2.0 * x))
    } else {
        let y = (0.5 * (r - q.x)).sqrt().copysign(q.y);
        Vec2::new(q.y / (2.0 * y), y)
    };
    // q on the negative real axis with y = -0.0 would land in the left half
    let root = if root.x == 0.0 { Vec2::new(0.0, root.y.abs()) } else { root };
    match branch {
        LiftBranch::Right => root,
        LiftBranch::Left => -root,
    }
}

/// The square root of `q` closest to `near`.
pub fn nearest_lift(q: Point, near: Point) -> Point {
    let root = sqrt_lift(q, LiftBranch::Right);
    if root.distance(near) <= (-root).distance(near) {
        root
    } else {
        -root
    }
}

/// Image orbit: second focus `F²`, semimajor axis `E/k`, same sense of rotation.
pub fn hooke_to_kepler_orbit(o: &HookeOrbit) -> Result<KeplerOrbit, DualityError> {
    if o.is_segment() {
        return Err(DualityError::DegenerateOrbit);
    }
    Ok(KeplerOrbit::new(square_map(o.focus), o.e_over_k, o.orientation)?)
}

/// Preimage orbit: foci `±√F'`, `E/k = a`.
pub fn kepler_to_hooke_orbit(o: &KeplerOrbit) -> Result<HookeOrbit, DualityError> {
    if o.is_segment() {
        return Err(DualityError::DegenerateOrbit);
    }
    Ok(HookeOrbit::new(sqrt_lift(o.focus, LiftBranch::Right), o.a, o.orientation)?)
}

/// Image of the centered mirror, checked against the images of 64 of its points.
pub fn map_boundary(b: &HookeBoundary) -> Result<KeplerBoundary, DualityError> {
    let (a_h, c_h) = (b.a_h(), b.c_h());
    let c_k = 0.5 * c_h * c_h;
    let a_k = (a_h * a_h - c_k).abs();
    if a_k <= 1e-12 * a_h * a_h {
        return Err(DualityError::DegenerateBoundary);
    }
    let kb = KeplerBoundary::new(a_k, c_k)?;
    let sheets = b.implicit().sample(Vec2::ZERO, 3.0 * a_h.max(c_h), 64);
    let mut residual: f64 = 0.0;
    for z in sheets.iter().flatten() {
        let q = square_map(*z);
        let g = kb.implicit().gradient(q).norm().max(f64::MIN_POSITIVE);
        residual = residual.max(kb.implicit().eval(q).abs() / g / (1.0 + q.norm()));
    }
    if residual > 1e-6 {
        return Err(DualityError::InconsistentImage { residual });
    }
    Ok(kb)
}

/// The Kepler state corresponding to a Hooke state.
pub fn map_state(s: &HookeState) -> Result<BilliardState, DualityError> {
    Ok(BilliardState {
        orbit: hooke_to_kepler_orbit(&s.orbit)?,
        point: square_map(s.point),
        index: s.index,
    })
}

/// Deviations at one bounce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BounceDeviation {
    pub index: usize,
    /// `|P_K - P_H²|`.
    pub point: f64,
    /// `|F_K - F_H²|`.
    pub focus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub bounces: Vec<BounceDeviation>,
    pub max_point_deviation: f64,
    pub max_focus_deviation: f64,
    /// `|R - R_H²| / R` between the Kepler foci circle and the Hooke oval,
    /// both measured at the first state.
    pub radius_deviation: f64,
}

impl EquivalenceReport {
    pub fn within(&self, tol: f64) -> bool {
        self.max_point_deviation <= tol && self.max_focus_deviation <= tol
    }
}

/// Bounce-by-bounce comparison of a Hooke trajectory pushed through the square
/// map with a Kepler trajectory started from the image state.
///
/// Orientation is not compared.
pub fn trajectory_equivalence(
    hooke: &HookeTrajectory,
    kepler: &Trajectory,
    kepler_boundary: &KeplerBoundary,
) -> Result<EquivalenceReport, DualityError> {
    if hooke.states.len() != kepler.states.len() {
        return Err(DualityError::LengthMismatch {
            hooke: hooke.states.len(),
            kepler: kepler.states.len(),
        });
    }
    let bounces: Vec<BounceDeviation> = hooke
        .states
        .iter()
        .zip(&kepler.states)
        .map(|(h, k)| BounceDeviation {
            index: h.index,
            point: square_map(h.point).distance(k.point),
            focus: square_map(h.orbit.focus).distance(k.orbit.focus),
        })
        .collect();
    let radius_deviation = match (hooke.oval, kepler.states.first()) {
        (Some(oval), Some(k0)) => {
            let r = k0.orbit.focus.distance(kepler_boundary.second_focus());
            (r - oval.r * oval.r).abs() / r
        }
        _ => 0.0,
    };
    Ok(EquivalenceReport {
        max_point_deviation: bounces.iter().map(|b| b.point).fold(0.0, f64::max),
        max_focus_deviation: bounces.iter().map(|b| b.focus).fold(0.0, f64::max),
        bounces,
        radius_deviation,
    })
}
