//! Hooke billiards at a centered conic: the center of the harmonic force sits
//! at the center of the mirror, whose foci are `(±c_H, 0)`.
//!
//! Flight orbits are centered ellipses with foci `±F`; the energy fixes
//! `E/k`, while the semimajor axis `a_H = √(|F|²/2 + E/k)` varies from arc to
//! arc. Along a trajectory the foci stay on a Cassini oval.

mod billiard;
mod cassini;
mod envelope;
mod orbit;

pub use billiard::{
    billiard_step_h, hooke_trajectory, next_reflection_point_h, outgoing_orientation_h, reflect_orbit_h,
    HookeState, HookeStepReport, HookeTrajectory, HookeTrajectoryError,
};
pub use cassini::{cassini_from_kepler, cassini_polar_radii, cassini_residual, polar_radius_derivative, CassiniOval, RadiusBranch};
pub use envelope::{
    directrix_envelope_circle_radius, hooke_directrix, hooke_directrix_envelope, hooke_envelopes, is_admissible_h,
    FocusSign,
};
pub use orbit::{hooke_semimajor, orbit_conic_h, orbit_from_state_h, orbit_implicit_h, HookeOrbit, HookeParams};

use crate::geom2d::{Conic, GeomError, Point, Tolerance, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HookeError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("position and velocity are both zero")]
    ZeroState,
    #[error("orbit touches the mirror tangentially at ({}, {})", point.x, point.y)]
    GrazingOrbit { point: Point },
    #[error("orbit does not meet the mirror")]
    NoIntersection,
    #[error("envelope denominator vanishes")]
    DegenerateEnvelope,
    #[error("circular orbit has no directrix")]
    CircularOrbit,
    #[error("no real radius on the requested branch")]
    EmptyBranch,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// The mirror `x²/a_H² + y²/(a_H² - c_H²) = 1` with foci `(±c_H, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HookeBoundary {
    a: f64,
    c: f64,
    implicit: Conic,
    pub tol: Tolerance,
}

impl HookeBoundary {
    pub fn new(a_h: f64, c_h: f64) -> Result<Self, HookeError> {
        if !(a_h.is_finite() && a_h > 0.0) {
            return Err(HookeError::InvalidParameter("a_H must be positive"));
        }
        if !(c_h.is_finite() && c_h >= 0.0) {
            return Err(HookeError::InvalidParameter("c_H must be nonnegative"));
        }
        if (a_h - c_h).abs() <= 1e-12 * a_h {
            return Err(HookeError::InvalidParameter("c_H equals a_H"));
        }
        let implicit = Conic::axis_aligned(Vec2::ZERO, a_h * a_h, a_h * a_h - c_h * c_h)?;
        Ok(Self {
            a: a_h,
            c: c_h,
            implicit,
            tol: Tolerance::default(),
        })
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    #[inline]
    pub fn a_h(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn c_h(&self) -> f64 {
        self.c
    }

    pub fn foci(&self) -> [Point; 2] {
        [Vec2::new(self.c, 0.0), Vec2::new(-self.c, 0.0)]
    }

    #[inline]
    pub fn implicit(&self) -> &Conic {
        &self.implicit
    }

    /// Sign of the implicit on the flight side, the side not containing the center.
    pub fn flight_side_sign(&self) -> f64 {
        -self.implicit.eval(Vec2::ZERO).signum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_form() {
        let b = HookeBoundary::new(1.5, 1.0).unwrap();
        assert!(b.implicit().eval(Vec2::new(1.5, 0.0)).abs() < 1e-15);
        let top = Vec2::new(0.0, (1.25f64).sqrt());
        assert!(b.implicit().eval(top).abs() < 1e-15);
        assert!((top.distance(b.foci()[0]) + top.distance(b.foci()[1]) - 3.0).abs() < 1e-15);
        assert!(HookeBoundary::new(1.0, 1.0).is_err());
    }
}
