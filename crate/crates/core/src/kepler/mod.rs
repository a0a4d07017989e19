//! Kepler billiards at a focused conic: the Kepler center sits at one focus
//! `F = (0, 0)` of the mirror, the other focus is `F' = (2c_K, 0)`.
//!
//! Flight ellipses are described by their second focus `F_i` and the
//! semimajor axis `a`, which is fixed by the energy. Reflection at the mirror
//! rotates `F_i` about `F'`, so the second foci stay on a circle.

mod billiard;
mod envelope;
mod orbit;

pub use billiard::{
    billiard_trajectory, next_reflection_point, outgoing_orientation, reflect_orbit,
    reflect_orbit_two_circle, BilliardState, StepReport, Trajectory, TrajectoryError,
};
pub use envelope::{
    directrix, directrix_envelope, directrix_envelope_foci, envelope_conics, extremal_points,
    focal_angles, is_admissible, FocalAngle,
};
pub use orbit::{
    foci_circle, gallavotti_jauslin_d, orbit_from_state, orbit_implicit, FociCircle, KeplerOrbit,
    KeplerParams, KeplerPhysics,
};

use crate::geom2d::{Conic, GeomError, Point, Tolerance, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KeplerError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("energy {energy} does not give an elliptic orbit")]
    NonEllipticEnergy { energy: f64 },
    #[error("state sits on the Kepler center")]
    OriginCollision,
    #[error("orbit is a degenerate segment")]
    DegenerateOrbit,
    /// An elliptic flight orbit reflected into one indistinguishable from a
    /// collision segment; the motion through the center is not regularized.
    #[error("flight orbit collapsed onto a collision segment")]
    CollisionLimit,
    #[error("foci-circle radicand {value:e} is negative")]
    NegativeRadicand { value: f64 },
    #[error("orbit touches the mirror tangentially at ({}, {})", point.x, point.y)]
    GrazingOrbit { point: Point },
    #[error("orbit does not meet the mirror")]
    NoIntersection,
    #[error("current point matches none of the {count} intersections")]
    Ambiguous { count: usize },
    #[error("reflection point coincides with the second mirror focus")]
    DegenerateLine,
    #[error("envelope degenerates to a segment or rays")]
    DegenerateEnvelope,
    #[error("circular orbit has no directrix")]
    CircularOrbit,
    #[error("foci-circle radius must be positive")]
    ZeroRadius,
    #[error("trajectory is not admissible")]
    NotAdmissible,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// The mirror `(x - c_K)²/a_K² + y²/(a_K² - c_K²) = 1` with foci `(0,0)` and `(2c_K, 0)`.
/// An ellipse for `c_K < a_K`, a hyperbola for `c_K > a_K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerBoundary {
    a: f64,
    c: f64,
    implicit: Conic,
    pub tol: Tolerance,
}

impl KeplerBoundary {
    pub fn new(a_k: f64, c_k: f64) -> Result<Self, KeplerError> {
        if !(a_k.is_finite() && a_k > 0.0) {
            return Err(KeplerError::InvalidParameter("a_K must be positive"));
        }
        if !(c_k.is_finite() && c_k >= 0.0) {
            return Err(KeplerError::InvalidParameter("c_K must be nonnegative"));
        }
        if (a_k - c_k).abs() <= 1e-12 * a_k {
            return Err(KeplerError::InvalidParameter("c_K equals a_K"));
        }
        let implicit = Conic::axis_aligned(Vec2::new(c_k, 0.0), a_k * a_k, a_k * a_k - c_k * c_k)?;
        Ok(Self {
            a: a_k,
            c: c_k,
            implicit,
            tol: Tolerance::default(),
        })
    }

    pub fn with_tolerance(mut self, tol: Tolerance) -> Self {
        self.tol = tol;
        self
    }

    #[inline]
    pub fn a_k(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn c_k(&self) -> f64 {
        self.c
    }

    pub fn is_ellipse(&self) -> bool {
        self.c < self.a
    }

    /// The mirror focus that is not the Kepler center.
    #[inline]
    pub fn second_focus(&self) -> Point {
        Vec2::new(2.0 * self.c, 0.0)
    }

    #[inline]
    pub fn implicit(&self) -> &Conic {
        &self.implicit
    }

    /// Sign of the implicit on the side of the mirror where flight arcs live,
    /// the side not containing the Kepler center.
    pub fn flight_side_sign(&self) -> f64 {
        -self.implicit.eval(Vec2::ZERO).signum()
    }
}
