//! Kepler and Hooke mechanical billiards at conic-section mirrors.
//!
//! A particle moves under a central Kepler (`α/r`) or Hooke (`k r²/2`)
//! potential and reflects elastically at a conic mirror. For a Kepler center
//! at a focus of the mirror, the second foci of consecutive flight ellipses
//! stay on a circle around the other focus of the mirror; for a Hooke center
//! at the center of the mirror, the foci stay on a Cassini oval. The two
//! systems are related by the complex square map `z ↦ z²`.
//!
//! - [`geom2d`]: points, lines, conics, quartic roots and conic intersection.
//! - [`kepler`]: the billiard map at a focused conic, foci circle, envelopes,
//!   directrices and convergence of admissible orbits.
//! - [`hooke`]: the billiard map at a centered conic, Cassini ovals, envelopes
//!   and directrix envelopes.
//! - [`duality`]: transport of points, orbits, mirrors and trajectories by `z ↦ z²`.
//! - [`oracle`]: direct numerical integration of the equations of motion with
//!   boundary event detection, used to validate the geometric map.

pub mod duality;
pub mod geom2d;
pub mod hooke;
pub mod kepler;
pub mod oracle;

pub use geom2d::{Conic, ConicClass, Line, Point, Tolerance, Vec2};

/// Sense of motion along a flight ellipse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
    /// Radial motion along a line segment (zero angular momentum).
    DegenerateSegment,
}

impl Orientation {
    /// Orientation with the sign of the angular momentum `p × v`.
    pub fn from_angular_momentum(l: f64) -> Self {
        if l > 0.0 {
            Orientation::Counterclockwise
        } else if l < 0.0 {
            Orientation::Clockwise
        } else {
            Orientation::DegenerateSegment
        }
    }

    /// `+1` for counterclockwise, `-1` for clockwise, `0` for segments.
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Counterclockwise => 1.0,
            Orientation::Clockwise => -1.0,
            Orientation::DegenerateSegment => 0.0,
        }
    }
}
