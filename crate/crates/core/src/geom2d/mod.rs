//! Planar primitives: vectors, lines, implicit conics, reflections, quartic
//! root finding and conic–conic intersection.

mod conic;
mod intersect;
mod line;
pub mod poly;
mod vec2;

pub use conic::{Conic, ConicClass, ConicShape};
pub(crate) use conic::sym2_eigen;
pub use intersect::{circle_circle_intersections, conic_conic_intersections, conic_conic_intersections_with};
pub use line::{reflect_across_line, Line};
pub use poly::{solve_quartic, Root};
pub use vec2::{Point, Vec2};

/// Numerical thresholds shared by the geometric routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Maximum implicit residual for a point to count as lying on a curve.
    pub membership: f64,
    /// Residual a polished root or intersection point must reach.
    pub residual: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            membership: 1e-8,
            residual: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("the zero polynomial has no isolated roots")]
    AllZero,
    #[error("non-finite input")]
    NonFinite,
    #[error("line normal has zero length")]
    ZeroNormal,
    #[error("semi-axis parameter must be nonzero")]
    ZeroSemiAxis,
    #[error("circles coincide")]
    CoincidentCircles,
    #[error("conics describe the same curve")]
    IdenticalConics,
    #[error("conics share a common component")]
    CommonComponent,
    #[error("conic of class {0:?} cannot be intersected")]
    DegenerateInput(ConicClass),
    #[error("point is not on the conic (residual {residual:e})")]
    NotOnConic { residual: f64 },
    #[error("conic gradient vanishes at the point")]
    SingularPoint,
}
