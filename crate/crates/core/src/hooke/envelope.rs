use super::cassini::{branch_radius, polar_radius_derivative, CassiniOval, RadiusBranch};
use super::{HookeError, HookeOrbit};
use crate::geom2d::{Conic, Line, Point, Vec2};

/// Centered conic `x²/(½(c²+sR²) + E/k) + y²/(½(-c²+sR²) + E/k) = 1`, `s = ±1`.
fn envelope(oval: &CassiniOval, e_over_k: f64, s: f64) -> Result<Conic, HookeError> {
    let c2 = oval.c * oval.c;
    let r2 = oval.r * oval.r;
    let dx = 0.5 * (c2 + s * r2) + e_over_k;
    let dy = 0.5 * (-c2 + s * r2) + e_over_k;
    let scale = c2.max(r2).max(e_over_k);
    if dx.abs() <= 1e-12 * scale || dy.abs() <= 1e-12 * scale {
        return Err(HookeError::DegenerateEnvelope);
    }
    Ok(Conic::axis_aligned(Vec2::ZERO, dx, dy)?)
}

/// The envelopes `E_{H+}`, `E_{H-}` of flight ellipses with foci on the oval,
/// both confocal with the mirror.
pub fn hooke_envelopes(oval: &CassiniOval, e_over_k: f64) -> Result<(Conic, Conic), HookeError> {
    if !(e_over_k.is_finite() && e_over_k > 0.0) {
        return Err(HookeError::InvalidParameter("E/k must be positive"));
    }
    Ok((envelope(oval, e_over_k, 1.0)?, envelope(oval, e_over_k, -1.0)?))
}

/// Which focus of a Hooke orbit a directrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FocusSign {
    Plus,
    Minus,
}

/// Directrix `x F_x + y F_y + |F|²/2 + E/k = 0` of the focus `+F`; the one of
/// `-F` is its image under `z ↦ -z`.
pub fn hooke_directrix(o: &HookeOrbit, which: FocusSign) -> Result<Line, HookeError> {
    let f2 = o.focus.norm_sq();
    if f2.sqrt() <= 1e-15 * o.e_over_k.sqrt() {
        return Err(HookeError::CircularOrbit);
    }
    let line = Line::new(o.focus, 0.5 * f2 + o.e_over_k)?;
    Ok(match which {
        FocusSign::Plus => line,
        FocusSign::Minus => line.point_reflected(),
    })
}

/// Envelope of the directrices of orbits with focus `F(φ) = r(φ)(cos φ, sin φ)`
/// on one branch of the oval:
///
/// `x = -μ ∂F_y - F_x`, `y = μ ∂F_x - F_y`, `μ = E/(k|F|²) - 1/2`.
///
/// Grid angles where the branch has no real radius are skipped.
pub fn hooke_directrix_envelope(
    oval: &CassiniOval,
    e_over_k: f64,
    branch: RadiusBranch,
    phis: &[f64],
) -> Result<Vec<Point>, HookeError> {
    let pts: Vec<Point> = phis
        .iter()
        .filter_map(|&phi| {
            let r = branch_radius(phi, oval, branch)?;
            if r == 0.0 {
                return None;
            }
            let dr = polar_radius_derivative(phi, oval, branch)?;
            let u = Vec2::from_angle(phi);
            let f = u * r;
            let df = u * dr + u.perp() * r;
            let mu = e_over_k / (r * r) - 0.5;
            Some(Vec2::new(-mu * df.y - f.x, mu * df.x - f.y))
        })
        .collect();
    if pts.is_empty() {
        Err(HookeError::EmptyBranch)
    } else {
        Ok(pts)
    }
}

/// Radius `E/(k R_H) + R_H/2` of the circle enveloped by the directrices when
/// `c_H = 0`: every focus is at distance `R_H`, every directrix at this
/// distance from the center.
pub fn directrix_envelope_circle_radius(oval: &CassiniOval, e_over_k: f64) -> f64 {
    e_over_k / oval.r + 0.5 * oval.r
}

/// `(2E/k - c_H²)² = R_H⁴` with `2E/k > c_H²`: the flight ellipses pass through
/// both mirror foci.
pub fn is_admissible_h(oval: &CassiniOval, e_over_k: f64) -> bool {
    let c2 = oval.c * oval.c;
    let lhs = 2.0 * e_over_k - c2;
    let r4 = oval.r.powi(4);
    lhs > 0.0 && (lhs * lhs - r4).abs() <= 1e-10 * r4.max(lhs * lhs)
}
