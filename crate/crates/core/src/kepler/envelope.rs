use super::{BilliardState, KeplerBoundary, KeplerError, KeplerOrbit};
use crate::geom2d::{conic_conic_intersections, Conic, Line, Point, Vec2};

fn check_params(a: f64, r: f64, c: f64) -> Result<(), KeplerError> {
    if !(a.is_finite() && a > 0.0) {
        return Err(KeplerError::InvalidParameter("a must be positive"));
    }
    if !(r.is_finite() && r >= 0.0) {
        return Err(KeplerError::InvalidParameter("R must be nonnegative"));
    }
    if !(c.is_finite() && c >= 0.0) {
        return Err(KeplerError::InvalidParameter("c_K must be nonnegative"));
    }
    Ok(())
}

/// Confocal conic with foci `(0,0)`, `(2c, 0)` and semimajor parameter `s`.
fn confocal(s: f64, c: f64) -> Result<Conic, KeplerError> {
    let s2 = s * s;
    if s.abs() <= 1e-12 * c.max(1.0) || (s2 - c * c).abs() <= 1e-12 * s2.max(1.0) {
        return Err(KeplerError::DegenerateEnvelope);
    }
    Ok(Conic::axis_aligned(Vec2::new(c, 0.0), s2, s2 - c * c)?)
}

/// The envelopes `E_+`, `E_-` of all flight ellipses with semimajor axis `a`
/// and second focus on the circle of radius `R` about `F'`: the conics confocal
/// with the mirror with semimajor parameter `a ± R/2`.
pub fn envelope_conics(a: f64, r: f64, c: f64) -> Result<(Conic, Conic), KeplerError> {
    check_params(a, r, c)?;
    Ok((confocal(a + 0.5 * r, c)?, confocal(a - 0.5 * r, c)?))
}

/// Points where the orbit touches `E_+` and `E_-`.
///
/// `A` lies on the ray from `F'` through `F_i` beyond `F_i`, so the string
/// `F A F'` has length `2a + R`; `B` lies on the opposite ray and has focal
/// distances summing (or differing) to `2a - R`.
pub fn extremal_points(o: &KeplerOrbit, boundary: &KeplerBoundary) -> Result<(Point, Point), KeplerError> {
    if o.is_segment() {
        return Err(KeplerError::DegenerateOrbit);
    }
    let rel = o.focus - boundary.second_focus();
    let u = rel.normalized().ok_or(KeplerError::DegenerateOrbit)?;
    let f = o.focus;
    let num = 4.0 * o.a * o.a - f.norm_sq();
    let ta = num / (2.0 * f.dot(u) + 4.0 * o.a);
    let tb = num / (4.0 * o.a - 2.0 * f.dot(u));
    Ok((f + u * ta, f - u * tb))
}

/// Directrix paired with the Kepler center: `x F_x + y F_y + 2a² - |F_i|²/2 = 0`.
pub fn directrix(o: &KeplerOrbit) -> Result<Line, KeplerError> {
    let f2 = o.focus.norm_sq();
    if f2.sqrt() <= 1e-15 * o.a {
        return Err(KeplerError::CircularOrbit);
    }
    Ok(Line::new(o.focus, 2.0 * o.a * o.a - 0.5 * f2)?)
}

/// Conic enveloped by the directrices of all orbits with semimajor axis `a`
/// and second focus on the circle of radius `R` about `(2c, 0)`:
///
/// `x²(R² - 4c²) + R²y² - 2cx(4a² - 4c² + R²) + 4c²R² - (4a² - 4c² - R²)²/4 = 0`.
///
/// A parabola exactly when `R = 2c`.
pub fn directrix_envelope(a: f64, r: f64, c: f64) -> Result<Conic, KeplerError> {
    check_params(a, r, c)?;
    if r == 0.0 {
        return Err(KeplerError::ZeroRadius);
    }
    let (a2, r2, c2) = (a * a, r * r, c * c);
    let k = 4.0 * a2 - 4.0 * c2 - r2;
    let coeffs = [
        r2 - 4.0 * c2,
        0.0,
        r2,
        -2.0 * c * (4.0 * a2 - 4.0 * c2 + r2),
        0.0,
        4.0 * c2 * r2 - 0.25 * k * k,
    ];
    Ok(Conic::new(coeffs)?)
}

/// Foci of [`directrix_envelope`]: `(2c, 0)` and, unless `R = 2c`,
/// `(-8a²c / (4c² - R²), 0)`.
pub fn directrix_envelope_foci(a: f64, r: f64, c: f64) -> Vec<Point> {
    let mut out = vec![Vec2::new(2.0 * c, 0.0)];
    let den = 4.0 * c * c - r * r;
    if den.abs() > 1e-14 * (r * r).max(1.0) {
        out.push(Vec2::new(-8.0 * a * a * c / den, 0.0));
    }
    out
}

/// Flight ellipses through `F'` with `E_+` outside the mirror:
/// `R > 0` and `2a = R + 2c_K`.
pub fn is_admissible(a: f64, r: f64, c: f64, boundary: &KeplerBoundary) -> bool {
    if check_params(a, r, c).is_err() || r.is_nan() || r <= 0.0 {
        return false;
    }
    if (2.0 * a - (r + 2.0 * c)).abs() > 1e-10 * (2.0 * a).max(1.0) {
        return false;
    }
    let outer = match confocal(a + 0.5 * r, c) {
        Ok(e) => e,
        Err(_) => return false,
    };
    match conic_conic_intersections(&outer, boundary.implicit()) {
        Ok(pts) if pts.is_empty() => {}
        _ => return false,
    }
    // no crossing: E_+ is outside iff a mirror vertex is inside it
    let vertex = Vec2::new(boundary.c_k() + boundary.a_k(), 0.0);
    outer.eval(vertex) < 0.0
}

/// Angles at `F'` of a second focus and of the reflection point it is mirrored in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocalAngle {
    pub index: usize,
    /// Angle of `F_i - F'`.
    pub alpha: f64,
    /// Angle of the line `F' P_{i+1}` in which `F_i` is mirrored.
    pub lambda: f64,
}

/// Focal angles along an admissible trajectory, measured counterclockwise from
/// the positive `x` direction at `F'` into `[0, 2π)`. A line angle is only
/// defined modulo `π`; `λ_i` is the representative nearest to
/// `(α_i + α_{i+1})/2`, so that `α_{i+1} = 2λ_i - α_i` holds literally.
///
/// On clockwise flight orbits the `α_i` decrease to `0`; the mirror-image
/// counterclockwise motion increases them to `2π`.
pub fn focal_angles(
    trajectory: &[BilliardState],
    boundary: &KeplerBoundary,
) -> Result<Vec<FocalAngle>, KeplerError> {
    use std::f64::consts::PI;
    let fp = boundary.second_focus();
    let first = trajectory.first().ok_or(KeplerError::NotAdmissible)?;
    let r = first.orbit.focus.distance(fp);
    if !is_admissible(first.orbit.a, r, boundary.c_k(), boundary) {
        return Err(KeplerError::NotAdmissible);
    }
    let angle = |p: Point| (p - fp).angle().rem_euclid(std::f64::consts::TAU);
    Ok(trajectory
        .windows(2)
        .map(|w| {
            let alpha = angle(w[0].orbit.focus);
            let mid = 0.5 * (alpha + angle(w[1].orbit.focus));
            let mu = angle(w[1].point);
            FocalAngle {
                index: w[0].index,
                alpha,
                lambda: mu - PI * ((mu - mid) / PI).round(),
            }
        })
        .collect())
}
