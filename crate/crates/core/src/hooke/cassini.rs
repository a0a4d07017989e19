use super::HookeError;
use crate::geom2d::{Point, Vec2};

/// The Cassini oval `|z - c_H|·|z + c_H| = R_H²` with foci `(±c_H, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CassiniOval {
    pub c: f64,
    pub r: f64,
}

impl CassiniOval {
    pub fn new(c: f64, r: f64) -> Result<Self, HookeError> {
        if !(c.is_finite() && c >= 0.0) || !(r.is_finite() && r > 0.0) {
            return Err(HookeError::InvalidParameter("Cassini oval needs c_H ≥ 0 and R_H > 0"));
        }
        Ok(Self { c, r })
    }

    /// Oval with foci `(±c, 0)` through `p`.
    pub fn through(c: f64, p: Point) -> Result<Self, HookeError> {
        let prod = (p - Vec2::new(c, 0.0)).norm() * (p + Vec2::new(c, 0.0)).norm();
        Self::new(c, prod.sqrt())
    }

    /// `R_H / c_H`: two loops below one, a lemniscate at one, a single loop above.
    pub fn eccentricity(&self) -> f64 {
        if self.c == 0.0 {
            f64::INFINITY
        } else {
            self.r / self.c
        }
    }

    /// Points on the oval at `n` polar angles; for two-loop ovals both radii
    /// appear, so the result is a set of closed polylines.
    pub fn sample(&self, n: usize) -> Vec<Vec<Point>> {
        let n = n.max(8);
        if self.r > self.c {
            let mut pts: Vec<Point> = (0..n)
                .map(|i| {
                    let phi = std::f64::consts::TAU * i as f64 / n as f64;
                    Vec2::from_angle(phi) * cassini_polar_radii(phi, self)[0]
                })
                .collect();
            pts.push(pts[0]);
            return vec![pts];
        }
        // each loop spans |φ| ≤ φ_max around its focus, cos 2φ_max = √(1 - (R/c)⁴)
        let phi_max = 0.5 * (1.0 - (self.r / self.c).powi(4)).max(0.0).sqrt().acos() * (1.0 - 1e-12);
        [0.0, std::f64::consts::PI]
            .iter()
            .map(|&base| {
                let half = n / 2;
                let mut outer = Vec::with_capacity(n + 1);
                let mut inner = Vec::with_capacity(half + 1);
                for i in 0..=half {
                    // cosine spacing concentrates samples near the loop tips
                    let s = -(std::f64::consts::PI * i as f64 / half as f64).cos();
                    let phi = base + phi_max * s;
                    let radii = cassini_polar_radii(phi, self);
                    if let Some(&r_out) = radii.first() {
                        outer.push(Vec2::from_angle(phi) * r_out);
                        inner.push(Vec2::from_angle(phi) * radii.get(1).copied().unwrap_or(r_out));
                    }
                }
                inner.reverse();
                outer.extend(inner);
                if let Some(&first) = outer.first() {
                    outer.push(first);
                }
                outer
            })
            .collect()
    }
}

/// `(c_H, R_H) = (√(2c_K), √R)`: the oval pulled back from a Kepler foci circle.
pub fn cassini_from_kepler(c_k: f64, r: f64) -> Result<CassiniOval, HookeError> {
    CassiniOval::new((2.0 * c_k).sqrt(), r.sqrt())
}

/// `[(x - c)² + y²]·[(x + c)² + y²] - R_H⁴`.
pub fn cassini_residual(p: Point, oval: &CassiniOval) -> f64 {
    let c = Vec2::new(oval.c, 0.0);
    (p - c).norm_sq() * (p + c).norm_sq() - oval.r.powi(4)
}

/// Which of the two polar radii `r_±(φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RadiusBranch {
    Outer,
    Inner,
}

/// Squared radii `(r_+², r_-²)` at angle `φ`, `None` when the discriminant is negative.
fn radii_sq(phi: f64, oval: &CassiniOval) -> Option<(f64, f64)> {
    let c2 = oval.c * oval.c;
    let c4 = c2 * c2;
    let cos2 = (2.0 * phi).cos();
    let disc = c4 * cos2 * cos2 + oval.r.powi(4) - c4;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // r_+² r_-² = c⁴ - R⁴; evaluate the cancellation-free one first
    let prod = c4 - oval.r.powi(4);
    if cos2 >= 0.0 {
        let plus = c2 * cos2 + sq;
        let minus = if plus > 0.0 { prod / plus } else { 0.0 };
        Some((plus, minus))
    } else {
        let minus = c2 * cos2 - sq;
        let plus = if minus < 0.0 { prod / minus } else { 0.0 };
        Some((plus, minus))
    }
}

/// Real nonnegative polar radii `r_±(φ) = √(c² cos 2φ ± √(c⁴ cos² 2φ + R⁴ - c⁴))`,
/// outer first.
pub fn cassini_polar_radii(phi: f64, oval: &CassiniOval) -> Vec<f64> {
    match radii_sq(phi, oval) {
        None => Vec::new(),
        Some((plus, minus)) => [plus, minus]
            .into_iter()
            .enumerate()
            .filter(|&(i, v)| v >= 0.0 && !(i == 1 && oval.r > oval.c))
            .map(|(_, v)| v.sqrt())
            .collect(),
    }
}

/// Radius on one branch, if real.
pub(crate) fn branch_radius(phi: f64, oval: &CassiniOval, branch: RadiusBranch) -> Option<f64> {
    let (plus, minus) = radii_sq(phi, oval)?;
    match branch {
        RadiusBranch::Outer if plus >= 0.0 => Some(plus.sqrt()),
        RadiusBranch::Inner if minus >= 0.0 && oval.r <= oval.c => Some(minus.sqrt()),
        _ => None,
    }
}

/// `∂φ r` on one branch. Closed form away from the branch endpoints; within a
/// guard band of the discriminant's zeros, or where the radius vanishes, a
/// central difference with step `1e-6·(1 + |φ|)`.
pub fn polar_radius_derivative(phi: f64, oval: &CassiniOval, branch: RadiusBranch) -> Option<f64> {
    let r = branch_radius(phi, oval, branch)?;
    let c2 = oval.c * oval.c;
    let c4 = c2 * c2;
    let (sin2, cos2) = (2.0 * phi).sin_cos();
    let disc = c4 * cos2 * cos2 + oval.r.powi(4) - c4;
    let scale = oval.r.powi(4).max(c4);
    if disc.sqrt() > 1e-6 * scale.sqrt() && r > 1e-6 * oval.r {
        let sign = match branch {
            RadiusBranch::Outer => 1.0,
            RadiusBranch::Inner => -1.0,
        };
        let d_r2 = -2.0 * c2 * sin2 - sign * 2.0 * c4 * cos2 * sin2 / disc.sqrt();
        return Some(d_r2 / (2.0 * r));
    }
    let h = 1e-6 * (1.0 + phi.abs());
    let fwd = branch_radius(phi + h, oval, branch);
    let back = branch_radius(phi - h, oval, branch);
    match (fwd, back) {
        (Some(f), Some(b)) => Some((f - b) / (2.0 * h)),
        (Some(f), None) => Some((f - r) / h),
        (None, Some(b)) => Some((r - b) / h),
        (None, None) => Some(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_kepler() {
        let o = cassini_from_kepler(0.5, 2f64.sqrt()).unwrap();
        assert!((o.c - 1.0).abs() < 1e-15);
        assert!((o.r - 2f64.powf(0.25)).abs() < 1e-15);
        let o = cassini_from_kepler(0.0, 2.0).unwrap();
        assert_eq!(o.c, 0.0);
        assert_eq!(o.eccentricity(), f64::INFINITY);
    }

    #[test]
    fn residual_spot_values() {
        let lem = CassiniOval::new(1.0, 1.0).unwrap();
        assert_eq!(cassini_residual(Vec2::ZERO, &lem), 0.0);
        let o = CassiniOval::new(1.0, 2f64.powf(0.25)).unwrap();
        assert!((cassini_residual(Vec2::ZERO, &o) + 1.0).abs() < 1e-15);
        let (c, r) = (0.7, 1.3);
        let o = CassiniOval::new(c, r).unwrap();
        let x = (c * c + r * r).sqrt();
        assert!(cassini_residual(Vec2::new(x, 0.0), &o).abs() < 1e-14);
    }

    #[test]
    fn polar_radius_spot_values() {
        let circle = CassiniOval::new(0.0, 1.7).unwrap();
        for phi in [0.0, 0.3, 2.0] {
            assert_eq!(cassini_polar_radii(phi, &circle), vec![1.7]);
        }
        let o = CassiniOval::new(1.0, 2f64.sqrt()).unwrap();
        let r = cassini_polar_radii(0.0, &o);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 3f64.sqrt()).abs() < 1e-15);
        let two_loops = CassiniOval::new(1.0, 0.9).unwrap();
        assert!(cassini_polar_radii(std::f64::consts::FRAC_PI_2, &two_loops).is_empty());
        let both = cassini_polar_radii(0.1, &two_loops);
        assert_eq!(both.len(), 2);
        for r in both {
            assert!(cassini_residual(Vec2::from_angle(0.1) * r, &two_loops).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let o = CassiniOval::new(1.0, 1.1).unwrap();
        let h = 1e-6;
        for phi in [0.1, 0.5, 1.2, 2.9] {
            let d = polar_radius_derivative(phi, &o, RadiusBranch::Outer).unwrap();
            let fd = (branch_radius(phi + h, &o, RadiusBranch::Outer).unwrap()
                - branch_radius(phi - h, &o, RadiusBranch::Outer).unwrap())
                / (2.0 * h);
            assert!((d - fd).abs() < 1e-6, "{phi}: {d} vs {fd}");
        }
    }

    #[test]
    fn samples_lie_on_the_oval() {
        for (c, r) in [(1.0, 0.95), (1.0, 1.1), (1.0, 2.0), (0.0, 1.0)] {
            let o = CassiniOval::new(c, r).unwrap();
            for poly in o.sample(200) {
                assert!(poly.len() > 10);
                for p in poly {
                    assert!(cassini_residual(p, &o).abs() < 1e-9, "{c} {r} {p:?}");
                }
            }
        }
    }
}
