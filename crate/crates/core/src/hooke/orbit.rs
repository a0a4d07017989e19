use super::HookeError;
use crate::geom2d::{sym2_eigen, Conic, Point, Vec2};
use crate::Orientation;

/// Mass and stiffness of the potential `k r²/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HookeParams {
    pub m: f64,
    pub k: f64,
}

impl HookeParams {
    pub fn new(m: f64, k: f64) -> Result<Self, HookeError> {
        if !(m.is_finite() && m > 0.0) {
            return Err(HookeError::InvalidParameter("mass must be positive"));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(HookeError::InvalidParameter("stiffness must be positive"));
        }
        Ok(Self { m, k })
    }

    #[inline]
    pub fn omega(&self) -> f64 {
        (self.k / self.m).sqrt()
    }
}

/// A centered flight ellipse with foci `±focus` and energy ratio `E/k`.
///
/// `focus` is kept in the closed right half-plane (`x > 0`, or `x = 0` and `y ≥ 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HookeOrbit {
    pub focus: Point,
    pub e_over_k: f64,
    pub orientation: Orientation,
}

fn canonical(f: Point) -> Point {
    if f.x > 0.0 || (f.x == 0.0 && f.y >= 0.0) {
        f
    } else {
        -f
    }
}

impl HookeOrbit {
    /// Orbit with semiminor axis squared `E/k - |F|²/2 ≥ 0`; zero means a segment,
    /// which must carry [`Orientation::DegenerateSegment`].
    pub fn new(focus: Point, e_over_k: f64, orientation: Orientation) -> Result<Self, HookeError> {
        if !(e_over_k.is_finite() && e_over_k > 0.0) || !focus.is_finite() {
            return Err(HookeError::InvalidParameter("orbit needs finite focus and E/k > 0"));
        }
        let b2 = e_over_k - 0.5 * focus.norm_sq();
        if b2 < -1e-12 * e_over_k {
            return Err(HookeError::InvalidParameter("focus too far out for the energy"));
        }
        let segment = b2 <= 1e-12 * e_over_k;
        if segment != (orientation == Orientation::DegenerateSegment) {
            return Err(HookeError::InvalidParameter("orientation does not match the eccentricity"));
        }
        Ok(Self {
            focus: canonical(focus),
            e_over_k,
            orientation,
        })
    }

    /// Squared semi-axes `(a_H², b_H²)`.
    pub fn semi_axes_sq(&self) -> (f64, f64) {
        let h = 0.5 * self.focus.norm_sq();
        (self.e_over_k + h, (self.e_over_k - h).max(0.0))
    }

    pub fn is_segment(&self) -> bool {
        self.orientation == Orientation::DegenerateSegment
    }

    /// `w = v/ω` at a point `p` of the orbit: `|w|² = 2E/k - |p|²`, along the
    /// tangent in the sense of the orientation. On a segment `w` points away from
    /// the center.
    pub fn scaled_velocity_at(&self, p: Point) -> Vec2 {
        let speed = (2.0 * self.e_over_k - p.norm_sq()).max(0.0).sqrt();
        let r = p.norm();
        match self.orientation {
            Orientation::DegenerateSegment => p * (speed / r),
            o => {
                let n = (p - self.focus).normalized().unwrap_or(p / r)
                    + (p + self.focus).normalized().unwrap_or(p / r);
                n.perp().normalized().unwrap_or_else(|| p.perp() / r) * (speed * o.sign())
            }
        }
    }
}

/// Orbit through `u` with scaled velocity `w = v/ω`, keeping the given `E/k`.
pub(crate) fn orbit_from_uw(u: Point, w: Vec2, e_over_k: f64) -> Result<HookeOrbit, HookeError> {
    let mxx = u.x * u.x + w.x * w.x;
    let mxy = u.x * u.y + w.x * w.y;
    let myy = u.y * u.y + w.y * w.y;
    let (theta, l1, l2) = sym2_eigen(mxx, mxy, myy);
    let f2 = (l1 - l2).max(0.0);
    let dir = Vec2::from_angle(theta);
    if e_over_k - 0.5 * f2 <= 1e-12 * e_over_k {
        return HookeOrbit::new(dir * (2.0 * e_over_k).sqrt(), e_over_k, Orientation::DegenerateSegment);
    }
    let orientation = match Orientation::from_angular_momentum(u.cross(w)) {
        Orientation::DegenerateSegment => Orientation::Counterclockwise,
        o => o,
    };
    let focus = dir * f2.sqrt();
    HookeOrbit::new(focus, e_over_k, orientation)
}

/// Flight orbit of the state `(pos, vel)`.
pub fn orbit_from_state_h(pos: Point, vel: Vec2, params: &HookeParams) -> Result<HookeOrbit, HookeError> {
    if pos.norm_sq() == 0.0 && vel.norm_sq() == 0.0 {
        return Err(HookeError::ZeroState);
    }
    let w = vel / params.omega();
    let e_over_k = 0.5 * (pos.norm_sq() + w.norm_sq());
    orbit_from_uw(pos, w, e_over_k)
}

/// `a_H = √(|F|²/2 + E/k)`.
pub fn hooke_semimajor(o: &HookeOrbit) -> f64 {
    (0.5 * o.focus.norm_sq() + o.e_over_k).sqrt()
}

/// `(x² + y² - 2E/k)² - |z - F|²·|z + F|²`: zero on the orbit, positive
/// inside, negative outside.
pub fn orbit_implicit_h(o: &HookeOrbit) -> impl Fn(Point) -> f64 {
    let f = o.focus;
    let two_e = 2.0 * o.e_over_k;
    move |p: Point| {
        let lhs = p.norm_sq() - two_e;
        lhs * lhs - (p - f).norm_sq() * (p + f).norm_sq()
    }
}

/// The orbit as a conic, negative inside. The quartic terms of
/// [`orbit_implicit_h`] cancel, leaving
/// `(2E/k + |F|²)(2r² + |F|² - 2E/k) - 4(F·z)²`.
pub fn orbit_conic_h(o: &HookeOrbit) -> Result<Conic, HookeError> {
    let (fx, fy) = (o.focus.x, o.focus.y);
    let f2 = o.focus.norm_sq();
    let g = 2.0 * o.e_over_k + f2;
    Ok(Conic::new([
        2.0 * g - 4.0 * fx * fx,
        -8.0 * fx * fy,
        2.0 * g - 4.0 * fy * fy,
        0.0,
        0.0,
        g * (f2 - 2.0 * o.e_over_k),
    ])?)
}
