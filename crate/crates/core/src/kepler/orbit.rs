use super::{KeplerBoundary, KeplerError};
use crate::geom2d::{Conic, Point, Vec2};
use crate::Orientation;

/// Mass and coupling of the attractive potential `α/r`, `α < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerParams {
    pub m: f64,
    pub alpha: f64,
}

impl KeplerParams {
    pub fn new(m: f64, alpha: f64) -> Result<Self, KeplerError> {
        if !(m.is_finite() && m > 0.0) {
            return Err(KeplerError::InvalidParameter("mass must be positive"));
        }
        if !(alpha.is_finite() && alpha < 0.0) {
            return Err(KeplerError::InvalidParameter("alpha must be negative"));
        }
        Ok(Self { m, alpha })
    }

    /// Energy of an orbit with semimajor axis `a`.
    #[inline]
    pub fn energy_for(&self, a: f64) -> f64 {
        self.alpha / (2.0 * a)
    }

    /// Semimajor axis of an orbit with energy `e < 0`.
    #[inline]
    pub fn semimajor_for(&self, e: f64) -> f64 {
        self.alpha / (2.0 * e)
    }
}

/// A Kepler flight ellipse with foci at the origin and at `focus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerOrbit {
    pub focus: Point,
    pub a: f64,
    pub orientation: Orientation,
}

/// Relative slack on `|F_i| = 2a` for segment orbits.
const SEGMENT_EPS: f64 = 1e-12;

impl KeplerOrbit {
    /// Elliptic orbit; `|focus|` must not exceed `2a`. Orbits with `|focus| = 2a`
    /// must carry [`Orientation::DegenerateSegment`] and vice versa.
    pub fn new(focus: Point, a: f64, orientation: Orientation) -> Result<Self, KeplerError> {
        if !(a.is_finite() && a > 0.0) || !focus.is_finite() {
            return Err(KeplerError::InvalidParameter("orbit needs finite focus and a > 0"));
        }
        let gap = 2.0 * a - focus.norm();
        if gap < -SEGMENT_EPS * 2.0 * a {
            return Err(KeplerError::NonEllipticEnergy { energy: f64::NAN });
        }
        let segment = gap <= SEGMENT_EPS * 2.0 * a;
        if segment != (orientation == Orientation::DegenerateSegment) {
            return Err(KeplerError::InvalidParameter("orientation does not match the eccentricity"));
        }
        Ok(Self { focus, a, orientation })
    }

    /// Eccentricity `|F_i| / 2a`.
    pub fn eccentricity(&self) -> f64 {
        self.focus.norm() / (2.0 * self.a)
    }

    pub fn is_segment(&self) -> bool {
        self.orientation == Orientation::DegenerateSegment
    }

    /// Nearest point to the Kepler center.
    pub fn pericenter(&self) -> Point {
        match self.focus.normalized() {
            Some(u) => u * (-(self.a - 0.5 * self.focus.norm())),
            None => Vec2::new(self.a, 0.0),
        }
    }

    /// Farthest point from the Kepler center.
    pub fn apocenter(&self) -> Point {
        match self.focus.normalized() {
            Some(u) => u * (self.a + 0.5 * self.focus.norm()),
            None => Vec2::new(self.a, 0.0),
        }
    }

    /// Velocity of the particle at a point `p` of the orbit, from vis-viva and
    /// the orientation. On a segment the velocity points away from the center.
    pub fn velocity_at(&self, p: Point, params: &KeplerParams) -> Vec2 {
        let r = p.norm();
        let v2 = (-params.alpha / params.m) * (2.0 / r - 1.0 / self.a);
        let speed = v2.max(0.0).sqrt();
        match self.orientation {
            Orientation::DegenerateSegment => p * (speed / r),
            o => {
                // outward normal bisects the focal rays
                let n = p / r + (p - self.focus).normalized().unwrap_or(p / r);
                let t = n.perp().normalized().unwrap_or_else(|| p.perp() / r);
                t * (speed * o.sign())
            }
        }
    }

    /// First integrals of the motion on this orbit.
    pub fn physics(&self, params: &KeplerParams) -> KeplerPhysics {
        let energy = params.energy_for(self.a);
        let lrl = self.focus * (params.m * energy);
        let m = params.m;
        let l2 = (lrl.norm_sq() - m * m * params.alpha * params.alpha) / (2.0 * m * energy);
        KeplerPhysics {
            m,
            alpha: params.alpha,
            energy,
            angular_momentum: self.orientation.sign() * l2.max(0.0).sqrt(),
            lrl,
        }
    }
}

/// Energy, angular momentum and Laplace–Runge–Lenz vector of a Kepler state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerPhysics {
    pub m: f64,
    pub alpha: f64,
    pub energy: f64,
    pub angular_momentum: f64,
    pub lrl: Vec2,
}

impl KeplerPhysics {
    /// Relative defect of `|A|² = m²α² + 2mEL²`.
    pub fn lrl_identity_defect(&self) -> f64 {
        let rhs = self.m * self.m * self.alpha * self.alpha
            + 2.0 * self.m * self.energy * self.angular_momentum * self.angular_momentum;
        (self.lrl.norm_sq() - rhs).abs() / (self.m * self.alpha).powi(2)
    }
}

/// Flight orbit and first integrals of the state `(pos, vel)`.
pub fn orbit_from_state(
    pos: Point,
    vel: Vec2,
    params: &KeplerParams,
) -> Result<(KeplerOrbit, KeplerPhysics), KeplerError> {
    let r = pos.norm();
    if r == 0.0 {
        return Err(KeplerError::OriginCollision);
    }
    let m = params.m;
    let alpha = params.alpha;
    let energy = 0.5 * m * vel.norm_sq() + alpha / r;
    if energy.is_nan() || energy >= 0.0 {
        return Err(KeplerError::NonEllipticEnergy { energy });
    }
    let p = vel * m;
    let mut l = m * pos.cross(vel);
    if l.abs() <= 1e-13 * m * r * vel.norm() {
        l = 0.0;
    }
    let lrl = Vec2::new(p.y * l + m * alpha * pos.x / r, -p.x * l + m * alpha * pos.y / r);
    let a = params.semimajor_for(energy);
    let orientation = Orientation::from_angular_momentum(l);
    let mut focus = lrl / (m * energy);
    if orientation == Orientation::DegenerateSegment {
        focus = pos * (2.0 * a / r);
    }
    let orbit = KeplerOrbit::new(focus, a, orientation)?;
    Ok((
        orbit,
        KeplerPhysics {
            m,
            alpha,
            energy,
            angular_momentum: l,
            lrl,
        },
    ))
}

/// `K(x, y) = 16a²(x² + y²) - (|F_i|² - 4a² - 2x F_x - 2y F_y)²`, negative inside the orbit.
pub fn orbit_implicit(o: &KeplerOrbit) -> Result<Conic, KeplerError> {
    if o.is_segment() {
        return Err(KeplerError::DegenerateOrbit);
    }
    let (fx, fy) = (o.focus.x, o.focus.y);
    let a2 = 16.0 * o.a * o.a;
    let s = o.focus.norm_sq() - 4.0 * o.a * o.a;
    Ok(Conic::new([
        a2 - 4.0 * fx * fx,
        -8.0 * fx * fy,
        a2 - 4.0 * fy * fy,
        4.0 * s * fx,
        4.0 * s * fy,
        -s * s,
    ])?)
}

/// `D = L² - 2c_K A₁`, conserved along the billiard.
pub fn gallavotti_jauslin_d(phys: &KeplerPhysics, boundary: &KeplerBoundary) -> f64 {
    phys.angular_momentum * phys.angular_momentum - 2.0 * boundary.c_k() * phys.lrl.x
}

/// Circle around the second mirror focus carrying all second foci.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FociCircle {
    pub center: Point,
    pub radius: f64,
}

impl FociCircle {
    pub fn residual(&self, p: Point) -> f64 {
        p.distance(self.center) - self.radius
    }
}

/// Foci circle from the integrals: `R² = 4c_K² + α²/E² + 2D/(mE)`.
pub fn foci_circle(phys: &KeplerPhysics, boundary: &KeplerBoundary) -> Result<FociCircle, KeplerError> {
    let c = boundary.c_k();
    let d = gallavotti_jauslin_d(phys, boundary);
    let base = 4.0 * c * c + (phys.alpha / phys.energy).powi(2);
    let radicand = base + 2.0 * d / (phys.m * phys.energy);
    if radicand < -1e-12 * base.max(1.0) {
        return Err(KeplerError::NegativeRadicand { value: radicand });
    }
    Ok(FociCircle {
        center: boundary.second_focus(),
        radius: radicand.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> KeplerParams {
        KeplerParams::new(1.0, -1.0).unwrap()
    }

    #[test]
    fn circular_state() {
        let (o, ph) = orbit_from_state(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), &unit()).unwrap();
        assert!((ph.energy + 0.5).abs() < 1e-15);
        assert!((ph.angular_momentum - 1.0).abs() < 1e-15);
        assert!(ph.lrl.norm() < 1e-15);
        assert!(o.focus.norm() < 1e-15);
        assert!((o.a - 1.0).abs() < 1e-15);
        assert_eq!(o.orientation, Orientation::Counterclockwise);
    }

    #[test]
    fn radial_state_is_a_segment() {
        let (o, ph) = orbit_from_state(Vec2::new(1.0, 0.0), Vec2::ZERO, &unit()).unwrap();
        assert_eq!(o.orientation, Orientation::DegenerateSegment);
        assert!((o.focus - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((o.a - 0.5).abs() < 1e-15);
        assert!((ph.lrl - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_equivariance() {
        let theta = 0.7;
        let pos = Vec2::new(1.2, -0.3);
        let vel = Vec2::new(0.2, 0.8);
        let (o1, _) = orbit_from_state(pos, vel, &unit()).unwrap();
        let (o2, _) = orbit_from_state(pos.rotate(theta), vel.rotate(theta), &unit()).unwrap();
        assert!((o1.focus.rotate(theta) - o2.focus).norm() < 1e-14);
        assert!((o1.a - o2.a).abs() < 1e-15);
    }

    #[test]
    fn unbound_and_collision_rejected() {
        assert!(matches!(
            orbit_from_state(Vec2::new(1.0, 0.0), Vec2::new(0.0, 2.0), &unit()),
            Err(KeplerError::NonEllipticEnergy { .. })
        ));
        assert_eq!(
            orbit_from_state(Vec2::ZERO, Vec2::new(0.0, 0.1), &unit()),
            Err(KeplerError::OriginCollision)
        );
    }

    #[test]
    fn implicit_vanishes_on_the_orbit() {
        let c = orbit_implicit(&KeplerOrbit::new(Vec2::ZERO, 1.0, Orientation::Clockwise).unwrap()).unwrap();
        assert!(c.same_locus(&Conic::circle(Vec2::ZERO, 1.0).unwrap(), 1e-15));
        let o = KeplerOrbit::new(Vec2::new(1.0, 0.0), 1.0, Orientation::Clockwise).unwrap();
        let k = orbit_implicit(&o).unwrap();
        assert!(k.eval(Vec2::new(1.5, 0.0)).abs() < 1e-15);
        assert!(k.eval(Vec2::new(-0.5, 0.0)).abs() < 1e-15);
        assert_eq!(o.apocenter(), Vec2::new(1.5, 0.0));
        assert_eq!(o.pericenter(), Vec2::new(-0.5, 0.0));
        assert!(k.eval(Vec2::ZERO) < 0.0);
    }

    #[test]
    fn velocity_reconstructs_the_orbit() {
        let p = unit();
        let o = KeplerOrbit::new(Vec2::new(0.4, 0.9), 1.3, Orientation::Clockwise).unwrap();
        let k = orbit_implicit(&o).unwrap();
        let pt = k.sample(Vec2::ZERO, 1.0, 50)[0][7];
        let (o2, ph) = orbit_from_state(pt, o.velocity_at(pt, &p), &p).unwrap();
        assert!((o2.focus - o.focus).norm() < 1e-12);
        assert!((o2.a - o.a).abs() < 1e-12);
        assert_eq!(o2.orientation, Orientation::Clockwise);
        assert!(ph.lrl_identity_defect() < 1e-12);
        let ph2 = o.physics(&p);
        assert!((ph2.angular_momentum - ph.angular_momentum).abs() < 1e-12);
    }

    #[test]
    fn d_and_foci_circle_spot_values() {
        let b = KeplerBoundary::new(2.0, 0.5).unwrap();
        let (_, ph) = orbit_from_state(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), &unit()).unwrap();
        assert!((gallavotti_jauslin_d(&ph, &b) - 1.0).abs() < 1e-15);
        let fc = foci_circle(&ph, &b).unwrap();
        assert!((fc.radius - 1.0).abs() < 1e-12);
        assert_eq!(fc.center, Vec2::new(1.0, 0.0));

        let b0 = KeplerBoundary::new(2.0, 0.0).unwrap();
        let o = KeplerOrbit::new(Vec2::new(0.3, -0.4), 1.0, Orientation::Counterclockwise).unwrap();
        let fc0 = foci_circle(&o.physics(&unit()), &b0).unwrap();
        assert!((fc0.radius - 0.5).abs() < 1e-12);

        let (_, seg) = orbit_from_state(Vec2::new(1.0, 0.0), Vec2::ZERO, &unit()).unwrap();
        assert_eq!(gallavotti_jauslin_d(&seg, &b0), 0.0);
        // segment with F_i = (2c_K + R₀, 0)
        let (_, seg2) = orbit_from_state(Vec2::new(1.6, 0.0), Vec2::ZERO, &unit()).unwrap();
        let fc2 = foci_circle(&seg2, &b).unwrap();
        assert!((fc2.radius - 0.6).abs() < 1e-12);
    }
}
