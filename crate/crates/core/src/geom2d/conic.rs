use super::{GeomError, Line, Point, Tolerance, Vec2};

/// Relative threshold on the normalized invariants when classifying.
const CLASS_EPS: f64 = 1e-12;

/// Affine type of a real conic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConicClass {
    Ellipse,
    Hyperbola,
    Parabola,
    /// A pair of real lines (intersecting, parallel or coincident).
    DegenerateLines,
    /// A single real point.
    Point,
    /// No real points.
    Empty,
}

/// The conic `A x² + B xy + C y² + D x + E y + F = 0`.
///
/// Coefficients are stored scaled so that the largest magnitude is one. The
/// scale factor is positive, so the sign of [`Conic::eval`] is meaningful.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conic {
    coeffs: [f64; 6],
    class: ConicClass,
}

/// Metric description of a non-degenerate conic, used for sampling and foci.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConicShape {
    /// `((p-c)·u)²/s1 + ((p-c)·u⊥)²/s2 = 1` with `s1, s2` signed squared semi-axes
    /// and `u` at `axis_angle`.
    Central {
        center: Point,
        axis_angle: f64,
        s1: f64,
        s2: f64,
    },
    /// `p = vertex + axis·t²/(4f) + axis⊥·t`.
    Parabola {
        vertex: Point,
        axis: Vec2,
        focal_length: f64,
    },
}

/// Symmetric 2×2 eigen decomposition `[[a, h], [h, c]]`: returns
/// `(angle of the first eigenvector, λ1, λ2)` with `λ1 ≥ λ2`.
pub(crate) fn sym2_eigen(a: f64, h: f64, c: f64) -> (f64, f64, f64) {
    let theta = 0.5 * (2.0 * h).atan2(a - c);
    let mean = 0.5 * (a + c);
    let rad = (0.5 * (a - c)).hypot(h);
    (theta, mean + rad, mean - rad)
}

impl Conic {
    /// Builds a conic from `[A, B, C, D, E, F]`.
    pub fn new(coeffs: [f64; 6]) -> Result<Self, GeomError> {
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let scale = coeffs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Err(GeomError::AllZero);
        }
        let coeffs = coeffs.map(|v| v / scale);
        Ok(Self {
            coeffs,
            class: classify(&coeffs),
        })
    }

    /// Circle with center `c` and radius `r`.
    pub fn circle(c: Point, r: f64) -> Result<Self, GeomError> {
        Self::new([1.0, 0.0, 1.0, -2.0 * c.x, -2.0 * c.y, c.norm_sq() - r * r])
    }

    /// Central conic `((p-c)·u)²/s1 + ((p-c)·u⊥)²/s2 = 1` with `u` at angle `axis_angle`.
    /// Negative `s1` or `s2` gives a hyperbola.
    pub fn central(center: Point, axis_angle: f64, s1: f64, s2: f64) -> Result<Self, GeomError> {
        if s1 == 0.0 || s2 == 0.0 {
            return Err(GeomError::ZeroSemiAxis);
        }
        let u = Vec2::from_angle(axis_angle);
        let v = u.perp();
        let a = u.x * u.x / s1 + v.x * v.x / s2;
        let b = 2.0 * (u.x * u.y / s1 + v.x * v.y / s2);
        let c = u.y * u.y / s1 + v.y * v.y / s2;
        Self::new(translate_coeffs([a, b, c, 0.0, 0.0, -1.0], center))
    }

    /// Axis-aligned central conic `(x-x0)²/sx + (y-y0)²/sy = 1`.
    pub fn axis_aligned(center: Point, sx: f64, sy: f64) -> Result<Self, GeomError> {
        if sx == 0.0 || sy == 0.0 {
            return Err(GeomError::ZeroSemiAxis);
        }
        Self::new(translate_coeffs([1.0 / sx, 0.0, 1.0 / sy, 0.0, 0.0, -1.0], center))
    }

    /// Ellipse `|p - f1| + |p - f2| = 2a`.
    pub fn ellipse_from_foci(f1: Point, f2: Point, a: f64) -> Result<Self, GeomError> {
        let center = (f1 + f2) * 0.5;
        let half = (f2 - f1) * 0.5;
        let c2 = half.norm_sq();
        let angle = if c2 > 0.0 { half.angle() } else { 0.0 };
        Self::central(center, angle, a * a, a * a - c2)
    }

    #[inline]
    pub fn coefficients(&self) -> [f64; 6] {
        self.coeffs
    }

    #[inline]
    pub fn class(&self) -> ConicClass {
        self.class
    }

    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        let [a, b, c, d, e, f] = self.coeffs;
        let (x, y) = (p.x, p.y);
        (a * x + b * y + d) * x + (c * y + e) * y + f
    }

    #[inline]
    pub fn gradient(&self, p: Point) -> Vec2 {
        let [a, b, c, d, e, _] = self.coeffs;
        Vec2::new(2.0 * a * p.x + b * p.y + d, b * p.x + 2.0 * c * p.y + e)
    }

    /// Returns `(qa, qb, qc)` with `eval(p0 + t·dir) = qa t² + qb t + qc`.
    pub fn restrict_to_line(&self, p0: Point, dir: Vec2) -> (f64, f64, f64) {
        let [a, b, c, _, _, _] = self.coeffs;
        let qa = a * dir.x * dir.x + b * dir.x * dir.y + c * dir.y * dir.y;
        let qb = self.gradient(p0).dot(dir);
        (qa, qb, self.eval(p0))
    }

    /// Tangency defect of a line: the value of the restricted quadratic at its
    /// stationary point. Zero iff the line touches the conic (for `qa ≠ 0`).
    /// For lines along an asymptotic direction the restriction is linear and the
    /// defect is reported as infinite unless the line lies on the conic.
    pub fn line_contact_residual(&self, line: &Line) -> f64 {
        let p0 = line.closest_point_to_origin();
        let (qa, qb, qc) = self.restrict_to_line(p0, line.direction());
        if qa.abs() <= 1e-14 {
            return if qb.abs() <= 1e-14 { qc.abs() } else { f64::INFINITY };
        }
        (qc - qb * qb / (4.0 * qa)).abs()
    }

    /// Conic whose zero set is the image of this one under `p ↦ R(theta) p`.
    pub fn rotated(&self, theta: f64) -> Conic {
        // Q'(q) = Q(R(-theta) q)
        let (s, c) = (-theta).sin_cos();
        self.substituted([[c, -s], [s, c]], Vec2::ZERO)
    }

    /// Conic whose zero set is the image of this one under `p ↦ p + t`.
    pub fn translated(&self, t: Vec2) -> Conic {
        Self::new(translate_coeffs(self.coeffs, t)).expect("translation keeps a nonzero conic")
    }

    /// `Q'(q) = Q(M q + t)`.
    fn substituted(&self, m: [[f64; 2]; 2], t: Vec2) -> Conic {
        let [a, b, c, d, e, _] = self.coeffs;
        let s = [[a, 0.5 * b], [0.5 * b, c]];
        // S' = Mᵀ S M
        let mut sm = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                sm[i][j] = s[i][0] * m[0][j] + s[i][1] * m[1][j];
            }
        }
        let mut sp = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                sp[i][j] = m[0][i] * sm[0][j] + m[1][i] * sm[1][j];
            }
        }
        // linear: (2 tᵀ S + gᵀ) M
        let st = [s[0][0] * t.x + s[0][1] * t.y, s[1][0] * t.x + s[1][1] * t.y];
        let lx = 2.0 * st[0] + d;
        let ly = 2.0 * st[1] + e;
        let dp = lx * m[0][0] + ly * m[1][0];
        let ep = lx * m[0][1] + ly * m[1][1];
        let fp = self.eval(t);
        Conic::new([sp[0][0], 2.0 * sp[0][1], sp[1][1], dp, ep, fp])
            .expect("invertible substitution keeps a nonzero conic")
    }

    /// True when both conics have the same coefficients up to a nonzero factor.
    pub fn same_locus(&self, other: &Conic, tol: f64) -> bool {
        [1.0, -1.0].iter().any(|s| {
            self.coeffs
                .iter()
                .zip(other.coeffs.iter())
                .all(|(a, b)| (a - s * b).abs() <= tol)
        })
    }

    /// Tangent line at a point of the conic, normal along the gradient.
    pub fn tangent_line_at(&self, p: Point, tol: &Tolerance) -> Result<Line, GeomError> {
        let residual = self.eval(p);
        if residual.abs() > tol.membership {
            return Err(GeomError::NotOnConic { residual });
        }
        let g = self.gradient(p);
        if g.norm() <= tol.residual {
            return Err(GeomError::SingularPoint);
        }
        Line::new(g, -g.dot(p))
    }

    /// Metric shape for ellipses, hyperbolas and parabolas.
    pub fn shape(&self) -> Option<ConicShape> {
        let [a, b, c, d, e, f] = self.coeffs;
        let (theta, l1, l2) = sym2_eigen(a, 0.5 * b, c);
        match self.class {
            ConicClass::Ellipse | ConicClass::Hyperbola => {
                let det = a * c - 0.25 * b * b;
                let cx = (0.5 * b * 0.5 * e - c * 0.5 * d) / det;
                let cy = (0.5 * b * 0.5 * d - a * 0.5 * e) / det;
                let center = Vec2::new(cx, cy);
                let fc = f + 0.5 * (d * cx + e * cy);
                Some(ConicShape::Central {
                    center,
                    axis_angle: theta,
                    s1: -fc / l1,
                    s2: -fc / l2,
                })
            }
            ConicClass::Parabola => {
                // one eigenvalue vanishes; keep the larger-magnitude one
                let (lam, u) = if l1.abs() >= l2.abs() {
                    (l1, Vec2::from_angle(theta))
                } else {
                    (l2, Vec2::from_angle(theta).perp())
                };
                let v = u.perp();
                let g = Vec2::new(d, e);
                let gu = g.dot(u);
                let gv = g.dot(v);
                if gv == 0.0 {
                    return None;
                }
                let xi0 = -gu / (2.0 * lam);
                let eta0 = -(f - gu * gu / (4.0 * lam)) / gv;
                let k = -lam / gv;
                Some(ConicShape::Parabola {
                    vertex: u * xi0 + v * eta0,
                    axis: v * k.signum(),
                    focal_length: 1.0 / (4.0 * k.abs()),
                })
            }
            _ => None,
        }
    }

    /// Polylines approximating the real part of the conic inside a disc of
    /// radius `reach` around `focus_of_view`. Ellipses give one closed loop,
    /// hyperbolas two branches and parabolas one arc.
    pub fn sample(&self, focus_of_view: Point, reach: f64, n: usize) -> Vec<Vec<Point>> {
        let n = n.max(8);
        match self.shape() {
            Some(ConicShape::Central { center, axis_angle, s1, s2 }) => {
                let u = Vec2::from_angle(axis_angle);
                let v = u.perp();
                let extent = (center - focus_of_view).norm() + reach;
                if s1 > 0.0 && s2 > 0.0 {
                    let (a, b) = (s1.sqrt(), s2.sqrt());
                    let mut pts: Vec<Point> = (0..n)
                        .map(|i| {
                            let t = std::f64::consts::TAU * i as f64 / n as f64;
                            center + u * (a * t.cos()) + v * (b * t.sin())
                        })
                        .collect();
                    pts.push(pts[0]);
                    vec![pts]
                } else if s1 > 0.0 || s2 > 0.0 {
                    let (major, minor, a, b) = if s1 > 0.0 {
                        (u, v, s1.sqrt(), (-s2).sqrt())
                    } else {
                        (v, u, s2.sqrt(), (-s1).sqrt())
                    };
                    let tmax = (extent / a.min(b)).max(1.0).acosh().max(1e-3);
                    [1.0, -1.0]
                        .iter()
                        .map(|&side| {
                            (0..=n)
                                .map(|i| {
                                    let t = -tmax + 2.0 * tmax * i as f64 / n as f64;
                                    center + major * (side * a * t.cosh()) + minor * (b * t.sinh())
                                })
                                .collect()
                        })
                        .collect()
                } else {
                    Vec::new()
                }
            }
            Some(ConicShape::Parabola { vertex, axis, focal_length }) => {
                let side = axis.perp();
                let extent = (vertex - focus_of_view).norm() + reach;
                let tmax = (4.0 * focal_length * extent).sqrt().max(extent);
                vec![(0..=n)
                    .map(|i| {
                        let t = -tmax + 2.0 * tmax * i as f64 / n as f64;
                        vertex + axis * (t * t / (4.0 * focal_length)) + side * t
                    })
                    .collect()]
            }
            None => Vec::new(),
        }
    }
}

impl ConicShape {
    /// Foci of the conic (one for a parabola, two otherwise).
    pub fn foci(&self) -> Vec<Point> {
        match *self {
            ConicShape::Central { center, axis_angle, s1, s2 } => {
                let u = Vec2::from_angle(axis_angle);
                let (dir, c2) = if s1 > 0.0 && s1 >= s2 {
                    (u, s1 - s2)
                } else {
                    (u.perp(), s2 - s1)
                };
                let c = c2.max(0.0).sqrt();
                vec![center + dir * c, center - dir * c]
            }
            ConicShape::Parabola { vertex, axis, focal_length } => vec![vertex + axis * focal_length],
        }
    }
}

/// Coefficients of the conic translated by `t`: `Q'(p) = Q(p - t)`.
fn translate_coeffs(q: [f64; 6], t: Vec2) -> [f64; 6] {
    let [a, b, c, d, e, f] = q;
    let (tx, ty) = (t.x, t.y);
    [
        a,
        b,
        c,
        d - 2.0 * a * tx - b * ty,
        e - b * tx - 2.0 * c * ty,
        a * tx * tx + b * tx * ty + c * ty * ty - d * tx - e * ty + f,
    ]
}

fn classify(q: &[f64; 6]) -> ConicClass {
    let [a, b, c, d, e, f] = *q;
    let (h, g, k) = (0.5 * b, 0.5 * d, 0.5 * e);
    let delta = a * c - h * h;
    if delta.abs() > CLASS_EPS {
        // central conic: classify by the value at the center, which stays
        // well scaled for thin ellipses where the 3×3 determinant does not
        let cx = (h * k - c * g) / delta;
        let cy = (h * g - a * k) / delta;
        let fc = f + g * cx + k * cy;
        return if fc.abs() <= CLASS_EPS {
            if delta < 0.0 {
                ConicClass::DegenerateLines
            } else {
                ConicClass::Point
            }
        } else if delta < 0.0 {
            ConicClass::Hyperbola
        } else if (a + c) * fc < 0.0 {
            ConicClass::Ellipse
        } else {
            ConicClass::Empty
        };
    }
    let det = a * (c * f - k * k) - h * (h * f - k * g) + g * (h * k - c * g);
    if det.abs() > CLASS_EPS {
        return ConicClass::Parabola;
    }
    // parallel pair: sign of the sum of the principal 2×2 minors involving F
    let minors = (a * f - g * g) + (c * f - k * k);
    if minors <= CLASS_EPS {
        ConicClass::DegenerateLines
    } else {
        ConicClass::Empty
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn classification() {
        let cases = [
            ([1.0, 0.0, 1.0, 0.0, 0.0, -1.0], ConicClass::Ellipse),
            ([1.0, 0.0, -1.0, 0.0, 0.0, -1.0], ConicClass::Hyperbola),
            ([0.0, 0.0, 1.0, -1.0, 0.0, 0.0], ConicClass::Parabola),
            ([0.0, 0.0, 1.0, 0.0, 0.0, 0.0], ConicClass::DegenerateLines),
            ([1.0, 0.0, -1.0, 0.0, 0.0, 0.0], ConicClass::DegenerateLines),
            ([0.0, 0.0, 1.0, 0.0, 0.0, -1.0], ConicClass::DegenerateLines),
            ([1.0, 0.0, 1.0, 0.0, 0.0, 0.0], ConicClass::Point),
            ([1.0, 0.0, 1.0, 0.0, 0.0, 1.0], ConicClass::Empty),
            ([0.0, 0.0, 1.0, 0.0, 0.0, 1.0], ConicClass::Empty),
            ([1e-9, 0.0, 1.0, 0.0, 0.0, -1e-9], ConicClass::Ellipse),
            ([1e-9, 0.0, -1.0, 0.0, 0.0, -1e-9], ConicClass::Hyperbola),
        ];
        for (c, want) in cases {
            assert_eq!(Conic::new(c).unwrap().class(), want, "{c:?}");
        }
    }

    #[test]
    fn normalization_keeps_sign() {
        let q = Conic::new([4.0, 0.0, 4.0, 0.0, 0.0, -8.0]).unwrap();
        assert_eq!(q.coefficients(), [0.5, 0.0, 0.5, 0.0, 0.0, -1.0]);
        assert!(q.eval(Vec2::ZERO) < 0.0);
    }

    #[test]
    fn tangent_unit_circle_at_x_axis() {
        let q = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let l = q.tangent_line_at(Vec2::new(1.0, 0.0), &tol()).unwrap();
        assert!(l.same_line(&Line::new(Vec2::new(1.0, 0.0), -1.0).unwrap(), 1e-15));
    }

    #[test]
    fn tangent_ellipse_top() {
        let q = Conic::axis_aligned(Vec2::ZERO, 4.0, 1.0).unwrap();
        let l = q.tangent_line_at(Vec2::new(0.0, 1.0), &tol()).unwrap();
        assert!(l.same_line(&Line::new(Vec2::new(0.0, 1.0), -1.0).unwrap(), 1e-15));
    }

    #[test]
    fn tangent_circle_diagonal() {
        let q = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let h = 0.5f64.sqrt();
        let l = q.tangent_line_at(Vec2::new(h, h), &tol()).unwrap();
        assert!((l.normal() - Vec2::new(h, h)).norm() < 1e-15);
        assert!((l.offset() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn tangent_errors() {
        let q = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        assert!(matches!(
            q.tangent_line_at(Vec2::new(2.0, 0.0), &tol()),
            Err(GeomError::NotOnConic { .. })
        ));
        let cross = Conic::new([1.0, 0.0, -1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(cross.tangent_line_at(Vec2::ZERO, &tol()), Err(GeomError::SingularPoint));
    }

    #[test]
    fn rotation_and_translation_move_the_zero_set() {
        let q = Conic::axis_aligned(Vec2::ZERO, 4.0, 1.0).unwrap();
        let r = q.rotated(0.3).translated(Vec2::new(1.0, -2.0));
        for t in [0.0, 1.0, 2.5, 4.0] {
            let p = Vec2::new(2.0 * f64::cos(t), f64::sin(t));
            let img = p.rotate(0.3) + Vec2::new(1.0, -2.0);
            assert!(r.eval(img).abs() < 1e-14);
        }
    }

    #[test]
    fn shapes_and_foci() {
        let e = Conic::ellipse_from_foci(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), 2.0).unwrap();
        let mut f = e.shape().unwrap().foci();
        f.sort_by(|a, b| a.x.total_cmp(&b.x));
        assert!(f[0].norm() < 1e-12 && (f[1] - Vec2::new(1.0, 1.0)).norm() < 1e-12);

        let h = Conic::axis_aligned(Vec2::new(1.0, 0.0), 1.0, -3.0).unwrap();
        let mut f = h.shape().unwrap().foci();
        f.sort_by(|a, b| a.x.total_cmp(&b.x));
        assert!((f[0] - Vec2::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((f[1] - Vec2::new(3.0, 0.0)).norm() < 1e-12);

        // x = y²/2 + 3/2  <=>  y² - 2x + 3 = 0, focus at (2, 0)
        let p = Conic::new([0.0, 0.0, 1.0, -2.0, 0.0, 3.0]).unwrap();
        match p.shape().unwrap() {
            ConicShape::Parabola { vertex, axis, focal_length } => {
                assert!((vertex - Vec2::new(1.5, 0.0)).norm() < 1e-14);
                assert!((axis - Vec2::new(1.0, 0.0)).norm() < 1e-14);
                assert!((focal_length - 0.5).abs() < 1e-14);
            }
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn samples_lie_on_conic() {
        let conics = [
            Conic::ellipse_from_foci(Vec2::ZERO, Vec2::new(1.0, 0.5), 1.5).unwrap(),
            Conic::axis_aligned(Vec2::new(1.0, 0.0), 1.0, -3.0).unwrap().rotated(0.4),
            Conic::new([0.0, 0.0, 1.0, -2.0, 0.0, 3.0]).unwrap(),
        ];
        for q in conics {
            let lines = q.sample(Vec2::ZERO, 5.0, 64);
            assert!(!lines.is_empty());
            for p in lines.iter().flatten() {
                assert!(q.eval(*p).abs() < 1e-10 * (1.0 + p.norm_sq()), "{q:?} {p:?}");
            }
        }
    }

    #[test]
    fn contact_residual_detects_tangent_lines() {
        let q = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let tangent = Line::new(Vec2::new(0.6, 0.8), -1.0).unwrap();
        let secant = Line::new(Vec2::new(0.6, 0.8), -0.5).unwrap();
        assert!(q.line_contact_residual(&tangent) < 1e-15);
        assert!(q.line_contact_residual(&secant) > 0.1);
    }
}
