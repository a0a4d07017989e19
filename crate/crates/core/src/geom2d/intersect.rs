use super::poly::solve_quartic;
use super::{Conic, ConicClass, GeomError, Point, Tolerance, Vec2};

/// Intersections of two circles. Tangent circles give one point.
pub fn circle_circle_intersections(
    c1: Point,
    r1: f64,
    c2: Point,
    r2: f64,
) -> Result<Vec<Point>, GeomError> {
    if r1 < 0.0 || r2 < 0.0 || !c1.is_finite() || !c2.is_finite() {
        return Err(GeomError::NonFinite);
    }
    let d_vec = c2 - c1;
    let d = d_vec.norm();
    if d == 0.0 {
        return if r1 == r2 {
            Err(GeomError::CoincidentCircles)
        } else {
            Ok(Vec::new())
        };
    }
    let scale = d.max(r1).max(r2);
    let tangency = 1e-12 * scale;
    if d > r1 + r2 + tangency || d < (r1 - r2).abs() - tangency {
        return Ok(Vec::new());
    }
    let u = d_vec / d;
    // distance from c1 to the radical line along u
    let along = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
    let h2 = r1 * r1 - along * along;
    let base = c1 + u * along;
    if h2 <= (tangency * scale).max(0.0) {
        return Ok(vec![base]);
    }
    let h = h2.sqrt();
    Ok(vec![base + u.perp() * h, base - u.perp() * h])
}

/// Frame rotations tried for the elimination, in order. Irrational-looking
/// angles keep intersection points from sharing an abscissa.
const FRAME_ANGLES: [f64; 6] = [
    0.4636476090008061,
    1.1071487177940904,
    0.2449786631268641,
    2.0344439357957027,
    0.8853981633974483,
    1.3258176636680326,
];

/// Points whose norm exceeds this are treated as lying at infinity.
const AFFINE_LIMIT: f64 = 1e8;

/// Real affine intersection points of two conics.
///
/// One variable is eliminated with the resultant of the two conics viewed
/// as quadratics in `y`, in a rotated frame where both `y²` coefficients are
/// well away from zero. The quartic in `x` is solved with [`solve_quartic`],
/// candidate points are lifted, polished by two-dimensional Newton iteration
/// and merged when closer than `1e-7`.
pub fn conic_conic_intersections(a: &Conic, b: &Conic) -> Result<Vec<Point>, GeomError> {
    conic_conic_intersections_with(a, b, &Tolerance::default())
}

/// [`conic_conic_intersections`] with an explicit residual tolerance.
pub fn conic_conic_intersections_with(
    a: &Conic,
    b: &Conic,
    tol: &Tolerance,
) -> Result<Vec<Point>, GeomError> {
    for q in [a, b] {
        if matches!(q.class(), ConicClass::Empty | ConicClass::Point) {
            return Err(GeomError::DegenerateInput(q.class()));
        }
    }
    if a.same_locus(b, 1e-12) {
        return Err(GeomError::IdenticalConics);
    }

    let (theta, ra, rb) = FRAME_ANGLES
        .iter()
        .map(|&t| (t, a.rotated(-t), b.rotated(-t)))
        .max_by(|x, y| {
            let score = |p: &(f64, Conic, Conic)| p.1.coefficients()[2].abs().min(p.2.coefficients()[2].abs());
            score(x).total_cmp(&score(y))
        })
        .expect("non-empty frame list");

    let mut pts = Vec::new();
    for cand in eliminate(&ra, &rb)? {
        let p = cand.rotate(theta);
        if let Some(p) = polish(a, b, p, tol) {
            pts.push(p);
        }
    }
    Ok(merge_points(pts, 1e-7))
}

/// Candidate intersection points in the frame of `a` and `b`.
fn eliminate(a: &Conic, b: &Conic) -> Result<Vec<Point>, GeomError> {
    let [aa, ab, ac, ad, ae, af] = a.coefficients();
    let [ba, bb, bc, bd, be, bf] = b.coefficients();
    // each conic as p2 y² + p1(x) y + p0(x); polynomials low degree first
    let a2 = [ac];
    let a1 = [ae, ab];
    let a0 = [af, ad, aa];
    let b2 = [bc];
    let b1 = [be, bb];
    let b0 = [bf, bd, ba];

    let u = sub(&mul(&a2, &b0), &mul(&b2, &a0)); // a2 b0 - b2 a0
    let v = sub(&mul(&a2, &b1), &mul(&b2, &a1)); // a2 b1 - b2 a1
    let w = sub(&mul(&a1, &b0), &mul(&b1, &a0)); // a1 b0 - b1 a0
    let res = sub(&mul(&u, &u), &mul(&v, &w));

    let mut c = [0.0; 5];
    for (i, r) in res.iter().enumerate().take(5) {
        c[4 - i] = *r;
    }
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale <= 1e-13 {
        return Err(GeomError::CommonComponent);
    }
    let mut c = c.map(|x| x / scale);
    // leading coefficients this small correspond to intersections at infinity
    for ci in c.iter_mut() {
        if ci.abs() > 1e-12 {
            break;
        }
        *ci = 0.0;
    }
    if c.iter().all(|x| *x == 0.0) {
        return Err(GeomError::CommonComponent);
    }

    let mut out = Vec::new();
    for root in solve_quartic(c)? {
        let x = root.value;
        if x.abs() > AFFINE_LIMIT {
            continue;
        }
        let mut ys = Vec::new();
        let vx = eval(&v, x);
        if vx.abs() > 1e-9 {
            ys.push(-eval(&u, x) / vx);
        }
        for (p2, p1, p0) in [(ac, eval(&a1, x), eval(&a0, x)), (bc, eval(&b1, x), eval(&b0, x))] {
            ys.extend(quadratic_real_clamped(p2, p1, p0));
        }
        for y in ys {
            let p = Vec2::new(x, y);
            let loose = 1e-5 * (1.0 + p.norm_sq());
            if p.norm() <= AFFINE_LIMIT && a.eval(p).abs() <= loose && b.eval(p).abs() <= loose {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Real roots of `a y² + b y + c`, clamping a marginally negative discriminant to zero.
fn quadratic_real_clamped(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() <= 1e-14 {
        return if b.abs() > 1e-14 { vec![-c / b] } else { Vec::new() };
    }
    let mut disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        if disc > -1e-8 * (b * b + (4.0 * a * c).abs()).max(1e-12) {
            disc = 0.0;
        } else {
            return Vec::new();
        }
    }
    let s = disc.sqrt();
    vec![(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)]
}

/// Newton iteration on the system `a(p) = b(p) = 0`, switching to the
/// minimum-norm Gauss-Newton step where the Jacobian is nearly singular.
fn polish(a: &Conic, b: &Conic, p0: Point, tol: &Tolerance) -> Option<Point> {
    let residual = |p: Point| a.eval(p).abs().max(b.eval(p).abs());
    let mut p = p0;
    let mut best = (residual(p), p);
    for _ in 0..100 {
        let fa = a.eval(p);
        let fb = b.eval(p);
        let ga = a.gradient(p);
        let gb = b.gradient(p);
        let det = ga.cross(gb);
        let scale = ga.norm() * gb.norm();
        let step = if det.abs() > 1e-6 * scale {
            // solve [ga; gb] d = -[fa; fb]
            Vec2::new(-(fa * gb.y - fb * ga.y) / det, -(ga.x * fb - gb.x * fa) / det)
        } else {
            // damped normal equations (JᵀJ + μI) d = -Jᵀf
            let (j11, j12, j22) = (
                ga.x * ga.x + gb.x * gb.x,
                ga.x * ga.y + gb.x * gb.y,
                ga.y * ga.y + gb.y * gb.y,
            );
            let mu = 1e-12 * (j11 + j22);
            let (r1, r2) = (-(ga.x * fa + gb.x * fb), -(ga.y * fa + gb.y * fb));
            let (m11, m22) = (j11 + mu, j22 + mu);
            let dd = m11 * m22 - j12 * j12;
            if dd == 0.0 {
                break;
            }
            Vec2::new((r1 * m22 - j12 * r2) / dd, (m11 * r2 - j12 * r1) / dd)
        };
        if !step.is_finite() {
            break;
        }
        p += step;
        let r = residual(p);
        if r < best.0 {
            best = (r, p);
        }
        if step.norm() <= 1e-16 * (1.0 + p.norm()) {
            break;
        }
    }
    let (r, p) = best;
    (r <= tol.residual * (1.0 + p.norm_sq())).then_some(p)
}

fn merge_points(pts: Vec<Point>, radius: f64) -> Vec<Point> {
    let mut out: Vec<(Point, usize)> = Vec::new();
    for p in pts {
        match out
            .iter_mut()
            .find(|(q, n)| (*q / *n as f64 - p).norm() <= radius * (1.0 + p.norm()))
        {
            Some((q, n)) => {
                *q += p;
                *n += 1;
            }
            None => out.push((p, 1)),
        }
    }
    let mut pts: Vec<Point> = out.into_iter().map(|(q, n)| q / n as f64).collect();
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    pts
}

fn mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            out[i + j] += pi * qj;
        }
    }
    out
}

fn sub(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or(0.0) - q.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// Evaluates a polynomial stored low degree first.
fn eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(p: Point, q: Point, tol: f64) -> bool {
        (p - q).norm() <= tol
    }

    #[test]
    fn equilateral_circles() {
        let pts = circle_circle_intersections(Vec2::ZERO, 1.0, Vec2::new(1.0, 0.0), 1.0).unwrap();
        let h = 3f64.sqrt() / 2.0;
        assert_eq!(pts.len(), 2);
        assert!(close(pts[0], Vec2::new(0.5, h), 1e-15));
        assert!(close(pts[1], Vec2::new(0.5, -h), 1e-15));
    }

    #[test]
    fn disjoint_and_tangent_circles() {
        assert!(circle_circle_intersections(Vec2::ZERO, 1.0, Vec2::new(3.0, 0.0), 1.0)
            .unwrap()
            .is_empty());
        let t = circle_circle_intersections(Vec2::ZERO, 1.0, Vec2::new(2.0, 0.0), 1.0).unwrap();
        assert_eq!(t, vec![Vec2::new(1.0, 0.0)]);
    }

    #[test]
    fn coincident_circles_error() {
        assert_eq!(
            circle_circle_intersections(Vec2::new(1.0, 1.0), 2.0, Vec2::new(1.0, 1.0), 2.0),
            Err(GeomError::CoincidentCircles)
        );
    }

    #[test]
    fn circle_and_focal_ellipse() {
        let circle = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let ellipse = Conic::ellipse_from_foci(Vec2::ZERO, Vec2::new(-1.0, 0.0), 1.0).unwrap();
        let pts = conic_conic_intersections(&circle, &ellipse).unwrap();
        let h = 3f64.sqrt() / 2.0;
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!(close(pts[0], Vec2::new(-0.5, -h), 1e-12));
        assert!(close(pts[1], Vec2::new(-0.5, h), 1e-12));
    }

    #[test]
    fn nested_confocal_ellipses_are_disjoint() {
        let f2 = Vec2::new(1.0, 0.0);
        let e1 = Conic::ellipse_from_foci(Vec2::ZERO, f2, 1.0).unwrap();
        let e2 = Conic::ellipse_from_foci(Vec2::ZERO, f2, 2.0).unwrap();
        assert!(conic_conic_intersections(&e1, &e2).unwrap().is_empty());
    }

    #[test]
    fn circle_and_double_line() {
        let circle = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let axis = Conic::new([0.0, 0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let pts = conic_conic_intersections(&circle, &axis).unwrap();
        assert_eq!(pts.len(), 2, "{pts:?}");
        assert!(close(pts[0], Vec2::new(-1.0, 0.0), 1e-7));
        assert!(close(pts[1], Vec2::new(1.0, 0.0), 1e-7));
    }

    #[test]
    fn identical_conics_error() {
        let a = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let b = Conic::new([-3.0, 0.0, -3.0, 0.0, 0.0, 3.0]).unwrap();
        assert_eq!(conic_conic_intersections(&a, &b), Err(GeomError::IdenticalConics));
    }

    #[test]
    fn empty_conic_rejected() {
        let a = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let e = Conic::new([1.0, 0.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            conic_conic_intersections(&a, &e),
            Err(GeomError::DegenerateInput(ConicClass::Empty))
        ));
    }

    #[test]
    fn tangent_circles_as_conics_meet_once() {
        let a = Conic::circle(Vec2::ZERO, 1.0).unwrap();
        let b = Conic::circle(Vec2::new(3.0, 0.0), 2.0).unwrap();
        let pts = conic_conic_intersections(&a, &b).unwrap();
        assert_eq!(pts.len(), 1, "{pts:?}");
        assert!(close(pts[0], Vec2::new(1.0, 0.0), 1e-7));
    }

    #[test]
    fn four_point_intersection() {
        let a = Conic::axis_aligned(Vec2::ZERO, 4.0, 1.0).unwrap();
        let b = Conic::axis_aligned(Vec2::ZERO, 1.0, 4.0).unwrap();
        let pts = conic_conic_intersections(&a, &b).unwrap();
        assert_eq!(pts.len(), 4);
        let s = (4.0f64 / 5.0).sqrt();
        for p in pts {
            assert!((p.x.abs() - s).abs() < 1e-12 && (p.y.abs() - s).abs() < 1e-12);
        }
    }
}
