//! Real roots of polynomials up to degree four.
//!
//! Closed forms (stable quadratic formula, Cardano/trigonometric cubic,
//! Ferrari with the resolvent cubic) produce all complex roots. Roots whose
//! imaginary part is below [`IMAG_TOL`] are treated as real, polished by
//! Newton iteration on the original polynomial, and clustered: roots closer
//! than [`CLUSTER_TOL`] are merged and reported with multiplicity.

use super::GeomError;

/// Relative imaginary part below which a closed-form root is considered real.
pub const IMAG_TOL: f64 = 1e-7;
/// Relative distance below which polished roots are merged.
pub const CLUSTER_TOL: f64 = 1e-7;

const NEWTON_MAX_ITER: usize = 100;

/// A real root together with the number of closed-form roots merged into it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    fn sqrt_of_real(x: f64) -> Self {
        if x >= 0.0 {
            Self::real(x.sqrt())
        } else {
            Self { re: 0.0, im: (-x).sqrt() }
        }
    }
}

/// Evaluates `c[0] x^n + ... + c[n]` and its derivative.
fn horner(c: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &ci in c {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

/// Value of a polynomial given highest degree first.
pub fn eval_poly(c: &[f64], x: f64) -> f64 {
    horner(c, x).0
}

fn newton_polish(c: &[f64], x0: f64) -> f64 {
    let mut x = x0;
    let mut best = (horner(c, x).0.abs(), x);
    for _ in 0..NEWTON_MAX_ITER {
        let (p, dpx) = horner(c, x);
        if p == 0.0 || dpx == 0.0 {
            break;
        }
        let step = p / dpx;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        x = next;
        let r = horner(c, x).0.abs();
        if r < best.0 {
            best = (r, x);
        }
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
            break;
        }
    }
    best.1
}

fn quadratic_complex(a: f64, b: f64, c: f64) -> [Complex; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        let q = if q == 0.0 { -0.5 * b } else { q };
        if q == 0.0 {
            // b == 0 and disc == 0, so c == 0 as well
            return [Complex::real(0.0), Complex::real(0.0)];
        }
        [Complex::real(q / a), Complex::real(c / q)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a).abs();
        [Complex { re, im }, Complex { re, im: -im }]
    }
}

/// Real roots of the monic cubic `x^3 + a x^2 + b x + c`, polished.
pub(crate) fn cubic_real_roots_monic(a: f64, b: f64, c: f64) -> Vec<f64> {
    let coeffs = [1.0, a, b, c];
    cubic_complex_monic(a, b, c)
        .iter()
        .filter(|z| z.im == 0.0)
        .map(|z| newton_polish(&coeffs, z.re))
        .collect()
}

fn cubic_complex_monic(a: f64, b: f64, c: f64) -> [Complex; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    if disc > 0.0 {
        let w = -0.5 * q - q.signum() * disc.sqrt();
        let w = if q == 0.0 { disc.sqrt() } else { w };
        let u = w.cbrt();
        let t = if u == 0.0 { 0.0 } else { u - p / (3.0 * u) };
        let r1 = newton_polish(&[1.0, a, b, c], t - shift);
        // deflate: x^2 + (a + r1) x + (b + (a + r1) r1)
        let b1 = a + r1;
        let c1 = b + b1 * r1;
        let [z2, z3] = quadratic_complex(1.0, b1, c1);
        [Complex::real(r1), z2, z3]
    } else if p == 0.0 {
        [Complex::real(-shift); 3]
    } else {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        let tau = std::f64::consts::TAU / 3.0;
        [
            Complex::real(m * theta.cos() - shift),
            Complex::real(m * (theta - tau).cos() - shift),
            Complex::real(m * (theta - 2.0 * tau).cos() - shift),
        ]
    }
}

/// All four complex roots of the monic quartic `x^4 + a x^3 + b x^2 + c x + d`.
fn quartic_complex_monic(a: f64, b: f64, c: f64, d: f64) -> [Complex; 4] {
    // depressed quartic y^4 + p y^2 + q y + r, x = y - a/4
    let shift = a / 4.0;
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

    let biquadratic = |p: f64, r: f64| -> [Complex; 4] {
        let [w1, w2] = quadratic_complex(1.0, p, r);
        let mut out = [Complex::real(0.0); 4];
        for (k, w) in [w1, w2].into_iter().enumerate() {
            let s = complex_sqrt(w);
            out[2 * k] = Complex { re: s.re - shift, im: s.im };
            out[2 * k + 1] = Complex { re: -s.re - shift, im: -s.im };
        }
        out
    };

    if q == 0.0 {
        return biquadratic(p, r);
    }

    // resolvent cubic 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0, largest real root
    let roots = cubic_real_roots_monic(p, p * p / 4.0 - r, -q * q / 8.0);
    let m = roots.into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !(m.is_finite() && m > 0.0) {
        return biquadratic(p, r);
    }
    let s = (2.0 * m).sqrt();
    let t = 2.0 * q / s;
    let d_plus = Complex::sqrt_of_real(-2.0 * p - 2.0 * m - t);
    let d_minus = Complex::sqrt_of_real(-2.0 * p - 2.0 * m + t);
    [
        Complex { re: 0.5 * (s + d_plus.re) - shift, im: 0.5 * d_plus.im },
        Complex { re: 0.5 * (s - d_plus.re) - shift, im: -0.5 * d_plus.im },
        Complex { re: 0.5 * (-s + d_minus.re) - shift, im: 0.5 * d_minus.im },
        Complex { re: 0.5 * (-s - d_minus.re) - shift, im: -0.5 * d_minus.im },
    ]
}

fn complex_sqrt(z: Complex) -> Complex {
    if z.im == 0.0 {
        return Complex::sqrt_of_real(z.re);
    }
    let m = z.re.hypot(z.im);
    let re = (0.5 * (m + z.re)).sqrt();
    let im = (0.5 * (m - z.re)).sqrt().copysign(z.im);
    Complex { re, im }
}

fn real_candidates(roots: &[Complex]) -> Vec<f64> {
    roots
        .iter()
        .filter(|z| z.im.abs() <= IMAG_TOL * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect()
}

fn cluster(mut xs: Vec<f64>) -> Vec<Root> {
    xs.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<(f64, usize)> = Vec::new();
    for x in xs {
        match out.last_mut() {
            Some((sum, n)) if (x - *sum / *n as f64).abs() <= CLUSTER_TOL * (1.0 + x.abs()) => {
                *sum += x;
                *n += 1;
            }
            _ => out.push((x, 1)),
        }
    }
    out.into_iter()
        .map(|(sum, n)| Root {
            value: sum / n as f64,
            multiplicity: n,
        })
        .collect()
}

/// Real roots of `c[0] x^4 + c[1] x^3 + c[2] x^2 + c[3] x + c[4]`, sorted ascending.
///
/// Vanishing leading coefficients drop the degree. Roots of multiplicity
/// greater than one appear once with their multiplicity.
pub fn solve_quartic(c: [f64; 5]) -> Result<Vec<Root>, GeomError> {
    if c.iter().any(|v| !v.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let first = c.iter().position(|&v| v != 0.0).ok_or(GeomError::AllZero)?;
    let poly = &c[first..];
    let lead = poly[0];
    let monic: Vec<f64> = poly.iter().map(|v| v / lead).collect();
    let complex: Vec<Complex> = match monic.len() {
        1 => Vec::new(),
        2 => vec![Complex::real(-monic[1])],
        3 => quadratic_complex(1.0, monic[1], monic[2]).to_vec(),
        4 => cubic_complex_monic(monic[1], monic[2], monic[3]).to_vec(),
        _ => quartic_complex_monic(monic[1], monic[2], monic[3], monic[4]).to_vec(),
    };
    let polished: Vec<f64> = real_candidates(&complex)
        .into_iter()
        .map(|x| newton_polish(&monic, x))
        .collect();
    Ok(cluster(polished))
}

/// Quadratic convenience wrapper, highest degree first.
pub fn solve_quadratic(a: f64, b: f64, c: f64) -> Result<Vec<Root>, GeomError> {
    solve_quartic([0.0, 0.0, a, b, c])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values(r: &[Root]) -> Vec<f64> {
        r.iter().map(|r| r.value).collect()
    }

    #[test]
    fn x4_minus_1() {
        let r = solve_quartic([1.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        let v = values(&r);
        assert_eq!(v.len(), 2);
        assert!((v[0] + 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn perfect_square_degree_two() {
        // (x - 2)^2 = x^2 - 4x + 4
        let r = solve_quartic([0.0, 0.0, 1.0, -4.0, 4.0]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].value - 2.0).abs() < 1e-12);
        assert_eq!(r[0].multiplicity, 2);
    }

    #[test]
    fn positive_definite_has_no_roots() {
        assert!(solve_quartic([1.0, 0.0, 0.0, 0.0, 1.0]).unwrap().is_empty());
    }

    #[test]
    fn zero_polynomial_is_an_error() {
        assert_eq!(solve_quartic([0.0; 5]), Err(GeomError::AllZero));
    }

    #[test]
    fn nonzero_constant_has_no_roots() {
        assert!(solve_quartic([0.0, 0.0, 0.0, 0.0, 3.0]).unwrap().is_empty());
    }

    #[test]
    fn four_distinct_roots() {
        // (x+3)(x+1)(x-0.5)(x-2)
        let expand = |r: [f64; 4]| {
            let mut c = vec![1.0];
            for ri in r {
                let mut n = vec![0.0; c.len() + 1];
                for (i, ci) in c.iter().enumerate() {
                    n[i] += ci;
                    n[i + 1] -= ci * ri;
                }
                c = n;
            }
            [c[0], c[1], c[2], c[3], c[4]]
        };
        let r = solve_quartic(expand([-3.0, -1.0, 0.5, 2.0])).unwrap();
        let v = values(&r);
        for (got, want) in v.iter().zip([-3.0, -1.0, 0.5, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn double_roots_in_quartic() {
        // (x-1)^2 (x+2)^2 = x^4 + 2x^3 - 3x^2 - 4x + 4
        let r = solve_quartic([1.0, 2.0, -3.0, -4.0, 4.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].multiplicity, 2);
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[0].value + 2.0).abs() < 1e-7);
        assert!((r[1].value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn cubic_fallthrough_with_double_root() {
        // (x-1)^2 (x+1) = x^3 - x^2 - x + 1
        let r = solve_quartic([0.0, 1.0, -1.0, -1.0, 1.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value + 1.0).abs() < 1e-12);
        assert!((r[1].value - 1.0).abs() < 1e-7);
        assert_eq!(r[1].multiplicity, 2);
    }

    #[test]
    fn linear_fallthrough() {
        let r = solve_quartic([0.0, 0.0, 0.0, 2.0, -3.0]).unwrap();
        assert_eq!(values(&r), vec![1.5]);
    }

    #[test]
    fn quadruple_root_at_zero() {
        let r = solve_quartic([1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 4);
        assert!(r[0].value.abs() < 1e-12);
    }
}
