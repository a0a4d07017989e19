#![allow(dead_code)]

use conic_billiards::hooke::{cassini_polar_radii, CassiniOval, HookeBoundary, HookeState};
use conic_billiards::kepler::{BilliardState, KeplerBoundary};
use conic_billiards::Vec2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Elliptic mirror and orbit with `c_K < a - R/2 < a_K < a + R/2`: the inner
/// envelope lies inside the mirror and the outer one outside, so every
/// flight ellipse crosses the mirror twice.
pub struct KeplerSetup {
    pub boundary: KeplerBoundary,
    pub a: f64,
    pub r: f64,
    pub start: BilliardState,
}

pub fn random_kepler(rng: &mut ChaCha8Rng) -> KeplerSetup {
    loop {
        let a_k: f64 = rng.gen_range(1.0..2.0);
        let c: f64 = a_k * rng.gen_range(0.1..0.7);
        let s_minus = c + (a_k - c) * rng.gen_range(0.2..0.8);
        let r = (a_k - s_minus) * rng.gen_range(1.3..3.0);
        let a = s_minus + 0.5 * r;
        let boundary = KeplerBoundary::new(a_k, c).unwrap();
        let focus = boundary.second_focus() + Vec2::from_angle(rng.gen_range(0.0..std::f64::consts::TAU)) * r;
        if let Ok(start) = BilliardState::from_focus(focus, a, &boundary, rng.gen_range(0..2)) {
            return KeplerSetup { boundary, a, r, start };
        }
    }
}

pub fn fixed_kepler() -> KeplerSetup {
    let boundary = KeplerBoundary::new(1.0, 0.5).unwrap();
    let (a, r) = (1.2, 0.8);
    let focus = boundary.second_focus() + Vec2::from_angle(2.0) * r;
    let start = BilliardState::from_focus(focus, a, &boundary, 0).unwrap();
    KeplerSetup { boundary, a, r, start }
}

/// Elliptic centered mirror and a focus on the oval `(c_H, R_H)` with the inner
/// envelope inside the mirror and the outer one outside.
pub struct HookeSetup {
    pub boundary: HookeBoundary,
    pub e_over_k: f64,
    pub oval: CassiniOval,
    pub start: HookeState,
}

pub fn random_hooke(rng: &mut ChaCha8Rng) -> HookeSetup {
    loop {
        let a_h: f64 = rng.gen_range(1.0..2.0);
        let c: f64 = a_h * rng.gen_range(0.2..0.8);
        let r2: f64 = rng.gen_range(0.3..1.5) * c * c;
        let e_over_k = a_h * a_h - 0.5 * c * c + 0.5 * r2 * rng.gen_range(-0.8..0.8);
        if e_over_k <= 0.5 * (c * c + r2) * 1.05 {
            continue;
        }
        let boundary = HookeBoundary::new(a_h, c).unwrap();
        let oval = CassiniOval::new(c, r2.sqrt()).unwrap();
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let Some(&r) = cassini_polar_radii(phi, &oval).first() else {
            continue;
        };
        let focus = Vec2::from_angle(phi) * r;
        if let Ok(start) = HookeState::from_focus(focus, e_over_k, &boundary, rng.gen_range(0..4)) {
            return HookeSetup { boundary, e_over_k, oval, start };
        }
    }
}

/// Mirror `a_H = 1.5, c_H = 1` with `E/k = 2`: foci on the oval `R_H = 2^{1/4}`.
pub fn hooke_cassini_oval() -> HookeSetup {
    let boundary = HookeBoundary::new(1.5, 1.0).unwrap();
    let oval = CassiniOval::new(1.0, 2f64.powf(0.25)).unwrap();
    let phi = 0.7;
    let focus = Vec2::from_angle(phi) * cassini_polar_radii(phi, &oval)[0];
    let start = HookeState::from_focus(focus, 2.0, &boundary, 0).unwrap();
    HookeSetup { boundary, e_over_k: 2.0, oval, start }
}
