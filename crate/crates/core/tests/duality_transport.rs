mod common;

use common::{hooke_cassini_oval, random_hooke};
use conic_billiards::duality::*;
use conic_billiards::hooke::{
    cassini_from_kepler, hooke_trajectory, next_reflection_point_h, orbit_conic_h, orbit_implicit_h,
    reflect_orbit_h, CassiniOval, HookeOrbit,
};
use conic_billiards::kepler::{
    billiard_trajectory, next_reflection_point, orbit_implicit, outgoing_orientation, reflect_orbit, KeplerOrbit,
};
use conic_billiards::{Conic, Orientation, Point, Vec2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `|Q(p)| / |∇Q(p)|`, a first-order distance to the curve.
fn distance_like(c: &Conic, p: Point) -> f64 {
    c.eval(p).abs() / c.gradient(p).norm()
}

#[test]
fn image_of_a_hooke_orbit_is_the_claimed_kepler_orbit() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let e: f64 = rng.gen_range(0.3..3.0);
        let f = Vec2::from_angle(rng.gen_range(0.0..6.3)) * rng.gen_range(0.0..0.95) * (2.0 * e).sqrt();
        let o = HookeOrbit::new(f, e, Orientation::Clockwise).unwrap();
        let k = hooke_to_kepler_orbit(&o).unwrap();
        let kc = orbit_implicit(&k).unwrap();
        let pts = &orbit_conic_h(&o).unwrap().sample(Vec2::ZERO, 1.0, 100)[0];
        // fit the semimajor axis from the images alone: |q| + |q - F'| = 2a
        let fitted = pts
            .iter()
            .map(|z| {
                let q = square_map(*z);
                0.5 * (q.norm() + q.distance(k.focus))
            })
            .sum::<f64>()
            / pts.len() as f64;
        assert!((fitted - e).abs() <= 1e-12 * e, "{fitted} vs {e}");
        for z in pts {
            assert!(distance_like(&kc, square_map(*z)) <= 1e-8);
        }
        // and back: both lifts of Kepler samples lie on the Hooke orbit
        let back = kepler_to_hooke_orbit(&k).unwrap();
        assert!((back.focus - o.focus).norm() <= 1e-12);
        let hc = orbit_conic_h(&back).unwrap();
        let imp = orbit_implicit_h(&back);
        for q in &kc.sample(Vec2::ZERO, 1.0, 100)[0] {
            for br in [LiftBranch::Right, LiftBranch::Left] {
                let z = sqrt_lift(*q, br);
                assert!(distance_like(&hc, z) <= 1e-8);
                assert!(imp(z).abs() <= 1e-8 * (1.0 + e * e));
            }
        }
    }
}

#[test]
fn foci_collapse_under_the_square() {
    let f = Vec2::new(0.4, -0.7);
    assert_eq!(square_map(f), square_map(-f));
}

#[test]
fn the_oval_maps_onto_the_foci_circle() {
    for (c_k, r) in [(0.5, 2f64.sqrt()), (0.5, 0.7), (1.0, 1.0), (0.2, 3.0)] {
        let oval = cassini_from_kepler(c_k, r).unwrap();
        for z in oval.sample(120).into_iter().flatten() {
            let q = square_map(z);
            assert!((q.distance(Vec2::new(2.0 * c_k, 0.0)) - r).abs() <= 1e-9 * r.max(1.0), "{c_k} {r}");
        }
    }
}

#[test]
fn square_map_keeps_angles() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-6;
    for _ in 0..200 {
        let z = Vec2::from_angle(rng.gen_range(0.0..6.3)) * rng.gen_range(0.1..3.0);
        let d1 = Vec2::from_angle(rng.gen_range(0.0..6.3));
        let d2 = Vec2::from_angle(rng.gen_range(0.0..6.3));
        let image_tangent = |d: Vec2| (square_map(z + d * h) - square_map(z - d * h)) / (2.0 * h);
        let (t1, t2) = (image_tangent(d1), image_tangent(d2));
        let before = d1.cross(d2).atan2(d1.dot(d2));
        let after = t1.cross(t2).atan2(t1.dot(t2));
        assert!((before - after).abs() <= 1e-8, "{before} {after}");
    }
}

#[test]
fn circle_mirrors_map_to_circle_mirrors() {
    let kb = map_boundary(&conic_billiards::hooke::HookeBoundary::new(1.3, 0.0).unwrap()).unwrap();
    for z in &kb.implicit().sample(Vec2::ZERO, 5.0, 50)[0] {
        assert!((z.norm() - 1.69).abs() < 1e-12);
    }
}

#[test]
fn image_states_leave_into_the_kepler_flight_side() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..30 {
        let s = random_hooke(&mut rng);
        let kb = map_boundary(&s.boundary).unwrap();
        let k = map_state(&s.start).unwrap();
        assert!(kb.implicit().eval(k.point).abs() <= 1e-10);
        let want = outgoing_orientation(k.orbit.focus, k.orbit.a, k.point, &kb).unwrap();
        assert_eq!(k.orbit.orientation, want);
    }
}

#[test]
fn trajectories_correspond_bounce_for_bounce() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let mut cases = vec![hooke_cassini_oval()];
    cases.extend((0..5).map(|_| random_hooke(&mut rng)));
    for (i, s) in cases.into_iter().enumerate() {
        let kb = map_boundary(&s.boundary).unwrap();
        let ht = hooke_trajectory(s.start, &s.boundary, 50).unwrap();
        let kt = billiard_trajectory(map_state(&s.start).unwrap(), &kb, 50).unwrap();
        let rep = trajectory_equivalence(&ht, &kt, &kb).unwrap();
        assert_eq!(rep.bounces.len(), 51);
        assert!(rep.within(1e-8), "case {i}: {} {}", rep.max_point_deviation, rep.max_focus_deviation);
        assert!(rep.radius_deviation <= 1e-9, "case {i}: {}", rep.radius_deviation);
    }
}

fn kepler_step(o: &KeplerOrbit, p: Point, kb: &conic_billiards::kepler::KeplerBoundary) -> (KeplerOrbit, Point) {
    let s = conic_billiards::kepler::BilliardState { orbit: *o, point: p, index: 0 };
    let q = next_reflection_point(&s, kb).unwrap();
    (reflect_orbit(o, kb, q).unwrap(), q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifts_invert_the_square(x in -5.0..5.0f64, y in -5.0..5.0f64) {
        let q = Vec2::new(x, y);
        for br in [LiftBranch::Right, LiftBranch::Left] {
            let z = sqrt_lift(q, br);
            prop_assert!((square_map(z) - q).norm() <= 1e-12 * (1.0 + q.norm()));
            let back = sqrt_lift(square_map(z), br);
            prop_assert!((back - z).norm() <= 1e-12 * (1.0 + z.norm()) || (back + z).norm() <= 1e-12 * (1.0 + z.norm()));
        }
        let r = sqrt_lift(q, LiftBranch::Right);
        prop_assert!(r.x > 0.0 || (r.x == 0.0 && r.y >= 0.0));
    }

    #[test]
    fn hooke_step_commutes_with_kepler_step(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_hooke(&mut rng);
        let kb = map_boundary(&s.boundary).unwrap();
        let q_h = next_reflection_point_h(&s.start, &s.boundary).unwrap();
        let o_h = reflect_orbit_h(&s.start.orbit, &s.boundary, q_h).unwrap();
        let k0 = map_state(&s.start).unwrap();
        let (o_k, q_k) = kepler_step(&k0.orbit, k0.point, &kb);
        prop_assert!((square_map(q_h) - q_k).norm() <= 1e-8);
        prop_assert!((square_map(o_h.focus) - o_k.focus).norm() <= 1e-8);
        prop_assert_eq!(hooke_to_kepler_orbit(&o_h).unwrap().orientation, o_k.orientation);
        let oval = CassiniOval::through(s.boundary.c_h(), s.start.orbit.focus).unwrap();
        prop_assert!((k0.orbit.focus.distance(kb.second_focus()) - oval.r * oval.r).abs() <= 1e-12 * oval.r * oval.r);
    }
}
