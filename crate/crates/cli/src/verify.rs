//! Invariant checks for one scenario, each with a measured value and a threshold.

use conic_billiards::duality::{map_boundary, map_state, trajectory_equivalence, DualityError};
use conic_billiards::geom2d::ConicShape;
use conic_billiards::hooke::{
    cassini_residual, hooke_envelopes, hooke_semimajor, is_admissible_h, orbit_conic_h, orbit_from_state_h,
    CassiniOval, HookeBoundary, HookeParams, HookeTrajectory,
};
use conic_billiards::kepler::{
    billiard_trajectory, envelope_conics, extremal_points, focal_angles, foci_circle, is_admissible, orbit_from_state,
    orbit_implicit, reflect_orbit_two_circle, KeplerBoundary, KeplerParams, Trajectory,
};
use conic_billiards::oracle::{integrate_until_boundary, oracle_billiard_step, OracleOptions, PhaseState, System};
use conic_billiards::{Conic, Point};
use serde::Serialize;

use crate::config::{Scenario, Setup};
use crate::error::CliError;
use crate::simulate::{run, Run};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, threshold: f64) -> Check {
    Check {
        name,
        value,
        threshold,
        // NaN never passes
        pass: value <= threshold,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub system: &'static str,
    pub bounces: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failing(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `|Q(p)| / |∇Q(p)|`.
fn distance_like(c: &Conic, p: Point) -> f64 {
    c.eval(p).abs() / c.gradient(p).norm().max(f64::MIN_POSITIVE)
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    // NaN propagates so that a broken measurement fails its check
    v.into_iter().fold(0.0, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x) })
}

/// Run the scenario and measure every invariant that applies to it.
pub fn verify(sc: &Scenario) -> Result<Report, CliError> {
    let traj = run(sc, sc.bounces).into_result()?;
    let checks = match (&sc.setup, &traj) {
        (Setup::Kepler { boundary, params, .. }, Run::Kepler(t)) => kepler_checks(sc, boundary, params, t),
        (Setup::Hooke { boundary, params, .. }, Run::Hooke(t)) => hooke_checks(sc, boundary, params, t),
        _ => unreachable!("run matches the setup"),
    };
    Ok(Report {
        system: sc.system().name(),
        bounces: sc.bounces,
        passed: checks.iter().all(|c| c.pass),
        checks,
    })
}

fn kepler_checks(sc: &Scenario, b: &KeplerBoundary, params: &KeplerParams, t: &Trajectory) -> Vec<Check> {
    let tol = &sc.tolerances;
    let fp = b.second_focus();
    let radii: Vec<f64> = t.reports.iter().map(|r| r.radius).collect();
    let r_ref = sc.expect.radius.unwrap_or(radii[0]);
    let mut out = vec![
        check("foci_circle_drift", max_of(radii.iter().map(|r| (r - r_ref).abs() / r_ref)), tol.invariant),
        check(
            "foci_circle_formula",
            max_of(t.states.iter().zip(&radii).map(|(s, &r)| match foci_circle(&s.orbit.physics(params), b) {
                Ok(fc) => (fc.radius - r).abs() / r.max(f64::MIN_POSITIVE),
                Err(_) => f64::INFINITY,
            })),
            tol.formula,
        ),
        check(
            "focal_distance_defect",
            max_of(t.reports.iter().map(|r| r.focal_distance_defect)),
            tol.formula,
        ),
    ];
    let nc = sc.verify.construction_bounces.min(t.states.len().saturating_sub(1));
    if nc > 0 {
        out.push(check(
            "two_circle_construction",
            max_of(t.states.windows(2).take(nc).map(|w| match reflect_orbit_two_circle(&w[0].orbit, b, w[1].point) {
                Ok(f) => f.distance(w[1].orbit.focus),
                Err(_) => f64::INFINITY,
            })),
            tol.construction,
        ));
    }
    let no = sc.verify.oracle_bounces.min(t.states.len().saturating_sub(1));
    if no > 0 {
        let (dev, drift) = kepler_oracle(b, params, t, no);
        out.push(check("oracle_agreement", dev, tol.oracle));
        out.push(check("oracle_energy_drift", drift, tol.invariant));
    }
    let (a, r0, c) = (t.states[0].orbit.a, radii[0], b.c_k());
    if let Ok((ep, em)) = envelope_conics(a, r0, c) {
        let mut contact: f64 = 0.0;
        let mut strings: f64 = 0.0;
        for s in t.states.iter().take(sc.verify.envelope_orbits) {
            let (Ok((tp, tm)), Ok(oc)) = (extremal_points(&s.orbit, b), orbit_implicit(&s.orbit)) else {
                contact = f64::INFINITY;
                continue;
            };
            for (env, p) in [(&ep, tp), (&em, tm)] {
                let sine = env.gradient(p).normalized().map_or(1.0, |n| {
                    oc.gradient(p).normalized().map_or(1.0, |m| n.cross(m).abs())
                });
                contact = max_of([contact, distance_like(env, p), distance_like(&oc, p), sine]);
            }
            strings = max_of([
                strings,
                (tp.norm() + tp.distance(fp) - (2.0 * a + r0)).abs(),
                (tm.norm() + tm.distance(fp) - (2.0 * a - r0)).abs(),
            ]);
        }
        out.push(check("envelope_contact", contact, tol.envelope));
        out.push(check("string_lengths", strings, tol.construction));
    }
    if is_admissible(a, r0, c, b) {
        out.push(check(
            "second_focus_membership",
            max_of(t.states.iter().map(|s| orbit_implicit(&s.orbit).map_or(f64::INFINITY, |oc| distance_like(&oc, fp)))),
            tol.construction,
        ));
        match focal_angles(&t.states, b) {
            Ok(angles) if angles.len() >= 2 => {
                let sense = (angles[1].alpha - angles[0].alpha).signum();
                let violations = angles
                    .windows(2)
                    .filter(|w| {
                        let step = (w[1].alpha - w[0].alpha) * sense;
                        step.is_nan() || step <= 0.0
                    })
                    .count();
                out.push(check("focal_angle_monotone", violations as f64, 0.0));
                let rec = angles.windows(2).map(|w| {
                    let d = w[1].alpha - (2.0 * w[0].lambda - w[0].alpha);
                    (d - std::f64::consts::TAU * (d / std::f64::consts::TAU).round()).abs()
                });
                out.push(check("focal_angle_recurrence", max_of(rec), tol.construction));
            }
            Ok(_) => {}
            Err(_) => out.push(check("focal_angle_monotone", f64::INFINITY, 0.0)),
        }
    }
    out
}

/// Largest deviation of impact points and refitted foci, and the largest
/// relative energy drift, over `n` integrated flights.
fn kepler_oracle(b: &KeplerBoundary, params: &KeplerParams, t: &Trajectory, n: usize) -> (f64, f64) {
    let sys = System::Kepler { m: params.m, alpha: params.alpha };
    let opts = OracleOptions::default();
    let s0 = t.states[0];
    let mut ode = PhaseState::new(s0.point, s0.orbit.velocity_at(s0.point, params));
    let (mut dev, mut drift): (f64, f64) = (0.0, 0.0);
    for (i, next) in t.states.iter().skip(1).take(n).enumerate() {
        let step = if i == 0 {
            integrate_until_boundary(&sys, &ode, b.implicit(), &opts).map(|imp| (ode, imp))
        } else {
            oracle_billiard_step(&sys, &ode, b.implicit(), &opts)
        };
        let Ok((_, impact)) = step else {
            return (f64::INFINITY, f64::INFINITY);
        };
        dev = dev.max(impact.state.pos.distance(next.point));
        drift = drift.max(impact.energy_drift);
        let reflected = conic_billiards::oracle::reflect_velocity(&impact.state, b.implicit());
        match orbit_from_state(reflected.pos, reflected.vel, params) {
            Ok((fitted, _)) => dev = dev.max(fitted.focus.distance(next.orbit.focus)),
            Err(_) => return (f64::INFINITY, drift),
        }
        ode = impact.state;
    }
    (dev, drift)
}

/// Quadratic form `M` of a conic `xᵀ M x = 1` centered at the origin.
fn centered_form(c: &Conic) -> Option<[f64; 3]> {
    let [a, b, cc, _, _, f] = c.coefficients();
    (f != 0.0).then(|| [-a / f, -0.5 * b / f, -cc / f])
}

/// `|det(M1 - M2)|` relative to the forms: zero iff two centered conics
/// meet in a double contact.
fn centered_contact(c1: &Conic, c2: &Conic) -> f64 {
    match (centered_form(c1), centered_form(c2)) {
        (Some(m1), Some(m2)) => {
            let d = [m1[0] - m2[0], m1[1] - m2[1], m1[2] - m2[2]];
            let scale = m1.iter().chain(&m2).fold(0.0f64, |s, v| s.max(v.abs()));
            (d[0] * d[2] - d[1] * d[1]).abs() / (scale * scale)
        }
        _ => f64::INFINITY,
    }
}

fn hooke_checks(sc: &Scenario, b: &HookeBoundary, params: &HookeParams, t: &HookeTrajectory) -> Vec<Check> {
    let tol = &sc.tolerances;
    let e0 = t.states[0].orbit.e_over_k;
    let oval = match (sc.expect.radius, t.oval) {
        (Some(r), _) => CassiniOval::new(b.c_h(), r).ok(),
        (None, o) => o,
    };
    let r4 = oval.map_or(f64::NAN, |o| o.r.powi(4));
    let mut out = vec![
        check(
            "cassini_residual",
            max_of(t.states.iter().map(|s| oval.map_or(f64::INFINITY, |o| cassini_residual(s.orbit.focus, &o).abs() / r4))),
            tol.invariant,
        ),
        check(
            "semimajor_formula",
            max_of(t.states.iter().map(|s| {
                let a = hooke_semimajor(&s.orbit);
                match orbit_conic_h(&s.orbit).ok().and_then(|c| c.shape()) {
                    Some(ConicShape::Central { s1, s2, .. }) => (s1.max(s2).sqrt() - a).abs() / a,
                    _ if s.orbit.is_segment() => 0.0,
                    _ => f64::INFINITY,
                }
            })),
            tol.formula,
        ),
        check(
            "energy_constant",
            max_of(t.states.iter().map(|s| (s.orbit.e_over_k - e0).abs() / e0)),
            tol.formula,
        ),
    ];
    let nc = sc.verify.construction_bounces.min(t.states.len().saturating_sub(1));
    if nc > 0 {
        match duality_deviation(b, t, nc) {
            Ok(Some((points, foci, radius))) => {
                out.push(check("duality_points", points, tol.duality));
                out.push(check("duality_foci", foci, tol.duality));
                out.push(check("duality_radius", radius, tol.invariant));
            }
            Ok(None) => {}
            Err(_) => out.push(check("duality_points", f64::INFINITY, tol.duality)),
        }
    }
    let no = sc.verify.oracle_bounces.min(t.states.len().saturating_sub(1));
    if no > 0 {
        let (dev, drift) = hooke_oracle(b, params, t, no, t.oval);
        out.push(check("oracle_agreement", dev, tol.oracle));
        out.push(check("oracle_energy_drift", drift, tol.invariant));
    }
    if let Some(o) = oval {
        if let Ok((ep, em)) = hooke_envelopes(&o, e0) {
            let contact = max_of(t.states.iter().take(sc.verify.envelope_orbits).filter(|s| !s.orbit.is_segment()).map(|s| {
                orbit_conic_h(&s.orbit).map_or(f64::INFINITY, |oc| centered_contact(&oc, &ep).max(centered_contact(&oc, &em)))
            }));
            out.push(check("envelope_contact", contact, tol.envelope));
        }
        if is_admissible_h(&o, e0) {
            let foci = b.foci();
            out.push(check(
                "mirror_foci_membership",
                max_of(t.states.iter().map(|s| {
                    orbit_conic_h(&s.orbit).map_or(f64::INFINITY, |oc| distance_like(&oc, foci[0]).max(distance_like(&oc, foci[1])))
                })),
                tol.construction,
            ));
        }
    }
    out
}

/// Point, focus and radius deviations between the first `n` bounces and
/// their image under the square map; `None` when the mirror image degenerates.
fn duality_deviation(b: &HookeBoundary, t: &HookeTrajectory, n: usize) -> Result<Option<(f64, f64, f64)>, DualityError> {
    let kb = match map_boundary(b) {
        Ok(kb) => kb,
        Err(DualityError::DegenerateBoundary) => return Ok(None),
        Err(e) => return Err(e),
    };
    let head = HookeTrajectory {
        states: t.states[..=n].to_vec(),
        reports: t.reports[..=n].to_vec(),
        oval: t.oval,
    };
    let kt = billiard_trajectory(map_state(&t.states[0])?, &kb, n).map_err(|e| DualityError::Kepler(e.source))?;
    let rep = trajectory_equivalence(&head, &kt, &kb)?;
    Ok(Some((rep.max_point_deviation, rep.max_focus_deviation, rep.radius_deviation)))
}

fn hooke_oracle(b: &HookeBoundary, params: &HookeParams, t: &HookeTrajectory, n: usize, oval: Option<CassiniOval>) -> (f64, f64) {
    let sys = System::Hooke { m: params.m, k: params.k };
    let opts = OracleOptions::default();
    let s0 = t.states[0];
    let mut ode = PhaseState::new(s0.point, s0.orbit.scaled_velocity_at(s0.point) * params.omega());
    let (mut dev, mut drift): (f64, f64) = (0.0, 0.0);
    for (i, next) in t.states.iter().skip(1).take(n).enumerate() {
        let step = if i == 0 {
            integrate_until_boundary(&sys, &ode, b.implicit(), &opts).map(|imp| (ode, imp))
        } else {
            oracle_billiard_step(&sys, &ode, b.implicit(), &opts)
        };
        let Ok((_, impact)) = step else {
            return (f64::INFINITY, f64::INFINITY);
        };
        dev = dev.max(impact.state.pos.distance(next.point));
        drift = drift.max(impact.energy_drift);
        let reflected = conic_billiards::oracle::reflect_velocity(&impact.state, b.implicit());
        match orbit_from_state_h(reflected.pos, reflected.vel, params) {
            // the focus of a Hooke orbit is defined up to sign
            Ok(fitted) => {
                let f = next.orbit.focus;
                dev = dev.max(fitted.focus.distance(f).min(fitted.focus.distance(-f)));
                if let Some(o) = oval {
                    dev = dev.max(cassini_residual(fitted.focus, &o).abs() / o.r.powi(4));
                }
            }
            Err(_) => return (f64::INFINITY, drift),
        }
        ode = impact.state;
    }
    (dev, drift)
}
