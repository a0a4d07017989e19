//! The JSON run description and its validation into a ready-to-run [`Scenario`].

use std::path::{Path, PathBuf};

use conic_billiards::hooke::{
    cassini_polar_radii, orbit_from_state_h, CassiniOval, HookeBoundary, HookeError, HookeParams, HookeState,
};
use conic_billiards::kepler::{
    orbit_from_state, outgoing_orientation, BilliardState, KeplerBoundary, KeplerError, KeplerParams,
};
use conic_billiards::{Point, Tolerance, Vec2};
use serde::Deserialize;

use crate::error::CliError;

/// Environment variable replacing the built-in geometric tolerance.
pub const TOL_ENV: &str = "BILLIARD_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Kepler,
    Hooke,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Kepler => "kepler",
            SystemKind::Hooke => "hooke",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system: SystemKind,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub physics: PhysicsConfig,
    pub start: StartConfig,
    #[serde(default)]
    pub bounces: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub render: RenderConfig,
    #[serde(default)]
    pub expect: Expect,
    #[serde(default)]
    pub verify: VerifyConfig,
}

/// Semimajor axis and linear eccentricity of the mirror.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub a: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub m: Option<f64>,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
}

/// One of: `focus` (or `radius` + `angle`) with `a`/`e_over_k`/`energy` and an
/// optional `point` or `which`; or `pos` + `vel`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartConfig {
    pub focus: Option<[f64; 2]>,
    pub radius: Option<f64>,
    pub angle: Option<f64>,
    pub point: Option<[f64; 2]>,
    pub which: Option<usize>,
    pub a: Option<f64>,
    pub e_over_k: Option<f64>,
    pub energy: Option<f64>,
    pub pos: Option<[f64; 2]>,
    pub vel: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Membership tolerance of intersection and contact tests.
    pub geometric: Option<f64>,
    /// Relative drift allowed for the foci curve.
    pub invariant: f64,
    /// Closed-form identities evaluated along the run.
    pub formula: f64,
    /// Mirror construction against the two-circle construction.
    pub construction: f64,
    /// Geometric map against the integrated equations of motion.
    pub oracle: f64,
    pub envelope: f64,
    pub duality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            geometric: None,
            invariant: 1e-9,
            formula: 1e-10,
            construction: 1e-9,
            oracle: 1e-6,
            envelope: 1e-7,
            duality: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Boundary,
    Orbits,
    FociCurve,
    Envelopes,
    Directrices,
    DirectrixEnvelope,
    StringPoints,
    ReflectionPoints,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StrokeWidths {
    pub boundary: f64,
    pub orbit: f64,
    pub foci_curve: f64,
    pub envelope: f64,
    pub directrix: f64,
}

impl Default for StrokeWidths {
    fn default() -> Self {
        Self {
            boundary: 2.0,
            orbit: 1.0,
            foci_curve: 1.0,
            envelope: 1.0,
            directrix: 0.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenderConfig {
    /// Width of the image in pixels; the height follows the aspect of the view.
    pub width: f64,
    pub stroke: StrokeWidths,
    pub layers: Vec<Layer>,
    /// How many flight ellipses to draw, from the start.
    pub orbits: usize,
    /// Points per sampled curve.
    pub samples: usize,
    /// Directrices drawn, at foci spread evenly over the foci curve.
    pub directrices: usize,
    /// `[xmin, ymin, xmax, ymax]` replacing the fitted view.
    pub view: Option<[f64; 4]>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 800.0,
            stroke: StrokeWidths::default(),
            layers: vec![Layer::Boundary, Layer::Orbits, Layer::FociCurve, Layer::Envelopes],
            orbits: 12,
            samples: 256,
            directrices: 24,
            view: None,
        }
    }
}

/// Values the run is checked against by `verify`.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expect {
    /// Foci-circle radius `R` (Kepler) or oval constant `R_H` (Hooke).
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Bounces replayed by the equations-of-motion integrator.
    pub oracle_bounces: usize,
    /// Bounces replayed by the alternative construction and the duality.
    pub construction_bounces: usize,
    /// Flight ellipses checked for envelope contact.
    pub envelope_orbits: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            oracle_bounces: 20,
            construction_bounces: 50,
            envelope_orbits: 100,
        }
    }
}

/// Mirror, physics and start state of one system.
#[derive(Debug, Clone, Copy)]
pub enum Setup {
    Kepler {
        boundary: KeplerBoundary,
        params: KeplerParams,
        start: BilliardState,
    },
    Hooke {
        boundary: HookeBoundary,
        params: HookeParams,
        start: HookeState,
    },
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub setup: Setup,
    pub bounces: usize,
    pub tolerances: Tolerances,
    pub geometric_tol: f64,
    pub outputs: Outputs,
    pub render: RenderConfig,
    pub expect: Expect,
    pub verify: VerifyConfig,
}

impl Scenario {
    pub fn system(&self) -> SystemKind {
        match self.setup {
            Setup::Kepler { .. } => SystemKind::Kepler,
            Setup::Hooke { .. } => SystemKind::Hooke,
        }
    }
}

/// Parse a config document. Errors name the offending field and position.
pub fn parse(text: &str, origin: &str) -> Result<Config, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            CliError::Config(format!("{origin}: {inner}"))
        } else {
            CliError::Config(format!("{origin}: {path}: {inner}"))
        }
    })
}

/// Read, parse and validate a config file. Relative output paths are taken
/// relative to the directory of the file.
pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let cfg = parse(&text, &path.display().to_string())?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut sc = validate(&cfg, env_tolerance()?).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    sc.outputs = resolve_outputs(&sc.outputs, base);
    Ok(sc)
}

pub(crate) fn resolve_outputs(o: &Outputs, base: &Path) -> Outputs {
    let fix = |p: &Option<PathBuf>| p.as_ref().map(|p| if p.is_relative() { base.join(p) } else { p.clone() });
    Outputs {
        csv: fix(&o.csv),
        json: fix(&o.json),
        svg: fix(&o.svg),
    }
}

/// The value of [`TOL_ENV`], if set.
pub fn env_tolerance() -> Result<Option<f64>, CliError> {
    match std::env::var(TOL_ENV) {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(Some(v)),
            _ => Err(CliError::config(TOL_ENV, format!("expected a positive number, got {s:?}"))),
        },
    }
}

fn positive(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(field, format!("must be positive, got {v}")))
    }
}

fn finite2(field: &str, v: [f64; 2]) -> Result<Point, CliError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(Vec2::new(v[0], v[1]))
    } else {
        Err(CliError::config(field, "must be finite"))
    }
}

/// Check field combinations and build the mirror and start state.
/// `env_tol` takes the place of the built-in geometric tolerance. A start that
/// touches the mirror tangentially is a step failure at bounce 0.
pub fn validate(cfg: &Config, env_tol: Option<f64>) -> Result<Scenario, CliError> {
    let t = &cfg.tolerances;
    for (name, v) in [
        ("tolerances.invariant", t.invariant),
        ("tolerances.formula", t.formula),
        ("tolerances.construction", t.construction),
        ("tolerances.oracle", t.oracle),
        ("tolerances.envelope", t.envelope),
        ("tolerances.duality", t.duality),
    ] {
        positive(name, v)?;
    }
    let geometric_tol = match t.geometric {
        Some(v) => positive("tolerances.geometric", v)?,
        None => env_tol.unwrap_or(Tolerance::default().membership),
    };
    let tol = Tolerance {
        membership: geometric_tol,
        residual: Tolerance::default().residual.min(geometric_tol),
    };
    let r = &cfg.render;
    positive("render.width", r.width)?;
    let s = &r.stroke;
    for (name, v) in [
        ("render.stroke.boundary", s.boundary),
        ("render.stroke.orbit", s.orbit),
        ("render.stroke.foci_curve", s.foci_curve),
        ("render.stroke.envelope", s.envelope),
        ("render.stroke.directrix", s.directrix),
    ] {
        positive(name, v)?;
    }
    if r.samples < 8 {
        return Err(CliError::config("render.samples", "must be at least 8"));
    }
    if let Some(v) = r.view {
        if !v.iter().all(|x| x.is_finite()) || v[2] <= v[0] || v[3] <= v[1] {
            return Err(CliError::config("render.view", "expected [xmin, ymin, xmax, ymax] with max > min"));
        }
    }
    if let Some(v) = cfg.expect.radius {
        positive("expect.radius", v)?;
    }
    let m = positive("physics.m", cfg.physics.m.unwrap_or(1.0))?;
    let setup = match cfg.system {
        SystemKind::Kepler => {
            if cfg.physics.k.is_some() {
                return Err(CliError::config("physics.k", "not used by the kepler system"));
            }
            let alpha = cfg.physics.alpha.unwrap_or(-1.0);
            if !(alpha.is_finite() && alpha < 0.0) {
                return Err(CliError::config("physics.alpha", "must be negative (attractive center)"));
            }
            let params = KeplerParams::new(m, alpha).map_err(|e| CliError::config("physics", e))?;
            let boundary = KeplerBoundary::new(positive("boundary.a", cfg.boundary.a)?, cfg.boundary.c)
                .map_err(|e| CliError::config("boundary", e))?
                .with_tolerance(tol);
            let start = kepler_start(&cfg.start, &boundary, &params)?;
            Setup::Kepler { boundary, params, start }
        }
        SystemKind::Hooke => {
            if cfg.physics.alpha.is_some() {
                return Err(CliError::config("physics.alpha", "not used by the hooke system"));
            }
            let k = positive("physics.k", cfg.physics.k.unwrap_or(1.0))?;
            if r.layers.contains(&Layer::StringPoints) {
                return Err(CliError::config("render.layers", "string_points is only drawn for the kepler system"));
            }
            let params = HookeParams::new(m, k).map_err(|e| CliError::config("physics", e))?;
            let boundary = HookeBoundary::new(positive("boundary.a", cfg.boundary.a)?, cfg.boundary.c)
                .map_err(|e| CliError::config("boundary", e))?
                .with_tolerance(tol);
            let start = hooke_start(&cfg.start, &boundary, &params)?;
            Setup::Hooke { boundary, params, start }
        }
    };
    Ok(Scenario {
        setup,
        bounces: cfg.bounces,
        tolerances: cfg.tolerances,
        geometric_tol,
        outputs: cfg.outputs.clone(),
        render: cfg.render.clone(),
        expect: cfg.expect,
        verify: cfg.verify,
    })
}

enum StartKind {
    Focus(Point),
    Phase(Point, Vec2),
}

/// Shared shape checks; `focus_on_curve` places a focus from `radius` + `angle`.
fn start_kind(
    s: &StartConfig,
    focus_on_curve: impl Fn(f64, f64) -> Result<Point, CliError>,
) -> Result<StartKind, CliError> {
    let polar = s.radius.is_some() || s.angle.is_some();
    let phase = s.pos.is_some() || s.vel.is_some();
    if phase {
        if s.focus.is_some() || polar || s.point.is_some() || s.which.is_some() {
            return Err(CliError::config("start", "pos/vel cannot be combined with focus, radius, angle, point or which"));
        }
        if s.a.is_some() || s.e_over_k.is_some() || s.energy.is_some() {
            return Err(CliError::config("start", "the energy of a pos/vel start follows from the state"));
        }
        let pos = finite2("start.pos", s.pos.ok_or_else(|| CliError::config("start.pos", "missing (vel is set)"))?)?;
        let vel = finite2("start.vel", s.vel.ok_or_else(|| CliError::config("start.vel", "missing (pos is set)"))?)?;
        return Ok(StartKind::Phase(pos, vel));
    }
    if s.point.is_some() && s.which.is_some() {
        return Err(CliError::config("start", "give either point or which, not both"));
    }
    let focus = match (s.focus, polar) {
        (Some(_), true) => return Err(CliError::config("start", "give either focus or radius + angle, not both")),
        (Some(f), false) => finite2("start.focus", f)?,
        (None, true) => {
            let r = positive("start.radius", s.radius.ok_or_else(|| CliError::config("start.radius", "missing (angle is set)"))?)?;
            let angle = s.angle.ok_or_else(|| CliError::config("start.angle", "missing (radius is set)"))?;
            if !angle.is_finite() {
                return Err(CliError::config("start.angle", "must be finite"));
            }
            focus_on_curve(r, angle)?
        }
        (None, false) => return Err(CliError::config("start", "expected focus, radius + angle, or pos + vel")),
    };
    Ok(StartKind::Focus(focus))
}

fn on_boundary(field: &str, residual: f64, tol: f64) -> Result<(), CliError> {
    if residual > tol {
        Err(CliError::config(field, format!("point is not on the mirror (residual {residual:e})")))
    } else {
        Ok(())
    }
}

fn kepler_start(s: &StartConfig, b: &KeplerBoundary, params: &KeplerParams) -> Result<BilliardState, CliError> {
    let kind = start_kind(s, |r, angle| Ok(b.second_focus() + Vec2::from_angle(angle) * r))?;
    let step_err = |e: KeplerError| match e {
        KeplerError::GrazingOrbit { .. } => CliError::Step { index: 0, message: e.to_string() },
        _ => CliError::config("start", e),
    };
    match kind {
        StartKind::Phase(pos, vel) => {
            let (orbit, _) = orbit_from_state(pos, vel, params).map_err(step_err)?;
            let g = b.implicit().gradient(pos).norm().max(f64::MIN_POSITIVE);
            on_boundary("start.pos", b.implicit().eval(pos).abs() / g, b.tol.membership)?;
            let out = outgoing_orientation(orbit.focus, orbit.a, pos, b).map_err(step_err)?;
            if out != orbit.orientation {
                return Err(CliError::config("start.vel", "points into the mirror, not into the flight side"));
            }
            Ok(BilliardState { orbit, point: pos, index: 0 })
        }
        StartKind::Focus(focus) => {
            if s.e_over_k.is_some() {
                return Err(CliError::config("start.e_over_k", "not used by the kepler system; give a or energy"));
            }
            let a = match (s.a, s.energy) {
                (Some(_), Some(_)) => return Err(CliError::config("start", "give either a or energy, not both")),
                (Some(a), None) => positive("start.a", a)?,
                (None, Some(e)) => {
                    if !(e.is_finite() && e < 0.0) {
                        return Err(CliError::config("start.energy", "must be negative for elliptic flight"));
                    }
                    params.semimajor_for(e)
                }
                (None, None) => return Err(CliError::config("start", "missing a or energy")),
            };
            match s.point {
                Some(p) => {
                    let p = finite2("start.point", p)?;
                    let g = b.implicit().gradient(p).norm().max(f64::MIN_POSITIVE);
                    on_boundary("start.point", b.implicit().eval(p).abs() / g, b.tol.membership)?;
                    BilliardState::at_point(focus, a, p, b).map_err(step_err)
                }
                None => BilliardState::from_focus(focus, a, b, s.which.unwrap_or(0)).map_err(step_err),
            }
        }
    }
}

fn hooke_start(s: &StartConfig, b: &HookeBoundary, params: &HookeParams) -> Result<HookeState, CliError> {
    let c = b.c_h();
    let kind = start_kind(s, |r, angle| {
        let oval = CassiniOval::new(c, r).map_err(|e| CliError::config("start.radius", e))?;
        match cassini_polar_radii(angle, &oval).first() {
            Some(&rho) => Ok(Vec2::from_angle(angle) * rho),
            None => Err(CliError::config("start.angle", "the oval has no point in this direction")),
        }
    })?;
    let step_err = |e: HookeError| match e {
        HookeError::GrazingOrbit { .. } => CliError::Step { index: 0, message: e.to_string() },
        _ => CliError::config("start", e),
    };
    match kind {
        StartKind::Phase(pos, vel) => {
            let orbit = orbit_from_state_h(pos, vel, params).map_err(step_err)?;
            let g = b.implicit().gradient(pos).norm().max(f64::MIN_POSITIVE);
            on_boundary("start.pos", b.implicit().eval(pos).abs() / g, b.tol.membership)?;
            let n = b.implicit().gradient(pos) * b.flight_side_sign();
            if vel.dot(n) <= 0.0 {
                return Err(CliError::config("start.vel", "points into the mirror, not into the flight side"));
            }
            Ok(HookeState { orbit, point: pos, index: 0 })
        }
        StartKind::Focus(focus) => {
            if s.a.is_some() {
                return Err(CliError::config("start.a", "not used by the hooke system; give e_over_k or energy"));
            }
            let e_over_k = match (s.e_over_k, s.energy) {
                (Some(_), Some(_)) => return Err(CliError::config("start", "give either e_over_k or energy, not both")),
                (Some(e), None) => positive("start.e_over_k", e)?,
                (None, Some(e)) => positive("start.energy", e)? / params.k,
                (None, None) => return Err(CliError::config("start", "missing e_over_k or energy")),
            };
            match s.point {
                Some(p) => {
                    let p = finite2("start.point", p)?;
                    let g = b.implicit().gradient(p).norm().max(f64::MIN_POSITIVE);
                    on_boundary("start.point", b.implicit().eval(p).abs() / g, b.tol.membership)?;
                    HookeState::at_point(focus, e_over_k, p, b).map_err(step_err)
                }
                None => HookeState::from_focus(focus, e_over_k, b, s.which.unwrap_or(0)).map_err(step_err),
            }
        }
    }
}
