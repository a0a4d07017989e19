//! Running a scenario: per-bounce rows, CSV export and the JSON summary.

use std::fmt::Write as _;

use conic_billiards::hooke::{hooke_trajectory, HookeTrajectory};
use conic_billiards::kepler::{billiard_trajectory, gallavotti_jauslin_d, Trajectory};
use serde::Serialize;

use crate::config::{Scenario, Setup};
use crate::error::CliError;

/// Trajectory of either system, possibly cut short by a step failure.
#[derive(Debug, Clone)]
pub enum Run {
    Kepler(Trajectory),
    Hooke(HookeTrajectory),
}

/// A step failure with the bounce it happened at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFailure {
    pub bounce: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub run: Run,
    pub failure: Option<StepFailure>,
}

impl Outcome {
    pub fn len(&self) -> usize {
        match &self.run {
            Run::Kepler(t) => t.states.len(),
            Run::Hooke(t) => t.states.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn into_result(self) -> Result<Run, CliError> {
        match self.failure {
            None => Ok(self.run),
            Some(f) => Err(CliError::Step {
                index: f.bounce,
                message: f.message,
            }),
        }
    }
}

/// Iterate the billiard map `n` times from the configured start.
pub fn run(sc: &Scenario, n: usize) -> Outcome {
    match &sc.setup {
        Setup::Kepler { boundary, start, .. } => match billiard_trajectory(*start, boundary, n) {
            Ok(t) => Outcome { run: Run::Kepler(t), failure: None },
            Err(e) => Outcome {
                failure: Some(StepFailure {
                    bounce: e.index,
                    message: e.source.to_string(),
                }),
                run: Run::Kepler(e.partial),
            },
        },
        Setup::Hooke { boundary, start, .. } => match hooke_trajectory(*start, boundary, n) {
            Ok(t) => Outcome { run: Run::Hooke(t), failure: None },
            Err(e) => Outcome {
                failure: Some(StepFailure {
                    bounce: e.index,
                    message: e.source.to_string(),
                }),
                run: Run::Hooke(e.partial),
            },
        },
    }
}

/// Minimum, maximum and drift of a quantity along the run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    /// `(max - min)/|first|`, or `max |v|` for residuals that should vanish.
    pub drift: f64,
}

impl Stats {
    fn relative(v: &[f64]) -> Option<Self> {
        let first = *v.first()?;
        let (min, max) = min_max(v);
        let scale = if first == 0.0 { 1.0 } else { first.abs() };
        Some(Self { min, max, drift: (max - min) / scale })
    }

    fn residual(v: &[f64]) -> Option<Self> {
        let (min, max) = min_max(v);
        (!v.is_empty()).then(|| Self { min, max, drift: min.abs().max(max.abs()) })
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub system: &'static str,
    pub bounces_requested: usize,
    pub bounces_completed: usize,
    /// Named invariants in column order.
    pub invariants: Vec<(String, Stats)>,
    pub error: Option<StepFailure>,
}

/// Columns of the per-bounce table after `bounce`.
pub fn columns(sc: &Scenario) -> &'static [&'static str] {
    match sc.setup {
        Setup::Kepler { .. } => &["Px", "Py", "Fx", "Fy", "R", "a", "D"],
        Setup::Hooke { .. } => &["Px", "Py", "Fx", "Fy", "cassini_residual", "aH", "E_over_k"],
    }
}

/// One row per state: bounce index and the values of [`columns`].
pub fn rows(sc: &Scenario, run: &Run) -> Vec<(usize, [f64; 7])> {
    match (&sc.setup, run) {
        (Setup::Kepler { boundary, params, .. }, Run::Kepler(t)) => t
            .states
            .iter()
            .zip(&t.reports)
            .map(|(s, r)| {
                let d = gallavotti_jauslin_d(&s.orbit.physics(params), boundary);
                (s.index, [s.point.x, s.point.y, s.orbit.focus.x, s.orbit.focus.y, r.radius, r.a, d])
            })
            .collect(),
        (Setup::Hooke { .. }, Run::Hooke(t)) => t
            .states
            .iter()
            .zip(&t.reports)
            .map(|(s, r)| {
                (s.index, [s.point.x, s.point.y, s.orbit.focus.x, s.orbit.focus.y, r.cassini_residual, r.a_h, r.e_over_k])
            })
            .collect(),
        _ => Vec::new(),
    }
}

pub fn csv(sc: &Scenario, run: &Run) -> String {
    let mut out = String::from("bounce");
    for c in columns(sc) {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, vals) in rows(sc, run) {
        let _ = write!(out, "{i}");
        for v in vals {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn summary(sc: &Scenario, outcome: &Outcome) -> Summary {
    let rows = rows(sc, &outcome.run);
    let col = |j: usize| rows.iter().map(|(_, v)| v[j]).collect::<Vec<f64>>();
    let names = columns(sc);
    let mut invariants = Vec::new();
    for (j, &name) in names.iter().enumerate().skip(4) {
        // the Hooke semimajor axis changes from flight to flight
        if name == "aH" {
            continue;
        }
        let v = col(j);
        let stats = if name == "cassini_residual" {
            Stats::residual(&v)
        } else {
            Stats::relative(&v)
        };
        if let Some(s) = stats {
            invariants.push((name.to_string(), s));
        }
    }
    if let Run::Kepler(t) = &outcome.run {
        let defects: Vec<f64> = t.reports.iter().map(|r| r.focal_distance_defect).collect();
        if let Some(s) = Stats::residual(&defects) {
            invariants.push(("focal_distance_defect".to_string(), s));
        }
    }
    Summary {
        system: sc.system().name(),
        bounces_requested: sc.bounces,
        bounces_completed: outcome.len().saturating_sub(1),
        invariants,
        error: outcome.failure.clone(),
    }
}

/// Summary as pretty JSON; object keys come out sorted.
pub fn summary_json(s: &Summary) -> String {
    let mut inv = serde_json::Map::new();
    for (k, v) in &s.invariants {
        inv.insert(k.clone(), serde_json::to_value(v).expect("stats serialize"));
    }
    let doc = serde_json::json!({
        "system": s.system,
        "bounces_requested": s.bounces_requested,
        "bounces_completed": s.bounces_completed,
        "invariants": inv,
        "error": s.error,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("summary serializes");
    text.push('\n');
    text
}
