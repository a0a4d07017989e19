//! Layered SVG scenes of a run.
//!
//! World coordinates are written as they are, y up: the root `viewBox` spans
//! `[xmin, -ymax] .. [xmax, -ymin]` and a `scale(1 -1)` group flips the axis.
//! Widths and dash lengths are given in pixels and converted to world units.

use std::fmt::Write as _;

use conic_billiards::hooke::{
    hooke_directrix, hooke_directrix_envelope, hooke_envelopes, orbit_conic_h, CassiniOval, FocusSign, HookeOrbit,
    RadiusBranch,
};
use conic_billiards::kepler::{
    directrix, directrix_envelope, envelope_conics, extremal_points, orbit_implicit, KeplerOrbit,
};
use conic_billiards::{Conic, Line, Orientation, Point, Vec2};

use crate::config::{Layer, RenderConfig, Scenario, Setup};
use crate::error::CliError;
use crate::simulate::{run, Run};

/// Fraction of the fitted extent added on every side.
const MARGIN: f64 = 0.1;
/// Radius of point markers in pixels.
const DOT_PX: f64 = 2.5;

#[derive(Debug, Clone, PartialEq)]
enum Item {
    Path { pts: Vec<Point>, closed: bool },
    Dot(Point),
}

#[derive(Debug, Clone, Copy)]
struct Style {
    stroke: &'static str,
    width_px: f64,
    /// Dash pattern in pixels, empty for solid.
    dash_px: &'static [f64],
    /// Fill of point markers.
    dot: &'static str,
}

#[derive(Debug, Clone)]
struct SceneLayer {
    id: &'static str,
    style: Style,
    items: Vec<Item>,
}

/// Axis-aligned rectangle `[xmin, ymin, xmax, ymax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViewBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl ViewBox {
    fn fit<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = pts.into_iter().filter(|p| p.is_finite());
        let first = it.next()?;
        let mut v = ViewBox { xmin: first.x, ymin: first.y, xmax: first.x, ymax: first.y };
        for p in it {
            v.xmin = v.xmin.min(p.x);
            v.ymin = v.ymin.min(p.y);
            v.xmax = v.xmax.max(p.x);
            v.ymax = v.ymax.max(p.y);
        }
        // a single point or a flat set still gets a visible box
        let span = (v.xmax - v.xmin).max(v.ymax - v.ymin).max(1e-9);
        let (mx, my) = (
            MARGIN * (v.xmax - v.xmin).max(0.1 * span),
            MARGIN * (v.ymax - v.ymin).max(0.1 * span),
        );
        Some(ViewBox { xmin: v.xmin - mx, ymin: v.ymin - my, xmax: v.xmax + mx, ymax: v.ymax + my })
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    fn center(&self) -> Point {
        Vec2::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }

    fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// The part of `line` inside the box, if any.
    fn clip(&self, line: &Line) -> Option<(Point, Point)> {
        let p0 = line.project(self.center());
        let d = line.direction();
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (p, dir, min, max) in [(p0.x, d.x, self.xmin, self.xmax), (p0.y, d.y, self.ymin, self.ymax)] {
            if dir.abs() < 1e-15 {
                if p < min || p > max {
                    return None;
                }
                continue;
            }
            let (t1, t2) = ((min - p) / dir, (max - p) / dir);
            lo = lo.max(t1.min(t2));
            hi = hi.min(t1.max(t2));
        }
        (lo < hi).then(|| (p0 + d * lo, p0 + d * hi))
    }
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn conic_paths(c: &Conic, view_of: Point, reach: f64, n: usize) -> Vec<Item> {
    c.sample(view_of, reach, n)
        .into_iter()
        .filter(|p| p.len() >= 2)
        .map(|pts| {
            let closed = pts.len() > 2 && pts.first() == pts.last();
            Item::Path { pts, closed }
        })
        .collect()
}

fn circle_path(center: Point, r: f64, n: usize) -> Item {
    let pts = (0..n)
        .map(|i| center + Vec2::from_angle(std::f64::consts::TAU * i as f64 / n as f64) * r)
        .collect();
    Item::Path { pts, closed: true }
}

fn style(layer: Layer, r: &RenderConfig) -> (&'static str, Style) {
    let s = &r.stroke;
    match layer {
        Layer::Boundary => ("boundary", Style { stroke: "#000000", width_px: s.boundary, dash_px: &[], dot: "none" }),
        Layer::Orbits => ("flight-ellipses", Style { stroke: "#1f77b4", width_px: s.orbit, dash_px: &[], dot: "none" }),
        Layer::FociCurve => ("foci-curve", Style { stroke: "#d62728", width_px: s.foci_curve, dash_px: &[6.0, 4.0], dot: "#d62728" }),
        Layer::Envelopes => ("envelopes", Style { stroke: "#2ca02c", width_px: s.envelope, dash_px: &[8.0, 3.0, 1.5, 3.0], dot: "none" }),
        Layer::Directrices => ("directrices", Style { stroke: "#7f7f7f", width_px: s.directrix, dash_px: &[], dot: "none" }),
        Layer::DirectrixEnvelope => ("directrix-envelope", Style { stroke: "#9467bd", width_px: s.envelope, dash_px: &[], dot: "none" }),
        Layer::StringPoints => ("string-points", Style { stroke: "none", width_px: s.orbit, dash_px: &[], dot: "#ff7f0e" }),
        Layer::ReflectionPoints => ("reflection-points", Style { stroke: "none", width_px: s.orbit, dash_px: &[], dot: "#000000" }),
    }
}

/// Geometry common to the fitted view and the layers.
struct Frame {
    boundary: Vec<Item>,
    foci_curve: Vec<Item>,
}

fn path_points(items: &[Item]) -> impl Iterator<Item = &Point> {
    items.iter().flat_map(|it| match it {
        Item::Path { pts, .. } => pts.as_slice(),
        Item::Dot(p) => std::slice::from_ref(p),
    })
}

/// Evenly spread foci along the foci curve for the directrix family.
fn family_foci(foci_curve: &[Item], n: usize) -> Vec<Point> {
    let pts: Vec<Point> = foci_curve
        .iter()
        .flat_map(|it| match it {
            Item::Path { pts, .. } => {
                let end = if pts.len() > 1 && pts.first() == pts.last() { pts.len() - 1 } else { pts.len() };
                pts[..end].to_vec()
            }
            Item::Dot(_) => Vec::new(),
        })
        .collect();
    if pts.is_empty() || n == 0 {
        return Vec::new();
    }
    (0..n).map(|j| pts[(j * pts.len()) / n]).collect()
}

/// Build the SVG document for a scenario.
pub fn render(sc: &Scenario) -> Result<String, CliError> {
    let traj = run(sc, sc.bounces).into_result()?;
    let r = &sc.render;
    let n = r.samples;
    let mut layers = Vec::new();
    let frame;
    let view;
    match (&sc.setup, &traj) {
        (Setup::Kepler { boundary, .. }, Run::Kepler(t)) => {
            let reach = 2.0 * (boundary.a_k() + boundary.c_k());
            let fp = boundary.second_focus();
            let s0 = t.states[0];
            let radius = s0.orbit.focus.distance(fp);
            frame = Frame {
                boundary: conic_paths(boundary.implicit(), Vec2::ZERO, reach, n),
                foci_curve: vec![circle_path(fp, radius, n)],
            };
            view = fitted_view(r, &frame)?;
            let orbits: Vec<KeplerOrbit> = t.states.iter().take(r.orbits).map(|s| s.orbit).collect();
            let (a, c) = (s0.orbit.a, boundary.c_k());
            let far = view.diagonal();
            for &layer in &r.layers {
                let items = match layer {
                    Layer::Boundary => frame.boundary.clone(),
                    Layer::Orbits => orbits
                        .iter()
                        .filter_map(|o| orbit_implicit(o).ok())
                        .flat_map(|oc| conic_paths(&oc, view.center(), far, n))
                        .collect(),
                    Layer::FociCurve => {
                        let mut v = frame.foci_curve.clone();
                        v.extend(orbits.iter().map(|o| Item::Dot(o.focus)));
                        v.push(Item::Dot(fp));
                        v
                    }
                    Layer::Envelopes => match envelope_conics(a, radius, c) {
                        Ok((ep, em)) => {
                            let mut v = conic_paths(&ep, view.center(), far, n);
                            v.extend(conic_paths(&em, view.center(), far, n));
                            v
                        }
                        Err(_) => Vec::new(),
                    },
                    Layer::Directrices => family_foci(&frame.foci_curve, r.directrices)
                        .into_iter()
                        .filter_map(|f| KeplerOrbit::new(f, a, Orientation::Clockwise).ok())
                        .filter_map(|o| directrix(&o).ok())
                        .filter_map(|l| view.clip(&l))
                        .map(|(p, q)| Item::Path { pts: vec![p, q], closed: false })
                        .collect(),
                    Layer::DirectrixEnvelope => match directrix_envelope(a, radius, c) {
                        Ok(env) => conic_paths(&env, view.center(), far, n),
                        Err(_) => Vec::new(),
                    },
                    Layer::StringPoints => orbits
                        .iter()
                        .filter_map(|o| extremal_points(o, boundary).ok())
                        .flat_map(|(p, q)| [Item::Dot(p), Item::Dot(q)])
                        .collect(),
                    Layer::ReflectionPoints => t.states.iter().take(r.orbits.max(1)).map(|s| Item::Dot(s.point)).collect(),
                };
                let (id, st) = style(layer, r);
                layers.push(SceneLayer { id, style: st, items });
            }
        }
        (Setup::Hooke { boundary, .. }, Run::Hooke(t)) => {
            let reach = 2.0 * (boundary.a_h() + boundary.c_h());
            let s0 = t.states[0];
            let oval = t.oval.unwrap_or(CassiniOval { c: boundary.c_h(), r: 0.0 });
            frame = Frame {
                boundary: conic_paths(boundary.implicit(), Vec2::ZERO, reach, n),
                foci_curve: oval
                    .sample(n)
                    .into_iter()
                    .map(|pts| Item::Path { pts, closed: false })
                    .collect(),
            };
            view = fitted_view(r, &frame)?;
            let orbits: Vec<HookeOrbit> = t.states.iter().take(r.orbits).map(|s| s.orbit).collect();
            let e = s0.orbit.e_over_k;
            let far = view.diagonal();
            for &layer in &r.layers {
                let items = match layer {
                    Layer::Boundary => frame.boundary.clone(),
                    Layer::Orbits => orbits
                        .iter()
                        .filter(|o| !o.is_segment())
                        .filter_map(|o| orbit_conic_h(o).ok())
                        .flat_map(|oc| conic_paths(&oc, Vec2::ZERO, far, n))
                        .collect(),
                    Layer::FociCurve => {
                        let mut v = frame.foci_curve.clone();
                        v.extend(orbits.iter().flat_map(|o| [Item::Dot(o.focus), Item::Dot(-o.focus)]));
                        v
                    }
                    Layer::Envelopes => match hooke_envelopes(&oval, e) {
                        Ok((ep, em)) => {
                            let mut v = conic_paths(&ep, Vec2::ZERO, far, n);
                            v.extend(conic_paths(&em, Vec2::ZERO, far, n));
                            v
                        }
                        Err(_) => Vec::new(),
                    },
                    Layer::Directrices => family_foci(&frame.foci_curve, r.directrices)
                        .into_iter()
                        .filter_map(|f| {
                            let o = HookeOrbit::new(f, e, Orientation::Clockwise).ok()?;
                            // the orbit keeps one focus of the pair; draw the directrix of `f`
                            let sign = if o.focus == f { FocusSign::Plus } else { FocusSign::Minus };
                            hooke_directrix(&o, sign).ok()
                        })
                        .filter_map(|l| view.clip(&l))
                        .map(|(p, q)| Item::Path { pts: vec![p, q], closed: false })
                        .collect(),
                    Layer::DirectrixEnvelope => hooke_envelope_paths(&oval, e, n),
                    Layer::StringPoints => Vec::new(),
                    Layer::ReflectionPoints => t.states.iter().take(r.orbits.max(1)).map(|s| Item::Dot(s.point)).collect(),
                };
                let (id, st) = style(layer, r);
                layers.push(SceneLayer { id, style: st, items });
            }
        }
        _ => unreachable!("run matches the setup"),
    }
    Ok(write_svg(r, &view, &layers))
}

fn fitted_view(r: &RenderConfig, frame: &Frame) -> Result<ViewBox, CliError> {
    if let Some([xmin, ymin, xmax, ymax]) = r.view {
        return Ok(ViewBox { xmin, ymin, xmax, ymax });
    }
    ViewBox::fit(path_points(&frame.boundary).chain(path_points(&frame.foci_curve)))
        .ok_or_else(|| CliError::Config("render: nothing to fit the view to".into()))
}

/// Directrix-envelope curves of both oval branches, split where the branch
/// has no real radius.
fn hooke_envelope_paths(oval: &CassiniOval, e: f64, n: usize) -> Vec<Item> {
    let mut out = Vec::new();
    let m = 4 * n;
    for branch in [RadiusBranch::Outer, RadiusBranch::Inner] {
        let mut run: Vec<Point> = Vec::new();
        for j in 0..=m {
            let phi = std::f64::consts::TAU * j as f64 / m as f64;
            match hooke_directrix_envelope(oval, e, branch, &[phi]) {
                Ok(p) if p[0].is_finite() => run.push(p[0]),
                _ => {
                    if run.len() >= 2 {
                        out.push(Item::Path { pts: std::mem::take(&mut run), closed: false });
                    }
                    run.clear();
                }
            }
        }
        if run.len() >= 2 {
            out.push(Item::Path { pts: run, closed: false });
        }
    }
    out
}

fn write_svg(r: &RenderConfig, view: &ViewBox, layers: &[SceneLayer]) -> String {
    let px = view.width() / r.width;
    let height = r.width * view.height() / view.width();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        num(r.width),
        num(height),
        num(view.xmin),
        num(-view.ymax),
        num(view.width()),
        num(view.height())
    );
    s.push_str("<g transform=\"scale(1 -1)\" fill=\"none\" stroke-linecap=\"round\" stroke-linejoin=\"round\">\n");
    for l in layers {
        let st = &l.style;
        let _ = write!(s, r#"<g id="{}" stroke="{}" stroke-width="{}""#, l.id, st.stroke, num(st.width_px * px));
        if !st.dash_px.is_empty() {
            let dash: Vec<String> = st.dash_px.iter().map(|d| num(d * px)).collect();
            let _ = write!(s, r#" stroke-dasharray="{}""#, dash.join(" "));
        }
        s.push_str(">\n");
        for it in &l.items {
            match it {
                Item::Path { pts, closed } => {
                    s.push_str("<path d=\"");
                    for (i, p) in pts.iter().enumerate() {
                        let _ = write!(s, "{}{} {}", if i == 0 { "M" } else { " L" }, num(p.x), num(p.y));
                    }
                    if *closed {
                        s.push_str(" Z");
                    }
                    s.push_str("\"/>\n");
                }
                Item::Dot(p) => {
                    let _ = writeln!(
                        s,
                        r#"<circle cx="{}" cy="{}" r="{}" fill="{}" stroke="none"/>"#,
                        num(p.x),
                        num(p.y),
                        num(DOT_PX * px),
                        st.dot
                    );
                }
            }
        }
        s.push_str("</g>\n");
    }
    s.push_str("</g>\n</svg>\n");
    s
}
