//! SVG pictures of candidate support sets. Sets that can carry a measure are
//! drawn solid, forbidden ones dashed; full-dimensional sets are outlined by
//! marching squares on a 512×512 sample grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::point::Axis;
use crate::region::{affine_rank, AxisStrip, Region};
use crate::support::{classify, VerdictKind};
use crate::torus::{cayley_inverse, classify_torus, torus_curve, torus_region, TorusRegion};

/// Samples per axis.
pub const GRID: usize = 512;
const GAP: f64 = 16.0;
const BISECTIONS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FigureId {
    Lines,
    Strips,
    Cross,
    LinesTorus,
    StripsTorus,
    CrossTorus,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Lines,
        FigureId::Strips,
        FigureId::Cross,
        FigureId::LinesTorus,
        FigureId::StripsTorus,
        FigureId::CrossTorus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Lines => "lines",
            FigureId::Strips => "strips",
            FigureId::Cross => "cross",
            FigureId::LinesTorus => "lines-torus",
            FigureId::StripsTorus => "strips-torus",
            FigureId::CrossTorus => "cross-torus",
        }
    }

    pub fn is_torus(self) -> bool {
        matches!(self, FigureId::LinesTorus | FigureId::StripsTorus | FigureId::CrossTorus)
    }

    pub fn default_window(self) -> Window {
        if self.is_torus() {
            Window { x: [0.0, TAU], y: [0.0, TAU] }
        } else {
            Window { x: [-3.0, 3.0], y: [-3.0, 3.0] }
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown figure id {s:?}")))
    }
}

/// Plot area `[x₀,x₁] × [y₀,y₁]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Window {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSpec {
    pub id: FigureId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

impl FigureSpec {
    pub fn new(id: FigureId) -> Self {
        FigureSpec { id, window: None }
    }

    pub fn window(&self) -> Result<Window> {
        let w = self.window.unwrap_or_else(|| self.id.default_window());
        let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] < r[1];
        if !ok(w.x) || !ok(w.y) {
            return Err(Error::InvalidArgument("plot window must be nonempty and finite".into()));
        }
        if self.id.is_torus() && w != self.id.default_window() {
            return Err(Error::InvalidArgument("torus figures are drawn on [0, 2π)²".into()));
        }
        Ok(w)
    }
}

/// Drawing style of a set, decided by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Style {
    Admissible,
    Forbidden,
    Undecided,
}

impl Style {
    fn of(kind: VerdictKind) -> Style {
        match kind {
            VerdictKind::KnownAdmissible => Style::Admissible,
            VerdictKind::Forbidden => Style::Forbidden,
            VerdictKind::Undecided => Style::Undecided,
        }
    }

    pub fn class(self) -> &'static str {
        match self {
            Style::Admissible => "admissible",
            Style::Forbidden => "forbidden",
            Style::Undecided => "undecided",
        }
    }
}

/// Polylines of one set, in window coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub label: String,
    pub style: Style,
    pub citation: String,
    pub polylines: Vec<Polyline>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub closed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub shapes: Vec<Shape>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub id: FigureId,
    pub window: Window,
    pub panels: Vec<Panel>,
    /// Panels per row.
    pub columns: usize,
}

impl Figure {
    /// Style of the drawn set closest to `p` (window coordinates) in `panel`.
    pub fn nearest_style(&self, panel: usize, p: (f64, f64)) -> Option<Style> {
        let mut best: Option<(f64, Style)> = None;
        for s in &self.panels.get(panel)?.shapes {
            for l in &s.polylines {
                for seg in segments(l) {
                    let d = point_segment_distance(p, seg.0, seg.1);
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, s.style));
                    }
                }
            }
        }
        best.map(|b| b.1)
    }
}

fn segments(l: &Polyline) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
    let closing = if l.closed && l.points.len() > 2 { Some((l.points[l.points.len() - 1], l.points[0])) } else { None };
    l.points.windows(2).map(|w| (w[0], w[1])).chain(closing)
}

pub fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let u = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    let (qx, qy) = (a.0 + u * dx, a.1 + u * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

/// Centres of the `GRID` sample cells along `[lo, hi]`.
fn samples(r: [f64; 2]) -> Vec<f64> {
    let h = (r[1] - r[0]) / GRID as f64;
    (0..GRID).map(|i| r[0] + (i as f64 + 0.5) * h).collect()
}

/// Boundary of `{inside}` by marching squares, with crossings refined by bisection.
fn marching_squares(window: &Window, inside: &(dyn Fn(f64, f64) -> bool + Sync)) -> Vec<Polyline> {
    let xs = samples(window.x);
    let ys = samples(window.y);
    let mask: Vec<Vec<bool>> = ys.par_iter().map(|&y| xs.iter().map(|&x| inside(x, y)).collect()).collect();
    // Edge ids: (i, j, 0) joins (i,j)-(i+1,j) horizontally, (i, j, 1) joins (i,j)-(i,j+1).
    type Edge = (usize, usize, u8);
    let crossing = |e: Edge| -> (f64, f64) {
        let (i, j, dir) = e;
        let (a, b) = if dir == 0 { ((xs[i], ys[j]), (xs[i + 1], ys[j])) } else { ((xs[i], ys[j]), (xs[i], ys[j + 1])) };
        let va = inside(a.0, a.1);
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..BISECTIONS {
            let m = 0.5 * (lo + hi);
            if inside(a.0 + m * (b.0 - a.0), a.1 + m * (b.1 - a.1)) == va {
                lo = m;
            } else {
                hi = m;
            }
        }
        let m = 0.5 * (lo + hi);
        (a.0 + m * (b.0 - a.0), a.1 + m * (b.1 - a.1))
    };
    let mut segs: Vec<(Edge, Edge)> = Vec::new();
    for j in 0..GRID - 1 {
        for i in 0..GRID - 1 {
            let (bl, br, tr, tl) = (mask[j][i], mask[j][i + 1], mask[j + 1][i + 1], mask[j + 1][i]);
            let bottom = (i, j, 0u8);
            let top = (i, j + 1, 0u8);
            let left = (i, j, 1u8);
            let right = (i + 1, j, 1u8);
            let mut cut = Vec::with_capacity(4);
            if bl != br {
                cut.push(bottom);
            }
            if br != tr {
                cut.push(right);
            }
            if tl != tr {
                cut.push(top);
            }
            if bl != tl {
                cut.push(left);
            }
            match cut.len() {
                2 => segs.push((cut[0], cut[1])),
                // Saddle: keep the inside corners separated.
                4 if bl => {
                    segs.push((bottom, right));
                    segs.push((top, left));
                }
                4 => {
                    segs.push((bottom, left));
                    segs.push((top, right));
                }
                _ => {}
            }
        }
    }
    chain(&segs)
        .into_iter()
        .map(|(edges, closed)| Polyline { points: edges.into_iter().map(crossing).collect(), closed })
        .collect()
}

/// Joins segments sharing an edge into maximal chains, in first-seen order.
fn chain<E: Copy + Eq + std::hash::Hash>(segs: &[(E, E)]) -> Vec<(Vec<E>, bool)> {
    let mut at: HashMap<E, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segs.iter().enumerate() {
        at.entry(*a).or_default().push(k);
        at.entry(*b).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let other = |k: usize, e: E| if segs[k].0 == e { segs[k].1 } else { segs[k].0 };
    let next = |used: &[bool], e: E| at[&e].iter().copied().find(|&k| !used[k]);
    let mut out = Vec::new();
    for start in 0..segs.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut forward = vec![segs[start].0, segs[start].1];
        while let Some(k) = next(&used, *forward.last().unwrap()) {
            used[k] = true;
            let e = other(k, *forward.last().unwrap());
            forward.push(e);
        }
        let closed = forward.len() > 2 && forward.first() == forward.last();
        if closed {
            forward.pop();
        } else {
            let mut backward = Vec::new();
            let mut tip = forward[0];
            while let Some(k) = next(&used, tip) {
                used[k] = true;
                tip = other(k, tip);
                backward.push(tip);
            }
            backward.reverse();
            backward.extend(forward);
            forward = backward;
        }
        out.push((forward, closed));
    }
    out
}

/// The line `{β + s·d}` clipped to the window.
fn clipped_line(window: &Window, base: (f64, f64), dir: (f64, f64)) -> Vec<Polyline> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (b, d, r) in [(base.0, dir.0, window.x), (base.1, dir.1, window.y)] {
        if d == 0.0 {
            if b < r[0] || b > r[1] {
                return vec![];
            }
        } else {
            let (u, v) = ((r[0] - b) / d, (r[1] - b) / d);
            lo = lo.max(u.min(v));
            hi = hi.min(u.max(v));
        }
    }
    if lo >= hi {
        return vec![];
    }
    let at = |s: f64| (base.0 + s * dir.0, base.1 + s * dir.1);
    vec![Polyline { points: vec![at(lo), at(hi)], closed: false }]
}

/// A line in ℝ² as `(base, direction)`, if the region is one.
fn as_line(region: &Region) -> Option<((f64, f64), (f64, f64))> {
    match region {
        Region::AffineImage { matrix, offset } if matrix.len() == 2 && affine_rank(matrix) == 1 => {
            let col = (0..matrix[0].len()).find(|&c| matrix[0][c] != 0.0 || matrix[1][c] != 0.0)?;
            Some(((offset[0], offset[1]), (matrix[0][col], matrix[1][col])))
        }
        Region::CoordinateAffine { n: 2, constraints } if constraints.len() == 1 => {
            let c = constraints[0];
            Some(if c.axis.index() == 0 { ((c.value, 0.0), (0.0, 1.0)) } else { ((0.0, c.value), (1.0, 0.0)) })
        }
        _ => None,
    }
}

fn plane_shape(window: &Window, label: &str, region: &Region) -> Result<Shape> {
    let v = classify(region)?;
    let polylines = match as_line(region) {
        Some((base, dir)) => clipped_line(window, base, dir),
        None if !region.is_null() => marching_squares(window, &|x, y| region.contains(&[x, y], 0.0)),
        None => return Err(Error::InvalidRegion(format!("cannot draw {label}"))),
    };
    Ok(Shape { label: label.into(), style: Style::of(v.kind), citation: v.citation, polylines })
}

fn torus_shape(window: &Window, label: &str, region: &TorusRegion) -> Result<Shape> {
    let v = classify_torus(region)?.verdict;
    let polylines = match as_line(&region.preimage_of) {
        Some((_, (0.0, _))) | Some((_, (_, 0.0))) => {
            // Coordinate lines stay straight on the torus.
            let ((bx, by), (dx, _)) = as_line(&region.preimage_of).unwrap();
            if dx == 0.0 {
                clipped_line(window, (cayley_inverse(bx), 0.0), (0.0, 1.0))
            } else {
                clipped_line(window, (0.0, cayley_inverse(by)), (1.0, 0.0))
            }
        }
        Some(((bx, by), (dx, dy))) => {
            let (k, m) = (dy / dx, by - dy / dx * bx);
            let points =
                samples(window.x).into_iter().map(|s| Ok((s, torus_curve(k, m, s)?))).collect::<Result<Vec<_>>>()?;
            vec![Polyline { points, closed: false }]
        }
        None if !region.preimage_of.is_null() => marching_squares(window, &|x, y| region.contains(&[x, y], 0.0)),
        None => return Err(Error::InvalidRegion(format!("cannot draw {label}"))),
    };
    Ok(Shape { label: label.into(), style: Style::of(v.kind), citation: v.citation, polylines })
}

fn lines_regions() -> Vec<(&'static str, Region)> {
    vec![
        ("t1 = 1", Region::hyperplane(2, Axis::new(1), 1.0)),
        ("t2 = -t1", Region::line(-1.0, 0.0)),
        ("t2 = t1", Region::line(1.0, 0.0)),
    ]
}

/// `S_{1,2}(1,−1,0)` and its images under `J_1^0`, `J_2^0` and both.
fn strips_regions() -> Vec<(&'static str, Region)> {
    use crate::region::transform_region;
    let s = Region::Strip { n: 2, j1: Axis::new(1), j2: Axis::new(2), alpha: 1.0, beta1: -1.0, beta2: 0.0 };
    let j1 = transform_region(&s, Axis::new(1), 0.0);
    let j2 = transform_region(&s, Axis::new(2), 0.0);
    let j12 = transform_region(&j2, Axis::new(1), 0.0);
    vec![("S", s), ("J1 S", j1), ("J2 S", j2), ("J1 J2 S", j12)]
}

fn cross_region() -> Region {
    Region::CrossComplement {
        n: 2,
        strips: vec![
            AxisStrip { axis: Axis::new(1), lo: 1.0, hi: 2.0 },
            AxisStrip { axis: Axis::new(2), lo: 0.5, hi: 2.0 },
        ],
    }
}

pub fn build_figure(spec: &FigureSpec) -> Result<Figure> {
    let window = spec.window()?;
    let plane = |items: Vec<(&str, Region)>| -> Result<Vec<Shape>> {
        items.iter().map(|(l, r)| plane_shape(&window, l, r)).collect()
    };
    let torus = |items: Vec<(&str, Region)>| -> Result<Vec<Shape>> {
        items.iter().map(|(l, r)| torus_shape(&window, l, &torus_region(r)?)).collect()
    };
    let one = |shapes| vec![Panel { shapes }];
    let four = |shapes: Vec<Shape>| shapes.into_iter().map(|s| Panel { shapes: vec![s] }).collect::<Vec<_>>();
    let (panels, columns) = match spec.id {
        FigureId::Lines => (one(plane(lines_regions())?), 1),
        FigureId::Strips => (four(plane(strips_regions())?), 2),
        FigureId::Cross => (one(plane(vec![("cross complement", cross_region())])?), 1),
        FigureId::LinesTorus => (one(torus(lines_regions())?), 1),
        FigureId::StripsTorus => (four(torus(strips_regions())?), 2),
        FigureId::CrossTorus => (one(torus(vec![("cross complement", cross_region())])?), 1),
    };
    Ok(Figure { id: spec.id, window, panels, columns })
}

fn to_pixels(window: &Window, p: (f64, f64)) -> (f64, f64) {
    let size = GRID as f64;
    let x = (p.0 - window.x[0]) / (window.x[1] - window.x[0]) * size;
    let y = (window.y[1] - p.1) / (window.y[1] - window.y[0]) * size;
    (x, y)
}

/// Panel offset in pixels.
pub fn panel_origin(index: usize, columns: usize) -> (f64, f64) {
    let step = GRID as f64 + GAP;
    ((index % columns) as f64 * step, (index / columns) as f64 * step)
}

/// Inverse of the pixel mapping of a panel.
pub fn from_pixels(window: &Window, px: (f64, f64)) -> (f64, f64) {
    let size = GRID as f64;
    (window.x[0] + px.0 / size * (window.x[1] - window.x[0]), window.y[1] - px.1 / size * (window.y[1] - window.y[0]))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(fig: &Figure) -> String {
    let rows = fig.panels.len().div_ceil(fig.columns);
    let step = GRID as f64 + GAP;
    let width = fig.columns as f64 * step - GAP;
    let height = rows as f64 * step - GAP;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.2}\" height=\"{height:.2}\" viewBox=\"0 0 {width:.2} {height:.2}\" shape-rendering=\"crispEdges\" data-figure=\"{}\">",
        fig.id.name()
    );
    let _ = writeln!(
        s,
        "<style>path{{fill:none;stroke:#000;stroke-width:1.5}}path.forbidden{{stroke-dasharray:6 4}}path.undecided{{stroke-dasharray:1 3}}rect{{fill:none;stroke:#999}}</style>"
    );
    for (k, panel) in fig.panels.iter().enumerate() {
        let (ox, oy) = panel_origin(k, fig.columns);
        let _ = writeln!(s, "<g id=\"panel-{k}\" transform=\"translate({ox:.2},{oy:.2})\">");
        let _ = writeln!(s, "<rect x=\"0.00\" y=\"0.00\" width=\"{:.2}\" height=\"{:.2}\"/>", GRID as f64, GRID as f64);
        for shape in &panel.shapes {
            let mut d = String::new();
            for l in &shape.polylines {
                for (i, p) in l.points.iter().enumerate() {
                    let (x, y) = to_pixels(&fig.window, *p);
                    let _ = write!(d, "{}{x:.2} {y:.2}", if i == 0 { "M" } else { " L" });
                }
                if l.closed {
                    d.push_str(" Z");
                }
                d.push(' ');
            }
            let _ = writeln!(
                s,
                "<path class=\"{}\" data-label=\"{}\" data-citation=\"{}\" d=\"{}\"/>",
                shape.style.class(),
                escape(&shape.label),
                escape(&shape.citation),
                d.trim_end()
            );
        }
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_figure(spec: &FigureSpec) -> Result<String> {
    Ok(render_svg(&build_figure(spec)?))
}
