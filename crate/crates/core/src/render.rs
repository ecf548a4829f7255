//! SVG output. Element order and number formatting are fixed so identical
//! inputs give byte-identical documents.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dcgraph::{build_dc, ArcTag, HeightField};
use crate::grid::{Edge, Vertex};
use crate::infinite::build_gpm;
use crate::instance::{Color, Region, Tiling, TilingInstance, Violation, ViolationCode};
use crate::solvers::{classify_edges, SolveOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layer {
    Grid,
    Constraints,
    Tiling,
    Heights,
    Dcgraph,
    Cycle,
}

impl Layer {
    pub const ALL: [Layer; 6] = [Layer::Grid, Layer::Constraints, Layer::Tiling, Layer::Heights, Layer::Dcgraph, Layer::Cycle];

    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Grid => "grid",
            Layer::Constraints => "constraints",
            Layer::Tiling => "tiling",
            Layer::Heights => "heights",
            Layer::Dcgraph => "dcgraph",
            Layer::Cycle => "cycle",
        }
    }
}

impl std::str::FromStr for Layer {
    type Err = Violation;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Layer::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| Violation::new(ViolationCode::InvalidArgument, format!("unknown layer {s:?}")))
    }
}

/// Parse a comma-separated layer list.
pub fn parse_layers(s: &str) -> Result<Vec<Layer>, Violation> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(str::parse).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Palette {
    pub yellow: String,
    pub red: String,
    pub blue: String,
    pub x1: String,
    pub x2: String,
    pub boundary: String,
    pub grid: String,
    pub cycle: String,
    pub arc: String,
    pub text: String,
}

impl Default for Palette {
    fn default() -> Self {
        Palette {
            yellow: "#f2c500".into(),
            red: "#d7301f".into(),
            blue: "#2b6cb0".into(),
            x1: "#2e9e44".into(),
            x2: "#f28c00".into(),
            boundary: "#000000".into(),
            grid: "#b8b8b8".into(),
            cycle: "#e00000".into(),
            arc: "#6a3d9a".into(),
            text: "#222222".into(),
        }
    }
}

impl Palette {
    fn fill(&self, c: Color) -> &str {
        match c {
            Color::Yellow => &self.yellow,
            Color::Red => &self.red,
            Color::Blue => &self.blue,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    /// Pixels per unit edge.
    pub scale: f64,
    pub layers: Vec<Layer>,
    pub palette: Palette,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            scale: 40.0,
            layers: vec![Layer::Grid, Layer::Constraints, Layer::Tiling, Layer::Cycle],
            palette: Palette::default(),
        }
    }
}

impl RenderOptions {
    pub fn with_layers(layers: &[Layer]) -> Self {
        RenderOptions { layers: layers.to_vec(), ..RenderOptions::default() }
    }

    pub fn from_json(text: &str) -> Result<Self, Violation> {
        serde_json::from_str(text).map_err(|e| Violation::new(ViolationCode::InvalidArgument, e.to_string()))
    }

    fn has(&self, l: Layer) -> bool {
        self.layers.contains(&l)
    }
}

/// Number with three decimals, never `-0.000`.
fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

struct Canvas<'a> {
    out: String,
    opts: &'a RenderOptions,
}

impl Canvas<'_> {
    fn pt(&self, p: (f64, f64)) -> (String, String) {
        (num(p.0 * self.opts.scale), num(-p.1 * self.opts.scale))
    }

    fn vpt(&self, v: &Vertex) -> (String, String) {
        self.pt(v.embed())
    }

    fn begin(&mut self, region: &Region) {
        let pts: Vec<(f64, f64)> = region.vertices().iter().map(Vertex::embed).collect();
        let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| {
            pts.iter().map(sel).fold(init, f)
        };
        let (x0, x1) = (fold(f64::min, f64::INFINITY, |p| p.0), fold(f64::max, f64::NEG_INFINITY, |p| p.0));
        let (y0, y1) = (fold(f64::min, f64::INFINITY, |p| p.1), fold(f64::max, f64::NEG_INFINITY, |p| p.1));
        let s = self.opts.scale;
        let (minx, miny) = ((x0 - 1.0) * s, (-y1 - 1.0) * s);
        let (w, h) = ((x1 - x0 + 2.0) * s, (y1 - y0 + 2.0) * s);
        writeln!(
            self.out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}" width="{}" height="{}">"#,
            num(minx),
            num(miny),
            num(w),
            num(h),
            num(w),
            num(h)
        )
        .unwrap();
    }

    fn line(&mut self, a: &Vertex, b: &Vertex, attrs: &str) {
        let (x1, y1) = self.vpt(a);
        let (x2, y2) = self.vpt(b);
        writeln!(self.out, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" {attrs}/>"#).unwrap();
    }

    fn open(&mut self, class: &str) {
        writeln!(self.out, r#"<g class="{class}">"#).unwrap();
    }

    fn close(&mut self) {
        self.out.push_str("</g>\n");
    }

    fn grid(&mut self, region: &Region, emphasized: Option<&[Edge]>) {
        let (thin, bold) = (
            format!(r#"stroke="{}" stroke-width="1""#, self.opts.palette.grid),
            format!(r#"class="drawn" stroke="{}" stroke-width="3""#, self.opts.palette.boundary),
        );
        self.open("grid");
        for e in region.edges() {
            let attrs = match emphasized {
                Some(drawn) if drawn.binary_search(e).is_ok() => &bold,
                _ => &thin,
            };
            self.line(&e.tail(), &e.head(), attrs);
        }
        self.close();
    }

    fn outline(&mut self, region: &Region) {
        let Ok(cycle) = region.boundary_cycle() else { return };
        let mut d = String::new();
        for (i, step) in cycle.iter().enumerate() {
            let (x, y) = self.vpt(&step.from);
            write!(d, "{}{x} {y} ", if i == 0 { "M" } else { "L" }).unwrap();
        }
        d.push('Z');
        writeln!(
            self.out,
            r#"<path class="outline" d="{d}" fill="none" stroke="{}" stroke-width="2"/>"#,
            self.opts.palette.boundary
        )
        .unwrap();
    }

    fn lozenges(&mut self, tiling: &Tiling) {
        self.open("tiling");
        for e in &tiling.lozenges {
            let (a, b) = e.lateral_vertices();
            let pts: Vec<String> = [e.tail(), a, e.head(), b]
                .iter()
                .map(|v| {
                    let (x, y) = self.vpt(v);
                    format!("{x},{y}")
                })
                .collect();
            writeln!(
                self.out,
                r#"<polygon points="{}" fill="{}" stroke="{}" stroke-width="1"/>"#,
                pts.join(" "),
                self.opts.palette.fill(Tiling::color(e)),
                self.opts.palette.boundary
            )
            .unwrap();
        }
        self.close();
    }

    fn constraints(&mut self, instance: &TilingInstance) {
        self.open("constraints");
        let x1 = format!(r#"class="x1" stroke="{}" stroke-width="4""#, self.opts.palette.x1);
        let x2 = format!(r#"class="x2" stroke="{}" stroke-width="4""#, self.opts.palette.x2);
        for e in instance.x1() {
            self.line(&e.tail(), &e.head(), &x1);
        }
        for e in instance.x2() {
            self.line(&e.tail(), &e.head(), &x2);
        }
        self.close();
    }

    fn labels(&mut self, h: &HeightField) {
        self.open("heights");
        let size = num(self.opts.scale * 0.35);
        for (v, x) in &h.values {
            let (px, py) = self.vpt(v);
            writeln!(
                self.out,
                r#"<text x="{px}" y="{py}" font-size="{size}" text-anchor="middle" dominant-baseline="central" fill="{}">{x}</text>"#,
                self.opts.palette.text
            )
            .unwrap();
        }
        self.close();
    }

    fn arcs(&mut self, arcs: impl Iterator<Item = (Vertex, Vertex, i64, ArcTag)>) {
        self.open("dcgraph");
        for (from, to, w, tag) in arcs {
            // Shift sideways so opposite arcs stay apart.
            let (a, b) = (from.embed(), to.embed());
            let (dx, dy) = (b.0 - a.0, b.1 - a.1);
            let len = (dx * dx + dy * dy).sqrt().max(1e-9);
            let (ox, oy) = (dy / len * 0.08, -dx / len * 0.08);
            let (x1, y1) = self.pt((a.0 + ox, a.1 + oy));
            let (x2, y2) = self.pt((b.0 + ox, b.1 + oy));
            writeln!(
                self.out,
                r#"<line class="arc {}" data-weight="{w}" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{}" stroke-width="1"/>"#,
                tag.as_str(),
                self.opts.palette.arc
            )
            .unwrap();
        }
        self.close();
    }

    fn cycle(&mut self, vs: &[Vertex]) {
        if vs.is_empty() {
            return;
        }
        let pts: Vec<String> = vs
            .iter()
            .chain(vs.first())
            .map(|v| {
                let (x, y) = self.vpt(v);
                format!("{x},{y}")
            })
            .collect();
        writeln!(
            self.out,
            r#"<polyline class="cycle" points="{}" fill="none" stroke="{}" stroke-width="5"/>"#,
            pts.join(" "),
            self.opts.palette.cycle
        )
        .unwrap();
    }

    fn finish(mut self) -> String {
        self.out.push_str("</svg>\n");
        self.out
    }
}

/// The finite region to draw: the instance's own, or the solved window for
/// the infinite grid.
fn drawing_region(instance: &TilingInstance, outcome: Option<&SolveOutcome>) -> Result<Region, Violation> {
    if instance.region().is_bounded() {
        return Ok(instance.region().clone());
    }
    outcome
        .and_then(|o| o.window)
        .map(|w| w.region())
        .ok_or_else(|| Violation::new(ViolationCode::Unsupported, "an infinite instance is drawn through a solved window"))
}

pub fn render(instance: &TilingInstance, outcome: Option<&SolveOutcome>, opts: &RenderOptions) -> Result<String, Violation> {
    let region = drawing_region(instance, outcome)?;
    let mut c = Canvas { out: String::new(), opts };
    c.begin(&region);
    if opts.has(Layer::Tiling) {
        if let Some(t) = outcome.and_then(|o| o.tiling.as_ref()) {
            c.lozenges(t);
        }
    }
    if opts.has(Layer::Grid) {
        c.grid(&region, None);
    }
    c.outline(&region);
    if opts.has(Layer::Dcgraph) {
        if instance.region().is_bounded() {
            let g = build_dc(instance).map_err(|e| Violation::new(ViolationCode::Unsupported, e.to_string()))?;
            c.arcs(g.arcs().filter(|a| a.weight <= 0).map(|a| (a.from, a.to, a.weight, a.tag)));
        } else {
            let g = build_gpm(instance.x1(), instance.x2());
            c.arcs(g.arcs().filter(|a| a.tag != ArcTag::Distance).map(|a| (a.from, a.to, a.weight, a.tag)));
        }
    }
    if opts.has(Layer::Constraints) {
        c.constraints(instance);
    }
    if opts.has(Layer::Heights) {
        if let Some(h) = outcome.and_then(|o| o.heights.as_ref()) {
            c.labels(h);
        }
    }
    if opts.has(Layer::Cycle) {
        if let Some(cert) = outcome.and_then(|o| o.certificate.as_ref()) {
            c.cycle(&cert.vertices());
        }
    }
    Ok(c.finish())
}

/// Heights on the vertices, relative to the source, with the drawn edges
/// (increment +1) emphasized.
pub fn render_heights(heights: &HeightField, region: &Region, opts: &RenderOptions) -> Result<String, Violation> {
    let h = heights.anchored();
    let (mut drawn, _) = classify_edges(&h, region.edges())
        .map_err(|e| Violation::new(ViolationCode::InvalidArgument, e.to_string()))?;
    drawn.sort();
    let mut c = Canvas { out: String::new(), opts };
    c.begin(region);
    c.grid(region, Some(&drawn));
    c.outline(region);
    c.labels(&h);
    Ok(c.finish())
}
