//! Regions, constrained tiling instances, tilings, and their JSON forms.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::grid::{Axis, Edge, Side, Triangle, Vertex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionKind {
    Hexagon(u32),
    Triangles,
    Infinite,
}

/// A region of the triangular grid, with its derived simplicial data.
///
/// Bounded regions carry their vertex, edge, triangle and boundary sets.
/// The infinite region carries none.
#[derive(Clone, Debug)]
pub struct Region {
    kind: RegionKind,
    triangles: BTreeSet<Triangle>,
    /// Every edge of a triangle in the region, with its number of adjacent
    /// region triangles (1 on the boundary, 2 inside).
    edges: BTreeMap<Edge, u8>,
    vertices: Vec<Vertex>,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.triangles == other.triangles
    }
}

impl Eq for Region {}

impl Region {
    pub fn hexagon(n: u32) -> Result<Region, Violation> {
        if n == 0 {
            return Err(Violation::new(
                ViolationCode::InvalidArgument,
                "hexagon size must be at least 1",
            ));
        }
        let n = n as i64;
        let mut triangles = BTreeSet::new();
        let inside = |v: &Vertex| v.coords().iter().all(|&c| c <= n);
        for a in 0..=n {
            for b in 0..=n {
                for base in [Vertex::new(0, a, b), Vertex::new(a, 0, b), Vertex::new(a, b, 0)] {
                    for side in [Side::L, Side::R] {
                        let t = Triangle::new(base, side);
                        if t.vertices().iter().all(inside) {
                            triangles.insert(t);
                        }
                    }
                }
            }
        }
        let mut r = Region::from_triangle_set(triangles);
        r.kind = RegionKind::Hexagon(n as u32);
        Ok(r)
    }

    /// A bounded region given by its triangles. Not validated; see
    /// [`Region::violations`].
    pub fn from_triangles<I: IntoIterator<Item = Triangle>>(triangles: I) -> Region {
        Region::from_triangle_set(triangles.into_iter().collect())
    }

    fn from_triangle_set(triangles: BTreeSet<Triangle>) -> Region {
        let mut edges = BTreeMap::new();
        let mut vertices = BTreeSet::new();
        for t in &triangles {
            for e in t.edges() {
                *edges.entry(e).or_insert(0u8) += 1;
            }
            vertices.extend(t.vertices());
        }
        Region {
            kind: RegionKind::Triangles,
            triangles,
            edges,
            vertices: vertices.into_iter().collect(),
        }
    }

    pub fn infinite() -> Region {
        Region {
            kind: RegionKind::Infinite,
            triangles: BTreeSet::new(),
            edges: BTreeMap::new(),
            vertices: Vec::new(),
        }
    }

    /// The hexagon of radius `r` around `center`: every triangle whose three
    /// vertices are within grid distance `r` of it.
    pub fn ball(center: Vertex, r: u32) -> Region {
        if r == 0 {
            return Region::from_triangles(std::iter::empty());
        }
        // Hexagon(r) is the ball of radius r around the origin.
        let hex = Region::hexagon(r).expect("r >= 1");
        let c = center.coords();
        Region::from_triangles(hex.triangles.iter().map(|t| Triangle::new(t.base.offset(c), t.side)))
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn is_bounded(&self) -> bool {
        self.kind != RegionKind::Infinite
    }

    pub fn triangles(&self) -> &BTreeSet<Triangle> {
        &self.triangles
    }

    /// Sorted vertex list `R⁰`.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.keys()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn boundary(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|(_, &c)| c == 1).map(|(e, _)| e)
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary().count()
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        match self.kind {
            RegionKind::Infinite => true,
            _ => self.edges.contains_key(e),
        }
    }

    pub fn is_boundary_edge(&self, e: &Edge) -> bool {
        self.edges.get(e) == Some(&1)
    }

    pub fn is_interior_edge(&self, e: &Edge) -> bool {
        self.edges.get(e) == Some(&2)
    }

    pub fn contains_triangle(&self, t: &Triangle) -> bool {
        match self.kind {
            RegionKind::Infinite => true,
            _ => self.triangles.contains(t),
        }
    }

    pub fn contains_vertex(&self, v: &Vertex) -> bool {
        match self.kind {
            RegionKind::Infinite => true,
            _ => self.vertices.binary_search(v).is_ok(),
        }
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|(_, &c)| c == 2).map(|(e, _)| e)
    }

    /// Structural problems with a bounded region.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.is_bounded() {
            return out;
        }
        if self.triangles.is_empty() {
            out.push(Violation::new(ViolationCode::EmptyRegion, "region has no triangles"));
            return out;
        }
        // Edge connectivity.
        let start = *self.triangles.iter().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for e in t.edges() {
                let u = t.across(&e);
                if self.triangles.contains(&u) && seen.insert(u) {
                    queue.push_back(u);
                }
            }
        }
        if seen.len() != self.triangles.len() {
            out.push(Violation::new(
                ViolationCode::NotConnected,
                format!(
                    "region is not edge-connected ({} of {} triangles reachable)",
                    seen.len(),
                    self.triangles.len()
                ),
            ));
        }
        let euler = self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64;
        if euler != 1 {
            out.push(Violation::new(
                ViolationCode::NotSimplyConnected,
                format!("V - E + F = {euler}, expected 1"),
            ));
        }
        let mut degree: HashMap<Vertex, usize> = HashMap::new();
        for e in self.boundary() {
            *degree.entry(e.tail()).or_default() += 1;
            *degree.entry(e.head()).or_default() += 1;
        }
        let mut pinched: Vec<_> = degree.into_iter().filter(|&(_, d)| d > 2).map(|(v, _)| v).collect();
        pinched.sort();
        for v in pinched {
            out.push(Violation::new(
                ViolationCode::SelfTouchingBoundary,
                format!("boundary passes more than once through vertex {v}"),
            ));
        }
        out
    }

    /// The boundary as a counterclockwise closed walk.
    pub fn boundary_cycle(&self) -> Result<Vec<BoundaryStep>, Violation> {
        if !self.is_bounded() {
            return Err(Violation::new(
                ViolationCode::Unsupported,
                "the infinite region has no boundary",
            ));
        }
        let mut next: BTreeMap<Vertex, BoundaryStep> = BTreeMap::new();
        for e in self.boundary() {
            let [a, b] = e.adjacent_triangles();
            let inner = if self.triangles.contains(&a) { a } else { b };
            // Positive edge cycles run counterclockwise around L triangles
            // and clockwise around R triangles.
            let step = match inner.side {
                Side::L => BoundaryStep { from: e.tail(), to: e.head(), edge: *e, positive: true },
                Side::R => BoundaryStep { from: e.head(), to: e.tail(), edge: *e, positive: false },
            };
            if next.insert(step.from, step).is_some() {
                return Err(Violation::new(
                    ViolationCode::SelfTouchingBoundary,
                    format!("boundary leaves vertex {} twice", step.from),
                ));
            }
        }
        let total = next.len();
        let Some((&start, _)) = next.iter().next() else {
            return Err(Violation::new(ViolationCode::EmptyRegion, "region has no boundary"));
        };
        let mut walk = Vec::with_capacity(total);
        let mut at = start;
        loop {
            let step = next.get(&at).copied().ok_or_else(|| {
                Violation::new(ViolationCode::NotSimplyConnected, "boundary is not a closed walk")
            })?;
            walk.push(step);
            at = step.to;
            if at == start || walk.len() > total {
                break;
            }
        }
        if walk.len() != total || at != start {
            return Err(Violation::new(
                ViolationCode::NotSimplyConnected,
                "boundary consists of more than one cycle",
            ));
        }
        Ok(walk)
    }
}

/// One directed step of the boundary walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryStep {
    pub from: Vertex,
    pub to: Vertex,
    pub edge: Edge,
    /// Whether the step follows the positive orientation of its edge.
    pub positive: bool,
}

impl BoundaryStep {
    pub fn weight(&self) -> i64 {
        if self.positive {
            1
        } else {
            -1
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationCode {
    InvalidArgument,
    MissingRegion,
    EmptyRegion,
    NotConnected,
    NotSimplyConnected,
    SelfTouchingBoundary,
    EdgeNotInRegion,
    X2OnBoundary,
    DuplicateEdge,
    Unsupported,
    TooLarge,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::InvalidArgument => "invalid-argument",
            ViolationCode::MissingRegion => "missing-region",
            ViolationCode::EmptyRegion => "empty-region",
            ViolationCode::NotConnected => "not-connected",
            ViolationCode::NotSimplyConnected => "not-simply-connected",
            ViolationCode::SelfTouchingBoundary => "self-touching-boundary",
            ViolationCode::EdgeNotInRegion => "edge-not-in-region",
            ViolationCode::X2OnBoundary => "x2-on-boundary",
            ViolationCode::DuplicateEdge => "duplicate-edge",
            ViolationCode::Unsupported => "unsupported",
            ViolationCode::TooLarge => "too-large",
        }
    }
}

/// A structured validation failure, serialized as `{code, message, edge?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_opt_edge")]
    pub edge: Option<Edge>,
}

fn ser_opt_edge<S: serde::Serializer>(e: &Option<Edge>, s: S) -> Result<S::Ok, S::Error> {
    match e {
        Some(e) => EdgeDoc::from(*e).serialize(s),
        None => s.serialize_none(),
    }
}

impl Violation {
    pub fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Violation { code, message: message.into(), edge: None }
    }

    pub fn at(code: ViolationCode, message: impl Into<String>, edge: Edge) -> Self {
        Violation { code, message: message.into(), edge: Some(edge) }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code.as_str(), self.message)?;
        if let Some(e) = self.edge {
            write!(f, " (edge {e})")?;
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl InstanceError {
    pub fn violations(&self) -> Vec<Violation> {
        match self {
            InstanceError::Invalid(v) => v.clone(),
            InstanceError::Syntax { message, line, column } => vec![Violation::new(
                ViolationCode::InvalidArgument,
                format!("syntax error at line {line}, column {column}: {message}"),
            )],
        }
    }
}

impl From<serde_json::Error> for InstanceError {
    fn from(e: serde_json::Error) -> Self {
        InstanceError::Syntax { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

/// A validated instance of the constrained tiling problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingInstance {
    region: Region,
    x1: BTreeSet<Edge>,
    x2: BTreeSet<Edge>,
}

impl TilingInstance {
    /// Validate and normalize. `x1` edges on the region boundary are dropped
    /// with a warning.
    pub fn new(region: Region, x1: Vec<Edge>, x2: Vec<Edge>) -> Result<TilingInstance, Vec<Violation>> {
        let mut violations = region.violations();
        let mut seen = BTreeSet::new();
        for e in x1.iter().chain(x2.iter()) {
            if !seen.insert(*e) {
                violations.push(Violation::at(
                    ViolationCode::DuplicateEdge,
                    "edge listed more than once in x1 and x2",
                    *e,
                ));
            }
        }
        for e in x1.iter().chain(x2.iter()) {
            if !region.contains_edge(e) {
                violations.push(Violation::at(
                    ViolationCode::EdgeNotInRegion,
                    "constraint edge is not an edge of the region",
                    *e,
                ));
            }
        }
        if region.is_bounded() {
            for e in &x2 {
                if region.is_boundary_edge(e) {
                    violations.push(Violation::at(
                        ViolationCode::X2OnBoundary,
                        "saliency edge lies on the region boundary",
                        *e,
                    ));
                }
            }
        }
        if !violations.is_empty() {
            return Err(violations);
        }
        let x1: BTreeSet<Edge> = x1
            .into_iter()
            .filter(|e| {
                let on_boundary = region.is_boundary_edge(e);
                if on_boundary {
                    log::warn!("dropping x1 edge {e} on the region boundary");
                }
                !on_boundary
            })
            .collect();
        Ok(TilingInstance { region, x1, x2: x2.into_iter().collect() })
    }

    pub fn unconstrained(region: Region) -> Result<TilingInstance, Vec<Violation>> {
        TilingInstance::new(region, Vec::new(), Vec::new())
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn x1(&self) -> &BTreeSet<Edge> {
        &self.x1
    }

    pub fn x2(&self) -> &BTreeSet<Edge> {
        &self.x2
    }

    pub fn has_constraints(&self) -> bool {
        !self.x1.is_empty() || !self.x2.is_empty()
    }

    /// Edges no lozenge may overlap: `∂R ∪ X1 ∪ X2`.
    pub fn is_unbreakable(&self, e: &Edge) -> bool {
        self.x1.contains(e) || self.x2.contains(e) || self.region.is_boundary_edge(e)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&InstanceDoc::from(self)).expect("instance serializes")
    }
}

pub fn parse_instance(text: &str) -> Result<TilingInstance, InstanceError> {
    let value: Value = serde_json::from_str(text)?;
    instance_from_value(&value)
}

pub fn serialize_instance(instance: &TilingInstance) -> String {
    instance.to_json()
}

/// Build an instance from an already parsed JSON value.
pub fn instance_from_value(value: &Value) -> Result<TilingInstance, InstanceError> {
    if value.get("region").map_or(true, Value::is_null) {
        return Err(InstanceError::Invalid(vec![Violation::new(
            ViolationCode::MissingRegion,
            "instance has no region",
        )]));
    }
    let doc: InstanceDoc = serde_json::from_value(value.clone()).map_err(|e| {
        InstanceError::Invalid(vec![Violation::new(ViolationCode::InvalidArgument, e.to_string())])
    })?;
    doc.into_instance().map_err(InstanceError::Invalid)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum RegionDoc {
    Hexagon { n: u32 },
    Triangles { triangles: Vec<TriangleDoc> },
    Infinite,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub region: RegionDoc,
    #[serde(default)]
    pub x1: Vec<EdgeDoc>,
    #[serde(default)]
    pub x2: Vec<EdgeDoc>,
}

impl InstanceDoc {
    pub fn into_instance(self) -> Result<TilingInstance, Vec<Violation>> {
        let region = match self.region {
            RegionDoc::Hexagon { n } => Region::hexagon(n).map_err(|v| vec![v])?,
            RegionDoc::Triangles { triangles } => {
                Region::from_triangles(triangles.into_iter().map(Triangle::from))
            }
            RegionDoc::Infinite => Region::infinite(),
        };
        TilingInstance::new(
            region,
            self.x1.into_iter().map(Edge::from).collect(),
            self.x2.into_iter().map(Edge::from).collect(),
        )
    }
}

impl From<&TilingInstance> for InstanceDoc {
    fn from(inst: &TilingInstance) -> Self {
        let region = match inst.region.kind() {
            RegionKind::Hexagon(n) => RegionDoc::Hexagon { n: *n },
            RegionKind::Triangles => RegionDoc::Triangles {
                triangles: inst.region.triangles().iter().map(|&t| t.into()).collect(),
            },
            RegionKind::Infinite => RegionDoc::Infinite,
        };
        InstanceDoc {
            region,
            x1: inst.x1.iter().map(|&e| e.into()).collect(),
            x2: inst.x2.iter().map(|&e| e.into()).collect(),
        }
    }
}

/// `[x, y, z, "X"|"Y"|"Z"]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc(pub i64, pub i64, pub i64, pub Axis);

impl From<EdgeDoc> for Edge {
    fn from(d: EdgeDoc) -> Self {
        Edge::new(Vertex::new(d.0, d.1, d.2), d.3)
    }
}

impl From<Edge> for EdgeDoc {
    fn from(e: Edge) -> Self {
        let [x, y, z] = e.base.coords();
        EdgeDoc(x, y, z, e.axis)
    }
}

/// `[x, y, z, "L"|"R"]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangleDoc(pub i64, pub i64, pub i64, pub Side);

impl From<TriangleDoc> for Triangle {
    fn from(d: TriangleDoc) -> Self {
        Triangle::new(Vertex::new(d.0, d.1, d.2), d.3)
    }
}

impl From<Triangle> for TriangleDoc {
    fn from(t: Triangle) -> Self {
        let [x, y, z] = t.base.coords();
        TriangleDoc(x, y, z, t.side)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Yellow,
    Red,
    Blue,
}

impl Color {
    /// Color of the lozenge overlapping an edge of the given axis.
    pub fn of_axis(axis: Axis) -> Color {
        match axis {
            Axis::Z => Color::Yellow,
            Axis::Y => Color::Red,
            Axis::X => Color::Blue,
        }
    }
}

/// A lozenge tiling, each lozenge named by the interior edge it overlaps.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tiling {
    pub lozenges: BTreeSet<Edge>,
}

impl Tiling {
    pub fn new<I: IntoIterator<Item = Edge>>(lozenges: I) -> Self {
        Tiling { lozenges: lozenges.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.lozenges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lozenges.is_empty()
    }

    pub fn color(e: &Edge) -> Color {
        Color::of_axis(e.axis)
    }

    /// Which lozenge covers each triangle. Triangles covered twice keep the
    /// first lozenge in edge order.
    pub fn cover(&self) -> BTreeMap<Triangle, Edge> {
        let mut m = BTreeMap::new();
        for e in &self.lozenges {
            for t in e.adjacent_triangles() {
                m.entry(t).or_insert(*e);
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&TilingDoc::from(self)).expect("tiling serializes")
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TilingDoc {
    pub lozenges: Vec<EdgeDoc>,
}

impl From<&Tiling> for TilingDoc {
    fn from(t: &Tiling) -> Self {
        TilingDoc { lozenges: t.lozenges.iter().map(|&e| e.into()).collect() }
    }
}

impl From<TilingDoc> for Tiling {
    fn from(d: TilingDoc) -> Self {
        Tiling::new(d.lozenges.into_iter().map(Edge::from))
    }
}

pub fn parse_tiling(text: &str) -> Result<Tiling, InstanceError> {
    let doc: TilingDoc = serde_json::from_str(text)?;
    Ok(doc.into())
}
