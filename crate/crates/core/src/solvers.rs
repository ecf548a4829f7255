//! Finite-region solvers: Bellman–Ford on the constraint graph, the boundary
//! envelope (Thurston), and the advancing surface. Also tiling extraction
//! from heights and the random instance generator.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dcgraph::{
    bellman_ford, build_dc, ConstraintGraph, DcError, Feasibility, HeightField, NegativeCycleCertificate,
};
use crate::grid::{Edge, Vertex};
use crate::infinite::Window;
use crate::instance::{EdgeDoc, Region, Tiling, TilingInstance, Violation, ViolationCode};

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("invalid instance: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Graph(#[from] DcError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error("region is not tilable")]
    Untilable,
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl From<Violation> for SolveError {
    fn from(v: Violation) -> Self {
        SolveError::Invalid(vec![v])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("no height for vertex {0}")]
    MissingHeight(Vertex),
    #[error("edge {edge} has increment {increment}, expected +1 or -2")]
    Congruence { edge: Edge, increment: i64 },
    #[error("boundary edge {0} would be overlapped")]
    BoundaryOverlap(Edge),
}

/// Positive-orientation edges with increment +1 (drawn) and -2 (overlapped).
pub fn classify_edges<'a>(
    h: &HeightField,
    edges: impl IntoIterator<Item = &'a Edge>,
) -> Result<(Vec<Edge>, Vec<Edge>), ExtractError> {
    let mut drawn = Vec::new();
    let mut overlapped = Vec::new();
    for e in edges {
        let a = h.get(&e.tail()).ok_or(ExtractError::MissingHeight(e.tail()))?;
        let b = h.get(&e.head()).ok_or(ExtractError::MissingHeight(e.head()))?;
        match b - a {
            1 => drawn.push(*e),
            -2 => overlapped.push(*e),
            increment => return Err(ExtractError::Congruence { edge: *e, increment }),
        }
    }
    Ok((drawn, overlapped))
}

/// Read the tiling off a feasible congruent height field: every edge whose
/// increment is -2 is the diagonal of a lozenge.
pub fn extract_tiling(h: &HeightField, region: &Region) -> Result<Tiling, ExtractError> {
    let (_, overlapped) = classify_edges(h, region.edges())?;
    if let Some(e) = overlapped.iter().find(|e| region.is_boundary_edge(e)) {
        return Err(ExtractError::BoundaryOverlap(*e));
    }
    Ok(Tiling::new(overlapped))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Tiled,
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bf,
    Advancing,
    Thurston,
    Infinite,
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bf" => Ok(Algorithm::Bf),
            "advancing" => Ok(Algorithm::Advancing),
            "thurston" => Ok(Algorithm::Thurston),
            "infinite" => Ok(Algorithm::Infinite),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub vertices: usize,
    pub arcs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relaxations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raises: Option<u64>,
    #[serde(default)]
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: Status,
    pub algorithm: Algorithm,
    pub tiling: Option<Tiling>,
    pub heights: Option<HeightField>,
    pub certificate: Option<NegativeCycleCertificate>,
    pub window: Option<Window>,
    pub stats: Stats,
}

impl SolveOutcome {
    pub fn tiled(algorithm: Algorithm, tiling: Tiling, heights: HeightField, stats: Stats) -> Self {
        SolveOutcome {
            status: Status::Tiled,
            algorithm,
            tiling: Some(tiling),
            heights: Some(heights),
            certificate: None,
            window: None,
            stats,
        }
    }

    pub fn infeasible(algorithm: Algorithm, certificate: NegativeCycleCertificate, stats: Stats) -> Self {
        SolveOutcome {
            status: Status::Infeasible,
            algorithm,
            tiling: None,
            heights: None,
            certificate: Some(certificate),
            window: None,
            stats,
        }
    }

    pub fn is_tiled(&self) -> bool {
        self.status == Status::Tiled
    }

    pub fn to_doc(&self) -> OutcomeDoc {
        OutcomeDoc {
            status: self.status,
            algorithm: Some(self.algorithm),
            lozenges: self.tiling.as_ref().map(|t| t.lozenges.iter().map(|&e| e.into()).collect()),
            heights: self.heights.as_ref().map(|h| {
                h.values.iter().map(|(v, &x)| {
                    let [a, b, c] = v.coords();
                    [a, b, c, x]
                }).collect()
            }),
            cycle: self.certificate.as_ref().map(|c| c.vertices().iter().map(|v| v.coords()).collect()),
            cycle_weight: self.certificate.as_ref().map(|c| c.total_weight),
            window: self.window,
            stats: Some(self.stats.clone()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_doc()).expect("outcome serializes")
    }
}

/// Wire form of a [`SolveOutcome`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutcomeDoc {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<Algorithm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lozenges: Option<Vec<EdgeDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heights: Option<Vec<[i64; 4]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<Vec<[i64; 3]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle_weight: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<Stats>,
}

impl OutcomeDoc {
    pub fn tiling(&self) -> Option<Tiling> {
        self.lozenges.as_ref().map(|l| Tiling::new(l.iter().map(|&d| Edge::from(d))))
    }

    pub fn cycle_vertices(&self) -> Option<Vec<Vertex>> {
        self.cycle.as_ref().map(|c| c.iter().map(|&p| Vertex::from_coords(p)).collect())
    }

    pub fn heights(&self) -> Option<BTreeMap<Vertex, i64>> {
        self.heights
            .as_ref()
            .map(|hs| hs.iter().map(|&[x, y, z, h]| (Vertex::new(x, y, z), h)).collect())
    }
}

impl OutcomeDoc {
    /// Rebuild an outcome against `instance`; the cycle's arcs are looked up
    /// in the instance's constraint graph.
    pub fn into_outcome(self, instance: &TilingInstance) -> Result<SolveOutcome, Violation> {
        let bad = |m: &str| Violation::new(ViolationCode::InvalidArgument, m);
        let certificate = match self.cycle_vertices() {
            Some(vs) => {
                let g = if instance.region().is_bounded() {
                    build_dc(instance).map_err(|e| bad(&e.to_string()))?
                } else {
                    crate::infinite::build_gpm(instance.x1(), instance.x2())
                };
                Some(
                    NegativeCycleCertificate::from_vertices(&g, &vs)
                        .ok_or_else(|| bad("cycle uses a pair of vertices with no arc between them"))?,
                )
            }
            None => None,
        };
        let heights = self.heights().map(|values| {
            let source = values.iter().find(|(_, &h)| h == 0).or(values.iter().next()).map(|(v, _)| *v);
            HeightField::new(source.unwrap_or(Vertex::ORIGIN), values)
        });
        Ok(SolveOutcome {
            status: self.status,
            algorithm: self.algorithm.unwrap_or(Algorithm::Bf),
            tiling: self.tiling(),
            heights,
            certificate,
            window: self.window,
            stats: self.stats.unwrap_or_default(),
        })
    }
}

/// The lexicographically smallest vertex of a bounded region.
pub fn default_source(region: &Region) -> Option<Vertex> {
    region.vertices().first().copied()
}

fn ensure_bounded(instance: &TilingInstance) -> Result<(), SolveError> {
    if instance.region().is_bounded() {
        Ok(())
    } else {
        Err(SolveError::from(Violation::new(
            ViolationCode::Unsupported,
            "this algorithm needs a bounded region",
        )))
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Build the constraint graph, run Bellman–Ford, and extract the tiling.
pub fn solve_bf(instance: &TilingInstance) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    ensure_bounded(instance)?;
    let g = build_dc(instance)?;
    let source = default_source(instance.region()).ok_or(DcError::Unbounded)?;
    let run = bellman_ford(&g, &source)?;
    let stats = |start| Stats {
        vertices: g.vertex_count(),
        arcs: g.arc_count(),
        relaxations: Some(run.relaxations),
        raises: None,
        elapsed_ms: elapsed_ms(start),
    };
    match run.result {
        Feasibility::Feasible(ref h) => {
            let tiling = extract_tiling(h, instance.region())?;
            Ok(SolveOutcome::tiled(Algorithm::Bf, tiling, h.clone(), stats(start)))
        }
        Feasibility::Infeasible(ref cert) => Ok(SolveOutcome::infeasible(Algorithm::Bf, cert.clone(), stats(start))),
    }
}

/// Indexed view of a bounded region used by the height-based solvers.
struct RegionIndex {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    /// Positive-edge successors and predecessors within the region.
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    on_boundary: Vec<bool>,
}

impl RegionIndex {
    fn new(region: &Region) -> Self {
        let vertices = region.vertices().to_vec();
        let index: HashMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = vertices.len();
        let mut out = vec![Vec::with_capacity(3); n];
        let mut inn = vec![Vec::with_capacity(3); n];
        for e in region.edges() {
            let (a, b) = (index[&e.tail()], index[&e.head()]);
            out[a].push(b);
            inn[b].push(a);
        }
        let mut on_boundary = vec![false; n];
        for e in region.boundary() {
            on_boundary[index[&e.tail()]] = true;
            on_boundary[index[&e.head()]] = true;
        }
        RegionIndex { vertices, index, out, inn, on_boundary }
    }

    fn field(&self, source: Vertex, values: &[i64]) -> HeightField {
        HeightField::new(source, self.vertices.iter().copied().zip(values.iter().copied()).collect())
    }
}

/// Minimal and maximal heights over all tilings of a bounded region without
/// interior constraints. Both fields agree on the boundary, where they equal
/// the heights read along the boundary walk starting from `anchor`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightEnvelope {
    pub anchor: Vertex,
    pub hmin: HeightField,
    pub hmax: HeightField,
}

impl HeightEnvelope {
    /// Shift `h` so it agrees with the envelope at the anchor.
    pub fn co_anchor(&self, h: &HeightField) -> Option<HeightField> {
        let target = self.hmin.get(&self.anchor)?;
        let here = h.get(&self.anchor)?;
        Some(h.shifted(target - here))
    }

    /// `Σ_v (hmax(v) - hmin(v))`.
    pub fn budget(&self) -> i64 {
        self.hmax.values.iter().map(|(v, &hi)| hi - self.hmin.values[v]).sum()
    }

    pub fn contains(&self, h: &HeightField) -> bool {
        let Some(h) = self.co_anchor(h) else { return false };
        self.hmin.values.iter().all(|(v, &lo)| match h.get(v) {
            Some(x) => lo <= x && x <= self.hmax.values[v],
            None => false,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Untilable {
    /// The boundary walk does not close up in height.
    BoundaryWeight(i64),
    /// An interior path undercuts the boundary height at this vertex.
    Shortcut(Vertex),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThurstonResult {
    Tilable(HeightEnvelope),
    Untilable(Untilable),
}

struct Envelope {
    anchor: Vertex,
    lo: Vec<i64>,
    hi: Vec<i64>,
}

fn thurston_indexed(region: &Region, idx: &RegionIndex) -> Result<Result<Envelope, Untilable>, SolveError> {
    let cycle = region.boundary_cycle()?;
    let source = idx.vertices[0];
    let anchor = cycle[0].from;
    let n = idx.vertices.len();
    const UNSET: i64 = i64::MIN;
    let mut boundary = vec![UNSET; n];
    let mut h = anchor.level() - source.level();
    boundary[idx.index[&anchor]] = h;
    for step in &cycle {
        h += step.weight();
        let j = idx.index[&step.to];
        if step.to != anchor {
            boundary[j] = h;
        }
    }
    let net = h - boundary[idx.index[&anchor]];
    if net != 0 {
        return Ok(Err(Untilable::BoundaryWeight(net)));
    }

    // hmax: shortest paths over +1 arcs from the boundary.
    let hi = match unit_dijkstra(&boundary, &idx.out, &idx.on_boundary, 1) {
        Ok(d) => d,
        Err(v) => return Ok(Err(Untilable::Shortcut(idx.vertices[v]))),
    };
    // hmin: the mirror computation on reversed arcs with negated heights.
    let neg: Vec<i64> = boundary.iter().map(|&b| if b == UNSET { UNSET } else { -b }).collect();
    let lo = match unit_dijkstra(&neg, &idx.inn, &idx.on_boundary, 1) {
        Ok(d) => d.into_iter().map(|x| -x).collect(),
        Err(v) => return Ok(Err(Untilable::Shortcut(idx.vertices[v]))),
    };
    Ok(Ok(Envelope { anchor, lo, hi }))
}

/// Multi-source Dijkstra with fixed seed values; `Err(v)` if a seed would be
/// lowered (a shortcut between boundary vertices).
fn unit_dijkstra(seeds: &[i64], adj: &[Vec<usize>], fixed: &[bool], w: i64) -> Result<Vec<i64>, usize> {
    const INF: i64 = i64::MAX / 4;
    let mut dist: Vec<i64> = seeds.iter().map(|&s| if s == i64::MIN { INF } else { s }).collect();
    let mut heap: BinaryHeap<Reverse<(i64, usize)>> =
        dist.iter().enumerate().filter(|(_, &d)| d < INF).map(|(i, &d)| Reverse((d, i))).collect();
    while let Some(Reverse((d, u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &v in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                if fixed[v] {
                    return Err(v);
                }
                dist[v] = nd;
                heap.push(Reverse((nd, v)));
            }
        }
    }
    if let Some(v) = dist.iter().position(|&d| d >= INF) {
        // Cannot happen for a connected region; report as a shortcut-free failure.
        return Err(v);
    }
    Ok(dist)
}

/// Boundary heights by walking `∂R`, then the extremal height functions by
/// propagation from the boundary.
pub fn solve_thurston(region: &Region) -> Result<ThurstonResult, SolveError> {
    if !region.is_bounded() {
        return Err(Violation::new(ViolationCode::Unsupported, "the infinite region has no boundary").into());
    }
    let v = region.violations();
    if !v.is_empty() {
        return Err(SolveError::Invalid(v));
    }
    let idx = RegionIndex::new(region);
    Ok(match thurston_indexed(region, &idx)? {
        Ok(env) => {
            let source = idx.vertices[0];
            ThurstonResult::Tilable(HeightEnvelope {
                anchor: env.anchor,
                hmin: idx.field(source, &env.lo),
                hmax: idx.field(source, &env.hi),
            })
        }
        Err(u) => ThurstonResult::Untilable(u),
    })
}

/// The outcome `--algo thurston` reports: the minimal tiling of an
/// unconstrained region.
pub fn solve_thurston_outcome(instance: &TilingInstance) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    ensure_bounded(instance)?;
    if instance.has_constraints() {
        return Err(Violation::new(
            ViolationCode::Unsupported,
            "Thurston's algorithm handles regions without interior constraints only",
        )
        .into());
    }
    let stats = |start| Stats {
        vertices: instance.region().vertices().len(),
        arcs: 0,
        relaxations: None,
        raises: None,
        elapsed_ms: elapsed_ms(start),
    };
    match solve_thurston(instance.region())? {
        ThurstonResult::Tilable(env) => {
            let h = env.hmin.anchored();
            let tiling = extract_tiling(&h, instance.region())?;
            Ok(SolveOutcome::tiled(Algorithm::Thurston, tiling, h, stats(start)))
        }
        ThurstonResult::Untilable(_) => {
            let cert = certificate_by_bf(instance)?;
            Ok(SolveOutcome::infeasible(Algorithm::Thurston, cert, stats(start)))
        }
    }
}

fn certificate_by_bf(instance: &TilingInstance) -> Result<NegativeCycleCertificate, SolveError> {
    let g = build_dc(instance)?;
    let source = default_source(instance.region()).ok_or(DcError::Unbounded)?;
    match bellman_ford(&g, &source)?.result {
        Feasibility::Infeasible(c) => Ok(c),
        Feasibility::Feasible(_) => Err(SolveError::Internal(
            "advancing surface reported infeasible but Bellman-Ford found heights".into(),
        )),
    }
}

/// Least fixpoint of the constraint arcs above `lo`, or `None` once some
/// height passes `hi`. Returns the number of unit cubes added.
fn advance(g: &ConstraintGraph, lo: &[i64], hi: &[i64]) -> (Option<Vec<i64>>, u64) {
    let n = g.vertex_count();
    let inn = g.in_arcs();
    let mut h = lo.to_vec();
    let mut queued = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).collect();
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let hv = h[v];
        for &(u, w) in &inn[v] {
            // arc u -> v requires h(v) - h(u) <= w
            if hv - h[u] > w {
                h[u] = hv - w;
                if h[u] > hi[u] {
                    let cubes = cubes_added(lo, &h);
                    return (None, cubes);
                }
                if !queued[u] {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    let cubes = cubes_added(lo, &h);
    (Some(h), cubes)
}

fn cubes_added(lo: &[i64], h: &[i64]) -> u64 {
    h.iter().zip(lo).map(|(a, b)| ((a - b) / 3) as u64).sum()
}

/// The advancing surface: start from the minimal tiling and raise heights
/// (stack cubes) only where some constraint forces it.
pub fn solve_advancing(instance: &TilingInstance) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    ensure_bounded(instance)?;
    let region = instance.region();
    let idx = RegionIndex::new(region);
    let g = build_dc(instance)?;
    let source = idx.vertices[0];
    let mut stats = Stats { vertices: g.vertex_count(), arcs: g.arc_count(), raises: Some(0), ..Stats::default() };
    let env = match thurston_indexed(region, &idx)? {
        Ok(env) => env,
        Err(_) => {
            let cert = certificate_by_bf(instance)?;
            stats.elapsed_ms = elapsed_ms(start);
            return Ok(SolveOutcome::infeasible(Algorithm::Advancing, cert, stats));
        }
    };
    debug_assert_eq!(g.vertices(), &idx.vertices[..]);
    let (fixpoint, cubes) = advance(&g, &env.lo, &env.hi);
    stats.raises = Some(cubes);
    match fixpoint {
        Some(h) => {
            let field = idx.field(source, &h).anchored();
            let tiling = extract_tiling(&field, region)?;
            stats.elapsed_ms = elapsed_ms(start);
            Ok(SolveOutcome::tiled(Algorithm::Advancing, tiling, field, stats))
        }
        None => {
            let cert = certificate_by_bf(instance)?;
            stats.elapsed_ms = elapsed_ms(start);
            Ok(SolveOutcome::infeasible(Algorithm::Advancing, cert, stats))
        }
    }
}

/// Least feasible field above the minimal tiling, co-anchored with the
/// envelope; `None` if infeasible. Exposed for property tests.
pub fn advancing_fixpoint(instance: &TilingInstance) -> Result<Option<(HeightField, u64)>, SolveError> {
    ensure_bounded(instance)?;
    let idx = RegionIndex::new(instance.region());
    let Ok(env) = thurston_indexed(instance.region(), &idx)? else {
        return Ok(None);
    };
    let g = build_dc(instance)?;
    let (h, cubes) = advance(&g, &env.lo, &env.hi);
    Ok(h.map(|h| (idx.field(idx.vertices[0], &h), cubes)))
}

pub fn solve(instance: &TilingInstance, algo: Algorithm) -> Result<SolveOutcome, SolveError> {
    match algo {
        Algorithm::Bf => solve_bf(instance),
        Algorithm::Advancing => solve_advancing(instance),
        Algorithm::Thurston => solve_thurston_outcome(instance),
        Algorithm::Infinite => Err(Violation::new(
            ViolationCode::Unsupported,
            "the infinite algorithm runs through infinite::solve_infinite",
        )
        .into()),
    }
}

/// Vertices whose three positive in-edges all have increment -2, i.e. a
/// cube can be stacked on them.
fn flippable(idx: &RegionIndex, h: &[i64], v: usize) -> bool {
    !idx.on_boundary[v] && idx.inn[v].len() == 3 && idx.inn[v].iter().all(|&u| h[v] - h[u] == -2)
}

/// Start from the minimal tiling and add `flips` random cubes, each on a
/// uniformly chosen flippable vertex. Stops early at the maximal tiling.
pub fn random_tiling(region: &Region, flips: u64, seed: u64) -> Result<HeightField, SolveError> {
    let v = region.violations();
    if !v.is_empty() {
        return Err(SolveError::Invalid(v));
    }
    let idx = RegionIndex::new(region);
    let env = thurston_indexed(region, &idx)?.map_err(|_| SolveError::Untilable)?;
    let mut h = env.lo;
    let n = idx.vertices.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Flippable set with O(1) insert/remove.
    let mut members: Vec<usize> = Vec::new();
    let mut pos = vec![usize::MAX; n];
    let set = |v: usize, on: bool, members: &mut Vec<usize>, pos: &mut Vec<usize>| {
        if on && pos[v] == usize::MAX {
            pos[v] = members.len();
            members.push(v);
        } else if !on && pos[v] != usize::MAX {
            let i = pos[v];
            let last = *members.last().unwrap();
            members.swap_remove(i);
            if last != v {
                pos[last] = i;
            }
            pos[v] = usize::MAX;
        }
    };
    for v in 0..n {
        if flippable(&idx, &h, v) {
            set(v, true, &mut members, &mut pos);
        }
    }
    for _ in 0..flips {
        if members.is_empty() {
            break;
        }
        let v = members[rng.gen_range(0..members.len())];
        h[v] += 3;
        let touched: Vec<usize> =
            std::iter::once(v).chain(idx.out[v].iter().copied()).chain(idx.inn[v].iter().copied()).collect();
        for u in touched {
            let f = flippable(&idx, &h, u);
            set(u, f, &mut members, &mut pos);
        }
    }
    Ok(idx.field(idx.vertices[0], &h).anchored())
}

/// Drawn interior edges whose two neighbouring lozenges differ in color
/// (equivalently, whose lateral vertices have equal heights).
pub fn salient_edges(h: &HeightField, region: &Region) -> Result<Vec<Edge>, ExtractError> {
    let interior: Vec<Edge> = region.interior_edges().copied().collect();
    let (drawn, _) = classify_edges(h, &interior)?;
    let mut out = Vec::new();
    for e in drawn {
        let (a, b) = e.lateral_vertices();
        let (ha, hb) = (
            h.get(&a).ok_or(ExtractError::MissingHeight(a))?,
            h.get(&b).ok_or(ExtractError::MissingHeight(b))?,
        );
        if ha == hb {
            out.push(e);
        }
    }
    Ok(out)
}

/// Default number of random cubes stacked by [`generate_instance`]: half
/// the `n x n x n` box.
pub fn default_flips(n: u32) -> u64 {
    (n as u64).pow(3).div_ceil(2)
}

/// A feasible puzzle on the hexagon of size `n`: a random tiling, then `k`
/// of its salient edges as saliency constraints.
pub fn generate_instance(n: u32, k: usize, seed: u64) -> Result<TilingInstance, SolveError> {
    generate_instance_with_flips(n, k, seed, default_flips(n))
}

pub fn generate_instance_with_flips(n: u32, k: usize, seed: u64, flips: u64) -> Result<TilingInstance, SolveError> {
    let region = Region::hexagon(n)?;
    let h = random_tiling(&region, flips, seed)?;
    let mut salient = salient_edges(&h, &region)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    if k > salient.len() {
        log::warn!("only {} salient edges available, asked for {k}", salient.len());
    }
    let (chosen, _) = salient.partial_shuffle(&mut rng, k);
    let mut x2 = chosen.to_vec();
    x2.sort();
    TilingInstance::new(region, Vec::new(), x2).map_err(SolveError::Invalid)
}

/// Envelope of the hexagon of size `n` in closed form: the levels of the
/// representatives with minimum coordinate 0 and maximum coordinate `n`.
pub fn hexagon_envelope_closed_form(n: u32, v: &Vertex) -> (i64, i64) {
    let n = n as i64;
    let lo = v.level();
    let m = v.coords().into_iter().max().unwrap();
    let hi = lo + 3 * (n - m);
    (lo, hi)
}
