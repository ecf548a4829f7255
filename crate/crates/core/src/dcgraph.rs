//! The difference-constraint graph of an instance and its Bellman–Ford solver.
//!
//! An arc `u -> v` of weight `w` stands for the inequality `h(v) - h(u) <= w`.
//! Arcs of the graph built from an instance are:
//!
//! * `+1` along every positive-orientation edge of the region,
//! * `-1` against every boundary, `X1` and `X2` edge (together with the
//!   `+1` arc this pins the edge's increment to exactly `+1`),
//! * `0` in both directions between the two lateral vertices of an `X2` edge.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::grid::{level_gap_mod3, Vertex};
use crate::instance::TilingInstance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcTag {
    Positive,
    BoundaryNeg,
    X1Neg,
    X2Neg,
    Lateral,
    /// Shortest-path shortcut used by the infinite-grid reduction.
    Distance,
}

impl ArcTag {
    pub fn as_str(self) -> &'static str {
        match self {
            ArcTag::Positive => "positive",
            ArcTag::BoundaryNeg => "boundary-neg",
            ArcTag::X1Neg => "x1-neg",
            ArcTag::X2Neg => "x2-neg",
            ArcTag::Lateral => "lateral",
            ArcTag::Distance => "distance",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: Vertex,
    pub to: Vertex,
    pub weight: i64,
    pub tag: ArcTag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct IndexedArc {
    to: u32,
    weight: i64,
    tag: ArcTag,
}

/// Weighted digraph of difference constraints, arcs grouped by source.
#[derive(Clone, Debug)]
pub struct ConstraintGraph {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, u32>,
    offsets: Vec<usize>,
    arcs: Vec<IndexedArc>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DcError {
    #[error("unbounded regions need the infinite-grid reduction")]
    Unbounded,
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(Vertex),
    #[error("vertex {0} is unreachable from the source")]
    Unreachable(Vertex),
}

impl ConstraintGraph {
    /// Build from an explicit arc list. Vertices not touched by any arc but
    /// listed in `vertices` are kept.
    pub fn from_arcs(vertices: impl IntoIterator<Item = Vertex>, arcs: &[Arc]) -> ConstraintGraph {
        let mut vs: Vec<Vertex> = vertices.into_iter().collect();
        vs.extend(arcs.iter().flat_map(|a| [a.from, a.to]));
        vs.sort();
        vs.dedup();
        let index: HashMap<Vertex, u32> = vs.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
        let mut counts = vec![0usize; vs.len() + 1];
        for a in arcs {
            counts[index[&a.from] as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut flat = vec![IndexedArc { to: 0, weight: 0, tag: ArcTag::Positive }; arcs.len()];
        for a in arcs {
            let s = index[&a.from] as usize;
            flat[fill[s]] = IndexedArc { to: index[&a.to], weight: a.weight, tag: a.tag };
            fill[s] += 1;
        }
        ConstraintGraph { vertices: vs, index, offsets, arcs: flat }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.index.get(v).map(|&i| i as usize)
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        (0..self.vertices.len()).flat_map(move |i| self.arcs_from_index(i))
    }

    fn arcs_from_index(&self, i: usize) -> impl Iterator<Item = Arc> + '_ {
        let from = self.vertices[i];
        self.arcs[self.offsets[i]..self.offsets[i + 1]].iter().map(move |a| Arc {
            from,
            to: self.vertices[a.to as usize],
            weight: a.weight,
            tag: a.tag,
        })
    }

    pub fn arcs_from(&self, v: &Vertex) -> impl Iterator<Item = Arc> + '_ {
        let i = self.index_of(v);
        i.into_iter().flat_map(move |i| self.arcs_from_index(i))
    }

    /// Raw adjacency for solvers: `(target index, weight)` out of vertex `i`.
    pub(crate) fn out_arcs(&self, i: usize) -> impl Iterator<Item = (usize, i64)> + '_ {
        self.arcs[self.offsets[i]..self.offsets[i + 1]].iter().map(|a| (a.to as usize, a.weight))
    }

    /// Reverse adjacency: for each vertex, the `(source, weight)` of arcs into it.
    pub(crate) fn in_arcs(&self) -> Vec<Vec<(usize, i64)>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for i in 0..self.vertices.len() {
            for (j, w) in self.out_arcs(i) {
                inc[j].push((i, w));
            }
        }
        inc
    }

    /// Smallest weight among arcs `from -> to`, if any.
    pub fn min_weight(&self, from: &Vertex, to: &Vertex) -> Option<(i64, ArcTag)> {
        let j = *self.index.get(to)?;
        let i = self.index_of(from)?;
        self.arcs[self.offsets[i]..self.offsets[i + 1]]
            .iter()
            .filter(|a| a.to == j)
            .map(|a| (a.weight, a.tag))
            .min()
    }

    pub fn tag_counts(&self) -> BTreeMap<ArcTag, usize> {
        let mut m = BTreeMap::new();
        for a in &self.arcs {
            *m.entry(a.tag).or_insert(0) += 1;
        }
        m
    }

    /// Debug dump: `[[from, to, weight, tag], ...]` with vertices as `[x,y,z]`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.arcs()
                .map(|a| serde_json::json!([a.from.coords(), a.to.coords(), a.weight, a.tag.as_str()]))
                .collect(),
        )
    }
}

/// Build `DC(R, X1, X2)` for a bounded instance.
pub fn build_dc(instance: &TilingInstance) -> Result<ConstraintGraph, DcError> {
    let region = instance.region();
    if !region.is_bounded() {
        return Err(DcError::Unbounded);
    }
    let mut arcs = Vec::with_capacity(region.edge_count() + region.boundary_len() + 3 * instance.x2().len());
    for e in region.edges() {
        arcs.push(Arc { from: e.tail(), to: e.head(), weight: 1, tag: ArcTag::Positive });
    }
    let mut neg = |e: &crate::grid::Edge, tag| {
        arcs.push(Arc { from: e.head(), to: e.tail(), weight: -1, tag });
    };
    for e in region.boundary() {
        neg(e, ArcTag::BoundaryNeg);
    }
    for e in instance.x1() {
        neg(e, ArcTag::X1Neg);
    }
    for e in instance.x2() {
        neg(e, ArcTag::X2Neg);
    }
    for e in instance.x2() {
        let (a, b) = e.lateral_vertices();
        arcs.push(Arc { from: a, to: b, weight: 0, tag: ArcTag::Lateral });
        arcs.push(Arc { from: b, to: a, weight: 0, tag: ArcTag::Lateral });
    }
    Ok(ConstraintGraph::from_arcs(region.vertices().iter().copied(), &arcs))
}

/// Integer heights on grid vertices, anchored so that `h(source) = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightField {
    pub source: Vertex,
    pub values: BTreeMap<Vertex, i64>,
}

impl HeightField {
    pub fn new(source: Vertex, values: BTreeMap<Vertex, i64>) -> Self {
        HeightField { source, values }
    }

    pub fn get(&self, v: &Vertex) -> Option<i64> {
        self.values.get(v).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shifted(&self, delta: i64) -> HeightField {
        HeightField {
            source: self.source,
            values: self.values.iter().map(|(&v, &h)| (v, h + delta)).collect(),
        }
    }

    /// Shift so the source reads 0.
    pub fn anchored(&self) -> HeightField {
        match self.get(&self.source) {
            Some(h0) => self.shifted(-h0),
            None => self.clone(),
        }
    }

    /// `h(v) - h(u) ≡ level(v) - level(u) (mod 3)` for every vertex, relative
    /// to the source.
    pub fn is_congruent(&self) -> bool {
        let Some(h0) = self.get(&self.source) else {
            return self.values.is_empty();
        };
        self.values
            .iter()
            .all(|(v, &h)| (h - h0).rem_euclid(3) == level_gap_mod3(&self.source, v))
    }
}

/// A closed walk of arcs with strictly negative total weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NegativeCycleCertificate {
    pub cycle: Vec<Arc>,
    pub total_weight: i64,
}

impl NegativeCycleCertificate {
    pub fn vertices(&self) -> Vec<Vertex> {
        self.cycle.iter().map(|a| a.from).collect()
    }

    /// Re-check the walk: consecutive, closed, arcs of `g`, and negative.
    pub fn verify(&self, g: &ConstraintGraph) -> bool {
        if self.cycle.is_empty() {
            return false;
        }
        let n = self.cycle.len();
        let mut sum = 0;
        for (i, a) in self.cycle.iter().enumerate() {
            if a.to != self.cycle[(i + 1) % n].from {
                return false;
            }
            match g.min_weight(&a.from, &a.to) {
                Some((w, _)) if w <= a.weight => {}
                _ => return false,
            }
            sum += a.weight;
        }
        sum == self.total_weight && sum < 0
    }

    /// Rebuild a certificate from a vertex list using the lightest arcs of `g`.
    pub fn from_vertices(g: &ConstraintGraph, vs: &[Vertex]) -> Option<Self> {
        if vs.is_empty() {
            return None;
        }
        let mut cycle = Vec::with_capacity(vs.len());
        for i in 0..vs.len() {
            let (from, to) = (vs[i], vs[(i + 1) % vs.len()]);
            let (weight, tag) = g.min_weight(&from, &to)?;
            cycle.push(Arc { from, to, weight, tag });
        }
        let total_weight = cycle.iter().map(|a| a.weight).sum();
        Some(NegativeCycleCertificate { cycle, total_weight })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(HeightField),
    Infeasible(NegativeCycleCertificate),
}

#[derive(Clone, Debug)]
pub struct BellmanFordRun {
    pub result: Feasibility,
    pub relaxations: u64,
}

/// Queue-based Bellman–Ford from `source`.
///
/// Returns the shortest-path distances (the pointwise-largest solution with
/// `h(source) = 0`) or a negative cycle read off the predecessor graph. A
/// vertex relaxed `|V|` times triggers extraction; the predecessor graph is
/// also scanned every `|V|` relaxations so cycles surface early.
pub fn bellman_ford(g: &ConstraintGraph, source: &Vertex) -> Result<BellmanFordRun, DcError> {
    let s = g.index_of(source).ok_or(DcError::UnknownVertex(*source))?;
    let n = g.vertex_count();
    const INF: i64 = i64::MAX / 4;
    let mut dist = vec![INF; n];
    // Predecessor as (vertex, arc weight).
    let mut pred: Vec<Option<(usize, i64)>> = vec![None; n];
    let mut count = vec![0u32; n];
    let mut queued = vec![false; n];
    let mut queue = VecDeque::with_capacity(n);
    dist[s] = 0;
    queue.push_back(s);
    queued[s] = true;
    let mut relaxations: u64 = 0;
    let mut since_scan = 0usize;

    while let Some(u) = queue.pop_front() {
        queued[u] = false;
        let du = dist[u];
        for (v, w) in g.out_arcs(u) {
            let nd = du + w;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some((u, w));
                relaxations += 1;
                since_scan += 1;
                count[v] += 1;
                if count[v] as usize >= n || v == s {
                    // A vertex relaxed |V| times, or an improved source, means a
                    // negative cycle; it usually already closes in the predecessors.
                    if let Some(cert) = cycle_through(g, &pred, v).or_else(|| scan_predecessor_cycle(g, &pred)) {
                        return Ok(BellmanFordRun { result: Feasibility::Infeasible(cert), relaxations });
                    }
                }
                if !queued[v] {
                    queued[v] = true;
                    queue.push_back(v);
                }
            }
        }
        if since_scan >= n {
            since_scan = 0;
            if let Some(cert) = scan_predecessor_cycle(g, &pred) {
                return Ok(BellmanFordRun { result: Feasibility::Infeasible(cert), relaxations });
            }
        }
    }
    if let Some(v) = dist.iter().position(|&d| d == INF) {
        return Err(DcError::Unreachable(g.vertices()[v]));
    }
    let values = g.vertices().iter().copied().zip(dist).collect();
    Ok(BellmanFordRun { result: Feasibility::Feasible(HeightField::new(*source, values)), relaxations })
}

/// Walk predecessors back from `start` until a vertex repeats, then return
/// that cycle in forward order.
fn cycle_through(g: &ConstraintGraph, pred: &[Option<(usize, i64)>], start: usize) -> Option<NegativeCycleCertificate> {
    let n = pred.len();
    let mut seen = vec![usize::MAX; n];
    let mut at = start;
    let mut step = 0;
    while seen[at] == usize::MAX {
        seen[at] = step;
        step += 1;
        at = pred[at]?.0;
    }
    Some(collect_cycle(g, pred, at))
}

fn collect_cycle(g: &ConstraintGraph, pred: &[Option<(usize, i64)>], on_cycle: usize) -> NegativeCycleCertificate {
    let mut arcs = Vec::new();
    let mut at = on_cycle;
    loop {
        let (p, w) = pred[at].expect("cycle vertices have predecessors");
        let tag = g.min_weight(&g.vertices()[p], &g.vertices()[at]).map(|(_, t)| t).unwrap_or(ArcTag::Positive);
        arcs.push(Arc { from: g.vertices()[p], to: g.vertices()[at], weight: w, tag });
        at = p;
        if at == on_cycle {
            break;
        }
    }
    arcs.reverse();
    let total_weight = arcs.iter().map(|a| a.weight).sum();
    debug_assert!(total_weight < 0);
    NegativeCycleCertificate { cycle: arcs, total_weight }
}

/// Any cycle in the predecessor graph has negative weight.
fn scan_predecessor_cycle(g: &ConstraintGraph, pred: &[Option<(usize, i64)>]) -> Option<NegativeCycleCertificate> {
    let n = pred.len();
    // 0 = unvisited, 1 = on current path, 2 = done
    let mut state = vec![0u8; n];
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut path = Vec::new();
        let mut at = start;
        loop {
            if state[at] == 1 {
                return Some(collect_cycle(g, pred, at));
            }
            if state[at] == 2 {
                break;
            }
            state[at] = 1;
            path.push(at);
            match pred[at] {
                Some((p, _)) => at = p,
                None => break,
            }
        }
        for v in path {
            state[v] = 2;
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeightViolation {
    Missing(Vertex),
    Arc { arc: Arc, increment: i64 },
    Congruence(Vertex),
}

/// Check every arc inequality and the mod-3 congruence, independently of how
/// `h` was produced.
pub fn check_heights(g: &ConstraintGraph, h: &HeightField) -> Result<(), HeightViolation> {
    for v in g.vertices() {
        if h.get(v).is_none() {
            return Err(HeightViolation::Missing(*v));
        }
    }
    for a in g.arcs() {
        let inc = h.values[&a.to] - h.values[&a.from];
        if inc > a.weight {
            return Err(HeightViolation::Arc { arc: a, increment: inc });
        }
    }
    let Some(h0) = h.get(&h.source) else {
        return Err(HeightViolation::Missing(h.source));
    };
    for v in g.vertices() {
        if (h.values[v] - h0).rem_euclid(3) != level_gap_mod3(&h.source, v) {
            return Err(HeightViolation::Congruence(*v));
        }
    }
    Ok(())
}
