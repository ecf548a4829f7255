//! Brute-force ground truth. Nothing here looks at heights or constraint
//! graphs: tilings are checked and enumerated as sets of triangle pairs.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::grid::{Edge, Triangle};
use crate::instance::{Color, Region, Tiling, TilingInstance, Violation, ViolationCode};

pub const DEFAULT_TRIANGLE_LIMIT: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TilingViolation {
    UncoveredTriangle { triangle: Triangle },
    DoubleCover { triangle: Triangle },
    /// A lozenge whose diagonal is a boundary, X1 or X2 edge.
    OverlapAtEdge { edge: Edge },
    /// A lozenge with a triangle outside the region (or the window).
    OutsideRegion { lozenge: Edge },
    SaliencyViolation { edge: Edge },
}

impl TilingViolation {
    pub fn kind(&self) -> &'static str {
        match self {
            TilingViolation::UncoveredTriangle { .. } => "uncovered-triangle",
            TilingViolation::DoubleCover { .. } => "double-cover",
            TilingViolation::OverlapAtEdge { .. } => "overlap-at-edge",
            TilingViolation::OutsideRegion { .. } => "outside-region",
            TilingViolation::SaliencyViolation { .. } => "saliency-violation",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "kind": self.kind(), "message": self.to_string() })
    }
}

impl std::fmt::Display for TilingViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TilingViolation::UncoveredTriangle { triangle } => write!(f, "uncovered triangle {triangle:?}"),
            TilingViolation::DoubleCover { triangle } => write!(f, "triangle {triangle:?} covered twice"),
            TilingViolation::OverlapAtEdge { edge } => write!(f, "lozenge overlaps constrained edge {edge}"),
            TilingViolation::OutsideRegion { lozenge } => write!(f, "lozenge {lozenge} leaves the region"),
            TilingViolation::SaliencyViolation { edge } => {
                write!(f, "lozenges on both sides of {edge} have the same color")
            }
        }
    }
}

/// Triangle -> lozenge diagonal, reporting the first triangle covered twice.
fn cover_map(tiling: &Tiling) -> Result<BTreeMap<Triangle, Edge>, TilingViolation> {
    let mut cover = BTreeMap::new();
    for e in &tiling.lozenges {
        for t in e.adjacent_triangles() {
            if cover.insert(t, *e).is_some() {
                return Err(TilingViolation::DoubleCover { triangle: t });
            }
        }
    }
    Ok(cover)
}

fn check_constraints(
    instance: &TilingInstance,
    tiling: &Tiling,
    cover: &BTreeMap<Triangle, Edge>,
) -> Result<(), TilingViolation> {
    for e in instance.x1().iter().chain(instance.x2()) {
        if tiling.lozenges.contains(e) {
            return Err(TilingViolation::OverlapAtEdge { edge: *e });
        }
    }
    for e in instance.x2() {
        let [a, b] = e.adjacent_triangles();
        let (Some(la), Some(lb)) = (cover.get(&a), cover.get(&b)) else {
            return Err(TilingViolation::UncoveredTriangle {
                triangle: if cover.contains_key(&a) { b } else { a },
            });
        };
        if Color::of_axis(la.axis) == Color::of_axis(lb.axis) {
            return Err(TilingViolation::SaliencyViolation { edge: *e });
        }
    }
    Ok(())
}

/// Exact cover of the region's triangles, no lozenge across `∂R ∪ X1 ∪ X2`,
/// and differently colored lozenges on the two sides of every X2 edge.
pub fn check_tiling(instance: &TilingInstance, tiling: &Tiling) -> Result<(), TilingViolation> {
    let region = instance.region();
    let cover = cover_map(tiling)?;
    for e in &tiling.lozenges {
        if region.is_boundary_edge(e) {
            return Err(TilingViolation::OverlapAtEdge { edge: *e });
        }
        if e.adjacent_triangles().iter().any(|t| !region.contains_triangle(t)) {
            return Err(TilingViolation::OutsideRegion { lozenge: *e });
        }
    }
    if let Some(t) = region.triangles().iter().find(|t| !cover.contains_key(t)) {
        return Err(TilingViolation::UncoveredTriangle { triangle: *t });
    }
    check_constraints(instance, tiling, &cover)
}

/// A finite piece of a tiling of the whole grid: every window triangle is
/// covered once, and each lozenge meets the window (it may stick out).
/// Constraint edges of an infinite instance are checked as well.
pub fn check_window_tiling(instance: &TilingInstance, window: &Region, tiling: &Tiling) -> Result<(), TilingViolation> {
    let cover = cover_map(tiling)?;
    for e in &tiling.lozenges {
        if !e.adjacent_triangles().iter().any(|t| window.contains_triangle(t)) {
            return Err(TilingViolation::OutsideRegion { lozenge: *e });
        }
    }
    if let Some(t) = window.triangles().iter().find(|t| !cover.contains_key(t)) {
        return Err(TilingViolation::UncoveredTriangle { triangle: *t });
    }
    check_constraints(instance, tiling, &cover)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EnumerationResult {
    pub count: u64,
    #[serde(skip)]
    pub tilings: Vec<Tiling>,
    /// The whole search tree was visited.
    pub exhausted: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerateOptions {
    /// Tilings kept in the result.
    pub keep: usize,
    /// Stop after this many tilings.
    pub max_count: Option<u64>,
    pub triangle_limit: usize,
    /// Try the covering lozenges of each triangle in reverse order.
    pub reverse: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { keep: 0, max_count: None, triangle_limit: DEFAULT_TRIANGLE_LIMIT, reverse: false }
    }
}

struct Search<'a> {
    triangles: Vec<Triangle>,
    /// For each triangle, the lozenges covering it that are allowed at all.
    choices: Vec<Vec<(Edge, usize)>>,
    /// For each triangle, the X2 edges among its sides.
    salient: Vec<Vec<(usize, usize)>>,
    covered: Vec<Option<Edge>>,
    placed: Vec<Edge>,
    opts: &'a EnumerateOptions,
    result: EnumerationResult,
}

impl Search<'_> {
    fn saliency_ok(&self, t: usize) -> bool {
        self.salient[t].iter().all(|&(a, b)| match (self.covered[a], self.covered[b]) {
            (Some(la), Some(lb)) => Color::of_axis(la.axis) != Color::of_axis(lb.axis),
            _ => true,
        })
    }

    /// `false` once `max_count` is reached.
    fn run(&mut self, mut next: usize) -> bool {
        while next < self.triangles.len() && self.covered[next].is_some() {
            next += 1;
        }
        if next == self.triangles.len() {
            self.result.count += 1;
            if self.result.tilings.len() < self.opts.keep {
                self.result.tilings.push(Tiling::new(self.placed.iter().copied()));
            }
            return self.opts.max_count.is_none_or(|m| self.result.count < m);
        }
        let mut choices = self.choices[next].clone();
        if self.opts.reverse {
            choices.reverse();
        }
        for (e, other) in choices {
            if self.covered[other].is_some() {
                continue;
            }
            self.covered[next] = Some(e);
            self.covered[other] = Some(e);
            if self.saliency_ok(next) && self.saliency_ok(other) {
                self.placed.push(e);
                let go_on = self.run(next + 1);
                self.placed.pop();
                if !go_on {
                    self.covered[next] = None;
                    self.covered[other] = None;
                    return false;
                }
            }
            self.covered[next] = None;
            self.covered[other] = None;
        }
        true
    }
}

/// Depth-first enumeration covering the smallest uncovered triangle first.
pub fn enumerate_with(instance: &TilingInstance, opts: &EnumerateOptions) -> Result<EnumerationResult, Violation> {
    let region: &Region = instance.region();
    if !region.is_bounded() {
        return Err(Violation::new(ViolationCode::Unsupported, "the oracle needs a bounded region"));
    }
    if region.triangles().len() > opts.triangle_limit {
        return Err(Violation::new(
            ViolationCode::TooLarge,
            format!("{} triangles exceed the oracle limit of {}", region.triangles().len(), opts.triangle_limit),
        ));
    }
    let triangles: Vec<Triangle> = region.triangles().iter().copied().collect();
    let index: HashMap<Triangle, usize> = triangles.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let forbidden = |e: &Edge| region.is_boundary_edge(e) || instance.x1().contains(e) || instance.x2().contains(e);
    let mut choices = Vec::with_capacity(triangles.len());
    let mut salient = Vec::with_capacity(triangles.len());
    for t in &triangles {
        let mut c = Vec::new();
        let mut s = Vec::new();
        for e in t.edges() {
            let Some(&other) = index.get(&t.across(&e)) else { continue };
            if instance.x2().contains(&e) {
                let [a, b] = e.adjacent_triangles();
                s.push((index[&a], index[&b]));
            }
            if !forbidden(&e) {
                c.push((e, other));
            }
        }
        choices.push(c);
        salient.push(s);
    }
    let n = triangles.len();
    let mut search = Search {
        triangles,
        choices,
        salient,
        covered: vec![None; n],
        placed: Vec::new(),
        opts,
        result: EnumerationResult { count: 0, tilings: Vec::new(), exhausted: false },
    };
    search.result.exhausted = search.run(0);
    Ok(search.result)
}

/// All tilings, keeping the first `keep` of them.
pub fn enumerate(instance: &TilingInstance, keep: usize) -> Result<EnumerationResult, Violation> {
    enumerate_with(instance, &EnumerateOptions { keep, ..EnumerateOptions::default() })
}

pub fn count(instance: &TilingInstance) -> Result<u64, Violation> {
    Ok(enumerate(instance, 0)?.count)
}

/// 1 if some tiling exists, else 0.
pub fn count_feasible(instance: &TilingInstance) -> Result<u64, Violation> {
    let opts = EnumerateOptions { max_count: Some(1), ..EnumerateOptions::default() };
    Ok(enumerate_with(instance, &opts)?.count)
}

/// Number of plane partitions in an `a x b x c` box, which is also the
/// number of lozenge tilings of the hexagon with those side lengths.
pub fn macmahon(a: u64, b: u64, c: u64) -> u128 {
    // prod (i+j+k-1)/(i+j+k-2), accumulated as an exact fraction.
    let (mut num, mut den) = (1u128, 1u128);
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                num *= (i + j + k - 1) as u128;
                den *= (i + j + k - 2) as u128;
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
        }
    }
    debug_assert_eq!(den, 1);
    num / den
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Side, Vertex};

    fn hex(n: u32, x1: Vec<Edge>, x2: Vec<Edge>) -> TilingInstance {
        TilingInstance::new(Region::hexagon(n).unwrap(), x1, x2).unwrap()
    }

    fn centre_z() -> Edge {
        Edge::new(Vertex::ORIGIN, Axis::Z)
    }

    fn other_z() -> Edge {
        Edge::new(Vertex::new(1, 1, 0), Axis::Z)
    }

    #[test]
    fn macmahon_values() {
        assert_eq!(macmahon(1, 1, 1), 2);
        assert_eq!(macmahon(2, 2, 2), 20);
        assert_eq!(macmahon(3, 3, 3), 980);
        assert_eq!(macmahon(4, 4, 4), 232848);
    }

    #[test]
    fn hexagon_counts() {
        for n in 1..=3u32 {
            let c = count(&hex(n, vec![], vec![])).unwrap();
            assert_eq!(c as u128, macmahon(n as u64, n as u64, n as u64));
        }
    }

    #[test]
    fn reversed_order_gives_same_count() {
        let opts = EnumerateOptions { reverse: true, ..EnumerateOptions::default() };
        assert_eq!(enumerate_with(&hex(3, vec![], vec![]), &opts).unwrap().count, 980);
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(count_feasible(&hex(1, vec![], vec![centre_z(), other_z()])).unwrap(), 0);
        assert_eq!(count(&hex(1, vec![], vec![centre_z()])).unwrap(), 1);
        assert_eq!(count(&hex(1, vec![centre_z()], vec![])).unwrap(), 1);
    }

    #[test]
    fn enumerated_tilings_pass_the_checker() {
        let inst = hex(2, vec![], vec![]);
        let res = enumerate(&inst, 100).unwrap();
        assert!(res.exhausted);
        assert_eq!(res.tilings.len(), 20);
        for t in &res.tilings {
            assert_eq!(check_tiling(&inst, t), Ok(()));
            assert_eq!(t.len(), 12);
        }
    }

    #[test]
    fn checker_failure_modes() {
        let inst = hex(1, vec![], vec![centre_z()]);
        let sol = enumerate(&inst, 1).unwrap().tilings.remove(0);
        assert_eq!(check_tiling(&inst, &sol), Ok(()));

        let mut missing = sol.clone();
        let first = *missing.lozenges.iter().next().unwrap();
        missing.lozenges.remove(&first);
        assert!(matches!(check_tiling(&inst, &missing), Err(TilingViolation::UncoveredTriangle { .. })));

        // The other tiling of the hexagon overlaps the centre edge.
        let all = enumerate(&hex(1, vec![], vec![]), 2).unwrap().tilings;
        let other = all.into_iter().find(|t| *t != sol).unwrap();
        assert_eq!(check_tiling(&inst, &other), Err(TilingViolation::OverlapAtEdge { edge: centre_z() }));

        let outside = Tiling::new(sol.lozenges.iter().copied().chain([Edge::new(Vertex::new(5, 0, 0), Axis::Z)]));
        assert!(matches!(check_tiling(&inst, &outside), Err(TilingViolation::OutsideRegion { .. })));

        let doubled = Tiling::new(sol.lozenges.iter().copied().chain([centre_z()]));
        assert!(matches!(check_tiling(&inst, &doubled), Err(TilingViolation::DoubleCover { .. })));
    }

    #[test]
    fn saliency_violation_with_a_perfect_cover() {
        // In the hexagon of size 2, find a tiling that overlaps none of the
        // chosen edge's neighbours but puts equal colors on both sides.
        let base = hex(2, vec![], vec![]);
        let all = enumerate(&base, 100).unwrap().tilings;
        let interior: Vec<Edge> = base.region().interior_edges().copied().collect();
        let mut seen = false;
        for t in &all {
            for e in &interior {
                if t.lozenges.contains(e) {
                    continue;
                }
                let cover = t.cover();
                let [a, b] = e.adjacent_triangles();
                if Color::of_axis(cover[&a].axis) == Color::of_axis(cover[&b].axis) {
                    let inst = hex(2, vec![], vec![*e]);
                    assert_eq!(check_tiling(&inst, t), Err(TilingViolation::SaliencyViolation { edge: *e }));
                    seen = true;
                }
            }
        }
        assert!(seen);
    }

    #[test]
    fn refuses_large_regions() {
        let inst = hex(6, vec![], vec![]);
        assert_eq!(inst.region().triangles().len(), 216);
        assert_eq!(count(&inst).unwrap_err().code, ViolationCode::TooLarge);
    }

    #[test]
    fn single_triangle_has_no_tiling() {
        let inst = TilingInstance::unconstrained(Region::from_triangles([Triangle::new(Vertex::ORIGIN, Side::L)])).unwrap();
        assert_eq!(count(&inst).unwrap(), 0);
    }
}
