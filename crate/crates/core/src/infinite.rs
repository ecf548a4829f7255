//! The whole triangular grid as a region. Only constrained vertices carry
//! unknowns; between them, positive paths of the unconstrained grid
//! contribute shortest-path distances in closed form.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dcgraph::{bellman_ford, Arc, ArcTag, ConstraintGraph, DcError, Feasibility, HeightField};
use crate::grid::{Edge, Vertex};
use crate::instance::{Region, Tiling, TilingInstance, Violation, ViolationCode};
use crate::solvers::{classify_edges, Algorithm, SolveError, SolveOutcome, Stats};

/// Length of the shortest path of positive unit steps from `u` to `v`.
pub fn gplus_distance(u: &Vertex, v: &Vertex) -> i64 {
    let d = u.delta_to(v);
    d.iter().sum::<i64>() - 3 * d.iter().min().copied().unwrap()
}

/// Constraint arcs among constrained vertices plus a distance arc for every
/// ordered pair.
pub type GpmGraph = ConstraintGraph;

/// Vertices touched by the negative and lateral arcs of `(x1, x2)`.
pub fn gminus_vertices(x1: &BTreeSet<Edge>, x2: &BTreeSet<Edge>) -> BTreeSet<Vertex> {
    let mut vs = BTreeSet::new();
    for e in x1.iter().chain(x2) {
        vs.insert(e.tail());
        vs.insert(e.head());
    }
    for e in x2 {
        let (a, b) = e.lateral_vertices();
        vs.insert(a);
        vs.insert(b);
    }
    vs
}

pub fn build_gpm(x1: &BTreeSet<Edge>, x2: &BTreeSet<Edge>) -> GpmGraph {
    let vertices = gminus_vertices(x1, x2);
    let mut arcs = Vec::new();
    for (set, tag) in [(x1, ArcTag::X1Neg), (x2, ArcTag::X2Neg)] {
        for e in set {
            arcs.push(Arc { from: e.head(), to: e.tail(), weight: -1, tag });
        }
    }
    for e in x2 {
        let (a, b) = e.lateral_vertices();
        arcs.push(Arc { from: a, to: b, weight: 0, tag: ArcTag::Lateral });
        arcs.push(Arc { from: b, to: a, weight: 0, tag: ArcTag::Lateral });
    }
    for u in &vertices {
        for v in &vertices {
            if u != v {
                arcs.push(Arc { from: *u, to: *v, weight: gplus_distance(u, v), tag: ArcTag::Distance });
            }
        }
    }
    ConstraintGraph::from_arcs(vertices, &arcs)
}

pub struct InfiniteRun {
    pub graph: GpmGraph,
    pub result: Feasibility,
    pub relaxations: u64,
}

/// Feasibility of the constraints on the whole grid. With every ordered pair
/// joined by a distance arc, the graph is strongly connected, so a single
/// Bellman–Ford run from the smallest vertex decides it.
pub fn decide_infinite(x1: &BTreeSet<Edge>, x2: &BTreeSet<Edge>) -> Result<InfiniteRun, DcError> {
    let graph = build_gpm(x1, x2);
    let Some(&source) = graph.vertices().first() else {
        let result = Feasibility::Feasible(HeightField::new(Vertex::ORIGIN, BTreeMap::new()));
        return Ok(InfiniteRun { graph, result, relaxations: 0 });
    };
    let run = bellman_ford(&graph, &source)?;
    Ok(InfiniteRun { graph, result: run.result, relaxations: run.relaxations })
}

/// The triangles within grid distance `radius` of `center`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub center: [i64; 3],
    pub radius: u32,
}

impl Window {
    pub fn new(center: Vertex, radius: u32) -> Self {
        Window { center: center.coords(), radius }
    }

    pub fn center(&self) -> Vertex {
        Vertex::from_coords(self.center)
    }

    pub fn region(&self) -> Region {
        Region::ball(self.center(), self.radius)
    }

    /// Smallest window around the origin with every constrained vertex
    /// strictly inside, and radius at least 3.
    pub fn covering(x1: &BTreeSet<Edge>, x2: &BTreeSet<Edge>) -> Window {
        let r = gminus_vertices(x1, x2)
            .iter()
            .map(|v| Vertex::ORIGIN.grid_distance(v) + 1)
            .max()
            .unwrap_or(0)
            .max(3);
        Window::new(Vertex::ORIGIN, r as u32)
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    /// `x,y,z,r`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || format!("window must be x,y,z,r, got {s:?}");
        if parts.len() != 4 {
            return Err(bad());
        }
        let c: Vec<i64> = parts[..3].iter().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
        let radius = parts[3].parse().map_err(|_| bad())?;
        Ok(Window { center: [c[0], c[1], c[2]], radius })
    }
}

/// Pointwise-minimal extension of `h_fin` to every vertex of `targets`.
/// With no constrained vertices, distances from the origin.
pub fn extend_heights(h_fin: &HeightField, targets: &[Vertex]) -> HeightField {
    let values = targets
        .iter()
        .map(|v| {
            let h = if h_fin.is_empty() {
                gplus_distance(&Vertex::ORIGIN, v)
            } else {
                h_fin.values.iter().map(|(u, &hu)| hu + gplus_distance(u, v)).min().unwrap()
            };
            (*v, h)
        })
        .collect();
    HeightField::new(h_fin.source, values)
}

/// The lozenges whose diagonal is an edge of the window, including those
/// straddling its boundary. Together they cover every window triangle once.
pub fn window_tiling(h_fin: &HeightField, window: &Window) -> Result<(Tiling, HeightField), SolveError> {
    let region = window.region();
    let h = extend_heights(h_fin, region.vertices());
    let (_, overlapped) = classify_edges(&h, region.edges())?;
    Ok((Tiling::new(overlapped), h))
}

pub fn solve_infinite(instance: &TilingInstance, window: Option<Window>) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    if instance.region().is_bounded() {
        return Err(Violation::new(ViolationCode::Unsupported, "the infinite algorithm needs an infinite region").into());
    }
    let run = decide_infinite(instance.x1(), instance.x2())?;
    let window = window.unwrap_or_else(|| Window::covering(instance.x1(), instance.x2()));
    let mut stats = Stats {
        vertices: run.graph.vertex_count(),
        arcs: run.graph.arc_count(),
        relaxations: Some(run.relaxations),
        ..Stats::default()
    };
    let mut out = match run.result {
        Feasibility::Feasible(h_fin) => {
            let (tiling, h) = window_tiling(&h_fin, &window)?;
            stats.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            SolveOutcome::tiled(Algorithm::Infinite, tiling, h, stats)
        }
        Feasibility::Infeasible(cert) => {
            stats.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            SolveOutcome::infeasible(Algorithm::Infinite, cert, stats)
        }
    };
    out.window = Some(window);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Axis, Direction, Side, Triangle};
    use proptest::prelude::*;
    use std::collections::{HashMap, VecDeque};

    fn v(x: i64, y: i64, z: i64) -> Vertex {
        Vertex::new(x, y, z)
    }

    fn set(es: &[Edge]) -> BTreeSet<Edge> {
        es.iter().copied().collect()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(gplus_distance(&Vertex::ORIGIN, &v(0, 0, 1)), 1);
        assert_eq!(gplus_distance(&Vertex::ORIGIN, &Vertex::ORIGIN), 0);
        assert_eq!(gplus_distance(&Vertex::ORIGIN, &v(-1, 0, 0)), 2);
    }

    #[test]
    fn distance_matches_bfs() {
        let ball = Region::ball(Vertex::ORIGIN, 8);
        let inside: BTreeSet<Vertex> = ball.vertices().iter().copied().collect();
        for s in ball.vertices() {
            // Positive steps leaving the ball never help: the ball is convex
            // for these paths, so BFS inside it gives the grid distance.
            let mut dist: HashMap<Vertex, i64> = HashMap::from([(*s, 0)]);
            let mut q = VecDeque::from([*s]);
            while let Some(u) = q.pop_front() {
                for a in Axis::ALL {
                    let w = u.step(Direction::pos(a));
                    if inside.contains(&w) && !dist.contains_key(&w) {
                        dist.insert(w, dist[&u] + 1);
                        q.push_back(w);
                    }
                }
            }
            for t in ball.vertices() {
                assert_eq!(dist.get(t).copied(), Some(gplus_distance(s, t)), "{s} -> {t}");
            }
        }
    }

    proptest! {
        #[test]
        fn distance_triangle_inequality_and_congruence(
            a in prop::array::uniform3(-20i64..20),
            b in prop::array::uniform3(-20i64..20),
            c in prop::array::uniform3(-20i64..20),
            shift in -5i64..5,
        ) {
            let (u, w, x) = (Vertex::from_coords(a), Vertex::from_coords(b), Vertex::from_coords(c));
            prop_assert!(gplus_distance(&u, &x) <= gplus_distance(&u, &w) + gplus_distance(&w, &x));
            prop_assert!(gplus_distance(&u, &w) >= 0);
            prop_assert_eq!((gplus_distance(&u, &w) - (w.level() - u.level())).rem_euclid(3), 0);
            let moved = [a[0] + shift, a[1] + shift, a[2] + shift];
            let raw = |p: [i64; 3], q: [i64; 3]| {
                let d = [q[0] - p[0], q[1] - p[1], q[2] - p[2]];
                d.iter().sum::<i64>() - 3 * d.iter().min().unwrap()
            };
            prop_assert_eq!(raw(moved, b), raw(a, b));
        }
    }

    #[test]
    fn gpm_counts() {
        let g = build_gpm(&set(&[Edge::new(Vertex::ORIGIN, Axis::Z)]), &BTreeSet::new());
        assert_eq!(g.vertex_count(), 2);
        let tags = g.tag_counts();
        assert_eq!(tags[&ArcTag::X1Neg], 1);
        assert_eq!(tags[&ArcTag::Distance], 2);

        let g = build_gpm(&BTreeSet::new(), &set(&[Edge::new(Vertex::ORIGIN, Axis::Z)]));
        assert_eq!(g.vertex_count(), 4);
        let tags = g.tag_counts();
        assert_eq!(tags[&ArcTag::X2Neg], 1);
        assert_eq!(tags[&ArcTag::Lateral], 2);
        assert_eq!(tags[&ArcTag::Distance], 12);
        for a in g.arcs() {
            assert_eq!((a.weight - (a.to.level() - a.from.level())).rem_euclid(3), 0);
        }
    }

    fn triangle_edges(side: Side) -> BTreeSet<Edge> {
        Triangle::new(Vertex::ORIGIN, side).edges().into_iter().collect()
    }

    #[test]
    fn decide_examples() {
        assert!(matches!(decide_infinite(&BTreeSet::new(), &BTreeSet::new()).unwrap().result, Feasibility::Feasible(_)));
        for side in [Side::L, Side::R] {
            let run = decide_infinite(&triangle_edges(side), &BTreeSet::new()).unwrap();
            let Feasibility::Infeasible(cert) = run.result else { panic!("{side:?}") };
            assert!(cert.total_weight <= -3);
            assert!(cert.verify(&run.graph));
        }
        let z = Edge::new(Vertex::ORIGIN, Axis::Z);
        assert!(matches!(decide_infinite(&BTreeSet::new(), &set(&[z])).unwrap().result, Feasibility::Feasible(_)));
        let column = set(&[z, Edge::new(v(0, 0, 1), Axis::Z)]);
        assert!(matches!(decide_infinite(&BTreeSet::new(), &column).unwrap().result, Feasibility::Feasible(_)));
    }

    #[test]
    fn window_staircase_for_empty_constraints() {
        let inst = TilingInstance::unconstrained(Region::infinite()).unwrap();
        let out = solve_infinite(&inst, Some(Window::new(v(2, 0, 0), 4))).unwrap();
        let t = out.tiling.unwrap();
        // Every window triangle is covered exactly once.
        let region = Window::new(v(2, 0, 0), 4).region();
        let cover = t.cover();
        for tri in region.triangles() {
            assert!(cover.contains_key(tri));
        }
    }

    #[test]
    fn window_agrees_on_constrained_vertices() {
        let z = Edge::new(Vertex::ORIGIN, Axis::Z);
        let run = decide_infinite(&BTreeSet::new(), &set(&[z])).unwrap();
        let Feasibility::Feasible(h_fin) = run.result else { panic!() };
        let window = Window::new(Vertex::ORIGIN, 10);
        let (t, h) = window_tiling(&h_fin, &window).unwrap();
        for (u, hu) in &h_fin.values {
            assert_eq!(h.get(u), Some(*hu));
        }
        assert!(!t.lozenges.contains(&z));
    }

    #[test]
    fn window_parse() {
        assert_eq!("0,0,0,10".parse::<Window>().unwrap(), Window::new(Vertex::ORIGIN, 10));
        assert!("1,2".parse::<Window>().is_err());
        let w = Window::covering(&set(&[Edge::new(v(5, 0, 0), Axis::X)]), &BTreeSet::new());
        assert_eq!(w.radius, 7);
    }
}
