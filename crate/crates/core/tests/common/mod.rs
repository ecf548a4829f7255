//! Shared fixtures for the integration tests: instance corpora and a
//! height-field checker written directly against the grid, without the
//! constraint graph.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use calisson::grid::Edge;
use calisson::instance::{Region, TilingInstance};
use calisson::solvers::{solve_thurston, SolveOutcome, ThurstonResult};
use calisson::HeightField;

/// All 3^6 ways to mark the interior edges of the unit hexagon as free, X1
/// or X2.
pub fn hexagon_one_corpus() -> Vec<TilingInstance> {
    let region = Region::hexagon(1).unwrap();
    let interior: Vec<Edge> = region.interior_edges().copied().collect();
    assert_eq!(interior.len(), 6);
    let mut out = Vec::with_capacity(729);
    for code in 0..729u32 {
        let (mut x1, mut x2) = (Vec::new(), Vec::new());
        let mut c = code;
        for e in &interior {
            match c % 3 {
                1 => x1.push(*e),
                2 => x2.push(*e),
                _ => {}
            }
            c /= 3;
        }
        out.push(TilingInstance::new(region.clone(), x1, x2).unwrap());
    }
    out
}

/// Random marks on the interior edges of the hexagon of size `n`, with a
/// per-instance density drawn from `[0, 0.5)`.
pub fn random_marks(n: u32, seed: u64) -> TilingInstance {
    let region = Region::hexagon(n).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density: f64 = rng.gen_range(0.0..0.5);
    let (mut x1, mut x2) = (Vec::new(), Vec::new());
    for e in region.interior_edges() {
        if rng.gen_bool(density) {
            if rng.gen_bool(0.5) {
                x1.push(*e);
            } else {
                x2.push(*e);
            }
        }
    }
    TilingInstance::new(region, x1, x2).unwrap()
}

/// The five height invariants of a tiled outcome, checked edge by edge.
pub fn height_invariants(instance: &TilingInstance, out: &SolveOutcome) -> Result<(), String> {
    let h: &HeightField = out.heights.as_ref().ok_or("tiled outcome without heights")?;
    let region = instance.region();
    let get = |v| h.get(&v).ok_or_else(|| format!("no height at {v}"));
    for e in region.edges() {
        let inc = get(e.head())? - get(e.tail())?;
        if inc != 1 && inc != -2 {
            return Err(format!("(a) increment {inc} on {e}"));
        }
        let constrained = region.is_boundary_edge(e) || instance.x1().contains(e) || instance.x2().contains(e);
        if constrained && inc != 1 {
            return Err(format!("(c) constrained edge {e} has increment {inc}"));
        }
    }
    let s = h.source;
    for v in region.vertices() {
        let d = get(*v)? - get(s)?;
        if (d - (v.level() - s.level())).rem_euclid(3) != 0 {
            return Err(format!("(b) {v} is not congruent to its level"));
        }
    }
    match solve_thurston(region).map_err(|e| e.to_string())? {
        ThurstonResult::Tilable(env) if env.contains(h) => {}
        ThurstonResult::Tilable(_) => return Err("(d) heights leave the envelope".into()),
        ThurstonResult::Untilable(u) => return Err(format!("(d) tiled an untilable region: {u:?}")),
    }
    for e in instance.x2() {
        let (a, b) = e.lateral_vertices();
        if get(a)? != get(b)? {
            return Err(format!("(e) lateral vertices of {e} differ"));
        }
    }
    Ok(())
}
