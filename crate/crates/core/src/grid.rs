//! The triangular grid in homogeneous coordinates.
//!
//! A vertex is the projection of an integer point `(x, y, z)` along the
//! all-ones direction, so `(x, y, z)` and `(x + k, y + k, z + k)` name the
//! same vertex. Vertices are stored in canonical form with `min(x, y, z) = 0`.
//!
//! Orientation conventions (screen y up):
//!
//! ```text
//!              +Z (12 o'clock)
//!               |
//!               |
//!              / \
//!            /     \
//!   +X (8 o'clock)   +Y (4 o'clock)
//! ```
//!
//! Unit steps along `+X`, `+Y`, `+Z` are the *positive* directions; their
//! opposites point to 2, 6 and 10 o'clock.

use std::fmt;

use serde::{Deserialize, Serialize};

const SQRT3_2: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn unit(self) -> [i64; 3] {
        match self {
            Axis::X => [1, 0, 0],
            Axis::Y => [0, 1, 0],
            Axis::Z => [0, 0, 1],
        }
    }

    /// Next axis in the cyclic order X -> Y -> Z -> X.
    pub fn next(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::Z,
            Axis::Z => Axis::X,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(Axis::X),
            "Y" | "y" => Ok(Axis::Y),
            "Z" | "z" => Ok(Axis::Z),
            other => Err(format!("unknown axis {other:?}, expected X, Y or Z")),
        }
    }
}

/// One of the six unit steps of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Direction {
    pub axis: Axis,
    pub positive: bool,
}

impl Direction {
    pub const ALL: [Direction; 6] = [
        Direction::pos(Axis::X),
        Direction::pos(Axis::Y),
        Direction::pos(Axis::Z),
        Direction::neg(Axis::X),
        Direction::neg(Axis::Y),
        Direction::neg(Axis::Z),
    ];

    pub const fn pos(axis: Axis) -> Self {
        Direction { axis, positive: true }
    }

    pub const fn neg(axis: Axis) -> Self {
        Direction { axis, positive: false }
    }

    pub fn opposite(self) -> Self {
        Direction { axis: self.axis, positive: !self.positive }
    }

    pub fn delta(self) -> [i64; 3] {
        let u = self.axis.unit();
        if self.positive {
            u
        } else {
            [-u[0], -u[1], -u[2]]
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.positive { '+' } else { '-' }, self.axis)
    }
}

/// A grid vertex in canonical homogeneous coordinates (`min(x, y, z) = 0`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    x: i64,
    y: i64,
    z: i64,
}

impl Vertex {
    pub const ORIGIN: Vertex = Vertex { x: 0, y: 0, z: 0 };

    /// Canonical representative of `φ(x, y, z)`.
    pub fn new(x: i64, y: i64, z: i64) -> Self {
        let m = x.min(y).min(z);
        Vertex { x: x - m, y: y - m, z: z - m }
    }

    pub fn from_coords(c: [i64; 3]) -> Self {
        Vertex::new(c[0], c[1], c[2])
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }

    pub fn z(&self) -> i64 {
        self.z
    }

    pub fn coords(&self) -> [i64; 3] {
        [self.x, self.y, self.z]
    }

    /// `x + y + z` of the canonical representative. Only its residue mod 3
    /// is a property of the vertex itself.
    pub fn level(&self) -> i64 {
        self.x + self.y + self.z
    }

    pub fn offset(&self, d: [i64; 3]) -> Vertex {
        Vertex::new(self.x + d[0], self.y + d[1], self.z + d[2])
    }

    pub fn step(&self, dir: Direction) -> Vertex {
        self.offset(dir.delta())
    }

    pub fn plus(&self, axis: Axis) -> Vertex {
        self.step(Direction::pos(axis))
    }

    pub fn minus(&self, axis: Axis) -> Vertex {
        self.step(Direction::neg(axis))
    }

    pub fn neighbors(&self) -> [(Direction, Vertex); 6] {
        Direction::ALL.map(|d| (d, self.step(d)))
    }

    /// Direction of the unit step from `self` to `other`, if they are adjacent.
    pub fn direction_to(&self, other: &Vertex) -> Option<Direction> {
        Direction::ALL.into_iter().find(|&d| self.step(d) == *other)
    }

    /// Coordinate difference `other - self` for the stored representatives.
    pub fn delta_to(&self, other: &Vertex) -> [i64; 3] {
        [other.x - self.x, other.y - self.y, other.z - self.z]
    }

    /// Minimal number of unit steps (either sign) between two vertices.
    pub fn grid_distance(&self, other: &Vertex) -> i64 {
        let d = self.delta_to(other);
        d.iter().max().unwrap() - d.iter().min().unwrap()
    }

    /// Planar position; `+Z` maps to `(0, 1)`.
    pub fn embed(&self) -> (f64, f64) {
        let (x, y, z) = (self.x as f64, self.y as f64, self.z as f64);
        (SQRT3_2 * (y - x), z - 0.5 * (x + y))
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.x, self.y, self.z)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Residue of the height difference `v - u` modulo 3, in `0..3`.
pub fn level_gap_mod3(u: &Vertex, v: &Vertex) -> i64 {
    (v.level() - u.level()).rem_euclid(3)
}

/// A grid edge stored in positive orientation: `base -> base + e_axis`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub base: Vertex,
    pub axis: Axis,
}

impl Edge {
    pub fn new(base: Vertex, axis: Axis) -> Self {
        Edge { base, axis }
    }

    /// The edge traversed by stepping from `from` along `dir`.
    pub fn from_step(from: Vertex, dir: Direction) -> Self {
        if dir.positive {
            Edge { base: from, axis: dir.axis }
        } else {
            Edge { base: from.minus(dir.axis), axis: dir.axis }
        }
    }

    /// The edge joining two adjacent vertices.
    pub fn between(u: &Vertex, v: &Vertex) -> Option<Self> {
        u.direction_to(v).map(|d| Edge::from_step(*u, d))
    }

    pub fn tail(&self) -> Vertex {
        self.base
    }

    pub fn head(&self) -> Vertex {
        self.base.plus(self.axis)
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.tail(), self.head())
    }

    /// The two vertices adjacent to both endpoints. The first belongs to the
    /// left-hand triangle of [`Edge::adjacent_triangles`], the second to the
    /// right-hand one.
    pub fn lateral_vertices(&self) -> (Vertex, Vertex) {
        let a1 = self.axis.next();
        let a2 = a1.next();
        (self.base.minus(a2), self.base.minus(a1))
    }

    /// The two unit triangles sharing this edge, ordered like
    /// [`Edge::lateral_vertices`].
    pub fn adjacent_triangles(&self) -> [Triangle; 2] {
        let v = self.base;
        match self.axis {
            Axis::Z => [Triangle::new(v, Side::L), Triangle::new(v, Side::R)],
            Axis::X => [
                Triangle::new(v.minus(Axis::Z), Side::L),
                Triangle::new(v.plus(Axis::X), Side::R),
            ],
            Axis::Y => [
                Triangle::new(v.plus(Axis::Y), Side::L),
                Triangle::new(v.minus(Axis::Z), Side::R),
            ],
        }
    }

    pub fn midpoint(&self) -> (f64, f64) {
        let (a, b) = (self.tail().embed(), self.head().embed());
        ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?},{}]", self.base, self.axis)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// A unit triangle, keyed by the lower endpoint of its vertical edge.
///
/// `L(v)` has vertices `{v, v+e_z, v-e_y}`, `R(v)` has `{v, v+e_z, v-e_x}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    pub base: Vertex,
    pub side: Side,
}

impl Triangle {
    pub fn new(base: Vertex, side: Side) -> Self {
        Triangle { base, side }
    }

    fn apex(&self) -> Vertex {
        match self.side {
            Side::L => self.base.minus(Axis::Y),
            Side::R => self.base.minus(Axis::X),
        }
    }

    pub fn vertices(&self) -> [Vertex; 3] {
        [self.base, self.base.plus(Axis::Z), self.apex()]
    }

    /// The three edges, positive orientations. They form a directed cycle
    /// `base -> base+e_z -> apex -> base`.
    pub fn edges(&self) -> [Edge; 3] {
        let top = self.base.plus(Axis::Z);
        let apex = self.apex();
        match self.side {
            Side::L => [
                Edge::new(self.base, Axis::Z),
                Edge::new(top, Axis::X),
                Edge::new(apex, Axis::Y),
            ],
            Side::R => [
                Edge::new(self.base, Axis::Z),
                Edge::new(top, Axis::Y),
                Edge::new(apex, Axis::X),
            ],
        }
    }

    /// The triangle on the other side of `edge`, which must be one of ours.
    pub fn across(&self, edge: &Edge) -> Triangle {
        let [a, b] = edge.adjacent_triangles();
        debug_assert!(a == *self || b == *self);
        if a == *self {
            b
        } else {
            a
        }
    }

    /// Identify a triangle from its vertex set, if the three vertices form one.
    pub fn from_vertices(vs: [Vertex; 3]) -> Option<Triangle> {
        for i in 0..3 {
            for j in 0..3 {
                if i == j || vs[i].plus(Axis::Z) != vs[j] {
                    continue;
                }
                let other = vs[3 - i - j];
                for side in [Side::L, Side::R] {
                    let t = Triangle::new(vs[i], side);
                    if t.apex() == other {
                        return Some(t);
                    }
                }
            }
        }
        None
    }

    pub fn centroid(&self) -> (f64, f64) {
        let pts = self.vertices().map(|v| v.embed());
        (
            (pts[0].0 + pts[1].0 + pts[2].0) / 3.0,
            (pts[0].1 + pts[1].1 + pts[2].1) / 3.0,
        )
    }
}

impl fmt::Debug for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.side, self.base)
    }
}
