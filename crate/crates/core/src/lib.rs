//! Lozenge tilings of triangular-grid regions under non-overlapping and
//! saliency constraints.
//!
//! A tiling is encoded by integer heights on grid vertices; the constraints
//! become a system of difference constraints whose shortest-path solutions
//! are exactly the valid tilings.

pub mod cli;
pub mod dcgraph;
pub mod grid;
pub mod infinite;
pub mod instance;
pub mod oracle;
pub mod render;
pub mod solvers;

pub use dcgraph::{bellman_ford, build_dc, ConstraintGraph, HeightField, NegativeCycleCertificate};
pub use grid::{Axis, Direction, Edge, Side, Triangle, Vertex};
pub use instance::{parse_instance, Region, Tiling, TilingInstance, Violation, ViolationCode};
pub use solvers::{solve, Algorithm, SolveOutcome, Status};
