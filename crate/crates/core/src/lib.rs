//! Optimal multi-agent pathfinding in continuous time.
//!
//! The crate implements continuous-time conflict-based search (CCBS) for
//! disk-shaped agents moving at unit speed on weighted geometric graphs,
//! together with the enhancements that make it scale: disjoint splitting
//! with positive (landmark) constraints, cost-impact conflict
//! prioritization, and an admissible high-level heuristic.
//!
//! Module map:
//! - [`graph`]: geometric graphs, MovingAI grids and scenarios, roadmaps,
//!   goal-distance tables and the differential heuristic.
//! - [`motion`]: timed actions, plans, collision and unsafe-interval geometry.
//! - [`sipp`]: safe-interval planning and its multi-start/multi-goal variant.
//! - [`ccbs`]: the constraint-tree search itself.
//! - [`validate`]: independent solution checks and a small-instance oracle.
//! - [`bench`], [`planfile`], [`render`]: the experiment protocol and I/O
//!   used by the `ccbs` binary.

pub mod bench;
pub mod ccbs;
mod error;
pub mod graph;
pub mod instance;
pub mod motion;
pub mod planfile;
pub mod render;
pub mod sipp;
pub mod validate;

pub use error::{Error, Result};
pub use instance::{Agent, Instance};

/// Absolute tolerance for time and geometry comparisons.
pub const EPS: f64 = 1e-9;

/// Agent radius used throughout the benchmark setup.
pub const DEFAULT_RADIUS: f64 = std::f64::consts::SQRT_2 / 4.0;
