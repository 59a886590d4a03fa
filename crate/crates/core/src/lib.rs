//! Simulation and theory for budget-constrained random walks on red/blue
//! edge-colored random regular graphs.
//!
//! * [`graphgen`]: random graph ensembles and their structure.
//! * [`walks`]: single trajectories under oblivious, flip, smooth and
//!   congestion-priced policies.
//! * [`theory`]: cover-time constants and the flip-walk return equations.
//! * [`experiments`]: seeded parallel Monte Carlo campaigns.

pub mod error;
pub mod experiments;
pub mod graphgen;
pub mod seeding;
pub mod theory;
pub mod walks;

pub use error::{Error, Result};
pub use graphgen::{Color, ColoredGraph, Edge, StructureReport};
pub use walks::{CoverResult, CoverStatus, WalkPolicy};
