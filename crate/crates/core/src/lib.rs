//! Simulation and exact verification toolkit for unions of independent
//! random subgraphs of the complete graph `K_n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: immutable graph and model-description types.
//! * [`gen`]: seeded samplers for communities and union graphs.
//! * [`conn`]: connected components and exact vertex connectivity.
//! * [`stats`]: membership counters and blossom detection.
//! * [`theory`]: closed-form moments and threshold predictors.
//! * [`oracle`]: exact rational ground truth (enumeration and finite-n bounds).
//! * [`harness`]: trial batches, sweeps and verification suites.

pub mod conn;
pub mod error;
pub mod gen;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use model::{CommunityInstance, GraphTemplate, ModelKind, ModelSpec, UnionGraph, VertexId};
