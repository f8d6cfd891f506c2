//! Multilayer modularity: scoring and community detection for networks whose
//! entities appear across several layers.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and everything else that touches IO live in the `mlq` crate.
//!
//! Three quality functions are provided:
//!
//! * classic single-graph modularity ([`modularity::q_newman`]),
//! * multislice modularity with constant resolution and coupling
//!   ([`modularity::q_multislice`]),
//! * multilayer modularity with per-community resolution and projection-based
//!   inter-layer coupling ([`modularity::q_multilayer`]).
//!
//! [`detect`] optimizes either of the last two over entity-layer tuples.
#![no_std]

extern crate alloc;

pub mod community;
pub mod detect;
mod error;
pub mod mlgraph;
pub mod modularity;
mod sum;
pub mod synthbench;

pub use community::CommunityStructure;
pub use detect::{DetectConfig, DetectResult};
pub use error::{Error, Result};
pub use mlgraph::{LayerOrdering, MultilayerNetwork, NetworkBuilder, PairingScheme};
pub use modularity::{CouplingKind, CouplingPolicy, Objective, ResolutionPolicy, ScoreReport};
