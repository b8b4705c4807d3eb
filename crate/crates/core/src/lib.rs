//! Simulation core for Q(λ) multi-hop routing in a mobile UAV relay network.
//!
//! The crate is `no_std` (it needs `alloc`) and holds everything that does not
//! touch the filesystem: Gauss-Markov mobility, the Nakagami-m channel, the
//! energy model, link metrics, hello-based neighbour discovery, the routing
//! learner and the episode engine that ties them together. Configuration
//! parsing, the CLI and metric files live in the `uavnet` crate.
//!
//! Every random draw comes from a ChaCha stream derived from the configured
//! seed, so a run is a pure function of its [`SimConfig`].

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod config;
pub mod discovery;
pub mod energetics;
pub mod engine;
pub mod error;
pub mod link;
pub mod mobility;
pub mod radio;
pub mod rng;
pub mod routing;

mod node;

pub use config::{Baseline, SimConfig};
pub use engine::{EpisodeMetrics, World};
pub use error::{ConfigError, RadioError};
pub use mobility::Position3;
pub use node::NodeId;
