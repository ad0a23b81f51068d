//! Distinguishing Null from ρ-planted right-hand sides of a k-uniform
//! hypergraph via many short even covers.
//!
//! Covers are harvested as odd colors of closed walks found by birthday
//! collisions on the implicit Kikuchi graph ([`walk`]); the decision comes
//! from a randomly restricted, noised cover polynomial ([`distinguisher`]).

pub mod combin;
pub mod distinguisher;
pub mod error;
pub mod experiment;
pub mod gf2;
pub mod hypergraph;
pub mod instance;
pub mod kikuchi;
pub mod lab;
pub mod oracle;
pub mod params;
pub mod rng;
pub mod walk;

pub use distinguisher::{distinguish, Decision, DistinguisherConfig, ThresholdRule};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig, Report};
pub use hypergraph::{verify_even_cover, EvenCover, Hypergraph};
pub use instance::{Label, SignedInstance};
pub use kikuchi::{compute_params, KikuchiGraph, KikuchiParams, KikuchiVertex};
pub use params::{derive_theorem_params, Profile, TheoremConfig};
pub use rng::RngStream;
pub use walk::{find_good_closed_walk, harvest_distinct_covers, odd_colors, Harvest, WalkSearchConfig};
