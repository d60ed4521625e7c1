//! Reynolds-Vicsek flocking with controllable influencing agents.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO: world
//! geometry, the alignment update, fixed-radius neighbor indexing, influencer
//! placement, influencer controllers and the flock metrics. Trial orchestration,
//! config files and CSV output live in `flock-harness`.
//!
//! All transcendental math goes through `libm`, so trajectories are
//! bit-reproducible across targets that share IEEE-754 doubles.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod agent;
pub mod behaviors;
pub mod geom;
pub mod math;
pub mod metrics;
pub mod placement;
pub mod rules;
pub mod seed;
pub mod sim;
pub mod spatial;
pub mod world;

pub use agent::{AgentKind, AgentState, Phase};
pub use behaviors::{BehaviorKind, BehaviorSpec, SecondStage};
pub use geom::Vec2;

pub use metrics::MetricSample;
pub use placement::{PlacementSpec, Strategy};
pub use sim::{NeighborMode, SimState};
pub use spatial::SpatialIndex;
pub use world::{Setting, Topology, WorldSpec};
