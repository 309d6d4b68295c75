//! Flow interdiction on capacitated directed acyclic graphs.
//!
//! An interdictor with a flow budget injects traffic from its source to its
//! sink in order to reduce the throughput available to network users, who
//! send flow along a fixed set of paths. This crate provides:
//!
//! - the network data model and flow primitives ([`network`]),
//! - a self-contained dense simplex solver ([`lp`]),
//! - exact and surrogate throughput-reduction evaluation ([`throughput`]),
//! - the recursive greedy path search for monotone submodular gains
//!   ([`greedy`]),
//! - the maximin approximation framework over an uncertainty set of
//!   candidate user-path sets ([`robust`]),
//! - exponential-time reference solvers for verification ([`oracle`]),
//! - scenario generation, ingestion, and serialization ([`scenario`]).
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across threads.

#![forbid(unsafe_code)]

pub mod edgeset;
pub mod greedy;
pub mod lp;
pub mod network;
pub mod oracle;
pub mod robust;
pub mod scenario;
pub mod testkit;
pub mod throughput;

pub use edgeset::EdgeSet;
pub use network::{Flow, Network, SinglePathFlow, UserPaths};
pub use robust::{InterdictionStrategy, UncertaintySet};
pub use scenario::Scenario;


