//! Simulation of dissemination protocols on large unstructured networks.
//!
//! The crate is `no_std` (with `alloc`) and holds everything that does not
//! touch the operating system: graph generation and dot interchange, the
//! partitioned time-stepped engine with clustering migrations, the gossip
//! protocols, scenario configuration, and trace parsing and analysis.

#![no_std]
// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod config;
pub mod engine;
pub mod graph;
pub mod kv;
pub mod protocols;
pub mod rng;
pub mod trace;

pub use engine::{EngineError, EngineParams, EngineStats, Envelope, LpId, LpMap, Payload};
pub use graph::{Graph, GraphError, NodeId};
pub use protocols::{Gossip, GossipParams, NodeState, ProtocolKind};
pub use trace::{MsgId, TraceEvent, TraceSink};
