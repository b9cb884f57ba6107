//! Time-stepped partitioned simulation kernel.
//!
//! Entities are spread over logical processes (LPs). Each timestep delivers
//! the envelopes sent during the previous one in canonical order, runs every
//! entity's step handler in ascending id, and collects new sends at the
//! barrier. With clustering switched on, a migration round periodically moves
//! entities toward the LP they talk to most, subject to a population cap.

mod envelope;
mod kernel;
mod ledger;
mod migration;
mod partition;
mod stats;

pub use envelope::{Envelope, MsgKind, Payload};
pub use kernel::{run, EngineParams, EntityCtx, Executor, Protocol, RunOutcome, Sequential, Shard};
pub use ledger::InteractionLedger;
pub use migration::{migration_round, Migration};
pub use partition::{partition_static, population_cap, LpMap};
pub use stats::{EngineStats, StepSample};

use alloc::string::String;

use thiserror::Error;

use crate::graph::NodeId;

pub type LpId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("model error at t={t}, entity {entity}: {message}")]
    Model { t: u32, entity: NodeId, message: String },
    #[error("load cap violated at t={t}: LP {lp} holds {population} entities, cap is {cap}")]
    LoadCap { t: u32, lp: LpId, population: usize, cap: usize },
}

impl EngineError {
    /// True for violations of engine invariants (as opposed to bad input).
    pub fn is_invariant_violation(&self) -> bool {
        matches!(self, EngineError::LoadCap { .. })
    }
}
