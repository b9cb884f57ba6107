use alloc::vec;
use alloc::vec::Vec;

use super::{EngineError, LpId};
use crate::graph::NodeId;

/// Assignment of entities to logical processes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpMap {
    assignment: Vec<LpId>,
    populations: Vec<usize>,
}

/// Block partition: entity `i` goes to LP `floor(i * L / n)`.
pub fn partition_static(n: usize, lp_count: usize) -> LpMap {
    assert!(lp_count >= 1, "at least one LP is required");
    let mut populations = vec![0; lp_count];
    let assignment = (0..n)
        .map(|i| {
            let lp = (i * lp_count / n) as LpId;
            populations[lp as usize] += 1;
            lp
        })
        .collect();
    LpMap { assignment, populations }
}

/// `ceil((1 + delta) * n / L)`; values within 1e-9 of an integer are not
/// rounded up.
pub fn population_cap(n: usize, lp_count: usize, delta: f64) -> usize {
    let raw = (1.0 + delta) * n as f64 / lp_count as f64;
    libm::ceil(raw - 1e-9) as usize
}

impl LpMap {
    pub fn entity_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn lp_count(&self) -> usize {
        self.populations.len()
    }

    #[inline]
    pub fn lp_of(&self, entity: NodeId) -> LpId {
        self.assignment[entity as usize]
    }

    pub fn populations(&self) -> &[usize] {
        &self.populations
    }

    pub fn cap(&self, delta: f64) -> usize {
        population_cap(self.entity_count(), self.lp_count(), delta)
    }

    pub fn move_entity(&mut self, entity: NodeId, to: LpId) {
        let from = self.assignment[entity as usize];
        self.populations[from as usize] -= 1;
        self.populations[to as usize] += 1;
        self.assignment[entity as usize] = to;
    }

    pub fn entities_of(&self, lp: LpId) -> impl Iterator<Item = NodeId> + '_ {
        self.assignment.iter().enumerate().filter(move |(_, &l)| l == lp).map(|(i, _)| i as NodeId)
    }

    /// Errors if any LP holds more than the cap.
    pub fn check_cap(&self, delta: f64, t: u32) -> Result<(), EngineError> {
        let cap = self.cap(delta);
        match self.populations.iter().enumerate().find(|(_, &p)| p > cap) {
            Some((lp, &population)) => Err(EngineError::LoadCap { t, lp: lp as LpId, population, cap }),
            None => Ok(()),
        }
    }
}
