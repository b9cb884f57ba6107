use alloc::vec;
use alloc::vec::Vec;

use super::LpMap;
use crate::graph::NodeId;

#[derive(Clone, Debug, Default)]
struct Bucket {
    stamp: Option<u32>,
    counts: Vec<(NodeId, u32)>,
}

/// Sliding-window audit of one entity's outgoing traffic.
///
/// Counts are kept per destination entity and projected onto LPs through
/// the current [`LpMap`] when read, so a migration anywhere re-keys every
/// ledger without touching it.
#[derive(Clone, Debug)]
pub struct InteractionLedger {
    window: u32,
    buckets: Vec<Bucket>,
    totals: Vec<(NodeId, u64)>,
}

impl InteractionLedger {
    pub fn new(window: u32) -> Self {
        assert!(window >= 1, "audit window must be at least one timestep");
        Self { window, buckets: vec![Bucket::default(); window as usize], totals: Vec::new() }
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    fn evict(totals: &mut Vec<(NodeId, u64)>, bucket: &mut Bucket) {
        for &(dest, c) in &bucket.counts {
            if let Some(pos) = totals.iter().position(|&(d, _)| d == dest) {
                totals[pos].1 -= c as u64;
                if totals[pos].1 == 0 {
                    totals.swap_remove(pos);
                }
            }
        }
        bucket.counts.clear();
        bucket.stamp = None;
    }

    /// Counts one message sent to `dest` at timestep `t`.
    #[inline]
    pub fn record(&mut self, t: u32, dest: NodeId) {
        let bucket = &mut self.buckets[(t % self.window) as usize];
        if bucket.stamp != Some(t) {
            Self::evict(&mut self.totals, bucket);
            bucket.stamp = Some(t);
        }
        match bucket.counts.iter_mut().find(|(d, _)| *d == dest) {
            Some((_, c)) => *c += 1,
            None => bucket.counts.push((dest, 1)),
        }
        match self.totals.iter_mut().find(|(d, _)| *d == dest) {
            Some((_, c)) => *c += 1,
            None => self.totals.push((dest, 1)),
        }
    }

    /// Drops buckets older than the window ending at `now` (inclusive).
    pub fn expire(&mut self, now: u32) {
        for bucket in &mut self.buckets {
            if let Some(s) = bucket.stamp {
                if s + self.window <= now {
                    Self::evict(&mut self.totals, bucket);
                }
            }
        }
    }

    /// Per-destination totals over the current window.
    pub fn totals(&self) -> &[(NodeId, u64)] {
        &self.totals
    }

    /// Window totals bucketed by the destination's current LP.
    pub fn lp_counts(&mut self, now: u32, map: &LpMap) -> Vec<u64> {
        self.expire(now);
        let mut out = vec![0u64; map.lp_count()];
        for &(dest, c) in &self.totals {
            out[map.lp_of(dest) as usize] += c;
        }
        out
    }

    /// Approximate heap footprint, charged as migration cost.
    pub fn state_bytes(&self) -> usize {
        core::mem::size_of::<Self>()
            + self.totals.len() * core::mem::size_of::<(NodeId, u64)>()
            + self.buckets.iter().map(|b| 8 + b.counts.len() * 8).sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::partition_static;

    #[test]
    fn window_evicts_old_counts() {
        let mut l = InteractionLedger::new(3);
        l.record(0, 5);
        l.record(1, 5);
        l.record(1, 6);
        l.record(2, 5);
        assert_eq!(l.totals().iter().find(|e| e.0 == 5).unwrap().1, 3);
        l.record(3, 6); // evicts t=0
        let mut totals = l.totals().to_vec();
        totals.sort();
        assert_eq!(totals, [(5, 2), (6, 2)]);
        l.expire(5); // keeps only t >= 3
        assert_eq!(l.totals(), [(6, 1)]);
        l.expire(10);
        assert!(l.totals().is_empty());
    }

    #[test]
    fn lp_counts_follow_the_map() {
        let mut map = partition_static(4, 2);
        let mut l = InteractionLedger::new(10);
        for _ in 0..4 {
            l.record(1, 3);
        }
        l.record(1, 1);
        assert_eq!(l.lp_counts(1, &map), [1, 4]);
        map.move_entity(3, 0);
        assert_eq!(l.lp_counts(1, &map), [5, 0]);
    }
}
