use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::hash::BuildHasherDefault;
use core::mem;

use hashbrown::HashMap;
use rustc_hash::FxHasher;

use super::{MsgId, TraceEvent};
use crate::graph::NodeId;

const MAX_SAMPLES: usize = 20;

type FastMap<K, V> = HashMap<K, V, BuildHasherDefault<FxHasher>>;

#[derive(Debug)]
struct Live {
    gen_t: u32,
    /// Bit per node that logged an R.
    receivers: Vec<u64>,
}

impl Live {
    fn has(&self, node: NodeId) -> bool {
        self.receivers.get(node as usize / 64).is_some_and(|w| w >> (node % 64) & 1 == 1)
    }

    /// Returns false if already set.
    fn set(&mut self, node: NodeId) -> bool {
        let word = node as usize / 64;
        if self.receivers.len() <= word {
            self.receivers.resize(word + 1, 0);
        }
        let bit = 1u64 << (node % 64);
        let fresh = self.receivers[word] & bit == 0;
        self.receivers[word] |= bit;
        fresh
    }
}

/// Streaming trace auditor.
///
/// Checks time order, that every R/D/S refers to a single earlier G, at most
/// one R per node and message, the hop budget, causality, and (when S lines
/// are present) conservation: every send due before the end of the run is
/// matched by exactly one R or D at its destination one timestep later.
/// With a known TTL, messages whose copies can no longer be in flight are
/// retired, keeping memory bounded by the messages alive at once.
#[derive(Debug)]
pub struct IntegrityChecker {
    ttl: Option<u32>,
    steps: Option<u32>,
    conservation: Option<bool>,
    last_t: u32,
    last_seq: FastMap<NodeId, u32>,
    live: FastMap<MsgId, Live>,
    retire_queue: VecDeque<(u32, MsgId)>,
    /// Sends minus receptions due at `last_t` and `last_t + 1`; zero entries are dropped.
    due_now: FastMap<(MsgId, NodeId), i64>,
    due_next: FastMap<(MsgId, NodeId), i64>,
    counts: [u64; 5],
    violations: u64,
    samples: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrityReport {
    pub events: u64,
    /// Lines per kind, in G R D S M order.
    pub counts: [u64; 5],
    pub violations: u64,
    /// The first few violations, for display.
    pub samples: Vec<String>,
    pub conservation_checked: bool,
}

impl IntegrityReport {
    pub fn is_clean(&self) -> bool {
        self.violations == 0
    }
}

fn bump(map: &mut FastMap<(MsgId, NodeId), i64>, key: (MsgId, NodeId), by: i64) {
    let entry = map.entry(key).or_insert(0);
    *entry += by;
    if *entry == 0 {
        map.remove(&key);
    }
}

impl IntegrityChecker {
    /// `conservation`: `Some(false)` to skip it, `None` to enable it exactly
    /// when S lines precede the first reception.
    pub fn new(ttl: Option<u32>, steps: Option<u32>, conservation: Option<bool>) -> Self {
        Self {
            ttl,
            steps,
            conservation,
            last_t: 0,
            last_seq: FastMap::default(),
            live: FastMap::default(),
            retire_queue: VecDeque::new(),
            due_now: FastMap::default(),
            due_next: FastMap::default(),
            counts: [0; 5],
            violations: 0,
            samples: Vec::new(),
        }
    }

    /// Builds a checker from trace header pairs (`ttl`, `steps`, `verbosity`).
    pub fn from_header<'a, I>(header: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let (mut ttl, mut steps, mut conservation) = (None, None, None);
        for (k, v) in header {
            match k {
                "ttl" => ttl = v.parse().ok(),
                "steps" => steps = v.parse().ok(),
                "verbosity" => conservation = v.parse::<u8>().ok().map(|l| l >= 2),
                _ => {}
            }
        }
        Self::new(ttl, steps, conservation)
    }

    fn violate(&mut self, message: String) {
        self.violations += 1;
        if self.samples.len() < MAX_SAMPLES {
            self.samples.push(message);
        }
    }

    fn settle(&mut self, due: FastMap<(MsgId, NodeId), i64>, at: u32) {
        let mut left: Vec<_> = due.into_iter().collect();
        left.sort_unstable();
        for ((msg, node), balance) in left {
            self.violate(format!("conservation: {msg} at node {node}, t={at}: sends minus receptions = {balance}"));
        }
    }

    fn advance(&mut self, t: u32) {
        if t < self.last_t {
            self.violate(format!("time went backwards: t={t} after t={}", self.last_t));
            return;
        }
        if t == self.last_t {
            return;
        }
        let prev = self.last_t;
        let now = mem::take(&mut self.due_now);
        self.settle(now, prev);
        self.due_now = mem::take(&mut self.due_next);
        if t > prev + 1 {
            let skipped = mem::take(&mut self.due_now);
            self.settle(skipped, prev + 1);
        }
        self.last_t = t;
        if let Some(ttl) = self.ttl {
            while let Some(&(gen_t, msg)) = self.retire_queue.front() {
                if gen_t + ttl >= t {
                    break;
                }
                self.retire_queue.pop_front();
                self.live.remove(&msg);
            }
        }
    }

    fn conserving(&mut self) -> bool {
        *self.conservation.get_or_insert(false)
    }

    pub fn feed(&mut self, event: &TraceEvent) {
        let kind = match event {
            TraceEvent::Generate { .. } => 0,
            TraceEvent::Receive { .. } => 1,
            TraceEvent::Duplicate { .. } => 2,
            TraceEvent::Send { .. } => 3,
            TraceEvent::Migrate { .. } => 4,
        };
        self.counts[kind] += 1;
        self.advance(event.t());
        match *event {
            TraceEvent::Generate { t, node, msg } => {
                if msg.origin != node {
                    self.violate(format!("G at node {node} for foreign message {msg}"));
                }
                if let Some(&last) = self.last_seq.get(&msg.origin) {
                    if msg.seq <= last {
                        self.violate(format!("message {msg} generated out of order or twice"));
                        return;
                    }
                }
                self.last_seq.insert(msg.origin, msg.seq);
                self.live.insert(msg, Live { gen_t: t, receivers: Vec::new() });
                self.retire_queue.push_back((t, msg));
            }
            TraceEvent::Receive { t, node, msg, hops } => {
                let conserving = self.conserving();
                let Some(live) = self.live.get_mut(&msg) else {
                    return self.violate(format!("R at t={t} for message {msg} without a live G"));
                };
                let gen_t = live.gen_t;
                let fresh = node != msg.origin && live.set(node);
                if !fresh {
                    self.violate(format!("second R of {msg} at node {node}"));
                }
                if hops == 0 || t < gen_t + hops {
                    self.violate(format!("R of {msg} at t={t} with {hops} hops breaks causality (G at {gen_t})"));
                }
                if let Some(ttl) = self.ttl {
                    if hops > ttl {
                        self.violate(format!("R of {msg} after {hops} hops exceeds ttl {ttl}"));
                    }
                }
                if conserving {
                    bump(&mut self.due_now, (msg, node), -1);
                }
            }
            TraceEvent::Duplicate { t, node, msg } => {
                let conserving = self.conserving();
                let Some(live) = self.live.get(&msg) else {
                    return self.violate(format!("D at t={t} for message {msg} without a live G"));
                };
                if node != msg.origin && !live.has(node) {
                    self.violate(format!("D of {msg} at node {node} before its R"));
                }
                if conserving {
                    bump(&mut self.due_now, (msg, node), -1);
                }
            }
            TraceEvent::Send { t, node, msg, dest } => {
                self.conservation.get_or_insert(true);
                let Some(live) = self.live.get(&msg) else {
                    return self.violate(format!("S at t={t} for message {msg} without a live G"));
                };
                if node != msg.origin && !live.has(node) {
                    self.violate(format!("S of {msg} from node {node} that never received it"));
                }
                let delivered_in_run = self.steps.is_none_or(|s| t + 1 < s);
                if self.conservation == Some(true) && delivered_in_run {
                    bump(&mut self.due_next, (msg, dest), 1);
                }
            }
            TraceEvent::Migrate { entity, from, to, .. } => {
                if from == to {
                    self.violate(format!("migration of {entity} from LP {from} to itself"));
                }
            }
        }
    }

    pub fn finish(mut self) -> IntegrityReport {
        let now = mem::take(&mut self.due_now);
        self.settle(now, self.last_t);
        // sends issued at the last observed step fall past the run when steps is unknown
        if self.steps.is_some() {
            let next = mem::take(&mut self.due_next);
            self.settle(next, self.last_t + 1);
        }
        IntegrityReport {
            events: self.counts.iter().sum(),
            counts: self.counts,
            violations: self.violations,
            samples: self.samples,
            conservation_checked: self.conservation == Some(true),
        }
    }
}
