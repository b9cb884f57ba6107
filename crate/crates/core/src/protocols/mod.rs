//! Dissemination protocols: pure broadcast, fixed-probability gossip and
//! adaptive gossip with stimuli.
//!
//! Every random decision is keyed by what it decides. The generation coin of
//! node `x` at step `t` and the forwarding coin of `x` toward its `i`-th
//! neighbor for message `(o, s)` are fixed values for a given seed, whatever
//! else happens in the run. Forwarding compares that value against the
//! current probability, so raising the probability can only add forwards.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::hash::BuildHasherDefault;
use core::str::FromStr;

use hashbrown::HashMap;
use rustc_hash::FxHasher;

use crate::engine::{EngineError, EntityCtx, Envelope, Payload, Protocol};
use crate::graph::{Graph, NodeId};
use crate::rng::Purpose;
use crate::trace::{MsgId, TraceEvent};

/// Deterministic hashing; no iteration order is ever observed.
type FastMap<K, V> = HashMap<K, V, BuildHasherDefault<FxHasher>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolKind {
    Broadcast,
    Fixed,
    Adaptive,
}

impl ProtocolKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProtocolKind::Broadcast => "broadcast",
            ProtocolKind::Fixed => "fixed",
            ProtocolKind::Adaptive => "adaptive",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "broadcast" => Ok(ProtocolKind::Broadcast),
            "fixed" => Ok(ProtocolKind::Fixed),
            "adaptive" => Ok(ProtocolKind::Adaptive),
            other => {
                Err(EngineError::Config(format!("unknown protocol `{other}` (expected broadcast, fixed or adaptive)")))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GossipParams {
    pub kind: ProtocolKind,
    /// Baseline forwarding probability `v`.
    pub prob: f64,
    /// Per-node, per-timestep generation probability.
    pub gen_prob: f64,
    pub ttl: u32,
    /// Trigger fraction of the expected reception count.
    pub alpha: f64,
    /// Forwarding probability while a stimulus is active.
    pub stim_prob: f64,
    /// Stimulus lifetime in timesteps.
    pub stim_duration: u32,
    /// Reception monitoring window in timesteps.
    pub recv_window: u32,
    /// Start with every (origin, neighbor) pair boosted until `stim_duration`.
    pub preboost: bool,
}

impl Default for GossipParams {
    fn default() -> Self {
        Self {
            kind: ProtocolKind::Fixed,
            prob: 0.8,
            gen_prob: 0.05,
            ttl: 8,
            alpha: 0.5,
            stim_prob: 1.0,
            stim_duration: 50,
            recv_window: 100,
            preboost: false,
        }
    }
}

impl GossipParams {
    pub fn validate(&self) -> Result<(), EngineError> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(EngineError::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("prob", self.prob)?;
        unit("gen_prob", self.gen_prob)?;
        unit("stim_prob", self.stim_prob)?;
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(EngineError::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.recv_window < 1 {
            return Err(EngineError::Config("recv_window must be at least 1".into()));
        }
        Ok(())
    }
}

/// Bookkeeping used only by adaptive gossip.
#[derive(Clone, Debug)]
pub struct AdaptiveState {
    /// First receptions per origin in the current monitoring window.
    recv_window: Vec<u32>,
    /// `provider_counts[origin * degree + i]`: first receptions of `origin`'s
    /// messages that arrived from neighbor `i`.
    provider_counts: Vec<u32>,
    degree: usize,
    /// `(origin, neighbor)` -> expiry timestep.
    boosted: FastMap<(NodeId, NodeId), u32>,
    preboost_until: u32,
}

impl AdaptiveState {
    fn new(n: usize, degree: usize, preboost_until: u32) -> Self {
        Self {
            recv_window: vec![0; n],
            provider_counts: vec![0; n * degree],
            degree,
            boosted: FastMap::default(),
            preboost_until,
        }
    }

    /// Neighbor index that delivered most of `origin`'s messages first.
    fn best_provider(&self, origin: NodeId) -> Option<usize> {
        let row = &self.provider_counts[origin as usize * self.degree..(origin as usize + 1) * self.degree];
        let (idx, &count) = row.iter().enumerate().rev().max_by_key(|(_, &c)| c)?;
        (count > 0).then_some(idx)
    }

    pub fn boost_expiry(&self, origin: NodeId, neighbor: NodeId) -> Option<u32> {
        self.boosted.get(&(origin, neighbor)).copied()
    }

    pub fn received_in_window(&self, origin: NodeId) -> u32 {
        self.recv_window[origin as usize]
    }
}

/// Per-node protocol state.
#[derive(Clone, Debug)]
pub struct NodeState {
    pub id: NodeId,
    /// Messages seen, with their generation timestep.
    seen: FastMap<MsgId, u32>,
    next_seq: u32,
    pub adaptive: Option<AdaptiveState>,
}

impl NodeState {
    pub fn has_seen(&self, msg: MsgId) -> bool {
        self.seen.contains_key(&msg)
    }

    pub fn next_seq(&self) -> u32 {
        self.next_seq
    }
}

/// The gossip family as an engine protocol.
#[derive(Clone, Debug)]
pub struct Gossip {
    params: GossipParams,
}

impl Gossip {
    pub fn new(params: GossipParams) -> Result<Self, EngineError> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &GossipParams {
        &self.params
    }

    /// Generation coin for this timestep: on success creates message
    /// `(self, next_seq)`, records G and gossips it at once.
    pub fn on_timestep_generate(
        &self,
        state: &mut NodeState,
        ctx: &mut EntityCtx<'_>,
    ) -> Result<Option<MsgId>, EngineError> {
        let t = ctx.now();
        if !(ctx.stream(Purpose::Generate { t }).at(0) < self.params.gen_prob) {
            return Ok(None);
        }
        let msg = MsgId::new(state.id, state.next_seq);
        state.next_seq += 1;
        state.seen.insert(msg, t);
        ctx.record(TraceEvent::Generate { t, node: state.id, msg });
        self.gossip(state, ctx, msg, self.params.ttl, 0, None)?;
        Ok(Some(msg))
    }

    /// First copy: record R and forward. Later copies: record D only.
    pub fn on_receive_data(
        &self,
        state: &mut NodeState,
        ctx: &mut EntityCtx<'_>,
        msg: MsgId,
        ttl_remaining: u32,
        hop_count: u32,
        sender: NodeId,
    ) -> Result<(), EngineError> {
        let t = ctx.now();
        if state.seen.contains_key(&msg) {
            ctx.record(TraceEvent::Duplicate { t, node: state.id, msg });
            return Ok(());
        }
        ctx.record(TraceEvent::Receive { t, node: state.id, msg, hops: hop_count });
        state.seen.insert(msg, t.saturating_sub(hop_count));
        if let Some(ad) = state.adaptive.as_mut() {
            ad.recv_window[msg.origin as usize] += 1;
            if let Ok(i) = ctx.neighbors().binary_search(&sender) {
                ad.provider_counts[msg.origin as usize * ad.degree + i] += 1;
            }
        }
        self.gossip(state, ctx, msg, ttl_remaining, hop_count, Some(sender))?;
        Ok(())
    }

    /// Forwarding probability of `origin`'s messages toward `neighbor` at `t`.
    /// Expired boosts are purged on the way.
    pub fn effective_probability(&self, state: &mut NodeState, origin: NodeId, neighbor: NodeId, t: u32) -> f64 {
        match self.params.kind {
            ProtocolKind::Broadcast => 1.0,
            ProtocolKind::Fixed => self.params.prob,
            ProtocolKind::Adaptive => {
                let Some(ad) = state.adaptive.as_mut() else { return self.params.prob };
                if t < ad.preboost_until {
                    return self.params.stim_prob;
                }
                match ad.boosted.get(&(origin, neighbor)) {
                    Some(&expiry) if expiry > t => self.params.stim_prob,
                    Some(_) => {
                        ad.boosted.remove(&(origin, neighbor));
                        self.params.prob
                    }
                    None => self.params.prob,
                }
            }
        }
    }

    /// Sends copies of `msg` to every neighbor except `arrived_from`, each with
    /// its own coin (drawn at the neighbor's index). Nothing is sent once the
    /// hop budget is spent. Returns the number of copies sent.
    pub fn gossip(
        &self,
        state: &mut NodeState,
        ctx: &mut EntityCtx<'_>,
        msg: MsgId,
        ttl_remaining: u32,
        hop_count: u32,
        arrived_from: Option<NodeId>,
    ) -> Result<usize, EngineError> {
        if ttl_remaining == 0 {
            return Ok(0);
        }
        let t = ctx.now();
        let coins = ctx.stream(Purpose::Forward { origin: msg.origin, seq: msg.seq });
        let payload = Payload::Data { msg, ttl_remaining: ttl_remaining - 1, hop_count: hop_count + 1 };
        let mut sent = 0;
        for i in 0..ctx.neighbors().len() {
            let w = ctx.neighbors()[i];
            if Some(w) == arrived_from {
                continue;
            }
            let p = self.effective_probability(state, msg.origin, w, t);
            let forward = match self.params.kind {
                ProtocolKind::Broadcast => true,
                _ => coins.at(i as u64) < p,
            };
            if forward {
                ctx.send(w, payload)?;
                sent += 1;
            }
        }
        Ok(sent)
    }

    /// End-of-window reception check. For each origin received less than
    /// `alpha * gen_prob * recv_window` times, asks the usual provider (or a
    /// random neighbor when there is none) for a boost. Returns stimuli sent.
    pub fn adaptive_monitor(&self, state: &mut NodeState, ctx: &mut EntityCtx<'_>) -> Result<usize, EngineError> {
        let Some(ad) = state.adaptive.as_mut() else { return Ok(0) };
        let degree = ctx.neighbors().len();
        let t = ctx.now();
        let expected = self.params.alpha * self.params.gen_prob * self.params.recv_window as f64;
        let mut sent = 0;
        if degree > 0 {
            for q in 0..ctx.node_count() as NodeId {
                if q == state.id || !((ad.recv_window[q as usize] as f64) < expected) {
                    continue;
                }
                let idx = match ad.best_provider(q) {
                    Some(i) => i,
                    None => ctx.stream(Purpose::StimulusTarget { origin: q, t }).next_below(degree as u64) as usize,
                };
                let target = ctx.neighbors()[idx];
                ctx.send(target, Payload::Stimulus { target_origin: q })?;
                sent += 1;
            }
        }
        ad.recv_window.iter_mut().for_each(|c| *c = 0);
        ad.boosted.retain(|_, expiry| *expiry > t);
        Ok(sent)
    }

    /// Boosts `(target_origin -> from)` until `t + stim_duration`; a repeated
    /// stimulus refreshes the expiry rather than stacking.
    pub fn on_receive_stimulus(&self, state: &mut NodeState, target_origin: NodeId, from: NodeId, t: u32) {
        if let Some(ad) = state.adaptive.as_mut() {
            ad.boosted.insert((target_origin, from), t + self.params.stim_duration);
        }
    }
}

impl Protocol for Gossip {
    type State = NodeState;

    fn init_state(&self, node: NodeId, graph: &Graph) -> NodeState {
        let adaptive = (self.params.kind == ProtocolKind::Adaptive).then(|| {
            let until = if self.params.preboost { self.params.stim_duration } else { 0 };
            AdaptiveState::new(graph.node_count(), graph.degree(node), until)
        });
        NodeState { id: node, seen: FastMap::default(), next_seq: 0, adaptive }
    }

    fn on_envelope(&self, state: &mut NodeState, env: &Envelope, ctx: &mut EntityCtx<'_>) -> Result<(), EngineError> {
        match env.payload {
            Payload::Data { msg, ttl_remaining, hop_count } => {
                self.on_receive_data(state, ctx, msg, ttl_remaining, hop_count, env.sender)
            }
            Payload::Stimulus { target_origin } => {
                self.on_receive_stimulus(state, target_origin, env.sender, ctx.now());
                Ok(())
            }
        }
    }

    fn on_step(&self, state: &mut NodeState, ctx: &mut EntityCtx<'_>) -> Result<(), EngineError> {
        let t = ctx.now();
        if self.params.kind == ProtocolKind::Adaptive && (t + 1).is_multiple_of(self.params.recv_window) {
            self.adaptive_monitor(state, ctx)?;
        }
        // no copy of a message outlives its hop budget, so older entries are dead
        let ttl = self.params.ttl;
        if t.is_multiple_of(ttl + 1) {
            state.seen.retain(|_, gen| *gen + ttl >= t);
        }
        self.on_timestep_generate(state, ctx)?;
        Ok(())
    }

    fn state_bytes(&self, state: &NodeState) -> usize {
        let mut bytes = core::mem::size_of::<NodeState>() + state.seen.len() * 12;
        if let Some(ad) = &state.adaptive {
            bytes += (ad.recv_window.len() + ad.provider_counts.len()) * 4 + ad.boosted.len() * 12;
        }
        bytes
    }
}
