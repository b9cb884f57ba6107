use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::mem;

use super::{
    migration_round, partition_static, EngineError, EngineStats, Envelope, InteractionLedger, LpId, LpMap, Payload,
    StepSample,
};
use crate::graph::{Graph, NodeId};
use crate::rng::{EntityStream, Purpose};
use crate::trace::{TraceEvent, TraceSink};

/// Engine knobs independent of the protocol being simulated.
#[derive(Clone, Debug, PartialEq)]
pub struct EngineParams {
    pub steps: u32,
    pub lp_count: usize,
    pub gaia: bool,
    /// Load slack for the population cap.
    pub delta: f64,
    /// Audit window in timesteps.
    pub window: u32,
    /// Migration attraction threshold.
    pub theta: f64,
    /// Migration evaluation period in timesteps.
    pub k_mig: u32,
    pub seed: u64,
    /// S lines are emitted from level 2 on.
    pub verbosity: u8,
}

impl Default for EngineParams {
    fn default() -> Self {
        Self {
            steps: 1000,
            lp_count: 1,
            gaia: false,
            delta: 0.2,
            window: 20,
            theta: 1.5,
            k_mig: 10,
            seed: 0,
            verbosity: 1,
        }
    }
}

impl EngineParams {
    pub fn validate(&self) -> Result<(), EngineError> {
        let bad = |m: String| Err(EngineError::Config(m));
        if self.steps < 1 {
            return bad("steps must be at least 1".into());
        }
        if self.lp_count < 1 {
            return bad("lp must be at least 1".into());
        }
        if !(self.theta > 1.0) {
            return bad(format!("theta must be > 1, got {}", self.theta));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return bad(format!("delta must be >= 0, got {}", self.delta));
        }
        if self.window < 1 {
            return bad("audit window must be at least 1".into());
        }
        if self.k_mig < 1 {
            return bad("migration period must be at least 1".into());
        }
        Ok(())
    }
}

/// Behavior attached to every entity.
///
/// Handlers see only their own state and talk to other entities through
/// [`EntityCtx::send`]. They must draw randomness from [`EntityCtx::stream`]
/// so results do not depend on placement.
pub trait Protocol: Sync {
    type State: Send;

    fn init_state(&self, node: NodeId, graph: &Graph) -> Self::State;

    fn on_envelope(&self, state: &mut Self::State, env: &Envelope, ctx: &mut EntityCtx<'_>) -> Result<(), EngineError>;

    /// Called once per timestep after all deliveries.
    fn on_step(&self, state: &mut Self::State, ctx: &mut EntityCtx<'_>) -> Result<(), EngineError>;

    /// Size of the state moved on migration.
    fn state_bytes(&self, _state: &Self::State) -> usize {
        mem::size_of::<Self::State>()
    }
}

#[derive(Debug, Default, Clone, Copy)]
struct Counters {
    total: u64,
    inter: u64,
    control: u64,
}

/// Handle given to protocol handlers for one entity during one timestep.
pub struct EntityCtx<'a> {
    t: u32,
    id: NodeId,
    n: usize,
    home: LpId,
    seed: u64,
    verbosity: u8,
    neighbors: &'a [NodeId],
    map: &'a LpMap,
    ledger: Option<&'a mut InteractionLedger>,
    outbox: &'a mut Vec<Envelope>,
    events: &'a mut Vec<(u64, TraceEvent)>,
    key: u64,
    counters: &'a mut Counters,
}

impl EntityCtx<'_> {
    pub fn now(&self) -> u32 {
        self.t
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Neighbors in ascending id order.
    pub fn neighbors(&self) -> &[NodeId] {
        self.neighbors
    }

    /// This entity's counter-based stream for `purpose`.
    pub fn stream(&self, purpose: Purpose) -> EntityStream {
        EntityStream::new(self.seed, self.id, purpose)
    }

    /// Appends a protocol-level event to the trace.
    pub fn record(&mut self, event: TraceEvent) {
        self.events.push((self.key, event));
    }

    /// Sends `payload` to `dest` for delivery at the next timestep.
    pub fn send(&mut self, dest: NodeId, payload: Payload) -> Result<(), EngineError> {
        if dest as usize >= self.n {
            return Err(EngineError::Model {
                t: self.t,
                entity: self.id,
                message: format!("send to node {dest} outside 0..{}", self.n),
            });
        }
        self.counters.total += 1;
        if self.map.lp_of(dest) != self.home {
            self.counters.inter += 1;
        }
        match payload {
            Payload::Data { msg, .. } => {
                if self.verbosity >= 2 {
                    self.events.push((self.key, TraceEvent::Send { t: self.t, node: self.id, msg, dest }));
                }
            }
            Payload::Stimulus { .. } => self.counters.control += 1,
        }
        if let Some(ledger) = self.ledger.as_deref_mut() {
            ledger.record(self.t, dest);
        }
        self.outbox.push(Envelope { sender: self.id, dest, send_time: self.t, deliver_time: self.t + 1, payload });
        Ok(())
    }
}

struct Slot<S> {
    id: NodeId,
    state: S,
    ledger: InteractionLedger,
}

/// One logical process: the entities it owns plus per-step buffers.
pub struct Shard<S> {
    lp: LpId,
    slots: Vec<Slot<S>>,
    inbox: Vec<(u64, Envelope)>,
    outbox: Vec<Envelope>,
    events: Vec<(u64, TraceEvent)>,
    counters: Counters,
    error: Option<EngineError>,
}

impl<S> Shard<S> {
    pub fn lp(&self) -> LpId {
        self.lp
    }

    pub fn population(&self) -> usize {
        self.slots.len()
    }

    fn take(&mut self, entity: NodeId) -> Slot<S> {
        let pos = self.slots.binary_search_by_key(&entity, |s| s.id).expect("entity owned by shard");
        self.slots.remove(pos)
    }

    fn put(&mut self, slot: Slot<S>) {
        let pos = self.slots.binary_search_by_key(&slot.id, |s| s.id).unwrap_err();
        self.slots.insert(pos, slot);
    }
}

/// Runs the per-LP work of one timestep.
pub trait Executor {
    fn execute<S, F>(&self, shards: &mut [Shard<S>], task: F)
    where
        S: Send,
        F: Fn(&mut Shard<S>) + Sync;
}

/// Runs every shard on the calling thread, in LP order.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn execute<S, F>(&self, shards: &mut [Shard<S>], task: F)
    where
        S: Send,
        F: Fn(&mut Shard<S>) + Sync,
    {
        shards.iter_mut().for_each(task);
    }
}

#[derive(Debug)]
pub struct RunOutcome<S> {
    pub stats: EngineStats,
    /// Final entity states, indexed by entity id.
    pub states: Vec<S>,
    pub map: LpMap,
}

const STEP_PHASE: u64 = 1 << 40;

struct StepEnv<'a, P> {
    protocol: &'a P,
    graph: &'a Graph,
    map: &'a LpMap,
    t: u32,
    seed: u64,
    verbosity: u8,
    audit: bool,
}

#[allow(clippy::too_many_arguments)]
fn entity_ctx<'a, P, S>(
    env: &'a StepEnv<'a, P>,
    home: LpId,
    slot: &'a mut Slot<S>,
    outbox: &'a mut Vec<Envelope>,
    events: &'a mut Vec<(u64, TraceEvent)>,
    counters: &'a mut Counters,
    key: u64,
) -> (&'a mut S, EntityCtx<'a>) {
    let ctx = EntityCtx {
        t: env.t,
        id: slot.id,
        n: env.graph.node_count(),
        home,
        seed: env.seed,
        verbosity: env.verbosity,
        neighbors: env.graph.neighbors(slot.id),
        map: env.map,
        ledger: if env.audit { Some(&mut slot.ledger) } else { None },
        outbox,
        events,
        key,
        counters,
    };
    (&mut slot.state, ctx)
}

fn step_shard<P: Protocol>(shard: &mut Shard<P::State>, env: &StepEnv<'_, P>) {
    let Shard { lp, slots, inbox, outbox, events, counters, error } = shard;
    for (key, envelope) in inbox.iter() {
        let Ok(pos) = slots.binary_search_by_key(&envelope.dest, |s| s.id) else {
            unreachable!("envelope routed to a shard that does not own its destination");
        };
        let (state, mut ctx) = entity_ctx(env, *lp, &mut slots[pos], outbox, events, counters, *key);
        if let Err(e) = env.protocol.on_envelope(state, envelope, &mut ctx) {
            *error = Some(e);
            return;
        }
    }
    inbox.clear();
    for slot in slots.iter_mut() {
        let key = STEP_PHASE | slot.id as u64;
        let (state, mut ctx) = entity_ctx(env, *lp, slot, outbox, events, counters, key);
        if let Err(e) = env.protocol.on_step(state, &mut ctx) {
            *error = Some(e);
            return;
        }
    }
}

/// Moves `pending` into `out` grouped by destination (ascending id), each
/// group in canonical order. Entities only observe their own deliveries, so
/// this order is indistinguishable from one global canonical sort.
fn order_for_delivery(pending: &mut Vec<Envelope>, out: &mut Vec<Envelope>, starts: &mut Vec<usize>, n: usize) {
    starts.clear();
    starts.resize(n + 1, 0);
    for e in pending.iter() {
        starts[e.dest as usize + 1] += 1;
    }
    for i in 0..n {
        starts[i + 1] += starts[i];
    }
    out.clear();
    out.resize(pending.len(), Envelope::PLACEHOLDER);
    let mut next = starts[..n].to_vec();
    for e in pending.drain(..) {
        let slot = &mut next[e.dest as usize];
        out[*slot] = e;
        *slot += 1;
    }
    for w in starts.windows(2) {
        let bucket = &mut out[w[0]..w[1]];
        bucket.sort_unstable_by_key(Envelope::dest_local_key);
        // equal keys only arise from protocols that repeat a send; fix their order too
        let mut i = 0;
        while i < bucket.len() {
            let key = bucket[i].dest_local_key();
            let run = bucket[i..].iter().take_while(|e| e.dest_local_key() == key).count();
            if run > 1 {
                bucket[i..i + run].sort_unstable_by(Envelope::canonical_cmp);
            }
            i += run;
        }
    }
}

/// Executes `params.steps` timesteps of `protocol` on `graph`.
///
/// Per timestep `t`: envelopes due at `t` are delivered in canonical order,
/// each entity's step handler runs in ascending id, sends are collected for
/// `t + 1`, and with clustering on a migration round runs when
/// `t % k_mig == 0`. Trace events reach `sink` in an order that does not
/// depend on the LP count, the executor or migrations.
pub fn run<P, E, T>(
    params: &EngineParams,
    graph: &Graph,
    protocol: &P,
    executor: &E,
    sink: &mut T,
) -> Result<RunOutcome<P::State>, EngineError>
where
    P: Protocol,
    E: Executor,
    T: TraceSink + ?Sized,
{
    params.validate()?;
    let n = graph.node_count();
    if n == 0 {
        return Err(EngineError::Config("graph has no nodes".into()));
    }
    let lp_count = params.lp_count;
    let mut map = partition_static(n, lp_count);
    let mut shards: Vec<Shard<P::State>> = (0..lp_count)
        .map(|lp| Shard {
            lp: lp as LpId,
            slots: Vec::new(),
            inbox: Vec::new(),
            outbox: Vec::new(),
            events: Vec::new(),
            counters: Counters::default(),
            error: None,
        })
        .collect();
    for id in 0..n as NodeId {
        let slot = Slot { id, state: protocol.init_state(id, graph), ledger: InteractionLedger::new(params.window) };
        shards[map.lp_of(id) as usize].slots.push(slot);
    }

    let mut stats = EngineStats { lp_count, gaia: params.gaia, ..Default::default() };
    stats.samples.reserve(params.steps as usize);
    let mut pending: Vec<Envelope> = Vec::new();
    let mut events: Vec<(u64, TraceEvent)> = Vec::new();
    let mut scratch: Vec<Envelope> = Vec::new();
    let mut bucket_starts: Vec<usize> = Vec::new();

    for t in 0..params.steps {
        order_for_delivery(&mut pending, &mut scratch, &mut bucket_starts, n);
        for (idx, envelope) in scratch.drain(..).enumerate() {
            debug_assert_eq!(envelope.deliver_time, t);
            shards[map.lp_of(envelope.dest) as usize].inbox.push((idx as u64, envelope));
        }

        let env = StepEnv {
            protocol,
            graph,
            map: &map,
            t,
            seed: params.seed,
            verbosity: params.verbosity,
            audit: params.gaia,
        };
        executor.execute(&mut shards, |shard| step_shard(shard, &env));

        let mut sample = StepSample::default();
        for shard in &mut shards {
            if let Some(e) = shard.error.take() {
                return Err(e);
            }
            pending.append(&mut shard.outbox);
            events.append(&mut shard.events);
            let c = mem::take(&mut shard.counters);
            sample.total += c.total;
            sample.inter += c.inter;
            stats.control_messages += c.control;
        }
        // stable: events of one handler keep their emission order
        events.sort_by_key(|e| e.0);
        for (_, event) in events.drain(..) {
            sink.record(&event);
        }
        stats.total_messages += sample.total;
        stats.inter_lp_messages += sample.inter;
        stats.intra_lp_messages += sample.total - sample.inter;
        stats.samples.push(sample);

        if params.gaia && t % params.k_mig == 0 && lp_count > 1 {
            let mut lp_counts: Vec<Vec<u64>> = alloc::vec![Vec::new(); n];
            for shard in &mut shards {
                for slot in &mut shard.slots {
                    lp_counts[slot.id as usize] = slot.ledger.lp_counts(t, &map);
                }
            }
            let moves = migration_round(&lp_counts, &mut map, params.delta, params.theta);
            for m in &moves {
                let slot = shards[m.from as usize].take(m.entity);
                stats.migration_cost_units += (protocol.state_bytes(&slot.state) + slot.ledger.state_bytes()) as u64;
                shards[m.to as usize].put(slot);
                sink.record(&TraceEvent::Migrate { t, entity: m.entity, from: m.from, to: m.to });
            }
            stats.migrations += moves.len() as u64;
            map.check_cap(params.delta, t)?;
            debug_assert!(shards.iter().all(|s| s.population() == map.populations()[s.lp as usize]));
        }
        stats.populations.push(map.populations().to_vec());
    }

    let mut slots: Vec<Slot<P::State>> = shards.into_iter().flat_map(|s| s.slots).collect();
    slots.sort_by_key(|s| s.id);
    let states = slots.into_iter().map(|s| s.state).collect();
    Ok(RunOutcome { stats, states, map })
}
