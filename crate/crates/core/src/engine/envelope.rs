use crate::graph::NodeId;
use crate::trace::MsgId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MsgKind {
    Data,
    Stimulus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Payload {
    Data {
        msg: MsgId,
        ttl_remaining: u32,
        hop_count: u32,
    },
    /// Request to raise the forwarding probability of messages from
    /// `target_origin` toward the sender.
    Stimulus {
        target_origin: NodeId,
    },
}

/// Timestamped message between two entities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Envelope {
    pub sender: NodeId,
    pub dest: NodeId,
    pub send_time: u32,
    /// Always `send_time + 1`.
    pub deliver_time: u32,
    pub payload: Payload,
}

impl Envelope {
    pub(crate) const PLACEHOLDER: Envelope =
        Envelope { sender: 0, dest: 0, send_time: 0, deliver_time: 0, payload: Payload::Stimulus { target_origin: 0 } };

    pub fn kind(&self) -> MsgKind {
        match self.payload {
            Payload::Data { .. } => MsgKind::Data,
            Payload::Stimulus { .. } => MsgKind::Stimulus,
        }
    }

    /// Delivery order within a timestep: data before stimuli, then
    /// `(origin, seq, sender, dest)`. Stimuli use their target origin and seq 0.
    #[inline]
    pub fn canonical_key(&self) -> (MsgKind, NodeId, u32, NodeId, NodeId) {
        match self.payload {
            Payload::Data { msg, .. } => (MsgKind::Data, msg.origin, msg.seq, self.sender, self.dest),
            Payload::Stimulus { target_origin } => (MsgKind::Stimulus, target_origin, 0, self.sender, self.dest),
        }
    }

    /// [`Self::canonical_key`] without `dest`, packed so that integer order
    /// equals tuple order. Used to order envelopes bound for one entity.
    #[inline]
    pub(crate) fn dest_local_key(&self) -> u128 {
        let (kind, origin, seq, sender, _) = self.canonical_key();
        (kind as u128) << 96 | (origin as u128) << 64 | (seq as u128) << 32 | sender as u128
    }

    /// Total order extending the canonical key, so envelopes that tie on it
    /// still sort the same way whatever order they were collected in.
    pub fn canonical_cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.canonical_key().cmp(&other.canonical_key()).then_with(|| self.cmp(other))
    }
}
