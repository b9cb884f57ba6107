use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;

use thiserror::Error;

use crate::engine::LpId;
use crate::graph::NodeId;

/// Network-wide identity of a data message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MsgId {
    pub origin: NodeId,
    pub seq: u32,
}

impl MsgId {
    pub const fn new(origin: NodeId, seq: u32) -> Self {
        Self { origin, seq }
    }
}

impl fmt::Display for MsgId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.origin, self.seq)
    }
}

/// One body line of a trace file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraceEvent {
    /// `G <t> <node> <origin>:<seq>`
    Generate { t: u32, node: NodeId, msg: MsgId },
    /// `R <t> <node> <origin>:<seq> <hops>`
    Receive { t: u32, node: NodeId, msg: MsgId, hops: u32 },
    /// `D <t> <node> <origin>:<seq>`
    Duplicate { t: u32, node: NodeId, msg: MsgId },
    /// `S <t> <node> <origin>:<seq> <dest>`
    Send { t: u32, node: NodeId, msg: MsgId, dest: NodeId },
    /// `M <t> <entity> <from_lp> <to_lp>`
    Migrate { t: u32, entity: NodeId, from: LpId, to: LpId },
}

impl TraceEvent {
    pub fn t(&self) -> u32 {
        match *self {
            TraceEvent::Generate { t, .. }
            | TraceEvent::Receive { t, .. }
            | TraceEvent::Duplicate { t, .. }
            | TraceEvent::Send { t, .. }
            | TraceEvent::Migrate { t, .. } => t,
        }
    }

    pub fn kind(&self) -> char {
        match self {
            TraceEvent::Generate { .. } => 'G',
            TraceEvent::Receive { .. } => 'R',
            TraceEvent::Duplicate { .. } => 'D',
            TraceEvent::Send { .. } => 'S',
            TraceEvent::Migrate { .. } => 'M',
        }
    }

    /// G, R and D lines: the events that must not depend on partitioning.
    pub fn is_protocol_level(&self) -> bool {
        matches!(self, TraceEvent::Generate { .. } | TraceEvent::Receive { .. } | TraceEvent::Duplicate { .. })
    }

    pub fn msg(&self) -> Option<MsgId> {
        match *self {
            TraceEvent::Generate { msg, .. }
            | TraceEvent::Receive { msg, .. }
            | TraceEvent::Duplicate { msg, .. }
            | TraceEvent::Send { msg, .. } => Some(msg),
            TraceEvent::Migrate { .. } => None,
        }
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Generate { t, node, msg } => write!(f, "G {t} {node} {msg}"),
            TraceEvent::Receive { t, node, msg, hops } => write!(f, "R {t} {node} {msg} {hops}"),
            TraceEvent::Duplicate { t, node, msg } => write!(f, "D {t} {node} {msg}"),
            TraceEvent::Send { t, node, msg, dest } => write!(f, "S {t} {node} {msg} {dest}"),
            TraceEvent::Migrate { t, entity, from, to } => write!(f, "M {t} {entity} {from} {to}"),
        }
    }
}

/// Consumer of events as the engine produces them.
pub trait TraceSink {
    fn record(&mut self, event: &TraceEvent);
}

impl TraceSink for alloc::vec::Vec<TraceEvent> {
    fn record(&mut self, event: &TraceEvent) {
        self.push(*event);
    }
}

/// Discards everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullSink;

impl TraceSink for NullSink {
    fn record(&mut self, _: &TraceEvent) {}
}

impl<A: TraceSink, B: TraceSink> TraceSink for (A, B) {
    fn record(&mut self, event: &TraceEvent) {
        self.0.record(event);
        self.1.record(event);
    }
}

impl<T: TraceSink + ?Sized> TraceSink for &mut T {
    fn record(&mut self, event: &TraceEvent) {
        (**self).record(event);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("trace line {line}: {message}")]
pub struct TraceParseError {
    pub line: usize,
    pub message: String,
}

/// A parsed trace line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceLine {
    Header { key: String, value: String },
    Event(TraceEvent),
}

fn num(field: Option<&str>, what: &str) -> Result<u32, String> {
    let s = field.ok_or_else(|| format!("missing {what}"))?;
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("invalid {what} `{s}`"));
    }
    s.parse().map_err(|_| format!("{what} `{s}` out of range"))
}

fn msg_id(field: Option<&str>) -> Result<MsgId, String> {
    let s = field.ok_or("missing message id")?;
    let (o, q) = s.split_once(':').ok_or_else(|| format!("invalid message id `{s}`"))?;
    Ok(MsgId { origin: num(Some(o), "origin")?, seq: num(Some(q), "sequence number")? })
}

/// Parses one body line.
pub fn parse_event(line: &str) -> Result<TraceEvent, String> {
    let mut f = line.split(' ');
    let kind = f.next().unwrap_or("");
    let t = |f: &mut core::str::Split<'_, char>| num(f.next(), "timestep");
    let ev = match kind {
        "G" => TraceEvent::Generate { t: t(&mut f)?, node: num(f.next(), "node")?, msg: msg_id(f.next())? },
        "R" => TraceEvent::Receive {
            t: t(&mut f)?,
            node: num(f.next(), "node")?,
            msg: msg_id(f.next())?,
            hops: num(f.next(), "hop count")?,
        },
        "D" => TraceEvent::Duplicate { t: t(&mut f)?, node: num(f.next(), "node")?, msg: msg_id(f.next())? },
        "S" => TraceEvent::Send {
            t: t(&mut f)?,
            node: num(f.next(), "node")?,
            msg: msg_id(f.next())?,
            dest: num(f.next(), "destination")?,
        },
        "M" => TraceEvent::Migrate {
            t: t(&mut f)?,
            entity: num(f.next(), "entity")?,
            from: num(f.next(), "source LP")?,
            to: num(f.next(), "target LP")?,
        },
        other => return Err(format!("unknown event kind `{other}`")),
    };
    if let Some(extra) = f.next() {
        return Err(format!("unexpected trailing field `{extra}`"));
    }
    Ok(ev)
}

/// Line-at-a-time trace parser. Header lines (`# key=value`) are only
/// accepted before the first event; blank lines are skipped.
#[derive(Debug, Default)]
pub struct TraceParser {
    line_no: usize,
    in_body: bool,
}

impl TraceParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn line_number(&self) -> usize {
        self.line_no
    }

    pub fn feed(&mut self, line: &str) -> Result<Option<TraceLine>, TraceParseError> {
        self.line_no += 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        let err = |message: String| TraceParseError { line: self.line_no, message };
        if line.is_empty() {
            return Ok(None);
        }
        if let Some(rest) = line.strip_prefix('#') {
            if self.in_body {
                return Err(err("header line after first event".into()));
            }
            let (key, value) = rest.trim().split_once('=').ok_or_else(|| err(format!("malformed header `{line}`")))?;
            return Ok(Some(TraceLine::Header { key: key.trim().to_string(), value: value.trim().to_string() }));
        }
        self.in_body = true;
        parse_event(line).map(|e| Some(TraceLine::Event(e))).map_err(err)
    }
}

/// Adapts an iterator of lines into parsed trace lines.
pub fn parse_trace<I, S>(lines: I) -> impl Iterator<Item = Result<TraceLine, TraceParseError>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut parser = TraceParser::new();
    lines.into_iter().filter_map(move |l| parser.feed(l.as_ref()).transpose())
}
