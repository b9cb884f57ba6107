//! Trace line format, streaming parsing and post-run analysis.

mod event;
mod integrity;
mod report;

pub use event::{
    parse_event, parse_trace, MsgId, NullSink, TraceEvent, TraceLine, TraceParseError, TraceParser, TraceSink,
};
pub use integrity::{IntegrityChecker, IntegrityReport};
pub use report::{
    corpus_summary, speedup_report, CorpusSummary, DisseminationAnalyzer, DisseminationReport, ReportError,
    SpeedupReport, SpeedupRow,
};

pub const TRACE_FORMAT_VERSION: u32 = 1;
