//! Trace files: streaming writer, streaming reader and a digest sink.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use lunes_core::trace::{TraceEvent, TraceLine, TraceParser, TraceSink, TRACE_FORMAT_VERSION};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Writes the header, then one line per recorded event.
pub struct TraceWriter<W: Write> {
    out: W,
    line: String,
    error: Option<io::Error>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new<K: AsRef<str>, V: AsRef<str>>(mut out: W, header: &[(K, V)]) -> io::Result<Self> {
        for (k, v) in header {
            writeln!(out, "# {}={}", k.as_ref(), v.as_ref())?;
        }
        Ok(Self { out, line: String::with_capacity(64), error: None })
    }

    /// Flushes and returns the sink, or the first write error.
    pub fn finish(mut self) -> io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> TraceSink for TraceWriter<W> {
    fn record(&mut self, event: &TraceEvent) {
        if self.error.is_some() {
            return;
        }
        self.line.clear();
        let _ = writeln!(self.line, "{event}");
        if let Err(e) = self.out.write_all(self.line.as_bytes()) {
            self.error = Some(e);
        }
    }
}

pub fn create_trace(path: &Path, header: &[(String, String)]) -> Result<TraceWriter<BufWriter<File>>> {
    let file = File::create(path).map_err(CliError::io(path))?;
    TraceWriter::new(BufWriter::with_capacity(1 << 20, file), header).map_err(CliError::io(path))
}

/// Header fields every trace carries, in order, after `format_version`.
pub const HEADER_KEYS: [&str; 9] = ["seed", "scenario", "protocol", "n", "e", "ttl", "steps", "lp", "gaia"];

pub fn format_version_pair() -> (String, String) {
    ("format_version".into(), TRACE_FORMAT_VERSION.to_string())
}

/// SHA-256 over the G, R and D lines in emission order.
#[derive(Default)]
pub struct ProtocolDigest {
    hasher: Sha256,
    line: String,
    lines: u64,
}

impl ProtocolDigest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn lines(&self) -> u64 {
        self.lines
    }

    pub fn finish(self) -> [u8; 32] {
        self.hasher.finalize().into()
    }
}

impl TraceSink for ProtocolDigest {
    fn record(&mut self, event: &TraceEvent) {
        if event.is_protocol_level() {
            self.line.clear();
            let _ = writeln!(self.line, "{event}");
            self.hasher.update(self.line.as_bytes());
            self.lines += 1;
        }
    }
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Streaming reader. The header is read on open; events are pulled lazily.
pub struct TraceReader<R: BufRead> {
    path: PathBuf,
    input: R,
    parser: TraceParser,
    buf: String,
    header: Vec<(String, String)>,
    first: Option<TraceEvent>,
}

impl TraceReader<BufReader<File>> {
    pub fn open(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(CliError::io(path))?;
        Self::new(path, BufReader::with_capacity(1 << 20, file))
    }
}

impl<R: BufRead> TraceReader<R> {
    pub fn new(path: &Path, input: R) -> Result<Self> {
        let mut reader = Self {
            path: path.to_path_buf(),
            input,
            parser: TraceParser::new(),
            buf: String::new(),
            header: Vec::new(),
            first: None,
        };
        while let Some(line) = reader.next_line()? {
            match line {
                TraceLine::Header { key, value } => reader.header.push((key, value)),
                TraceLine::Event(e) => {
                    reader.first = Some(e);
                    break;
                }
            }
        }
        Ok(reader)
    }

    fn next_line(&mut self) -> Result<Option<TraceLine>> {
        loop {
            self.buf.clear();
            let read = self.input.read_line(&mut self.buf).map_err(CliError::io(&self.path))?;
            if read == 0 {
                return Ok(None);
            }
            let line = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
            match self.parser.feed(line) {
                Ok(Some(l)) => return Ok(Some(l)),
                Ok(None) => continue,
                Err(e) => return Err(CliError::usage(format!("{}: {e}", self.path.display()))),
            }
        }
    }

    pub fn header(&self) -> &[(String, String)] {
        &self.header
    }

    pub fn header_value(&self, key: &str) -> Option<&str> {
        self.header.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn next_event(&mut self) -> Result<Option<TraceEvent>> {
        if let Some(e) = self.first.take() {
            return Ok(Some(e));
        }
        match self.next_line()? {
            None => Ok(None),
            Some(TraceLine::Event(e)) => Ok(Some(e)),
            Some(TraceLine::Header { .. }) => unreachable!("parser rejects headers after the first event"),
        }
    }
}

impl<R: BufRead> Iterator for TraceReader<R> {
    type Item = Result<TraceEvent>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_event().transpose()
    }
}
