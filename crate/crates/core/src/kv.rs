//! Flat `key=value` text used by manifests, configuration and stats files.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct KvError {
    pub line: usize,
    pub message: String,
}

/// Parses `key=value` lines. Blank lines and lines starting with `#` are
/// skipped; keys and values are trimmed.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, KvError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(KvError { line: idx + 1, message: alloc::format!("expected key=value, found `{line}`") });
        };
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(KvError { line: idx + 1, message: alloc::format!("invalid key `{key}`") });
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

pub fn write_kv<'a, I>(pairs: I) -> String
where
    I: IntoIterator<Item = (&'a str, String)>,
{
    let mut out = String::new();
    for (k, v) in pairs {
        out.push_str(k);
        out.push('=');
        out.push_str(&v);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_skips_comments() {
        let kv = parse_kv("# c\nmodel = er\n\nn=200\n").unwrap();
        assert_eq!(kv, [("model".into(), "er".into()), ("n".into(), "200".into())]);
    }

    #[test]
    fn reports_bad_line() {
        assert_eq!(parse_kv("a=1\nbogus\n").unwrap_err().line, 2);
        assert_eq!(parse_kv("a b=1\n").unwrap_err().line, 1);
    }

    #[test]
    fn write_then_parse() {
        let text = write_kv([("a", "1".into()), ("b", "x y".into())]);
        assert_eq!(text, "a=1\nb=x y\n");
        assert_eq!(parse_kv(&text).unwrap().len(), 2);
    }
}
