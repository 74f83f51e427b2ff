//! Shared helpers for the line-oriented text documents.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Result, TpcError};

/// Nine significant digits: the shortest width that round-trips any `f32`.
pub fn fmt_f32(v: f32) -> String {
    format!("{v:.8e}")
}

/// Shortest round-tripping representation of an `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Iterator over non-empty, non-comment lines split on whitespace, with
/// 1-based line numbers for error messages.
pub struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    path: PathBuf,
    last: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str, path: &Path) -> Self {
        Self {
            inner: text.lines().enumerate(),
            path: path.to_path_buf(),
            last: 0,
        }
    }

    pub fn error(&self, line: usize, message: String) -> TpcError {
        TpcError::Parse {
            path: self.path.clone(),
            line,
            message,
        }
    }

    pub fn last_line(&self) -> usize {
        self.last
    }

    pub fn next_fields(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            return Some((i + 1, line.split_whitespace().collect()));
        }
        None
    }

    fn require(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        let last = self.last;
        self.next_fields()
            .ok_or_else(|| self.error(last + 1, format!("unexpected end of file, expected {what}")))
    }

    pub fn field<T: FromStr>(&self, line: usize, fields: &[&str], i: usize) -> Result<T> {
        let raw = fields
            .get(i)
            .ok_or_else(|| self.error(line, format!("missing field {}", i + 1)))?;
        raw.parse()
            .map_err(|_| self.error(line, format!("cannot parse `{raw}`")))
    }

    pub fn expect_header(&mut self, format: &str, version: u32) -> Result<()> {
        let (line, fields) = self.require("format header")?;
        if fields.len() != 2 || fields[0] != format {
            return Err(self.error(line, format!("expected `{format} {version}` header")));
        }
        let v: u32 = self.field(line, &fields, 1)?;
        if v != version {
            return Err(self.error(line, format!("unsupported {format} version {v}")));
        }
        Ok(())
    }

    /// Next line must be `key value`.
    pub fn keyed<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let (line, fields) = self.require(key)?;
        if fields.len() != 2 || fields[0] != key {
            return Err(self.error(line, format!("expected `{key} <value>`")));
        }
        self.field(line, &fields, 1)
    }

    /// Next line must be `key rest of line`; the rest is kept verbatim.
    pub fn keyed_str(&mut self, key: &str) -> Result<String> {
        let (line, fields) = self.require(key)?;
        if fields.len() < 2 || fields[0] != key {
            return Err(self.error(line, format!("expected `{key} <value>`")));
        }
        Ok(fields[1..].join(" "))
    }

    /// Next line must start with `key`; returns the remaining fields.
    pub fn keyed_list(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (line, fields) = self.require(key)?;
        if fields.first() != Some(&key) {
            return Err(self.error(line, format!("expected `{key} ...`")));
        }
        Ok((line, fields[1..].to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formats_round_trip() {
        for v in [0.1f32, -3.4028235e38, 1e-45, 123.456] {
            assert_eq!(fmt_f32(v).parse::<f32>().unwrap().to_bits(), v.to_bits());
        }
        for v in [0.1f64, std::f64::consts::PI, -1e-300, 5.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn skips_comments_and_blanks() {
        let mut l = Lines::new("# c\n\n a b \n", Path::new("x"));
        assert_eq!(l.next_fields(), Some((3, vec!["a", "b"])));
        assert_eq!(l.next_fields(), None);
    }
}
