//! Matrix, point-cloud and embedding files.
//!
//! Text matrix: a line holding `n`, then `n` rows of `n` whitespace-separated
//! decimals. Blank lines and lines starting with `#` are skipped.
//!
//! Binary matrix: `NMDS`, a version byte, `n` as little-endian `u64`, then
//! `n²` little-endian `f64` values, row-major.
//!
//! Floats are written with Rust's shortest round-trip formatting, so text
//! files parse back to the exact same bits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use neuc_mds::datasets::PointCloud;
use neuc_mds::{DissimilarityMatrix, Embedding};
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 4] = b"NMDS";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 4 + 1 + 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum MatrixFormat {
    Text,
    Bin,
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into
/// place. Nothing is left at `path` if any step fails.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

/// Whitespace-separated tokens with their 1-based character column.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut rest = line;
    let mut offset = 0;
    std::iter::from_fn(move || {
        let start = rest.find(|c: char| !c.is_whitespace())?;
        let tail = &rest[start..];
        let len = tail.find(char::is_whitespace).unwrap_or(tail.len());
        let col = line[..offset + start].chars().count() + 1;
        let tok = &tail[..len];
        offset += start + len;
        rest = &tail[len..];
        Some((col, tok))
    })
}

struct TextReader<'a> {
    path: &'a str,
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> TextReader<'a> {
    fn new(path: &'a str, text: &'a str) -> Self {
        Self {
            path,
            lines: text.lines().enumerate(),
            last_line: 0,
        }
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> CliError {
        CliError::Parse {
            path: self.path.to_string(),
            line,
            column,
            message: message.into(),
        }
    }

    /// Next content line with its 1-based number.
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.lines.by_ref() {
            let trimmed = line.trim_start();
            self.last_line = i + 1;
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some((i + 1, line));
        }
        None
    }

    fn expect_line(&mut self, what: &str) -> Result<(usize, &'a str)> {
        match self.next_line() {
            Some(l) => Ok(l),
            None => Err(self.err(self.last_line + 1, 1, format!("unexpected end of file, expected {what}"))),
        }
    }

    fn values<T: std::str::FromStr>(&mut self, count: usize, what: &str) -> Result<Vec<T>> {
        self.checked(count, what, |_| None)
    }

    /// Parses a line of exactly `count` values; `check` may reject a value
    /// with a message.
    fn checked<T, F>(&mut self, count: usize, what: &str, check: F) -> Result<Vec<T>>
    where
        T: std::str::FromStr,
        F: Fn(&T) -> Option<&'static str>,
    {
        let (no, line) = self.expect_line(what)?;
        let mut out = Vec::with_capacity(count);
        for (col, tok) in tokens(line) {
            if out.len() == count {
                return Err(self.err(no, col, format!("expected {count} values in {what}, found more")));
            }
            let v = tok
                .parse::<T>()
                .map_err(|_| self.err(no, col, format!("cannot parse '{tok}' in {what}")))?;
            if let Some(msg) = check(&v) {
                return Err(self.err(no, col, format!("{msg} in {what}")));
            }
            out.push(v);
        }
        if out.len() < count {
            let col = line.chars().count() + 1;
            return Err(self.err(
                no,
                col,
                format!("expected {count} values in {what}, found {}", out.len()),
            ));
        }
        Ok(out)
    }

    fn finish(&mut self) -> Result<()> {
        if let Some((no, line)) = self.next_line() {
            let col = tokens(line).next().map_or(1, |(c, _)| c);
            return Err(self.err(no, col, "trailing content"));
        }
        Ok(())
    }
}

fn floats(r: &mut TextReader<'_>, count: usize, what: &str) -> Result<Vec<f64>> {
    r.checked(count, what, |x: &f64| (!x.is_finite()).then_some("non-finite value"))
}

pub fn parse_text_matrix(path: &str, text: &str) -> Result<DissimilarityMatrix> {
    let mut r = TextReader::new(path, text);
    let n = r.values::<usize>(1, "header")?[0];
    if n == 0 {
        return Err(r.err(r.last_line, 1, "matrix order must be positive"));
    }
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        data.extend(floats(&mut r, n, &format!("row {}", i + 1))?);
    }
    r.finish()?;
    Ok(DissimilarityMatrix::from_row_major(n, data)?)
}

pub fn parse_binary_matrix(path: &str, bytes: &[u8]) -> Result<DissimilarityMatrix> {
    let bad = |message: String| CliError::Format {
        path: path.to_string(),
        message,
    };
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(bad("missing NMDS header".into()));
    }
    if bytes[4] != VERSION {
        return Err(bad(format!("unsupported version {}", bytes[4])));
    }
    let n = u64::from_le_bytes(bytes[5..HEADER_LEN].try_into().unwrap());
    let expected = usize::try_from(n)
        .ok()
        .and_then(|n| n.checked_mul(n))
        .and_then(|nn| nn.checked_mul(8))
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or_else(|| bad(format!("matrix order {n} too large")))?;
    if n == 0 {
        return Err(bad("matrix order must be positive".into()));
    }
    if bytes.len() != expected {
        return Err(bad(format!(
            "expected {expected} bytes for n = {n}, found {}",
            bytes.len()
        )));
    }
    let data = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DissimilarityMatrix::from_row_major(n as usize, data)?)
}

/// Reads either format, chosen by the leading magic bytes.
pub fn read_matrix(path: &Path) -> Result<DissimilarityMatrix> {
    let bytes = read_bytes(path)?;
    let name = path.display().to_string();
    if bytes.starts_with(MAGIC) {
        return parse_binary_matrix(&name, &bytes);
    }
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Format {
        path: name.clone(),
        message: format!("not UTF-8 text and no NMDS header ({e})"),
    })?;
    parse_text_matrix(&name, text)
}

fn push_row(out: &mut String, row: impl IntoIterator<Item = impl std::fmt::Display>) {
    let mut first = true;
    for v in row {
        if !first {
            out.push(' ');
        }
        first = false;
        write!(out, "{v}").unwrap();
    }
    out.push('\n');
}

pub fn matrix_to_text(d: &DissimilarityMatrix) -> String {
    let n = d.n();
    let mut out = format!("{n}\n");
    for i in 0..n {
        push_row(&mut out, d.row(i));
    }
    out
}

pub fn matrix_to_binary(d: &DissimilarityMatrix) -> Vec<u8> {
    let n = d.n();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * n * n);
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for v in d.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_matrix(path: &Path, d: &DissimilarityMatrix, format: MatrixFormat) -> Result<()> {
    match format {
        MatrixFormat::Text => write_atomic(path, matrix_to_text(d).as_bytes()),
        MatrixFormat::Bin => write_atomic(path, &matrix_to_binary(d)),
    }
}

/// Header line `n d`, then `n` rows of `d` coordinates.
pub fn parse_points(path: &str, text: &str) -> Result<PointCloud> {
    let mut r = TextReader::new(path, text);
    let head = r.values::<usize>(2, "header")?;
    let (n, d) = (head[0], head[1]);
    if n == 0 || d == 0 {
        return Err(r.err(r.last_line, 1, "point count and dimension must be positive"));
    }
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        coords.extend(floats(&mut r, d, &format!("point {}", i + 1))?);
    }
    r.finish()?;
    Ok(PointCloud::new(n, d, coords)?)
}

pub fn read_points(path: &Path) -> Result<PointCloud> {
    let bytes = read_bytes(path)?;
    let name = path.display().to_string();
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Format {
        path: name.clone(),
        message: format!("not UTF-8 text ({e})"),
    })?;
    parse_points(&name, text)
}

pub fn points_to_text(p: &PointCloud) -> String {
    let mut out = format!("{} {}\n", p.n(), p.dim());
    for i in 0..p.n() {
        push_row(&mut out, p.point(i));
    }
    out
}

/// An embedding as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingFile {
    pub n: usize,
    pub signature: Vec<i8>,
    pub axis_values: Vec<f64>,
    /// `k × n`, row-major.
    pub coords: Vec<f64>,
}

impl EmbeddingFile {
    pub fn k(&self) -> usize {
        self.signature.len()
    }
}

impl From<&Embedding> for EmbeddingFile {
    fn from(e: &Embedding) -> Self {
        Self {
            n: e.n,
            signature: e.signature.clone(),
            axis_values: e.axis_values.clone(),
            coords: e.coords.clone(),
        }
    }
}

/// Lines: `n k`, the signature, the axis values, then one line per axis.
pub fn embedding_to_text(e: &EmbeddingFile) -> String {
    let mut out = format!("{} {}\n", e.n, e.k());
    push_row(&mut out, &e.signature);
    push_row(&mut out, &e.axis_values);
    for row in e.coords.chunks(e.n.max(1)).take(e.k()) {
        push_row(&mut out, row);
    }
    out
}

pub fn parse_embedding(path: &str, text: &str) -> Result<EmbeddingFile> {
    let mut r = TextReader::new(path, text);
    let head = r.values::<usize>(2, "header")?;
    let (n, k) = (head[0], head[1]);
    if k == 0 {
        r.finish()?;
        return Ok(EmbeddingFile {
            n,
            signature: Vec::new(),
            axis_values: Vec::new(),
            coords: Vec::new(),
        });
    }
    let signature: Vec<i8> = r.checked(k, "signature", |&s: &i8| {
        (s != 1 && s != -1).then_some("signature entry other than 1 or -1")
    })?;
    let axis_values = floats(&mut r, k, "axis values")?;
    let mut coords = Vec::with_capacity(k * n);
    for l in 0..k {
        coords.extend(floats(&mut r, n, &format!("axis {}", l + 1))?);
    }
    r.finish()?;
    Ok(EmbeddingFile {
        n,
        signature,
        axis_values,
        coords,
    })
}

pub fn read_embedding(path: &Path) -> Result<EmbeddingFile> {
    let bytes = read_bytes(path)?;
    let name = path.display().to_string();
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Format {
        path: name.clone(),
        message: format!("not UTF-8 text ({e})"),
    })?;
    parse_embedding(&name, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DissimilarityMatrix {
        DissimilarityMatrix::from_row_major(
            3,
            vec![0.0, 0.1, -7.25e-300, 0.1, 0.0, 1.0 / 3.0, -7.25e-300, 1.0 / 3.0, 0.0],
        )
        .unwrap()
    }

    fn parse_err(text: &str) -> (usize, usize) {
        match parse_text_matrix("m", text) {
            Err(CliError::Parse { line, column, .. }) => (line, column),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn tokens_report_columns() {
        let t: Vec<_> = tokens("  1.5 \t-2  x").collect();
        assert_eq!(t, vec![(3, "1.5"), (8, "-2"), (12, "x")]);
        assert_eq!(tokens("   ").count(), 0);
    }

    #[test]
    fn text_round_trip_is_exact() {
        let d = sample();
        let back = parse_text_matrix("m", &matrix_to_text(&d)).unwrap();
        assert_eq!(back.as_slice(), d.as_slice());
    }

    #[test]
    fn binary_round_trip_is_bitwise() {
        let d = sample();
        let bytes = matrix_to_binary(&d);
        assert_eq!(&bytes[..4], b"NMDS");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes.len(), 13 + 9 * 8);
        let back = parse_binary_matrix("m", &bytes).unwrap();
        let bits = |m: &DissimilarityMatrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&d));
    }

    #[test]
    fn text_accepts_comments_and_blank_lines() {
        let d = parse_text_matrix("m", "# header\n2\n\n0 1\n  1 0  \n").unwrap();
        assert_eq!(d.get(0, 1), 1.0);
    }

    #[test]
    fn text_errors_point_at_the_token() {
        assert_eq!(parse_err("2\n0 1\n1 zz\n"), (3, 3));
        assert_eq!(parse_err("2\n0 1 5\n1 0\n"), (2, 5));
        assert_eq!(parse_err("2\n0 1\n1\n"), (3, 2));
        assert_eq!(parse_err("2\n0 1\n"), (3, 1));
        assert_eq!(parse_err("x\n"), (1, 1));
        assert_eq!(parse_err("2\n0 1\n1 0\n9\n"), (4, 1));
        assert_eq!(parse_err("0\n"), (1, 1));
        assert_eq!(parse_err("2\n0 inf\ninf 0\n"), (2, 3));
    }

    #[test]
    fn invariant_violations_come_from_the_core() {
        let err = parse_text_matrix("m", "2\n0 1\n2 0\n").unwrap_err();
        assert!(matches!(err, CliError::Core(neuc_mds::Error::NotSymmetric { .. })));
        let err = parse_text_matrix("m", "2\n1 1\n1 0\n").unwrap_err();
        assert!(matches!(err, CliError::Core(neuc_mds::Error::NotHollow { i: 0, .. })));
    }

    #[test]
    fn binary_rejects_bad_headers() {
        let mut bytes = matrix_to_binary(&sample());
        assert!(parse_binary_matrix("m", &bytes[..bytes.len() - 1]).is_err());
        bytes[4] = 2;
        assert!(parse_binary_matrix("m", &bytes).is_err());
        assert!(parse_binary_matrix("m", b"NMD").is_err());
        let mut huge = b"NMDS\x01".to_vec();
        huge.extend_from_slice(&u64::MAX.to_le_bytes());
        assert!(parse_binary_matrix("m", &huge).is_err());
    }

    #[test]
    fn points_round_trip() {
        let p = PointCloud::uniform(5, 3, 7);
        let back = parse_points("p", &points_to_text(&p)).unwrap();
        assert_eq!(back.as_slice(), p.as_slice());
    }

    #[test]
    fn embedding_round_trip() {
        let e = EmbeddingFile {
            n: 3,
            signature: vec![1, -1],
            axis_values: vec![2.5, -0.125],
            coords: vec![0.1, 0.2, 0.3, -1.0, 0.0, 1e-17],
        };
        let text = embedding_to_text(&e);
        assert!(text.starts_with("3 2\n1 -1\n2.5 -0.125\n"));
        assert_eq!(parse_embedding("e", &text).unwrap(), e);
        let bad = text.replacen("1 -1", "1 0", 1);
        assert!(parse_embedding("e", &bad).is_err());
    }

    #[test]
    fn atomic_write_replaces_whole_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        write_matrix(&path, &sample(), MatrixFormat::Text).unwrap();
        write_matrix(&path, &sample(), MatrixFormat::Bin).unwrap();
        assert_eq!(read_matrix(&path).unwrap().as_slice(), sample().as_slice());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let missing = dir.path().join("no/such/dir/m.txt");
        assert!(write_matrix(&missing, &sample(), MatrixFormat::Text).is_err());
        assert!(!missing.exists());
    }
}
