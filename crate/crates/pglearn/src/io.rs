//! File formats and run manifests.
//!
//! - Dense matrix CSV: plain decimal, one row per line, comma separated, no
//!   header.
//! - Weighted edge list TSV: `i<TAB>j<TAB>weight` with 1-based indices and
//!   i < j.
//! - PGTN binary tensor: magic `PGTN`, u32-LE format version, u32-LE order
//!   K, K u64-LE dims, then prod(dims) f64-LE values in mode-0-fastest
//!   order. A signal set is stored as an order-(K+1) tensor whose last mode
//!   indexes the observations.
//! - Config files: flat `key = value` lines, `#` comments.
//!
//! All writes go through a temp-file-and-rename so interrupted runs leave no
//! partial artifacts.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::WeightedAdjacency;
use crate::tensor::{DenseTensor, SignalSet};

pub const PGTN_MAGIC: &[u8; 4] = b"PGTN";
pub const PGTN_VERSION: u32 = 1;

fn path_str(path: &Path) -> String {
    path.display().to_string()
}

/// Writes bytes atomically: temp file in the target directory, then rename.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = dir.unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(path_str(path), e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path_str(path), e))?;
    tmp.write_all(bytes)
        .map_err(|e| Error::io(path_str(path), e))?;
    tmp.persist(path)
        .map_err(|e| Error::io(path_str(path), e.error))?;
    Ok(())
}

pub fn sha256_hex(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    Ok(hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------- matrices

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_value(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn format_value(v: f64) -> String {
    // shortest representation that round-trips
    let mut s = format!("{v}");
    if s == "-0" {
        s = "0".into();
    }
    s
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    atomic_write(path, matrix_to_csv(m).as_bytes())
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(path_str(path), lineno + 1, "not a number"))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::parse(
                    path_str(path),
                    lineno + 1,
                    "ragged row lengths",
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(path_str(path), 0, "empty matrix"));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn write_adjacency_csv(path: &Path, w: &WeightedAdjacency) -> Result<()> {
    write_matrix_csv(path, &w.to_dense())
}

pub fn read_adjacency_csv(path: &Path) -> Result<WeightedAdjacency> {
    WeightedAdjacency::from_dense(&read_matrix_csv(path)?)
}

// -------------------------------------------------------------- edge lists

pub fn write_edge_list_tsv(path: &Path, w: &WeightedAdjacency) -> Result<()> {
    let mut out = String::new();
    for (i, j, v) in w.edges_above(0.0) {
        out.push_str(&format!("{}\t{}\t{}\n", i + 1, j + 1, format_value(v)));
    }
    atomic_write(path, out.as_bytes())
}

/// Reads a 1-based `i<TAB>j<TAB>weight` edge list. When `n` is not given,
/// the node count is the largest index mentioned.
pub fn read_edge_list_tsv(path: &Path, n: Option<usize>) -> Result<WeightedAdjacency> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut edges = Vec::new();
    let mut max_index = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                path_str(path),
                lineno + 1,
                "expected i<TAB>j<TAB>weight",
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(path_str(path), lineno + 1, "bad node index"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(path_str(path), lineno + 1, "bad node index"))?;
        let wv: f64 = fields[2]
            .parse()
            .map_err(|_| Error::parse(path_str(path), lineno + 1, "bad weight"))?;
        if i == 0 || j == 0 || i >= j {
            return Err(Error::parse(
                path_str(path),
                lineno + 1,
                "indices must be 1-based with i < j",
            ));
        }
        max_index = max_index.max(j);
        edges.push((i - 1, j - 1, wv));
    }
    let n = n.unwrap_or(max_index);
    WeightedAdjacency::from_edges(n, &edges)
}

// ------------------------------------------------------------ PGTN tensors

fn pgtn_bytes(dims: &[usize], data: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + dims.len() * 8 + data.len() * 8);
    out.extend_from_slice(PGTN_MAGIC);
    out.extend_from_slice(&PGTN_VERSION.to_le_bytes());
    out.extend_from_slice(&(dims.len() as u32).to_le_bytes());
    for &d in dims {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for &v in data {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

struct PgtnPayload {
    dims: Vec<usize>,
    data: Vec<f64>,
}

fn parse_pgtn(path: &Path, bytes: &[u8]) -> Result<PgtnPayload> {
    let fail = |msg: &str| Error::parse(path_str(path), 0, msg);
    if bytes.len() < 12 || &bytes[..4] != PGTN_MAGIC {
        return Err(fail("not a PGTN file"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != PGTN_VERSION {
        return Err(fail(&format!("unsupported PGTN version {version}")));
    }
    let k = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let header_len = 12 + 8 * k;
    if bytes.len() < header_len {
        return Err(fail("truncated dims"));
    }
    let mut dims = Vec::with_capacity(k);
    for i in 0..k {
        let start = 12 + 8 * i;
        let d = u64::from_le_bytes(bytes[start..start + 8].try_into().unwrap());
        if d > usize::MAX as u64 {
            return Err(fail("dimension out of range"));
        }
        dims.push(d as usize);
    }
    let count = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| fail("dims product overflows"))?;
    let payload_len = count
        .checked_mul(8)
        .and_then(|p| p.checked_add(header_len))
        .ok_or_else(|| fail("dims product overflows"))?;
    if bytes.len() != payload_len {
        return Err(fail("payload length does not match dims"));
    }
    let data: Vec<f64> = bytes[header_len..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(PgtnPayload { dims, data })
}

pub fn write_tensor(path: &Path, t: &DenseTensor) -> Result<()> {
    atomic_write(path, &pgtn_bytes(t.dims(), t.as_vec()))
}

pub fn read_tensor(path: &Path) -> Result<DenseTensor> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path_str(path), e))?;
    let payload = parse_pgtn(path, &bytes)?;
    DenseTensor::new(payload.dims, payload.data)
}

/// Writes a signal set as an order-(K+1) tensor, observations last.
pub fn write_signal_set(path: &Path, signals: &SignalSet) -> Result<()> {
    let mut dims = signals.dims().to_vec();
    dims.push(signals.len());
    atomic_write(path, &pgtn_bytes(&dims, signals.raw()))
}

pub fn read_signal_set(path: &Path) -> Result<SignalSet> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path_str(path), e))?;
    let payload = parse_pgtn(path, &bytes)?;
    if payload.dims.len() < 2 {
        return Err(Error::parse(
            path_str(path),
            0,
            "signal sets need at least an observation mode and one signal mode",
        ));
    }
    let dims = payload.dims[..payload.dims.len() - 1].to_vec();
    SignalSet::new(dims, payload.data)
}

// --------------------------------------------------------------- CSV signals

/// Rows are observations; each row is one vectorized signal.
pub fn read_signals_csv(path: &Path) -> Result<SignalSet> {
    let m = read_matrix_csv(path)?;
    let n = m.ncols();
    let mut data = Vec::with_capacity(m.nrows() * n);
    for i in 0..m.nrows() {
        for j in 0..n {
            data.push(m[(i, j)]);
        }
    }
    SignalSet::new(vec![n], data)
}

pub fn write_signals_csv(path: &Path, signals: &SignalSet) -> Result<()> {
    let mut out = String::new();
    for x in signals.signals() {
        let row: Vec<String> = x.iter().map(|&v| format_value(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

// ------------------------------------------------------------- config files

/// Flat `key = value` file; later keys win; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path_str(path), e))?;
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(
                path_str(path),
                lineno + 1,
                "expected key = value",
            ));
        };
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

// ---------------------------------------------------------------- manifests

/// Everything needed to re-run a CLI invocation and to audit its inputs.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    /// Fully resolved configuration, defaults included.
    pub config: serde_json::Value,
    pub seed: u64,
    pub input_digests: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub started_at: String,
    pub finished_at: String,
    pub termination: String,
}

impl Manifest {
    pub fn write(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        atomic_write(path, json.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn tmpdir() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn matrix_csv_roundtrip() {
        let dir = tmpdir();
        let path = dir.path().join("m.csv");
        let m = DMatrix::from_row_slice(2, 3, &[1.0, -2.5, 0.0, 3.25, 1e-9, -0.0]);
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn bad_csv_is_reported_with_line() {
        let dir = tmpdir();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "1,2\n3,oops\n").unwrap();
        match read_matrix_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn edge_list_roundtrip_and_validation() {
        let dir = tmpdir();
        let path = dir.path().join("g.tsv");
        let w = WeightedAdjacency::from_edges(4, &[(0, 1, 0.5), (1, 3, 2.0)]).unwrap();
        write_edge_list_tsv(&path, &w).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "1\t2\t0.5\n2\t4\t2\n");
        let back = read_edge_list_tsv(&path, Some(4)).unwrap();
        assert_eq!(back.packed(), w.packed());

        std::fs::write(&path, "2\t1\t1.0\n").unwrap();
        assert!(read_edge_list_tsv(&path, None).is_err());
    }

    #[test]
    fn pgtn_header_layout_is_exact() {
        let dir = tmpdir();
        let path = dir.path().join("t.pgtn");
        let t = DenseTensor::new(vec![2, 3], vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        write_tensor(&path, &t).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"PGTN");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[12..20].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[20..28].try_into().unwrap()), 3);
        assert_eq!(bytes.len(), 28 + 6 * 8);
        assert_eq!(f64::from_le_bytes(bytes[28..36].try_into().unwrap()), 0.0);
    }

    #[test]
    fn pgtn_rejects_corruption() {
        let dir = tmpdir();
        let path = dir.path().join("t.pgtn");
        let t = DenseTensor::new(vec![2, 2], vec![1.0; 4]).unwrap();
        write_tensor(&path, &t).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 4);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));

        // dims whose product overflows must be rejected, not trusted
        let mut evil = Vec::new();
        evil.extend_from_slice(PGTN_MAGIC);
        evil.extend_from_slice(&PGTN_VERSION.to_le_bytes());
        evil.extend_from_slice(&2u32.to_le_bytes());
        evil.extend_from_slice(&u64::MAX.to_le_bytes());
        evil.extend_from_slice(&u64::MAX.to_le_bytes());
        std::fs::write(&path, &evil).unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn config_file_parsing() {
        let dir = tmpdir();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "alpha = 0.5\n# comment\nrho=auto  # trailing\n\n").unwrap();
        let cfg = read_config_file(&path).unwrap();
        assert_eq!(cfg.get("alpha").unwrap(), "0.5");
        assert_eq!(cfg.get("rho").unwrap(), "auto");

        std::fs::write(&path, "no equals sign\n").unwrap();
        assert!(read_config_file(&path).is_err());
    }

    proptest! {
        #[test]
        fn signal_set_pgtn_roundtrip(
            dims in proptest::collection::vec(1usize..=4, 1..=3),
            m0 in 1usize..=5,
            seed in 0u64..100,
        ) {
            let n: usize = dims.iter().product();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..n * m0).map(|_| rng.random::<f64>() - 0.5).collect();
            let signals = SignalSet::new(dims.clone(), data).unwrap();

            let dir = tmpdir();
            let path = dir.path().join("s.pgtn");
            write_signal_set(&path, &signals).unwrap();
            let back = read_signal_set(&path).unwrap();
            prop_assert_eq!(back.dims(), signals.dims());
            prop_assert_eq!(back.len(), signals.len());
            prop_assert_eq!(back.raw(), signals.raw());
        }
    }
}
