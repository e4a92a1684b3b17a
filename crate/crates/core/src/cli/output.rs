//! Output files: comment-headed CSV and metadata-wrapped JSON, written via
//! a temporary file and a rename.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::state::BIT_ORDER;

pub const TOOL_NAME: &str = "qpeak";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest round-trip decimal; scientific notation outside `[1e-5, 1e16)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Provenance embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_sha256: String,
    pub master_seed: u64,
    pub bit_order: &'static str,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(canonical_config: &str, master_seed: u64) -> Self {
        Self {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            config_sha256: sha256_hex(canonical_config),
            master_seed,
            bit_order: BIT_ORDER,
            config: serde_json::from_str(canonical_config).expect("canonical config is JSON"),
        }
    }

    fn csv_header(&self, timestamp: Option<u64>) -> String {
        let mut h = String::new();
        let _ = writeln!(h, "# {} {}", self.tool, self.version);
        let _ = writeln!(h, "# config_sha256: {}", self.config_sha256);
        let _ = writeln!(h, "# master_seed: {}", self.master_seed);
        let _ = writeln!(h, "# bit_order: {}", self.bit_order);
        let _ = writeln!(h, "# config: {}", self.config);
        if let Some(t) = timestamp {
            let _ = writeln!(h, "# generated_unix: {t}");
        }
        h
    }
}

/// CSV table with a fixed column contract.
pub struct CsvTable {
    columns: &'static [&'static str],
    body: String,
}

impl CsvTable {
    pub fn new(columns: &'static [&'static str]) -> Self {
        let mut body = columns.join(",");
        body.push('\n');
        Self { columns, body }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.body.push_str(&cells.join(","));
        self.body.push('\n');
    }

    pub fn render(&self, prov: &Provenance, timestamp: Option<u64>) -> String {
        let mut out = prov.csv_header(timestamp);
        out.push_str(&self.body);
        out
    }
}

#[derive(Serialize)]
struct JsonDoc<'a, T: Serialize> {
    #[serde(flatten)]
    meta: &'a Provenance,
    result: &'a T,
}

pub fn render_json<T: Serialize>(prov: &Provenance, result: &T) -> String {
    let mut s = serde_json::to_string_pretty(&JsonDoc { meta: prov, result }).expect("result serializes");
    s.push('\n');
    s
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `contents` to `dir/name` through a sibling temporary file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(&target, e)
    })?;
    Ok(target)
}

pub fn unix_timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [
            0.0,
            1.0,
            0.0625,
            1.0 / 3.0,
            1e-7,
            -2.5e-12,
            123456.789,
            1e20,
            -0.999,
        ] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            assert!(!s.contains(','));
        }
        assert_eq!(fmt_f64(0.0625), "0.0625");
        assert_eq!(fmt_f64(1e-7), "1e-7");
    }

    #[test]
    fn sha_is_stable() {
        assert_eq!(
            sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_header_contains_provenance() {
        let prov = Provenance::new(r#"{"a":1}"#, 5);
        let mut t = CsvTable::new(&["x", "y"]);
        t.row(&["1".into(), "2".into()]);
        let text = t.render(&prov, Some(99));
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# qpeak "));
        assert!(lines.iter().any(|l| l.starts_with("# config_sha256: ")));
        assert!(lines.contains(&"# master_seed: 5"));
        assert!(lines.iter().any(|l| l.starts_with("# bit_order: little-endian")));
        assert!(lines.contains(&"# generated_unix: 99"));
        assert_eq!(&lines[lines.len() - 2..], &["x,y", "1,2"]);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "a.csv", "hello\n").unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "hello\n");
        let names: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        assert_eq!(names.len(), 1);
    }
}
