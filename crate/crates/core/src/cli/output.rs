//! Atomic, locale-independent CSV and JSON writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// 17 significant digits, scientific notation.
pub fn fmt_num(v: f64) -> String {
    // adding zero folds -0.0 into 0.0
    format!("{:.16e}", v + 0.0)
}

/// Writes via a temporary file in the target directory and renames it into
/// place, so the target is either absent, the old file, or complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            buf: format!("{}\n", header.join(",")),
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "csv row width");
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.buf.as_bytes())
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

/// Run metadata kept out of the payload files so those stay reproducible.
#[derive(Serialize)]
pub struct Sidecar<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub threads: usize,
    pub unix_time: u64,
    pub outputs: Vec<String>,
}

pub fn write_sidecar(dir: &Path, command: &str, outputs: &[PathBuf]) -> Result<PathBuf> {
    let path = dir.join(format!("{command}.meta.json"));
    let unix_time = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    write_json(
        &path,
        &Sidecar {
            command,
            version: env!("CARGO_PKG_VERSION"),
            threads: rayon::current_num_threads(),
            unix_time,
            outputs: outputs
                .iter()
                .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
                .collect(),
        },
    )?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 12345.678, 0.0] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
