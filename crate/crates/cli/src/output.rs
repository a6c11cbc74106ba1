//! Result files: atomic writes, CSV tables and run manifests.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use ep_core::experiments::Table;
use serde::Serialize;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "EP_SPECTRA_OUT";

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let mut f = std::fs::File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    std::fs::rename(&tmp, path)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_vec_pretty(value)?;
    text.push(b'\n');
    write_atomic(path, &text)?;
    Ok(())
}

/// Missing entries become empty cells.
pub fn table_csv(table: &Table) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.map(format_number).unwrap_or_default()))?;
    }
    Ok(w.into_inner()?)
}

pub fn write_table(path: &Path, table: &Table) -> anyhow::Result<()> {
    write_atomic(path, &table_csv(table)?)?;
    Ok(())
}

pub fn format_number(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v}")
    } else {
        format!("{v:.12e}")
    }
}

/// Resolves the output directory: the explicit flag, else
/// `$EP_SPECTRA_OUT/<sub>`, else `./ep-spectra-out/<sub>`.
pub fn output_dir(explicit: Option<&Path>, sub: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("ep-spectra-out"))
            .join(sub),
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub threads: usize,
    pub status: String,
    pub wall_time_seconds: f64,
    pub outputs: Vec<String>,
}
