//! CSV tables and the `.meta` sidecar.

use std::fs;
use std::path::{Path, PathBuf};

use crate::commands::Table;
use crate::config::{Command, RunConfig};
use crate::error::{CliError, Result};

fn with_suffix(prefix: &Path, suffix: &str, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    s.push(ext);
    PathBuf::from(s)
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

pub fn csv_bytes(table: &Table) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Usage(format!("formatting CSV: {e}"));
    w.write_record(&table.header).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| CliError::Usage(format!("formatting CSV: {}", e.error())))
}

/// Sidecar text: the resolved configuration with `run.command` and
/// `run.seed` filled in, preceded by comment lines.
pub fn meta_text(cfg: &RunConfig, command: Command, tables: &[Table]) -> String {
    let mut resolved = cfg.clone();
    resolved.run.command = Some(command);
    let mut s = format!("# kickflow {} {}\n", env!("CARGO_PKG_VERSION"), command.name());
    for t in tables {
        s.push_str(&format!("# table{}.csv: {} rows; {}\n", t.suffix, t.rows.len(), t.header.join(",")));
    }
    s.push('\n');
    s.push_str(&resolved.to_text());
    s
}

/// Write `<prefix><suffix>.csv` for every table and `<prefix>.meta`.
/// Returns the paths written.
pub fn write_all(prefix: &Path, cfg: &RunConfig, command: Command, tables: &[Table]) -> Result<Vec<PathBuf>> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let mut written = Vec::new();
    for t in tables {
        let path = with_suffix(prefix, t.suffix, ".csv");
        fs::write(&path, csv_bytes(t)?).map_err(io(&path))?;
        written.push(path);
    }
    let meta = with_suffix(prefix, "", ".meta");
    fs::write(&meta, meta_text(cfg, command, tables)).map_err(io(&meta))?;
    written.push(meta);
    Ok(written)
}
