use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use plcalc::experiments::EquivalenceReport;

use crate::error::{CliError, CliResult};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(format!("{}: {e}", path.display())))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn write(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

pub fn format_of(path: &Path) -> CliResult<Format> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(Format::Json),
        Some("csv") => Ok(Format::Csv),
        _ => Err(CliError::Malformed(format!(
            "cannot infer output format of {}; use .json or .csv",
            path.display()
        ))),
    }
}

/// Writes a JSON document, or prints it when no path is given.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let s = to_json(value);
    match out {
        Some(p) => {
            if format_of(p)? != Format::Json {
                return Err(CliError::Malformed(format!("{} must be a .json path", p.display())));
            }
            write(p, s.as_bytes())
        }
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

pub fn report_csv(report: &EquivalenceReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["sample_id", "norm_a", "norm_b", "ratio"]).expect("in-memory csv");
    for r in &report.rows {
        w.serialize((r.sample_id, r.norm_a, r.norm_b, r.ratio)).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

/// JSON report plus a CSV sidecar next to it, or the CSV table alone.
/// Returns the files written.
pub fn write_report(report: &EquivalenceReport, out: &Path) -> CliResult<Vec<PathBuf>> {
    let csv = report_csv(report);
    match format_of(out)? {
        Format::Json => {
            let side = out.with_extension("csv");
            write(out, to_json(report).as_bytes())?;
            write(&side, &csv)?;
            Ok(vec![out.to_path_buf(), side])
        }
        Format::Csv => {
            write(out, &csv)?;
            Ok(vec![out.to_path_buf()])
        }
    }
}
