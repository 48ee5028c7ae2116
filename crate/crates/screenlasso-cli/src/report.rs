//! Plot-ready result emission: one JSON document or one CSV table per run,
//! both tagged with a schema version.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::path::PathResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
}

impl core::str::FromStr for OutputFormat {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err("expected json or csv"),
        }
    }
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema_version: u32,
    #[serde(flatten)]
    result: &'a PathResult,
}

pub fn render_json(result: &PathResult) -> String {
    let doc = JsonDocument {
        schema_version: SCHEMA_VERSION,
        result,
    };
    serde_json::to_string_pretty(&doc).expect("path results always serialize")
}

const CSV_HEADER: &str = "schema_version,solver,penalty,theta,lambda_index,lambda,status,nnz,\
objective,kkt,wall_time_s,updates,outer_iters,screened_per_outer";

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// One row per grid point, stable column order. Floats are printed in
/// shortest round-trip form so the CSV carries exactly the JSON values; the
/// per-outer screened counts are flattened with `;`.
pub fn render_csv(result: &PathResult) -> String {
    let mut out = String::with_capacity(64 * (result.points.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in &result.points {
        let screened = p
            .screened_per_outer
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            SCHEMA_VERSION,
            csv_escape(&result.config.solver),
            csv_escape(&result.config.penalty),
            p.theta,
            p.lambda_index,
            p.lambda,
            csv_escape(&p.status),
            p.nnz,
            p.objective,
            p.kkt,
            p.wall_time_s,
            p.updates,
            p.outer_iters,
            csv_escape(&screened),
        );
    }
    out
}

pub fn emit_results(
    result: &PathResult,
    format: OutputFormat,
    path: &Path,
) -> Result<(), ReportError> {
    let body = match format {
        OutputFormat::Json => render_json(result),
        OutputFormat::Csv => render_csv(result),
    };
    fs::write(path, body).map_err(|source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    })
}
