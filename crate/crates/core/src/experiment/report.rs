//! Report emission: a shared tabular row model, CSV with a fixed column
//! prefix plus per-kind extensions, and JSON mirroring the same rows with
//! every float at 17 significant digits (lossless for binary64).

use super::{ExperimentKind, RunReport};
use crate::Result;
use std::io::{self, Write};
use std::path::Path;

/// Shared CSV column prefix; every experiment kind appends its own columns.
pub const SHARED_HEADER: [&str; 12] = [
    "experiment",
    "T",
    "H",
    "U",
    "N",
    "k",
    "seed",
    "value",
    "aux1",
    "aux2",
    "error_bound",
    "elapsed_ms",
];

/// Extension columns per kind, in order. `op` (row provenance: the library
/// operation that produced the row) leads every extension set.
pub fn ext_columns(kind: ExperimentKind) -> &'static [&'static str] {
    use ExperimentKind::*;
    match kind {
        Delta | Diff | Voronoi | Cramer => &["op"],
        Moment => &["op", "mode"],
        Jutila => &["op", "predicted_error"],
        Maxdiff => &["op", "argmax_x", "samples_per_unit"],
        Signs => &["op", "kind", "segment"],
        Persist => &["op", "side", "c", "min_len"],
        Largeval => &["op", "v_thresh", "step"],
        Tsang => &["op", "beta"],
        Omega => &["op", "delta"],
    }
}

/// One typed cell of an extension column.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Num(f64),
    Int(u64),
    Text(&'static str),
    Empty,
}

/// One result row. The prefix mirrors [`SHARED_HEADER`]; `ext` must match
/// `ext_columns(kind)` minus the leading `op`.
#[derive(Debug, Clone)]
pub struct Row {
    pub experiment: &'static str,
    pub t: Option<f64>,
    pub h: Option<f64>,
    pub u: Option<f64>,
    pub n: Option<u64>,
    pub k: Option<f64>,
    pub seed: u64,
    pub value: f64,
    pub aux1: Option<f64>,
    pub aux2: Option<f64>,
    pub error_bound: Option<f64>,
    pub op: &'static str,
    pub ext: Vec<(&'static str, CellValue)>,
}

/// 17 significant digits — the shortest count that round-trips every f64.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_cell(cell: &CellValue) -> String {
    match cell {
        CellValue::Num(v) => fmt_f64(*v),
        CellValue::Int(i) => i.to_string(),
        CellValue::Text(s) => (*s).to_string(),
        CellValue::Empty => String::new(),
    }
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes the report as CSV: fixed header, one line per row, floats at 17
/// significant digits, elapsed_ms pinned to 0 for byte-stable output.
pub fn write_csv<W: Write>(report: &RunReport, w: &mut W) -> io::Result<()> {
    let ext = ext_columns(report.config.kind);
    let mut header: Vec<&str> = SHARED_HEADER.to_vec();
    header.extend_from_slice(ext);
    writeln!(w, "{}", header.join(","))?;
    for row in &report.rows {
        debug_assert_eq!(row.ext.len() + 1, ext.len(), "row/schema mismatch");
        let mut cells: Vec<String> = vec![
            row.experiment.to_string(),
            opt_f64(row.t),
            opt_f64(row.h),
            opt_f64(row.u),
            row.n.map(|n| n.to_string()).unwrap_or_default(),
            opt_f64(row.k),
            row.seed.to_string(),
            fmt_f64(row.value),
            opt_f64(row.aux1),
            opt_f64(row.aux2),
            opt_f64(row.error_bound),
            "0".to_string(),
            row.op.to_string(),
        ];
        for (i, (name, cell)) in row.ext.iter().enumerate() {
            debug_assert_eq!(*name, ext[i + 1], "row/schema column mismatch");
            cells.push(csv_cell(cell));
        }
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// serde_json formatter printing every finite float with 17 significant
/// digits (`serde_json` itself emits `null` for non-finite values).
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W: Write + ?Sized>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

fn json_num(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v)
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

fn json_opt(v: Option<f64>) -> serde_json::Value {
    v.map(json_num).unwrap_or(serde_json::Value::Null)
}

fn json_cell(cell: &CellValue) -> serde_json::Value {
    match cell {
        CellValue::Num(v) => json_num(*v),
        CellValue::Int(i) => serde_json::Value::from(*i),
        CellValue::Text(s) => serde_json::Value::from(*s),
        CellValue::Empty => serde_json::Value::Null,
    }
}

fn row_to_json(row: &Row) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    map.insert("experiment".into(), row.experiment.into());
    map.insert("T".into(), json_opt(row.t));
    map.insert("H".into(), json_opt(row.h));
    map.insert("U".into(), json_opt(row.u));
    map.insert("N".into(), row.n.map(serde_json::Value::from).unwrap_or(serde_json::Value::Null));
    map.insert("k".into(), json_opt(row.k));
    map.insert("seed".into(), row.seed.into());
    map.insert("value".into(), json_num(row.value));
    map.insert("aux1".into(), json_opt(row.aux1));
    map.insert("aux2".into(), json_opt(row.aux2));
    map.insert("error_bound".into(), json_opt(row.error_bound));
    map.insert("elapsed_ms".into(), 0u64.into());
    map.insert("op".into(), row.op.into());
    for (name, cell) in &row.ext {
        map.insert((*name).into(), json_cell(cell));
    }
    serde_json::Value::Object(map)
}

/// Writes the report as JSON: config echo, library version, and the same
/// rows as the CSV (keys sorted, floats at 17 significant digits).
pub fn write_json<W: Write>(report: &RunReport, w: &mut W) -> io::Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("version".into(), report.version.into());
    doc.insert(
        "config".into(),
        serde_json::to_value(&report.config).map_err(io::Error::other)?,
    );
    doc.insert("wall_ms".into(), 0u64.into());
    doc.insert(
        "rows".into(),
        serde_json::Value::Array(report.rows.iter().map(row_to_json).collect()),
    );
    let mut ser = serde_json::Serializer::with_formatter(&mut *w, SigDigits);
    serde::Serialize::serialize(&serde_json::Value::Object(doc), &mut ser)
        .map_err(io::Error::other)?;
    writeln!(w)?;
    Ok(())
}

/// Renders the report in the config's format to an in-memory buffer.
pub fn render(report: &RunReport) -> io::Result<Vec<u8>> {
    let mut buf = Vec::new();
    match report.config.format {
        super::OutputFormat::Csv => write_csv(report, &mut buf)?,
        super::OutputFormat::Json => write_json(report, &mut buf)?,
    }
    Ok(buf)
}

/// Writes the rendered report to `path` via a temporary sibling file and an
/// atomic rename, so a failed run never leaves a partial report behind.
pub fn write_to_path(report: &RunReport, path: &Path) -> Result<()> {
    let bytes = render(report).map_err(crate::Error::from)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, &bytes).map_err(crate::Error::from)?;
    std::fs::rename(&tmp, path).map_err(crate::Error::from)?;
    Ok(())
}

/// Convenience used by tests and the CLI: the full report as a string.
pub fn render_string(report: &RunReport) -> io::Result<String> {
    let bytes = render(report)?;
    String::from_utf8(bytes).map_err(|e| io::Error::other(e.to_string()))
}
