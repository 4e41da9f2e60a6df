//! Output emission: CSV and JSON writers with a comment-style metadata
//! header carrying the effective parameter set.

use crate::models::Trajectory;
use serde::Serialize;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown output format '{other}'")),
        }
    }
}

/// Metadata attached to every emitted file: the command that produced it,
/// the effective parameters after all overrides, and (unless suppressed)
/// a generation timestamp.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub command: String,
    /// Key/value pairs in emission order.
    pub parameters: Vec<(String, String)>,
    /// RFC 3339 generation time; `None` when timestamps are suppressed
    /// for reproducible output.
    pub generated_at: Option<String>,
}

impl ReportMeta {
    pub fn new(command: impl Into<String>) -> Self {
        ReportMeta {
            command: command.into(),
            parameters: Vec::new(),
            generated_at: None,
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }

    /// Stamp with the current wall-clock time.
    pub fn timestamped(mut self) -> Self {
        self.generated_at = Some(chrono::Utc::now().to_rfc3339());
        self
    }

    fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("# command: {}", self.command)];
        for (key, value) in &self.parameters {
            lines.push(format!("# {key}: {value}"));
        }
        if let Some(ts) = &self.generated_at {
            lines.push(format!("# generated_at: {ts}"));
        }
        lines
    }
}

/// A rectangular table ready for emission in either format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Emit a table in the requested format, metadata header first.
pub fn write_table(
    out: &mut impl Write,
    format: OutputFormat,
    meta: &ReportMeta,
    table: &Table,
) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(out, meta, table),
        OutputFormat::Json => write_json(out, meta, table),
    }
}

fn write_csv(out: &mut impl Write, meta: &ReportMeta, table: &Table) -> io::Result<()> {
    for line in meta.comment_lines() {
        writeln!(out, "{line}")?;
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    writer.flush()
}

fn write_json(out: &mut impl Write, meta: &ReportMeta, table: &Table) -> io::Result<()> {
    let mut params = serde_json::Map::new();
    for (key, value) in &meta.parameters {
        params.insert(key.clone(), serde_json::Value::String(value.clone()));
    }
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            table
                .columns
                .iter()
                .zip(row)
                .map(|(col, cell)| (col.clone(), serde_json::Value::String(cell.clone())))
                .collect::<serde_json::Map<_, _>>()
                .into()
        })
        .collect();
    let doc = serde_json::json!({
        "meta": {
            "command": meta.command,
            "parameters": params,
            "generated_at": meta.generated_at,
        },
        "rows": rows,
    });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)
}

/// Fixed-precision float formatting so emitted files are byte-stable.
pub fn fmt_float(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1e15 {
        format!("{value:.1}")
    } else {
        format!("{value:.6}")
    }
}

/// Table of a model trajectory: t, s, i, r per integration step.
pub fn trajectory_table(traj: &Trajectory) -> Table {
    let mut table = Table::new(&["t", "susceptible", "infectious", "recovered"]);
    for (t, state) in &traj.points {
        table.push_row(vec![
            fmt_float(*t),
            fmt_float(state.s),
            fmt_float(state.i),
            fmt_float(state.r),
        ]);
    }
    table
}

/// Table of a (date, value) plot series.
pub fn series_table(value_name: &str, series: &[(chrono::NaiveDate, f64)]) -> Table {
    let mut table = Table::new(&["date", value_name]);
    for (date, value) in series {
        table.push_row(vec![date.format("%Y-%m-%d").to_string(), fmt_float(*value)]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{integrate, CompartmentState, Model, ModelParams};

    fn sample_meta() -> ReportMeta {
        ReportMeta::new("simulate")
            .param("model", "sir")
            .param("dt", "0.1")
    }

    fn sample_table() -> Table {
        let mut table = Table::new(&["region", "value"]);
        table.push_row(vec!["Bihar".into(), "5.33".into()]);
        table.push_row(vec!["Haryana".into(), "6.0".into()]);
        table
    }

    #[test]
    fn csv_has_comment_header_then_columns() {
        let mut buf = Vec::new();
        write_table(&mut buf, OutputFormat::Csv, &sample_meta(), &sample_table()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# command: simulate");
        assert_eq!(lines[1], "# model: sir");
        assert_eq!(lines[2], "# dt: 0.1");
        assert_eq!(lines[3], "region,value");
        assert_eq!(lines[4], "Bihar,5.33");
        assert!(!text.contains("generated_at"));
    }

    #[test]
    fn timestamp_appears_only_when_requested() {
        let mut buf = Vec::new();
        let meta = sample_meta().timestamped();
        write_table(&mut buf, OutputFormat::Csv, &meta, &sample_table()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("# generated_at: "));
    }

    #[test]
    fn json_round_trips_rows() {
        let mut buf = Vec::new();
        write_table(&mut buf, OutputFormat::Json, &sample_meta(), &sample_table()).unwrap();
        let doc: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(doc["meta"]["command"], "simulate");
        assert_eq!(doc["meta"]["parameters"]["model"], "sir");
        assert_eq!(doc["rows"][0]["region"], "Bihar");
        assert_eq!(doc["rows"][1]["value"], "6.0");
    }

    #[test]
    fn identical_inputs_emit_identical_bytes() {
        let emit = || {
            let mut buf = Vec::new();
            write_table(&mut buf, OutputFormat::Csv, &sample_meta(), &sample_table()).unwrap();
            buf
        };
        assert_eq!(emit(), emit());
    }

    #[test]
    fn trajectory_table_shape() {
        let params = ModelParams::new(1.0, 0.3).unwrap().with_alpha2(0.1);
        let init = CompartmentState::sir(990.0, 10.0, 0.0, 1000.0).unwrap();
        let traj = integrate(Model::Sir, &params, &init, 0.5, 2.0).unwrap();
        let table = trajectory_table(&traj);
        assert_eq!(table.columns, ["t", "susceptible", "infectious", "recovered"]);
        assert_eq!(table.rows.len(), traj.points.len());
        assert_eq!(table.rows[0][0], "0.0");
    }

    #[test]
    fn format_parsing() {
        assert_eq!("CSV".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!("json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("yaml".parse::<OutputFormat>().is_err());
    }
}
