//! Patient-record ingestion: CSV parsing, validation, contact-graph
//! construction, and per-day case counting.

mod daily;
mod graph;
mod parse;

pub use daily::{daily_counts, DailyCount};
pub use graph::{build_contact_graph, ContactGraph};
pub use parse::{parse_dataset, records_to_csv, DateFormat, ParseOptions};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fatal ingestion failures. Anything recoverable becomes a [`ParseWarning`].
#[derive(Debug, Error)]
pub enum IngestError {
    #[error("no recognizable header row (expected a 'Patient Number' column)")]
    MissingHeader,
    #[error("input contains no data rows")]
    EmptyInput,
    #[error("contact graph contains a cycle: {}", format_chain(.chain))]
    CycleDetected { chain: Vec<u32> },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_chain(chain: &[u32]) -> String {
    chain
        .iter()
        .map(|p| format!("P{p}"))
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// Non-fatal issue found while parsing or linking records.
///
/// Serializes to one JSON object per warning for machine-readable logs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    /// 1-based line number in the source file, when attributable.
    pub line: Option<u64>,
    pub field: Option<String>,
    pub message: String,
}

impl std::fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "{field}: ")?;
        }
        write!(f, "{}", self.message)
    }
}

impl ParseWarning {
    pub(crate) fn new(line: Option<u64>, field: Option<&str>, message: impl Into<String>) -> Self {
        ParseWarning {
            line,
            field: field.map(str::to_owned),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Gender {
    Female,
    Male,
    #[default]
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum CaseStatus {
    Recovered,
    Hospitalized,
    Deceased,
    #[default]
    Unknown,
}

impl CaseStatus {
    /// Blank/unknown status counts as an active case, same as hospitalized.
    pub fn is_active(self) -> bool {
        matches!(self, CaseStatus::Hospitalized | CaseStatus::Unknown)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum TransmissionType {
    Imported,
    Local,
    #[default]
    Unknown,
}

/// One row of the case dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatientRecord {
    pub patient_number: u32,
    pub state_patient_number: Option<String>,
    pub date_announced: NaiveDate,
    pub age_bracket: Option<u32>,
    pub gender: Gender,
    pub detected_city: Option<String>,
    pub detected_district: Option<String>,
    pub detected_state: Option<String>,
    pub state_code: Option<String>,
    pub current_status: CaseStatus,
    pub notes: Option<String>,
    /// Patient numbers this case is suspected to have contracted from.
    pub contracted_from: Vec<u32>,
    pub nationality: Option<String>,
    pub transmission_type: TransmissionType,
    pub status_change_date: Option<NaiveDate>,
}

impl PatientRecord {
    /// Region identity: state code when present, else the detected-state name.
    pub fn region(&self) -> Option<&str> {
        self.state_code
            .as_deref()
            .or(self.detected_state.as_deref())
    }

    /// Date at which a recovery/death takes effect; falls back to the
    /// announcement date when no status-change date was recorded.
    pub fn status_date(&self) -> NaiveDate {
        self.status_change_date.unwrap_or(self.date_announced)
    }
}
