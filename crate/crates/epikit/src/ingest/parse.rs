//! CSV parsing for the case dataset.
//!
//! Columns are matched by normalized header name (lowercased,
//! non-alphanumerics stripped), so column order and cosmetic header
//! differences do not matter. Unparseable optional fields degrade to
//! unknown/absent with a warning; a row without a usable patient number
//! is dropped with a warning.

use super::{
    CaseStatus, Gender, IngestError, ParseWarning, PatientRecord, TransmissionType,
};
use chrono::NaiveDate;
use std::collections::{HashMap, HashSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DateFormat {
    /// `DD/MM/YYYY`, as printed in the source dataset.
    #[default]
    DayMonthYear,
    /// `YYYY-MM-DD`, for clean test fixtures.
    Iso8601,
}

impl DateFormat {
    fn pattern(self) -> &'static str {
        match self {
            DateFormat::DayMonthYear => "%d/%m/%Y",
            DateFormat::Iso8601 => "%Y-%m-%d",
        }
    }

    fn parse(self, s: &str) -> Option<NaiveDate> {
        NaiveDate::parse_from_str(s, self.pattern()).ok()
    }

    pub fn format(self, d: NaiveDate) -> String {
        d.format(self.pattern()).to_string()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    pub date_format: DateFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Column {
    PatientNumber,
    StatePatientNumber,
    DateAnnounced,
    AgeBracket,
    Gender,
    DetectedCity,
    DetectedDistrict,
    DetectedState,
    StateCode,
    CurrentStatus,
    Notes,
    ContractedFrom,
    Nationality,
    TransmissionType,
    StatusChangeDate,
}

fn normalize_header(h: &str) -> String {
    h.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

fn identify_column(normalized: &str) -> Option<Column> {
    // The contracted-from header carries a "(Suspected)" suffix in the
    // source; match on prefix for that one.
    if normalized.starts_with("contractedfrom") {
        return Some(Column::ContractedFrom);
    }
    match normalized {
        "patientnumber" => Some(Column::PatientNumber),
        "statepatientnumber" => Some(Column::StatePatientNumber),
        "dateannounced" => Some(Column::DateAnnounced),
        "agebracket" | "age" => Some(Column::AgeBracket),
        "gender" => Some(Column::Gender),
        "detectedcity" => Some(Column::DetectedCity),
        "detecteddistrict" => Some(Column::DetectedDistrict),
        "detectedstate" => Some(Column::DetectedState),
        "statecode" => Some(Column::StateCode),
        "currentstatus" => Some(Column::CurrentStatus),
        "notes" => Some(Column::Notes),
        "nationality" => Some(Column::Nationality),
        "typeoftransmission" | "transmissiontype" => Some(Column::TransmissionType),
        "statuschangedate" => Some(Column::StatusChangeDate),
        _ => None,
    }
}

/// Parse the raw CSV text of a case dataset into records plus warnings.
pub fn parse_dataset(
    raw_text: &str,
    options: ParseOptions,
) -> Result<(Vec<PatientRecord>, Vec<ParseWarning>), IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(raw_text.as_bytes());

    let headers = reader.headers().map_err(|_| IngestError::MissingHeader)?;
    let mut columns: HashMap<Column, usize> = HashMap::new();
    for (idx, h) in headers.iter().enumerate() {
        if let Some(col) = identify_column(&normalize_header(h)) {
            columns.entry(col).or_insert(idx);
        }
    }
    if !columns.contains_key(&Column::PatientNumber) {
        return Err(IngestError::MissingHeader);
    }

    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let mut seen: HashSet<u32> = HashSet::new();

    for (row_idx, row) in reader.records().enumerate() {
        // header occupies line 1
        let line = row_idx as u64 + 2;
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                warnings.push(ParseWarning::new(Some(line), None, format!("bad row: {e}")));
                continue;
            }
        };
        let field = |col: Column| -> Option<&str> {
            columns
                .get(&col)
                .and_then(|&i| row.get(i))
                .map(str::trim)
                .filter(|s| !s.is_empty())
        };

        let patient_number = match field(Column::PatientNumber).and_then(|s| s.parse::<u32>().ok())
        {
            Some(n) if n >= 1 => n,
            _ => {
                warnings.push(ParseWarning::new(
                    Some(line),
                    Some("patient_number"),
                    "missing or invalid patient number; row dropped",
                ));
                continue;
            }
        };
        if !seen.insert(patient_number) {
            warnings.push(ParseWarning::new(
                Some(line),
                Some("patient_number"),
                format!("duplicate patient number {patient_number}; row dropped"),
            ));
            continue;
        }

        let date_announced = match field(Column::DateAnnounced)
            .and_then(|s| options.date_format.parse(s))
        {
            Some(d) => d,
            None => {
                warnings.push(ParseWarning::new(
                    Some(line),
                    Some("date_announced"),
                    "missing or invalid announcement date; row dropped",
                ));
                seen.remove(&patient_number);
                continue;
            }
        };

        let age_bracket = match field(Column::AgeBracket) {
            Some(s) => match s.parse::<u32>() {
                Ok(a) => Some(a),
                Err(_) => {
                    warnings.push(ParseWarning::new(
                        Some(line),
                        Some("age_bracket"),
                        format!("unparseable age bracket {s:?}"),
                    ));
                    None
                }
            },
            None => None,
        };

        let gender = match field(Column::Gender) {
            Some(s) if s.eq_ignore_ascii_case("f") => Gender::Female,
            Some(s) if s.eq_ignore_ascii_case("m") => Gender::Male,
            Some(s) => {
                warnings.push(ParseWarning::new(
                    Some(line),
                    Some("gender"),
                    format!("unrecognized gender {s:?}"),
                ));
                Gender::Unknown
            }
            None => Gender::Unknown,
        };

        let current_status = match field(Column::CurrentStatus) {
            Some(s) if s.eq_ignore_ascii_case("recovered") => CaseStatus::Recovered,
            Some(s) if s.eq_ignore_ascii_case("hospitalized") => CaseStatus::Hospitalized,
            Some(s) if s.eq_ignore_ascii_case("deceased") => CaseStatus::Deceased,
            Some(s) => {
                warnings.push(ParseWarning::new(
                    Some(line),
                    Some("current_status"),
                    format!("unrecognized status {s:?}"),
                ));
                CaseStatus::Unknown
            }
            None => CaseStatus::Unknown,
        };

        let transmission_type = match field(Column::TransmissionType) {
            Some(s) if s.eq_ignore_ascii_case("imported") => TransmissionType::Imported,
            Some(s) if s.eq_ignore_ascii_case("local") => TransmissionType::Local,
            Some(s) if s.eq_ignore_ascii_case("tbd") => TransmissionType::Unknown,
            Some(s) => {
                warnings.push(ParseWarning::new(
                    Some(line),
                    Some("transmission_type"),
                    format!("unrecognized transmission type {s:?}"),
                ));
                TransmissionType::Unknown
            }
            None => TransmissionType::Unknown,
        };

        let status_change_date = match field(Column::StatusChangeDate) {
            Some(s) => match options.date_format.parse(s) {
                Some(d) => Some(d),
                None => {
                    warnings.push(ParseWarning::new(
                        Some(line),
                        Some("status_change_date"),
                        format!("unparseable status change date {s:?}"),
                    ));
                    None
                }
            },
            None => None,
        };
        if let Some(d) = status_change_date {
            if d < date_announced {
                warnings.push(ParseWarning::new(
                    Some(line),
                    Some("status_change_date"),
                    "status change date precedes announcement date",
                ));
            }
        }

        let mut contracted_from = match field(Column::ContractedFrom) {
            Some(cell) => parse_contracted_from(cell, line, &mut warnings),
            None => Vec::new(),
        };
        // a self-reference is a row-level data error and is dropped here;
        // references to other unknown patients are judged later, once the
        // whole file is in, by the graph builder
        if contracted_from.contains(&patient_number) {
            warnings.push(ParseWarning::new(
                Some(line),
                Some("contracted_from"),
                format!("patient {patient_number} listed as their own infector"),
            ));
            contracted_from.retain(|&src| src != patient_number);
        }

        records.push(PatientRecord {
            patient_number,
            state_patient_number: field(Column::StatePatientNumber).map(str::to_owned),
            date_announced,
            age_bracket,
            gender,
            detected_city: field(Column::DetectedCity).map(str::to_owned),
            detected_district: field(Column::DetectedDistrict).map(str::to_owned),
            detected_state: field(Column::DetectedState).map(str::to_owned),
            state_code: field(Column::StateCode).map(str::to_owned),
            current_status,
            notes: field(Column::Notes).map(str::to_owned),
            contracted_from,
            nationality: field(Column::Nationality).map(str::to_owned),
            transmission_type,
            status_change_date,
        });
    }

    if records.is_empty() {
        // Zero data rows, or none survived validation.
        return Err(IngestError::EmptyInput);
    }
    Ok((records, warnings))
}

/// Split a contracted-from cell into patient numbers.
///
/// Cells hold one or more comma/space-separated tokens such as `P6` or
/// `P6, P7`; a bare number is accepted too.
fn parse_contracted_from(cell: &str, line: u64, warnings: &mut Vec<ParseWarning>) -> Vec<u32> {
    let mut out = Vec::new();
    for token in cell.split(|c: char| c == ',' || c.is_whitespace()) {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        let digits = token.strip_prefix(['P', 'p']).unwrap_or(token);
        match digits.parse::<u32>() {
            Ok(n) => out.push(n),
            Err(_) => warnings.push(ParseWarning::new(
                Some(line),
                Some("contracted_from"),
                format!("unparseable contact token {token:?}"),
            )),
        }
    }
    out
}

/// Serialize records back to CSV in the canonical column order.
///
/// Re-parsing the output with the same options yields identical records.
pub fn records_to_csv(records: &[PatientRecord], options: ParseOptions) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "Patient Number",
        "State Patient Number",
        "Date Announced",
        "Age Bracket",
        "Gender",
        "Detected City",
        "Detected District",
        "Detected State",
        "State code",
        "Current Status",
        "Notes",
        "Contracted from which Patient (Suspected)",
        "Nationality",
        "Type of transmission",
        "Status Change Date",
    ])
    .expect("csv header");
    for r in records {
        let gender = match r.gender {
            Gender::Female => "F",
            Gender::Male => "M",
            Gender::Unknown => "",
        };
        let status = match r.current_status {
            CaseStatus::Recovered => "Recovered",
            CaseStatus::Hospitalized => "Hospitalized",
            CaseStatus::Deceased => "Deceased",
            CaseStatus::Unknown => "",
        };
        let transmission = match r.transmission_type {
            TransmissionType::Imported => "Imported",
            TransmissionType::Local => "Local",
            TransmissionType::Unknown => "TBD",
        };
        let contracted = r
            .contracted_from
            .iter()
            .map(|p| format!("P{p}"))
            .collect::<Vec<_>>()
            .join(", ");
        w.write_record([
            r.patient_number.to_string(),
            r.state_patient_number.clone().unwrap_or_default(),
            options.date_format.format(r.date_announced),
            r.age_bracket.map(|a| a.to_string()).unwrap_or_default(),
            gender.to_string(),
            r.detected_city.clone().unwrap_or_default(),
            r.detected_district.clone().unwrap_or_default(),
            r.detected_state.clone().unwrap_or_default(),
            r.state_code.clone().unwrap_or_default(),
            status.to_string(),
            r.notes.clone().unwrap_or_default(),
            contracted,
            r.nationality.clone().unwrap_or_default(),
            transmission.to_string(),
            r.status_change_date
                .map(|d| options.date_format.format(d))
                .unwrap_or_default(),
        ])
        .expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8")
}
