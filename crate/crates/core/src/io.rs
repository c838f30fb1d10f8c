//! JSON file formats for workbooks and interval sheets.
//!
//! Workbook:
//!
//! ```json
//! { "cells": { "A1": {"text": "Cost share"}, "B4": {"number": 48}, "G4": {"formula": "=SUM(D4:F4)"} } }
//! ```
//!
//! Intervals:
//!
//! ```json
//! { "D5": [4000, 4250] }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::address::{parse_address, CellAddress};
use crate::eval::ExpectedSheet;
use crate::interval::Interval;
use crate::workbook::{CellContent, Formula, Workbook};

/// One cell as written in a workbook file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum CellSpec {
    Text(String),
    Number(f64),
    Formula(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkbookDocument {
    pub cells: BTreeMap<String, CellSpec>,
}

pub type IntervalDocument = BTreeMap<String, [f64; 2]>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormatProblem {
    /// The offending cell key, when the problem is tied to one.
    pub cell: Option<String>,
    pub detail: String,
}

impl fmt::Display for FormatProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.cell {
            Some(cell) => write!(f, "{cell}: {}", self.detail),
            None => f.write_str(&self.detail),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("format error: {}", join(.0))]
    Format(Vec<FormatProblem>),
    #[error("invalid interval at {0}: lower bound exceeds upper bound")]
    InvalidInterval(CellAddress),
}

fn join(problems: &[FormatProblem]) -> String {
    problems
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl LoadError {
    fn whole_file(detail: impl fmt::Display) -> Self {
        LoadError::Format(vec![FormatProblem {
            cell: None,
            detail: detail.to_string(),
        }])
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::FileNotFound(_) => "FileNotFound",
            LoadError::Io { .. } => "IoError",
            LoadError::Format(_) => "FormatError",
            LoadError::InvalidInterval(_) => "InvalidInterval",
        }
    }
}

/// Convert one cell spec into content, or describe why it is invalid.
pub fn cell_content(spec: &CellSpec) -> Result<CellContent, String> {
    match spec {
        CellSpec::Text(t) => Ok(CellContent::Text(t.clone())),
        CellSpec::Number(v) if v.is_finite() => Ok(CellContent::Number(*v)),
        CellSpec::Number(_) => Err("number is not finite".into()),
        CellSpec::Formula(src) => Formula::parse(src)
            .map(CellContent::Formula)
            .map_err(|e| e.to_string()),
    }
}

fn read(path: &Path) -> Result<String, LoadError> {
    std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            LoadError::FileNotFound(path.to_path_buf())
        } else {
            LoadError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

/// Build a workbook, collecting every bad cell before failing.
pub fn workbook_from_document(doc: &WorkbookDocument) -> Result<Workbook, LoadError> {
    let mut wb = Workbook::new();
    let mut problems = Vec::new();
    for (key, spec) in &doc.cells {
        let problem = |detail: String| FormatProblem {
            cell: Some(key.clone()),
            detail,
        };
        let addr = match parse_address(key) {
            Ok(a) => a,
            Err(e) => {
                problems.push(problem(e.to_string()));
                continue;
            }
        };
        match cell_content(spec) {
            Ok(content) => {
                if wb.is_populated(addr) {
                    problems.push(problem(format!("duplicate entry for {}", addr.relative())));
                } else {
                    wb.set(addr, content).expect("finite number checked above");
                }
            }
            Err(detail) => problems.push(problem(detail)),
        }
    }
    if problems.is_empty() {
        Ok(wb)
    } else {
        Err(LoadError::Format(problems))
    }
}

pub fn workbook_from_json(text: &str) -> Result<Workbook, LoadError> {
    let doc: WorkbookDocument = serde_json::from_str(text).map_err(LoadError::whole_file)?;
    workbook_from_document(&doc)
}

pub fn load_workbook(path: impl AsRef<Path>) -> Result<Workbook, LoadError> {
    workbook_from_json(&read(path.as_ref())?)
}

pub fn intervals_from_document(doc: &IntervalDocument) -> Result<ExpectedSheet, LoadError> {
    let mut sheet = ExpectedSheet::new();
    let mut problems = Vec::new();
    for (key, &[lo, hi]) in doc {
        let addr = match parse_address(key) {
            Ok(a) => a,
            Err(e) => {
                problems.push(FormatProblem {
                    cell: Some(key.clone()),
                    detail: e.to_string(),
                });
                continue;
            }
        };
        match Interval::new(lo, hi) {
            Ok(iv) => {
                sheet.insert(addr, iv);
            }
            Err(_) => return Err(LoadError::InvalidInterval(addr.relative())),
        }
    }
    if problems.is_empty() {
        Ok(sheet)
    } else {
        Err(LoadError::Format(problems))
    }
}

pub fn intervals_from_json(text: &str) -> Result<ExpectedSheet, LoadError> {
    let doc: IntervalDocument = serde_json::from_str(text).map_err(LoadError::whole_file)?;
    intervals_from_document(&doc)
}

pub fn load_intervals(path: impl AsRef<Path>) -> Result<ExpectedSheet, LoadError> {
    intervals_from_json(&read(path.as_ref())?)
}

pub fn workbook_document(wb: &Workbook) -> WorkbookDocument {
    let cells = wb
        .iter()
        .filter_map(|(addr, content)| {
            let spec = match content {
                CellContent::Empty => return None,
                CellContent::Number(v) => CellSpec::Number(*v),
                CellContent::Text(t) => CellSpec::Text(t.clone()),
                CellContent::Formula(f) => CellSpec::Formula(f.source().to_string()),
            };
            Some((addr.to_string(), spec))
        })
        .collect();
    WorkbookDocument { cells }
}

pub fn intervals_document(expected: &ExpectedSheet) -> IntervalDocument {
    expected
        .iter()
        .map(|(a, iv)| (a.to_string(), [iv.lo(), iv.hi()]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_documents() {
        assert!(workbook_from_json(r#"{"cells": {}}"#).unwrap().is_empty());
        assert!(intervals_from_json("{}").unwrap().is_empty());
    }

    #[test]
    fn truncated_formula_names_cell_and_position() {
        let err = workbook_from_json(r#"{"cells": {"B2": {"formula": "=SUM("}}}"#).unwrap_err();
        let LoadError::Format(problems) = &err else {
            panic!("{err:?}")
        };
        assert_eq!(problems.len(), 1);
        assert_eq!(problems[0].cell.as_deref(), Some("B2"));
        assert!(
            problems[0].detail.contains("at 5"),
            "{}",
            problems[0].detail
        );
    }

    #[test]
    fn every_bad_cell_is_listed() {
        let text = r#"{"cells": {
            "A1": {"formula": "=1+"},
            "A2": {"number": 3},
            "9Z": {"number": 1},
            "B1": {"formula": "=A1:A2"}
        }}"#;
        let LoadError::Format(problems) = workbook_from_json(text).unwrap_err() else {
            panic!()
        };
        let cells: Vec<_> = problems.iter().filter_map(|p| p.cell.as_deref()).collect();
        assert_eq!(cells, ["9Z", "A1", "B1"]);
    }

    #[test]
    fn duplicate_spellings_are_rejected() {
        let text = r#"{"cells": {"A1": {"number": 1}, "$A$1": {"number": 2}}}"#;
        assert!(matches!(
            workbook_from_json(text),
            Err(LoadError::Format(_))
        ));
    }

    #[test]
    fn malformed_json_and_unknown_fields() {
        assert!(matches!(workbook_from_json("{"), Err(LoadError::Format(_))));
        assert!(matches!(
            workbook_from_json(r#"{"cells": {"A1": {"bool": true}}}"#),
            Err(LoadError::Format(_))
        ));
        assert!(matches!(
            intervals_from_json(r#"{"A1": [1]}"#),
            Err(LoadError::Format(_))
        ));
    }

    #[test]
    fn reversed_interval_is_invalid() {
        let err = intervals_from_json(r#"{"D5": [10, 5]}"#).unwrap_err();
        assert!(matches!(err, LoadError::InvalidInterval(a) if a.to_string() == "D5"));
    }

    #[test]
    fn missing_file() {
        let err = load_workbook("/nonexistent/fig.wb.json").unwrap_err();
        assert!(matches!(err, LoadError::FileNotFound(_)));
        assert_eq!(err.code(), "FileNotFound");
    }

    #[test]
    fn document_round_trip() {
        let wb = crate::fixtures::fig2_workbook();
        let doc = workbook_document(&wb);
        assert_eq!(workbook_from_document(&doc).unwrap(), wb);
        let e = crate::fixtures::fig2_intervals();
        assert_eq!(intervals_from_document(&intervals_document(&e)).unwrap(), e);
    }
}
