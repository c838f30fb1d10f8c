//! The full analysis pipeline and the report document it produces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::address::CellAddress;
use crate::compare::{cells_of_interest, verify_workbook, Color, MarkSheet, Reason, State};
use crate::eval::{eval_bounding, eval_discrete, BoundingSheet, ExpectedSheet, SheetValues};
use crate::graph::{CircularReference, DependencyGraph};
use crate::interval::Interval;
use crate::io::{intervals_document, workbook_document};
use crate::trace::{trace_most_influential, TraceError, TraceResult};
use crate::workbook::{CellContent, Workbook};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything derived from one (workbook, expected sheet) pair.
#[derive(Debug, Clone)]
pub struct Analysis {
    /// `Err` when the workbook contains a circular reference; the other
    /// artifacts are then computed against an edge-free graph.
    pub graph: Result<DependencyGraph, CircularReference>,
    pub values: SheetValues,
    pub bounding: BoundingSheet,
    pub marks: MarkSheet,
}

impl Analysis {
    pub fn run(wb: &Workbook, expected: &ExpectedSheet) -> Self {
        let graph = DependencyGraph::build(wb);
        let (values, bounding, marks) = match &graph {
            Ok(g) => {
                let values = eval_discrete(wb, g);
                let bounding = eval_bounding(wb, g, expected, &values);
                let marks = verify_workbook(wb, g, &values, expected, &bounding);
                (values, bounding, marks)
            }
            Err(_) => {
                // Literal cells still have values; formulas get none.
                let g = DependencyGraph::default();
                let values = eval_discrete(wb, &g);
                let bounding = BoundingSheet::default();
                let marks = verify_workbook(wb, &g, &values, expected, &bounding);
                (values, bounding, marks)
            }
        };
        Self {
            graph,
            values,
            bounding,
            marks,
        }
    }

    pub fn trace(&self, query: CellAddress) -> Result<TraceResult, AnalysisTraceError> {
        let g = self
            .graph
            .as_ref()
            .map_err(|c| AnalysisTraceError::Circular(c.clone()))?;
        trace_most_influential(g, &self.marks, query).map_err(AnalysisTraceError::Trace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisTraceError {
    #[error(transparent)]
    Circular(CircularReference),
    #[error(transparent)]
    Trace(TraceError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub address: CellAddress,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Value with two decimals and thousands separators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<Interval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounding: Option<Interval>,
    pub status: State,
    pub reasons: BTreeSet<Reason>,
    pub color: Color,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub symptom: usize,
    pub no_symptom: usize,
    pub unchecked: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportError {
    pub code: String,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cell: Option<CellAddress>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub engine_version: String,
    /// SHA-256 over the canonical workbook and interval documents.
    pub workbook_digest: String,
    /// RFC 3339; absent in unstamped reports so output is reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub summary: Summary,
    pub errors: Vec<ReportError>,
    pub cells: Vec<CellRecord>,
}

impl AnalysisReport {
    pub fn stamped(mut self, timestamp: impl Into<String>) -> Self {
        self.timestamp = Some(timestamp.into());
        self
    }

    pub fn cell(&self, addr: CellAddress) -> Option<&CellRecord> {
        self.cells
            .binary_search_by(|r| r.address.cmp(&addr))
            .ok()
            .map(|i| &self.cells[i])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Hex SHA-256 of the canonical JSON of both input documents.
pub fn digest(wb: &Workbook, expected: &ExpectedSheet) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(&workbook_document(wb)).expect("serializes"));
    hasher.update([0u8]);
    hasher.update(serde_json::to_vec(&intervals_document(expected)).expect("serializes"));
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Fixed two-decimal rendering with comma thousands separators.
pub fn format_display(v: f64) -> String {
    let fixed = format!("{:.2}", v.abs());
    let (int, frac) = fixed.split_once('.').expect("fixed has a point");
    let mut grouped = String::new();
    for (i, ch) in int.chars().enumerate() {
        if i > 0 && (int.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let sign = if v < 0.0 && fixed.bytes().any(|b| b.is_ascii_digit() && b != b'0') {
        "-"
    } else {
        ""
    };
    format!("{sign}{grouped}.{frac}")
}

/// Run the whole pipeline and assemble an unstamped report.
pub fn analyze(wb: &Workbook, expected: &ExpectedSheet) -> AnalysisReport {
    report_from(wb, expected, &Analysis::run(wb, expected))
}

pub fn report_from(wb: &Workbook, expected: &ExpectedSheet, analysis: &Analysis) -> AnalysisReport {
    let mut errors = Vec::new();
    if let Err(cycle) = &analysis.graph {
        errors.push(ReportError {
            code: "CircularReference".into(),
            detail: cycle.to_string(),
            cell: cycle.cycle.first().copied(),
        });
    }
    for err in analysis.values.errors().values() {
        errors.push(ReportError {
            code: err.code().into(),
            detail: err.to_string(),
            cell: Some(err.cell()),
        });
    }
    for err in analysis.bounding.errors().values() {
        errors.push(ReportError {
            code: err.code().into(),
            detail: format!("bounding: {err}"),
            cell: Some(err.cell()),
        });
    }

    let empty_graph = DependencyGraph::default();
    let graph = analysis.graph.as_ref().unwrap_or(&empty_graph);
    let mut summary = Summary::default();
    let cells = cells_of_interest(wb, graph, expected)
        .into_iter()
        .map(|address| {
            let content = wb.get(address);
            let status = analysis
                .marks
                .get(address)
                .cloned()
                .unwrap_or_else(crate::compare::VerificationStatus::unchecked);
            match status.state {
                State::Symptom => summary.symptom += 1,
                State::NoSymptom => summary.no_symptom += 1,
                State::Unchecked => summary.unchecked += 1,
            }
            let value = match content {
                CellContent::Empty => Some(0.0),
                _ => analysis.values.get(address),
            };
            let error = analysis
                .values
                .error(address)
                .or_else(|| analysis.bounding.error(address))
                .map(|e| e.to_string())
                .or_else(|| {
                    (content.is_formula() && analysis.graph.is_err())
                        .then(|| "not evaluated: circular reference".to_string())
                });
            CellRecord {
                address,
                kind: content.kind().to_string(),
                formula: content.formula().map(|f| f.source().to_string()),
                text: match content {
                    CellContent::Text(t) => Some(t.clone()),
                    _ => None,
                },
                value,
                display: value.map(format_display),
                expected: expected.get(address),
                bounding: analysis.bounding.get(address),
                color: status.state.color(),
                status: status.state,
                reasons: status.reasons,
                error,
            }
        })
        .collect();

    AnalysisReport {
        engine_version: ENGINE_VERSION.to_string(),
        workbook_digest: digest(wb, expected),
        timestamp: None,
        summary,
        errors,
        cells,
    }
}
