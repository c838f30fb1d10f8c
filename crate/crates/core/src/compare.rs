//! The comparator: marks cells by comparing the computed value, the user's
//! expected interval and the bounding interval.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::address::CellAddress;
use crate::eval::{BoundingSheet, ExpectedSheet, SheetValues};
use crate::graph::DependencyGraph;
use crate::interval::Interval;
use crate::workbook::{CellContent, Workbook};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum State {
    Symptom,
    NoSymptom,
    Unchecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Reason {
    /// The computed value lies outside the expected interval.
    ValueOutsideExpected,
    /// The expected interval does not meet the bounding interval.
    ExpectationUnreasonable,
    /// An input cell's value lies outside its attached domain.
    InputOutsideInterval,
    /// Interval evaluation failed, so reasonableness was not checked.
    BoundingError,
    /// Discrete evaluation failed, so the cell has no value to check.
    EvaluationError,
}

/// Display color of a status in reports and the grid UI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Yellow,
    Neutral,
}

impl State {
    pub fn color(self) -> Color {
        match self {
            State::Symptom => Color::Red,
            State::NoSymptom => Color::Yellow,
            State::Unchecked => Color::Neutral,
        }
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationStatus {
    pub state: State,
    pub reasons: BTreeSet<Reason>,
}

impl VerificationStatus {
    pub fn unchecked() -> Self {
        Self {
            state: State::Unchecked,
            reasons: BTreeSet::new(),
        }
    }

    pub fn no_symptom() -> Self {
        Self {
            state: State::NoSymptom,
            reasons: BTreeSet::new(),
        }
    }

    pub fn symptom(reasons: impl IntoIterator<Item = Reason>) -> Self {
        let reasons: BTreeSet<Reason> = reasons.into_iter().collect();
        debug_assert!(!reasons.is_empty());
        Self {
            state: State::Symptom,
            reasons,
        }
    }

    pub fn is_symptom(&self) -> bool {
        self.state == State::Symptom
    }
}

/// Mark a single cell.
///
/// `value` is `None` when the cell is text or its formula failed to
/// evaluate. `bounding` is `None` for non-formula cells and for formula
/// cells whose interval evaluation failed.
pub fn verify_cell(
    content: &CellContent,
    value: Option<f64>,
    expected: Option<Interval>,
    bounding: Option<Interval>,
) -> VerificationStatus {
    let bounding_failed = content.is_formula() && bounding.is_none();
    let Some(expected) = expected else {
        let mut status = VerificationStatus::unchecked();
        if bounding_failed {
            status.reasons.insert(Reason::BoundingError);
        }
        return status;
    };

    if !content.is_formula() {
        return match value {
            Some(v) if expected.contains_approx(v) => VerificationStatus::no_symptom(),
            _ => VerificationStatus::symptom([Reason::InputOutsideInterval]),
        };
    }

    let mut reasons = BTreeSet::new();
    match value {
        Some(v) if expected.contains_approx(v) => {}
        Some(_) => {
            reasons.insert(Reason::ValueOutsideExpected);
        }
        None => {
            reasons.insert(Reason::EvaluationError);
        }
    }
    match bounding {
        Some(b) if expected.intersects_approx(&b) => {}
        Some(_) => {
            reasons.insert(Reason::ExpectationUnreasonable);
        }
        None => {}
    }

    let state = if reasons.is_empty() {
        State::NoSymptom
    } else {
        State::Symptom
    };
    if bounding_failed {
        reasons.insert(Reason::BoundingError);
    }
    VerificationStatus { state, reasons }
}

/// Statuses for every cell of interest.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MarkSheet {
    marks: BTreeMap<CellAddress, VerificationStatus>,
}

impl MarkSheet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, addr: CellAddress, status: VerificationStatus) {
        self.marks.insert(addr.relative(), status);
    }

    pub fn get(&self, addr: CellAddress) -> Option<&VerificationStatus> {
        self.marks.get(&addr)
    }

    /// Cells missing from the sheet count as unchecked.
    pub fn state(&self, addr: CellAddress) -> State {
        self.marks.get(&addr).map_or(State::Unchecked, |s| s.state)
    }

    pub fn is_symptom(&self, addr: CellAddress) -> bool {
        self.state(addr) == State::Symptom
    }

    pub fn iter(&self) -> impl Iterator<Item = (CellAddress, &VerificationStatus)> {
        self.marks.iter().map(|(a, s)| (*a, s))
    }

    pub fn with_state(&self, state: State) -> BTreeSet<CellAddress> {
        self.iter()
            .filter(|(_, s)| s.state == state)
            .map(|(a, _)| a)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.marks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marks.is_empty()
    }
}

impl FromIterator<(CellAddress, VerificationStatus)> for MarkSheet {
    fn from_iter<I: IntoIterator<Item = (CellAddress, VerificationStatus)>>(iter: I) -> Self {
        let mut sheet = MarkSheet::new();
        for (a, s) in iter {
            sheet.insert(a, s);
        }
        sheet
    }
}

/// Cells the comparator reports on: populated cells, empty cells read by
/// some formula, and empty cells carrying an interval.
pub fn cells_of_interest(
    wb: &Workbook,
    g: &DependencyGraph,
    expected: &ExpectedSheet,
) -> BTreeSet<CellAddress> {
    let mut cells: BTreeSet<CellAddress> = wb.iter().map(|(a, _)| a).collect();
    cells.extend(g.nodes().iter().copied());
    cells.extend(expected.iter().map(|(a, _)| a));
    cells
}

pub fn verify_workbook(
    wb: &Workbook,
    g: &DependencyGraph,
    values: &SheetValues,
    expected: &ExpectedSheet,
    bounding: &BoundingSheet,
) -> MarkSheet {
    cells_of_interest(wb, g, expected)
        .into_iter()
        .map(|cell| {
            let content = wb.get(cell);
            let value = match content {
                CellContent::Empty => Some(0.0),
                _ => values.get(cell),
            };
            let status = verify_cell(content, value, expected.get(cell), bounding.get(cell));
            (cell, status)
        })
        .collect()
}
