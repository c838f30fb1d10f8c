//! Interval-based testing and fault tracing for spreadsheets.
//!
//! The pipeline evaluates a workbook twice: once with ordinary real
//! arithmetic and once with interval arithmetic over user-supplied expected
//! intervals. A comparator marks each cell by checking the computed value
//! against the expectation and the expectation against the computed
//! bounding interval. The tracer then walks from a marked cell back to the
//! faulty cell most likely to be the origin.
//!
//! ```
//! use sheetrace::{analyze, fixtures, parse_address, Analysis};
//!
//! let wb = fixtures::fig2_workbook();
//! let expected = fixtures::fig2_intervals();
//! let analysis = Analysis::run(&wb, &expected);
//! let trace = analysis.trace(parse_address("D9").unwrap()).unwrap();
//! assert_eq!(trace.most_influential.to_string(), "D6");
//! assert_eq!(analyze(&wb, &expected).summary.symptom, 3);
//! ```

pub mod address;
pub mod compare;
pub mod eval;
pub mod fixtures;
pub mod formula;
pub mod graph;
pub mod interval;
pub mod io;
pub mod report;
pub mod trace;
pub mod workbook;

pub use address::{format_address, parse_address, CellAddress, MalformedAddress};
pub use compare::{
    verify_cell, verify_workbook, Color, MarkSheet, Reason, State, VerificationStatus,
};
pub use eval::{
    eval_bounding, eval_discrete, BoundingSheet, EvalError, ExpectedSheet, SheetValues,
};
pub use formula::{parse_formula, print_formula, referenced_cells, Expr, FormulaError};
pub use graph::{build_graph, CircularReference, DependencyGraph};
pub use interval::{Interval, IntervalError, InvalidInterval};
pub use io::{load_intervals, load_workbook, LoadError};
pub use report::{analyze, Analysis, AnalysisReport, AnalysisTraceError, CellRecord};
pub use trace::{trace_most_influential, TraceError, TraceResult, TraceState, TraceStep};
pub use workbook::{CellContent, Formula, Workbook};
