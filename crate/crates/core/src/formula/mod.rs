//! The formula language: a small arithmetic subset with cell references,
//! rectangular ranges and `SUM`.

mod ast;
mod parser;
mod printer;

use std::collections::BTreeSet;

pub use ast::{BinaryOp, CellRange, Expr, Function, UnaryOp};
pub use parser::{parse_formula, FormulaError, MAX_DEPTH, MAX_RANGE_CELLS};
pub use printer::print_formula;

use crate::address::CellAddress;

/// Cells read by `expr`; see [`Expr::referenced_cells`].
pub fn referenced_cells(expr: &Expr) -> BTreeSet<CellAddress> {
    expr.referenced_cells()
}
