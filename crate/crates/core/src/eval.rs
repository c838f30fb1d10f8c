//! Evaluation of the ordinary sheet (discrete reals) and the bounding
//! sheet (intervals).
//!
//! Both passes share one expression walker, generic over the value domain.
//! Bounding evaluation is one-level: each referenced cell contributes its
//! attached expected interval, or else its discrete value widened to a
//! width-zero interval. A precedent's own bounding interval is never used.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::address::CellAddress;
use crate::formula::{BinaryOp, Expr, Function, UnaryOp};
use crate::graph::DependencyGraph;
use crate::interval::{Interval, IntervalError};
use crate::workbook::{CellContent, Workbook};

/// Why a single formula cell could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "code", rename_all = "PascalCase")]
pub enum EvalError {
    #[error("{cell} reads text cell {source_cell} as a number")]
    TypeError {
        cell: CellAddress,
        source_cell: CellAddress,
    },
    #[error("{cell} divides by zero")]
    DivisionByZero { cell: CellAddress },
    #[error("{cell} overflows the finite range")]
    Overflow { cell: CellAddress },
    #[error("divisor interval in {cell} contains zero")]
    DivisorStraddlesZero { cell: CellAddress },
    #[error("{cell} reads {source_cell}, which has no value")]
    Upstream {
        cell: CellAddress,
        source_cell: CellAddress,
    },
}

impl EvalError {
    pub fn cell(&self) -> CellAddress {
        match *self {
            EvalError::TypeError { cell, .. }
            | EvalError::DivisionByZero { cell }
            | EvalError::Overflow { cell }
            | EvalError::DivisorStraddlesZero { cell }
            | EvalError::Upstream { cell, .. } => cell,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            EvalError::TypeError { .. } => "TypeError",
            EvalError::DivisionByZero { .. } => "DivisionByZero",
            EvalError::Overflow { .. } => "Overflow",
            EvalError::DivisorStraddlesZero { .. } => "DivisorStraddlesZero",
            EvalError::Upstream { .. } => "Upstream",
        }
    }
}

/// Error raised while walking one expression, before the cell is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fault {
    Text(CellAddress),
    Missing(CellAddress),
    DivByZero,
    Overflow,
    Straddle,
}

impl Fault {
    fn at(self, cell: CellAddress) -> EvalError {
        match self {
            Fault::Text(source_cell) => EvalError::TypeError { cell, source_cell },
            Fault::Missing(source_cell) => EvalError::Upstream { cell, source_cell },
            Fault::DivByZero => EvalError::DivisionByZero { cell },
            Fault::Overflow => EvalError::Overflow { cell },
            Fault::Straddle => EvalError::DivisorStraddlesZero { cell },
        }
    }
}

impl From<IntervalError> for Fault {
    fn from(e: IntervalError) -> Self {
        match e {
            IntervalError::Overflow => Fault::Overflow,
            IntervalError::DivisorStraddlesZero => Fault::Straddle,
        }
    }
}

/// What a referenced cell contributes to an expression.
enum Operand<T> {
    Value(T),
    /// Text: skipped inside `SUM`, a type error elsewhere.
    Text,
    /// The cell has no value because its own evaluation failed.
    Missing,
}

trait Domain: Copy {
    fn lit(v: f64) -> Self;
    fn zero() -> Self;
    fn neg(self) -> Self;
    fn binary(op: BinaryOp, a: Self, b: Self) -> Result<Self, Fault>;
}

impl Domain for f64 {
    fn lit(v: f64) -> Self {
        v
    }

    fn zero() -> Self {
        0.0
    }

    fn neg(self) -> Self {
        -self
    }

    fn binary(op: BinaryOp, a: Self, b: Self) -> Result<Self, Fault> {
        let r = match op {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div if b == 0.0 => return Err(Fault::DivByZero),
            BinaryOp::Div => a / b,
        };
        if r.is_finite() {
            Ok(r)
        } else {
            Err(Fault::Overflow)
        }
    }
}

impl Domain for Interval {
    fn lit(v: f64) -> Self {
        Interval::degenerate(v)
    }

    fn zero() -> Self {
        Interval::ZERO
    }

    fn neg(self) -> Self {
        Interval::neg(self)
    }

    fn binary(op: BinaryOp, a: Self, b: Self) -> Result<Self, Fault> {
        Ok(match op {
            BinaryOp::Add => a.add(b)?,
            BinaryOp::Sub => a.sub(b)?,
            BinaryOp::Mul => a.mul(b)?,
            BinaryOp::Div => a.div(b)?,
        })
    }
}

fn walk<T: Domain>(expr: &Expr, lookup: &impl Fn(CellAddress) -> Operand<T>) -> Result<T, Fault> {
    match expr {
        Expr::Number(v) => Ok(T::lit(*v)),
        Expr::Cell(addr) => match lookup(addr.relative()) {
            Operand::Value(v) => Ok(v),
            Operand::Text => Err(Fault::Text(addr.relative())),
            Operand::Missing => Err(Fault::Missing(addr.relative())),
        },
        // The parser only places ranges under SUM, handled below.
        Expr::Range(_) => unreachable!("range outside aggregate"),
        Expr::Unary {
            op: UnaryOp::Neg,
            operand,
        } => Ok(walk(operand, lookup)?.neg()),
        Expr::Binary { op, lhs, rhs } => {
            let a = walk(lhs, lookup)?;
            let b = walk(rhs, lookup)?;
            T::binary(*op, a, b)
        }
        Expr::Call {
            func: Function::Sum,
            args,
        } => {
            let mut acc = T::zero();
            for arg in args {
                match arg {
                    Expr::Range(range) => {
                        for cell in range.cells() {
                            match lookup(cell) {
                                Operand::Value(v) => acc = T::binary(BinaryOp::Add, acc, v)?,
                                Operand::Text => {}
                                Operand::Missing => return Err(Fault::Missing(cell)),
                            }
                        }
                    }
                    // A text cell named directly still counts as a skip.
                    Expr::Cell(addr) => match lookup(addr.relative()) {
                        Operand::Value(v) => acc = T::binary(BinaryOp::Add, acc, v)?,
                        Operand::Text => {}
                        Operand::Missing => return Err(Fault::Missing(addr.relative())),
                    },
                    other => acc = T::binary(BinaryOp::Add, acc, walk(other, lookup)?)?,
                }
            }
            Ok(acc)
        }
    }
}

/// Discrete values of the ordinary sheet.
///
/// Number cells carry their literal, formula cells their computed value.
/// Formula cells that failed to evaluate appear in `errors` instead.
/// Empty cells read as 0 and are not stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SheetValues {
    values: BTreeMap<CellAddress, f64>,
    errors: BTreeMap<CellAddress, EvalError>,
}

impl SheetValues {
    pub fn get(&self, addr: CellAddress) -> Option<f64> {
        self.values.get(&addr).copied()
    }

    pub fn error(&self, addr: CellAddress) -> Option<&EvalError> {
        self.errors.get(&addr)
    }

    pub fn values(&self) -> &BTreeMap<CellAddress, f64> {
        &self.values
    }

    pub fn errors(&self) -> &BTreeMap<CellAddress, EvalError> {
        &self.errors
    }

    /// The first failure in row-major order, if any.
    pub fn first_error(&self) -> Option<&EvalError> {
        self.errors.values().next()
    }
}

/// Sparse user-attached intervals: input domains on input cells, expected
/// outcomes on formula cells.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExpectedSheet {
    #[serde(flatten)]
    intervals: BTreeMap<CellAddress, Interval>,
}

impl ExpectedSheet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, addr: CellAddress) -> Option<Interval> {
        self.intervals.get(&addr).copied()
    }

    pub fn insert(&mut self, addr: CellAddress, iv: Interval) -> Option<Interval> {
        self.intervals.insert(addr.relative(), iv)
    }

    pub fn remove(&mut self, addr: CellAddress) -> Option<Interval> {
        self.intervals.remove(&addr)
    }

    pub fn iter(&self) -> impl Iterator<Item = (CellAddress, Interval)> + '_ {
        self.intervals.iter().map(|(a, i)| (*a, *i))
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

impl FromIterator<(CellAddress, Interval)> for ExpectedSheet {
    fn from_iter<I: IntoIterator<Item = (CellAddress, Interval)>>(iter: I) -> Self {
        let mut sheet = ExpectedSheet::new();
        for (a, iv) in iter {
            sheet.insert(a, iv);
        }
        sheet
    }
}

/// Bounding intervals of formula cells. A cell whose interval evaluation
/// failed has an entry in `errors` and none in `intervals`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundingSheet {
    intervals: BTreeMap<CellAddress, Interval>,
    errors: BTreeMap<CellAddress, EvalError>,
}

impl BoundingSheet {
    pub fn get(&self, addr: CellAddress) -> Option<Interval> {
        self.intervals.get(&addr).copied()
    }

    pub fn error(&self, addr: CellAddress) -> Option<&EvalError> {
        self.errors.get(&addr)
    }

    pub fn intervals(&self) -> &BTreeMap<CellAddress, Interval> {
        &self.intervals
    }

    pub fn errors(&self) -> &BTreeMap<CellAddress, EvalError> {
        &self.errors
    }
}

/// Evaluate every formula in dependency order with real arithmetic.
///
/// Failures are recorded per cell; any formula reading a failed cell fails
/// with [`EvalError::Upstream`].
pub fn eval_discrete(wb: &Workbook, g: &DependencyGraph) -> SheetValues {
    let mut out = SheetValues::default();
    for (addr, content) in wb.iter() {
        if let CellContent::Number(v) = content {
            out.values.insert(addr, *v);
        }
    }
    for &cell in g.evaluation_order() {
        let formula = wb
            .get(cell)
            .formula()
            .expect("evaluation order lists formulas");
        let lookup = |r: CellAddress| match wb.get(r) {
            CellContent::Empty => Operand::Value(0.0),
            CellContent::Number(v) => Operand::Value(*v),
            CellContent::Text(_) => Operand::Text,
            CellContent::Formula(_) => match out.values.get(&r) {
                Some(v) => Operand::Value(*v),
                None => Operand::Missing,
            },
        };
        match walk(formula.ast(), &lookup) {
            Ok(v) => {
                out.values.insert(cell, v);
            }
            Err(fault) => {
                out.errors.insert(cell, fault.at(cell));
            }
        }
    }
    out
}

/// Evaluate every formula under interval arithmetic.
pub fn eval_bounding(
    wb: &Workbook,
    g: &DependencyGraph,
    expected: &ExpectedSheet,
    values: &SheetValues,
) -> BoundingSheet {
    let mut out = BoundingSheet::default();
    let lookup = |r: CellAddress| {
        if let CellContent::Text(_) = wb.get(r) {
            return Operand::Text;
        }
        if let Some(iv) = expected.get(r) {
            return Operand::Value(iv);
        }
        match wb.get(r) {
            CellContent::Empty => Operand::Value(Interval::ZERO),
            _ => match values.get(r) {
                Some(v) => Operand::Value(Interval::degenerate(v)),
                None => Operand::Missing,
            },
        }
    };
    for &cell in g.evaluation_order() {
        let formula = wb
            .get(cell)
            .formula()
            .expect("evaluation order lists formulas");
        match walk(formula.ast(), &lookup) {
            Ok(iv) => {
                out.intervals.insert(cell, iv);
            }
            Err(fault) => {
                out.errors.insert(cell, fault.at(cell));
            }
        }
    }
    out
}
