//! The ordinary spreadsheet: a sparse map of populated cells.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::address::CellAddress;
use crate::formula::{parse_formula, Expr, FormulaError};

/// A parsed formula together with the text it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    ast: Expr,
    source: String,
}

impl Formula {
    pub fn parse(source: &str) -> Result<Self, FormulaError> {
        let ast = parse_formula(source)?;
        Ok(Self {
            ast,
            source: source.to_string(),
        })
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellContent {
    Empty,
    Number(f64),
    Text(String),
    Formula(Formula),
}

impl CellContent {
    pub fn is_empty(&self) -> bool {
        matches!(self, CellContent::Empty)
    }

    pub fn is_formula(&self) -> bool {
        matches!(self, CellContent::Formula(_))
    }

    pub fn formula(&self) -> Option<&Formula> {
        match self {
            CellContent::Formula(f) => Some(f),
            _ => None,
        }
    }

    /// Short lowercase name of the variant, as used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            CellContent::Empty => "empty",
            CellContent::Number(_) => "number",
            CellContent::Text(_) => "text",
            CellContent::Formula(_) => "formula",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cell {cell} holds a non-finite number")]
pub struct NonFiniteNumber {
    pub cell: CellAddress,
}

static EMPTY: CellContent = CellContent::Empty;

/// Sparse cell store. Absent cells are empty; `Empty` is never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Workbook {
    cells: BTreeMap<CellAddress, CellContent>,
}

impl Workbook {
    pub fn new() -> Self {
        Self::default()
    }

    /// Store `content` at `addr`. Storing `Empty` clears the cell.
    pub fn set(&mut self, addr: CellAddress, content: CellContent) -> Result<(), NonFiniteNumber> {
        let addr = addr.relative();
        match content {
            CellContent::Empty => {
                self.cells.remove(&addr);
            }
            CellContent::Number(v) if !v.is_finite() => return Err(NonFiniteNumber { cell: addr }),
            other => {
                self.cells.insert(addr, other);
            }
        }
        Ok(())
    }

    pub fn clear(&mut self, addr: CellAddress) {
        self.cells.remove(&addr);
    }

    pub fn get(&self, addr: CellAddress) -> &CellContent {
        self.cells.get(&addr).unwrap_or(&EMPTY)
    }

    pub fn is_populated(&self, addr: CellAddress) -> bool {
        self.cells.contains_key(&addr)
    }

    /// Populated cells in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (CellAddress, &CellContent)> {
        self.cells.iter().map(|(a, c)| (*a, c))
    }

    pub fn formulas(&self) -> impl Iterator<Item = (CellAddress, &Formula)> {
        self.iter().filter_map(|(a, c)| c.formula().map(|f| (a, f)))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}
