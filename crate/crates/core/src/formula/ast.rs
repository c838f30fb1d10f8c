use std::collections::BTreeSet;

use crate::address::CellAddress;

/// Rectangular block of cells. Always normalized so that `start` is the
/// top-left corner and `end` the bottom-right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellRange {
    start: CellAddress,
    end: CellAddress,
}

impl CellRange {
    /// Builds the range spanned by two corners, in any order. Each corner
    /// keeps the `$` marker of whichever input supplied its coordinate.
    pub fn new(a: CellAddress, b: CellAddress) -> Self {
        let (left, right) = if a.column() <= b.column() {
            (a, b)
        } else {
            (b, a)
        };
        let (top, bottom) = if a.row() <= b.row() { (a, b) } else { (b, a) };
        let start = CellAddress::with_flags(
            left.column(),
            top.row(),
            left.col_absolute(),
            top.row_absolute(),
        )
        .expect("corner of a valid range");
        let end = CellAddress::with_flags(
            right.column(),
            bottom.row(),
            right.col_absolute(),
            bottom.row_absolute(),
        )
        .expect("corner of a valid range");
        Self { start, end }
    }

    pub fn start(&self) -> CellAddress {
        self.start
    }

    pub fn end(&self) -> CellAddress {
        self.end
    }

    pub fn cell_count(&self) -> u64 {
        let cols = u64::from(self.end.column() - self.start.column() + 1);
        let rows = u64::from(self.end.row() - self.start.row() + 1);
        cols * rows
    }

    pub fn contains(&self, addr: CellAddress) -> bool {
        (self.start.column()..=self.end.column()).contains(&addr.column())
            && (self.start.row()..=self.end.row()).contains(&addr.row())
    }

    /// Member cells in row-major order, without `$` markers.
    pub fn cells(&self) -> impl Iterator<Item = CellAddress> + '_ {
        let (c0, c1) = (self.start.column(), self.end.column());
        (self.start.row()..=self.end.row()).flat_map(move |row| {
            (c0..=c1).map(move |col| CellAddress::new(col, row).expect("inside a valid range"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Add | BinaryOp::Sub => 1,
            BinaryOp::Mul | BinaryOp::Div => 2,
        }
    }
}

/// Built-in functions. Only aggregation by summation is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Function {
    Sum,
}

impl Function {
    pub fn name(self) -> &'static str {
        match self {
            Function::Sum => "SUM",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        if name.eq_ignore_ascii_case("SUM") {
            Some(Function::Sum)
        } else {
            None
        }
    }
}

/// Parsed formula expression.
///
/// Number literals are finite and non-negative; a leading minus is always
/// a [`Expr::Unary`] node. Ranges only occur as direct arguments of a
/// [`Expr::Call`].
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Cell(CellAddress),
    Range(CellRange),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Function,
        args: Vec<Expr>,
    },
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn neg(operand: Expr) -> Self {
        Expr::Unary {
            op: UnaryOp::Neg,
            operand: Box::new(operand),
        }
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// Every cell the expression reads, ranges expanded, `$` markers
    /// stripped, deduplicated and in row-major order.
    pub fn referenced_cells(&self) -> BTreeSet<CellAddress> {
        let mut out = BTreeSet::new();
        self.collect_refs(&mut out);
        out
    }

    fn collect_refs(&self, out: &mut BTreeSet<CellAddress>) {
        match self {
            Expr::Number(_) => {}
            Expr::Cell(addr) => {
                out.insert(addr.relative());
            }
            Expr::Range(range) => out.extend(range.cells()),
            Expr::Unary { operand, .. } => operand.collect_refs(out),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_refs(out);
                rhs.collect_refs(out);
            }
            Expr::Call { args, .. } => args.iter().for_each(|a| a.collect_refs(out)),
        }
    }
}
