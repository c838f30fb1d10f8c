//! Random generators and independent oracles shared by the integration
//! tests. Nothing here calls into the evaluator or tracer under test.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use sheetrace::formula::{BinaryOp, CellRange, Expr, Function};
use sheetrace::{CellAddress, CellContent, ExpectedSheet, Formula, Interval, Workbook};

pub fn addr(col: u32, row: u32) -> CellAddress {
    CellAddress::new(col, row).unwrap()
}

// ---------------------------------------------------------------------------
// Random marked DAGs for the tracer.

/// A DAG over cells placed at distinct grid positions. `prec[i]` lists the
/// indices cell `i` reads; every index in it is smaller than `i`.
pub struct MarkedDag {
    pub pos: Vec<CellAddress>,
    pub prec: Vec<Vec<usize>>,
    pub faulty: Vec<bool>,
}

impl MarkedDag {
    pub fn random(rng: &mut impl Rng, max_cells: usize, max_prec: usize, p_fault: f64) -> Self {
        let n = rng.random_range(2..=max_cells);
        let mut slots: Vec<(u32, u32)> = (1..=8)
            .flat_map(|c| (1..=10).map(move |r| (c, r)))
            .collect();
        slots.shuffle(rng);
        let pos: Vec<CellAddress> = slots[..n].iter().map(|&(c, r)| addr(c, r)).collect();
        let prec = (0..n)
            .map(|i| {
                let k = rng.random_range(0..=max_prec.min(i));
                let mut pool: Vec<usize> = (0..i).collect();
                pool.shuffle(rng);
                pool.truncate(k);
                pool.sort_unstable();
                pool
            })
            .collect();
        let faulty = (0..n).map(|_| rng.random_bool(p_fault)).collect();
        Self { pos, prec, faulty }
    }

    /// Cells without precedents hold numbers; the rest reference their
    /// precedents through a sum or a `SUM` call.
    pub fn workbook(&self) -> Workbook {
        let mut wb = Workbook::new();
        for (i, ps) in self.prec.iter().enumerate() {
            let content = if ps.is_empty() {
                CellContent::Number(i as f64)
            } else {
                let names: Vec<String> = ps.iter().map(|&p| self.pos[p].to_string()).collect();
                let src = if i % 2 == 0 {
                    format!("=SUM({})", names.join(","))
                } else {
                    format!("={}", names.join("+"))
                };
                CellContent::Formula(Formula::parse(&src).unwrap())
            };
            wb.set(self.pos[i], content).unwrap();
        }
        wb
    }

    pub fn index_of(&self, a: CellAddress) -> usize {
        self.pos.iter().position(|&p| p == a).unwrap()
    }
}

/// Outcome of the literal transcription of the tracing procedure.
#[derive(Debug, PartialEq, Eq)]
pub struct OracleTrace {
    pub result: usize,
    pub path: Vec<usize>,
    pub tie_broken: bool,
}

/// Literal, recursive transcription of steps 1-9, working directly on the
/// generator's adjacency lists.
pub fn oracle_trace(dag: &MarkedDag, ce: usize) -> OracleTrace {
    let mut out = OracleTrace {
        result: ce,
        path: vec![],
        tie_broken: false,
    };
    oracle_step(dag, ce, &mut out);
    out
}

fn oracle_step(dag: &MarkedDag, ce: usize, out: &mut OracleTrace) {
    out.path.push(ce);
    let faulty_precedents = |c: usize| -> Vec<usize> {
        dag.prec[c]
            .iter()
            .copied()
            .filter(|&p| dag.faulty[p])
            .collect()
    };
    let faulty_dependents = |c: usize| -> Vec<usize> {
        (0..dag.pos.len())
            .filter(|&d| dag.prec[d].contains(&c) && dag.faulty[d])
            .collect()
    };

    // Step 1.
    let ge = faulty_precedents(ce);
    // Step 2.
    if ge.is_empty() {
        out.result = ce;
        return;
    }
    // Steps 3-4.
    let gee: Vec<(usize, usize)> = ge
        .iter()
        .map(|&ci| (ci, faulty_precedents(ci).len()))
        .collect();
    let max = gee.iter().map(|&(_, n)| n).max().unwrap();
    let ggee: Vec<usize> = gee
        .iter()
        .filter(|&&(_, n)| n == max)
        .map(|&(c, _)| c)
        .collect();
    // Step 5.
    if ggee.len() == 1 {
        return oracle_step(dag, ggee[0], out);
    }
    // Steps 6-7.
    let ged_i: Vec<(usize, usize)> = ggee
        .iter()
        .map(|&ci| (ci, faulty_dependents(ci).len()))
        .collect();
    let max = ged_i.iter().map(|&(_, n)| n).max().unwrap();
    let ged: Vec<usize> = ged_i
        .iter()
        .filter(|&&(_, n)| n == max)
        .map(|&(c, _)| c)
        .collect();
    // Step 8.
    if ged.len() == 1 {
        return oracle_step(dag, ged[0], out);
    }
    // Step 9, made deterministic: smallest row, then smallest column.
    out.tie_broken = true;
    let pick = *ged
        .iter()
        .min_by_key(|&&c| (dag.pos[c].row(), dag.pos[c].column()))
        .unwrap();
    oracle_step(dag, pick, out)
}

// ---------------------------------------------------------------------------
// Random formula ASTs.

fn random_literal(rng: &mut impl Rng) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(0..1000) as f64,
        1 => rng.random_range(0..10_000) as f64 / 8.0,
        2 => rng.random_range(0.0..1e6),
        _ => rng.random_range(0.0..1.0),
    }
}

fn random_address(rng: &mut impl Rng) -> CellAddress {
    let column = if rng.random_bool(0.9) {
        rng.random_range(1..=30)
    } else {
        rng.random_range(1..=16_384)
    };
    let row = if rng.random_bool(0.9) {
        rng.random_range(1..=50)
    } else {
        rng.random_range(1..=1_048_576)
    };
    CellAddress::with_flags(column, row, rng.random_bool(0.3), rng.random_bool(0.3)).unwrap()
}

fn random_range(rng: &mut impl Rng) -> CellRange {
    let a = random_address(rng);
    let c = (a.column() + rng.random_range(0..4)).min(16_384);
    let r = (a.row() + rng.random_range(0..4)).min(1_048_576);
    let b = CellAddress::with_flags(c, r, rng.random_bool(0.3), rng.random_bool(0.3)).unwrap();
    if rng.random_bool(0.5) {
        CellRange::new(a, b)
    } else {
        CellRange::new(b, a)
    }
}

pub fn random_ast(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.5) {
            Expr::Number(random_literal(rng))
        } else {
            Expr::Cell(random_address(rng))
        };
    }
    match rng.random_range(0..4) {
        0 => Expr::neg(random_ast(rng, depth - 1)),
        1 => {
            let n = rng.random_range(1..=4);
            let args = (0..n)
                .map(|_| {
                    if rng.random_bool(0.4) {
                        Expr::Range(random_range(rng))
                    } else {
                        random_ast(rng, depth - 1)
                    }
                })
                .collect();
            Expr::Call {
                func: Function::Sum,
                args,
            }
        }
        _ => {
            let op = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div]
                [rng.random_range(0..4)];
            Expr::binary(op, random_ast(rng, depth - 1), random_ast(rng, depth - 1))
        }
    }
}

/// Compare ASTs including the `$` markers that `PartialEq` ignores.
pub fn same_ast(a: &Expr, b: &Expr) -> bool {
    fn same_addr(x: &CellAddress, y: &CellAddress) -> bool {
        x == y && x.col_absolute() == y.col_absolute() && x.row_absolute() == y.row_absolute()
    }
    match (a, b) {
        (Expr::Number(x), Expr::Number(y)) => x == y,
        (Expr::Cell(x), Expr::Cell(y)) => same_addr(x, y),
        (Expr::Range(x), Expr::Range(y)) => {
            same_addr(&x.start(), &y.start()) && same_addr(&x.end(), &y.end())
        }
        (Expr::Unary { operand: x, .. }, Expr::Unary { operand: y, .. }) => same_ast(x, y),
        (
            Expr::Binary {
                op: o1,
                lhs: l1,
                rhs: r1,
            },
            Expr::Binary {
                op: o2,
                lhs: l2,
                rhs: r2,
            },
        ) => o1 == o2 && same_ast(l1, l2) && same_ast(r1, r2),
        (Expr::Call { func: f1, args: a1 }, Expr::Call { func: f2, args: a2 }) => {
            f1 == f2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| same_ast(x, y))
        }
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Random numeric workbooks and a reference point evaluator.

/// Inputs in column A, formulas in columns B.. reading only cells to their
/// left or above. Formulas use `+ - * /`, unary minus and `SUM` over
/// ranges. Divisors are kept away from zero by adding a positive constant
/// to a squared-free positive input.
pub fn random_numeric_workbook(rng: &mut impl Rng) -> Workbook {
    let inputs = rng.random_range(2..=6u32);
    let formulas = rng.random_range(1..=10u32);
    let mut wb = Workbook::new();
    for r in 1..=inputs {
        let v = (rng.random_range(1.0..100.0f64) * 8.0).round() / 8.0;
        let v = if rng.random_bool(0.2) { -v } else { v };
        wb.set(addr(1, r), CellContent::Number(v)).unwrap();
    }
    let mut available: Vec<CellAddress> = (1..=inputs).map(|r| addr(1, r)).collect();
    for k in 0..formulas {
        let cell = addr(2 + k / 5, 1 + k % 5);
        let src = random_formula_text(rng, &available, inputs);
        wb.set(cell, CellContent::Formula(Formula::parse(&src).unwrap()))
            .unwrap();
        available.push(cell);
    }
    wb
}

fn random_formula_text(rng: &mut impl Rng, available: &[CellAddress], inputs: u32) -> String {
    let pick =
        |rng: &mut dyn rand::RngCore| available[rng.random_range(0..available.len())].to_string();
    match rng.random_range(0..6) {
        0 => format!("={}+{}*{}", pick(rng), pick(rng), pick(rng)),
        1 => format!("=({}-{})*{}", pick(rng), pick(rng), pick(rng)),
        2 => {
            let a = rng.random_range(1..=inputs);
            let b = rng.random_range(a..=inputs);
            format!("=SUM(A{a}:A{b})-{}", pick(rng))
        }
        3 => format!("={}/({}*{}+2.5)", pick(rng), pick(rng), pick(rng)),
        4 => format!("=-{}*{}+{}", pick(rng), pick(rng), rng.random_range(0..50)),
        _ => format!("={}/{}", pick(rng), pick(rng)),
    }
}

/// Attach intervals around (or near) the discrete value of a random subset
/// of cells.
pub fn random_intervals(
    rng: &mut impl Rng,
    wb: &Workbook,
    values: &BTreeMap<CellAddress, f64>,
) -> ExpectedSheet {
    let mut sheet = ExpectedSheet::new();
    for (cell, _) in wb.iter() {
        if !rng.random_bool(0.5) {
            continue;
        }
        let Some(&v) = values.get(&cell) else {
            continue;
        };
        let width = rng.random_range(0.0..=(v.abs() * 0.5 + 1.0));
        let shift = rng.random_range(-width..=width);
        let lo = v + shift - width / 2.0;
        let hi = lo + width;
        sheet.insert(cell, Interval::new(lo, hi).unwrap());
    }
    sheet
}

/// Point evaluation of an expression with real arithmetic, reading cell
/// values through `point`. `None` on division by zero.
pub fn eval_point(expr: &Expr, point: &dyn Fn(CellAddress) -> f64) -> Option<f64> {
    Some(match expr {
        Expr::Number(v) => *v,
        Expr::Cell(a) => point(a.relative()),
        Expr::Range(r) => r.cells().map(point).sum(),
        Expr::Unary { operand, .. } => -eval_point(operand, point)?,
        Expr::Binary { op, lhs, rhs } => {
            let (a, b) = (eval_point(lhs, point)?, eval_point(rhs, point)?);
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => {
                    if b == 0.0 {
                        return None;
                    }
                    a / b
                }
            }
        }
        Expr::Call { args, .. } => {
            let mut acc = 0.0;
            for arg in args {
                acc += eval_point(arg, point)?;
            }
            acc
        }
    })
}

/// `x ∈ [lo, hi]` with relative slack `rel · max(1, |lo|, |hi|)`.
pub fn inside_with_slack(iv: Interval, x: f64, rel: f64) -> bool {
    let slack = rel * 1f64.max(iv.lo().abs()).max(iv.hi().abs());
    iv.lo() - slack <= x && x <= iv.hi() + slack
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
