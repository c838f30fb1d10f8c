//! Synthetic workbooks for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheetrace::{
    build_graph, eval_discrete, CellAddress, CellContent, ExpectedSheet, Formula, Interval,
    Workbook,
};

const WIDTH: u32 = 64;

/// Formulas of increasing size for the parser benchmark.
pub const SAMPLE_FORMULAS: [&str; 4] = [
    "=B5/B$9",
    "=SUM(D4:F4)",
    "=(A1+B2*C3-D4/E5)*-(F6+G7)",
    "=SUM(A1:A10,B$2,-(C3*450.5),SUM(D1:Z1))/(1+2+3+4+5+6+7+8)",
];

pub fn position(i: usize) -> CellAddress {
    let i = i as u32;
    CellAddress::new(i % WIDTH + 1, i / WIDTH + 1).expect("inside the grid")
}

/// `cells` cells laid out 64 to a row: the first tenth are numbers, the
/// rest formulas averaging up to `fan_in` earlier cells. Roughly a third of
/// the formulas get an expected interval and a few of those are wrong,
/// so the marks contain symptoms to trace.
pub fn random_workbook(cells: usize, fan_in: usize, seed: u64) -> (Workbook, ExpectedSheet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = (cells / 10).max(1);
    let mut wb = Workbook::new();
    for i in 0..cells {
        let content = if i < inputs {
            CellContent::Number(rng.random_range(1.0..100.0))
        } else {
            let k = rng.random_range(1..=fan_in);
            let refs: Vec<String> = (0..k)
                .map(|_| position(i - 1 - rng.random_range(0..i.min(256))).to_string())
                .collect();
            let src = if rng.random_bool(0.2) {
                format!("=SUM({})*0.5", refs.join(","))
            } else {
                format!("=({})/{k}", refs.join("+"))
            };
            CellContent::Formula(Formula::parse(&src).expect("generated formula parses"))
        };
        wb.set(position(i), content).expect("finite");
    }

    let g = build_graph(&wb).expect("references only point backwards");
    let values = eval_discrete(&wb, &g);
    let mut expected = ExpectedSheet::new();
    for (cell, _) in wb.formulas() {
        let Some(v) = values.get(cell) else { continue };
        if rng.random_bool(0.3) {
            let shift = if rng.random_bool(0.1) { 2.0 } else { 1.0 };
            let iv = Interval::new(v * shift * 0.9, v * shift * 1.1).expect("ordered");
            expected.insert(cell, iv);
        }
    }
    (wb, expected)
}
