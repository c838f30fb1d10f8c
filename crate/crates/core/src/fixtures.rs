//! The cost-share example sheet and its expected intervals, bundled as the
//! reference fixture.

use crate::eval::ExpectedSheet;
use crate::io::{intervals_from_json, workbook_from_json};
use crate::workbook::Workbook;

pub const FIG2_WORKBOOK_JSON: &str = include_str!("../fixtures/fig2.wb.json");
pub const FIG2_INTERVALS_JSON: &str = include_str!("../fixtures/fig2.iv.json");

pub fn fig2_workbook() -> Workbook {
    workbook_from_json(FIG2_WORKBOOK_JSON).expect("bundled workbook is valid")
}

pub fn fig2_intervals() -> ExpectedSheet {
    intervals_from_json(FIG2_INTERVALS_JSON).expect("bundled intervals are valid")
}
