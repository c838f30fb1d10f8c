//! Plain-text rendering of a report, one row per cell.

use std::io::{self, Write};

use sheetrace::{AnalysisReport, CellRecord, Color};

const RED: &str = "\x1b[31m";
const YELLOW: &str = "\x1b[33m";
const RESET: &str = "\x1b[0m";

const HEADERS: [&str; 7] = [
    "CELL", "CONTENT", "VALUE", "EXPECTED", "BOUNDING", "STATUS", "REASONS",
];

fn columns(r: &CellRecord) -> [String; 7] {
    let content = match (&r.formula, &r.text) {
        (Some(f), _) => f.clone(),
        (None, Some(t)) => format!("{t:?}"),
        (None, None) => String::new(),
    };
    let value = match (&r.display, &r.error) {
        (_, Some(e)) => format!("#{e}"),
        (Some(d), None) => d.clone(),
        (None, None) => String::new(),
    };
    let reasons: Vec<String> = r.reasons.iter().map(|x| format!("{x:?}")).collect();
    [
        r.address.to_string(),
        content,
        value,
        r.expected.map(|i| i.to_string()).unwrap_or_default(),
        r.bounding.map(|i| i.to_string()).unwrap_or_default(),
        format!("{:?}", r.status),
        reasons.join(","),
    ]
}

pub(crate) fn render(report: &AnalysisReport, color: bool, out: &mut impl Write) -> io::Result<()> {
    let rows: Vec<[String; 7]> = report.cells.iter().map(columns).collect();
    let mut widths = HEADERS.map(str::len);
    for row in &rows {
        for (w, col) in widths.iter_mut().zip(row) {
            *w = (*w).max(col.chars().count());
        }
    }
    let line = |cols: &[String]| {
        let mut s = String::new();
        for (i, (col, w)) in cols.iter().zip(widths).enumerate() {
            if i + 1 == cols.len() {
                s.push_str(col);
            } else {
                s.push_str(&format!("{col:<w$}  "));
            }
        }
        s.trim_end().to_string()
    };

    writeln!(out, "{}", line(&HEADERS.map(String::from)))?;
    for (row, rec) in rows.iter().zip(&report.cells) {
        let text = line(row);
        match (color, rec.color) {
            (true, Color::Red) => writeln!(out, "{RED}{text}{RESET}")?,
            (true, Color::Yellow) => writeln!(out, "{YELLOW}{text}{RESET}")?,
            _ => writeln!(out, "{text}")?,
        }
    }
    let s = &report.summary;
    writeln!(
        out,
        "\n{} symptom, {} no symptom, {} unchecked",
        s.symptom, s.no_symptom, s.unchecked
    )?;
    for e in &report.errors {
        match e.cell {
            Some(c) => writeln!(out, "{} at {c}: {}", e.code, e.detail)?,
            None => writeln!(out, "{}: {}", e.code, e.detail)?,
        }
    }
    Ok(())
}
