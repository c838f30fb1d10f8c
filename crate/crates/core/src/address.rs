//! A1-notation cell addresses.
//!
//! Columns use bijective base-26 (`A` = 1, `Z` = 26, `AA` = 27). The `$`
//! markers are kept for display but take no part in equality, hashing or
//! ordering, so `D4` and `$D$4` name the same cell.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest column index (`XFD`).
pub const MAX_COLUMNS: u32 = 16_384;
/// Largest row index.
pub const MAX_ROWS: u32 = 1_048_576;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed cell address {text:?}")]
pub struct MalformedAddress {
    pub text: String,
}

/// A single cell coordinate, 1-based in both axes.
#[derive(Debug, Clone, Copy)]
pub struct CellAddress {
    column: u32,
    row: u32,
    col_absolute: bool,
    row_absolute: bool,
}

impl CellAddress {
    /// Relative address at `(column, row)`. Returns `None` outside the grid.
    pub fn new(column: u32, row: u32) -> Option<Self> {
        Self::with_flags(column, row, false, false)
    }

    pub fn with_flags(
        column: u32,
        row: u32,
        col_absolute: bool,
        row_absolute: bool,
    ) -> Option<Self> {
        if (1..=MAX_COLUMNS).contains(&column) && (1..=MAX_ROWS).contains(&row) {
            Some(Self {
                column,
                row,
                col_absolute,
                row_absolute,
            })
        } else {
            None
        }
    }

    pub fn column(&self) -> u32 {
        self.column
    }

    pub fn row(&self) -> u32 {
        self.row
    }

    pub fn col_absolute(&self) -> bool {
        self.col_absolute
    }

    pub fn row_absolute(&self) -> bool {
        self.row_absolute
    }

    /// The same cell with both `$` markers dropped.
    pub fn relative(self) -> Self {
        Self {
            col_absolute: false,
            row_absolute: false,
            ..self
        }
    }

    /// Row-major sort key.
    fn key(&self) -> (u32, u32) {
        (self.row, self.column)
    }
}

impl PartialEq for CellAddress {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for CellAddress {}

impl Hash for CellAddress {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

impl PartialOrd for CellAddress {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Row first, then column.
impl Ord for CellAddress {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

/// Column index to letters: 1 → `A`, 27 → `AA`.
pub fn format_column(mut column: u32) -> String {
    debug_assert!(column >= 1);
    let mut letters = Vec::new();
    while column > 0 {
        column -= 1;
        letters.push(b'A' + (column % 26) as u8);
        column /= 26;
    }
    letters.reverse();
    String::from_utf8(letters).expect("ASCII letters")
}

/// Letters to column index, case-insensitive. `None` on empty input,
/// non-letters, or overflow past [`MAX_COLUMNS`].
pub fn parse_column(letters: &str) -> Option<u32> {
    if letters.is_empty() {
        return None;
    }
    let mut column: u32 = 0;
    for b in letters.bytes() {
        if !b.is_ascii_alphabetic() {
            return None;
        }
        let digit = u32::from(b.to_ascii_uppercase() - b'A') + 1;
        column = column.checked_mul(26)?.checked_add(digit)?;
        if column > MAX_COLUMNS {
            return None;
        }
    }
    Some(column)
}

/// Parse `$?[A-Z]+$?[0-9]+`, case-insensitively.
pub fn parse_address(text: &str) -> Result<CellAddress, MalformedAddress> {
    let malformed = || MalformedAddress {
        text: text.to_string(),
    };
    let bytes = text.as_bytes();
    let mut pos = 0;

    let col_absolute = bytes.first() == Some(&b'$');
    if col_absolute {
        pos += 1;
    }
    let letters_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_alphabetic() {
        pos += 1;
    }
    let letters = &text[letters_start..pos];

    let row_absolute = bytes.get(pos) == Some(&b'$');
    if row_absolute {
        pos += 1;
    }
    let digits = &text[pos..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }

    let column = parse_column(letters).ok_or_else(malformed)?;
    // Long digit runs overflow u32 before they reach the range check.
    let row: u32 = digits.parse().map_err(|_| malformed())?;
    CellAddress::with_flags(column, row, col_absolute, row_absolute).ok_or_else(malformed)
}

/// Canonical upper-case A1 text, `$` markers included.
pub fn format_address(addr: &CellAddress) -> String {
    addr.to_string()
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.col_absolute {
            f.write_str("$")?;
        }
        f.write_str(&format_column(self.column))?;
        if self.row_absolute {
            f.write_str("$")?;
        }
        write!(f, "{}", self.row)
    }
}

impl FromStr for CellAddress {
    type Err = MalformedAddress;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_address(s)
    }
}

impl Serialize for CellAddress {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CellAddress {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_address(&text).map_err(serde::de::Error::custom)
    }
}
