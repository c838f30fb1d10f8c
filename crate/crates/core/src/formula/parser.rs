//! Tokenizer and recursive-descent parser for the formula language.
//!
//! ```text
//! formula := '=' expr EOF
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | cell | func '(' arg (',' arg)* ')' | '(' expr ')'
//! arg     := cell ':' cell | expr
//! ```

use thiserror::Error;

use super::ast::{BinaryOp, CellRange, Expr, Function};
use crate::address::{parse_address, CellAddress};

/// Deepest nesting of parentheses and unary minus accepted.
pub const MAX_DEPTH: usize = 256;

/// Largest range (in cells) a formula may name.
pub const MAX_RANGE_CELLS: u64 = 1 << 20;

/// Positions are byte offsets into the formula text, `=` included.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("syntax error at {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    #[error("range at {position} is only allowed as a function argument")]
    RangeOutsideAggregate { position: usize },
    #[error("range at {position} exceeds {MAX_RANGE_CELLS} cells")]
    RangeTooLarge { position: usize },
}

impl FormulaError {
    pub fn position(&self) -> usize {
        match self {
            FormulaError::Syntax { position, .. }
            | FormulaError::RangeOutsideAggregate { position }
            | FormulaError::RangeTooLarge { position } => *position,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Cell(CellAddress),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    Colon,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Number(v) => format!("number {v}"),
            Tok::Cell(a) => format!("cell {a}"),
            Tok::Ident(name) => format!("name {name}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Colon => "':'".into(),
            Tok::Eof => "end of formula".into(),
        }
    }
}

fn syntax(position: usize, expected: impl Into<String>) -> FormulaError {
    FormulaError::Syntax {
        position,
        expected: expected.into(),
    }
}

fn tokenize(text: &str, offset: usize) -> Result<Vec<(Tok, usize)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        let single = match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            b':' => Some(Tok::Colon),
            _ => None,
        };
        if let Some(tok) = single {
            toks.push((tok, offset + start));
            i += 1;
            continue;
        }

        if b.is_ascii_digit() || b == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let lexeme = &text[start..i];
            if lexeme == "." {
                return Err(syntax(offset + start, "a digit"));
            }
            let value: f64 = lexeme
                .parse()
                .map_err(|_| syntax(offset + start, "a decimal number"))?;
            if !value.is_finite() {
                return Err(syntax(offset + start, "a finite number"));
            }
            toks.push((Tok::Number(value), offset + start));
            continue;
        }

        if b == b'$' || b.is_ascii_alphabetic() {
            // `$?letters$?digits` is a cell; bare letters are a name.
            if b == b'$' {
                i += 1;
            }
            let letters_start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            let has_letters = i > letters_start;
            let mut has_row_dollar = false;
            if i < bytes.len() && bytes[i] == b'$' {
                has_row_dollar = true;
                i += 1;
            }
            let digits_start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let has_digits = i > digits_start;

            if has_letters && !has_digits && !has_row_dollar && b != b'$' {
                toks.push((
                    Tok::Ident(text[start..i].to_ascii_uppercase()),
                    offset + start,
                ));
                continue;
            }
            if !has_letters || !has_digits {
                return Err(syntax(offset + start, "a cell reference"));
            }
            let addr = parse_address(&text[start..i])
                .map_err(|_| syntax(offset + start, "a cell reference inside the grid"))?;
            toks.push((Tok::Cell(addr), offset + start));
            continue;
        }

        return Err(syntax(offset + start, "an operator, number, cell or '('"));
    }
    toks.push((Tok::Eof, offset + text.len()));
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let idx = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        tok
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), FormulaError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> FormulaError {
        syntax(
            self.offset(),
            format!("{what}, found {}", self.peek().describe()),
        )
    }

    fn too_deep(&self, depth: usize) -> Result<usize, FormulaError> {
        if depth > MAX_DEPTH {
            Err(syntax(self.offset(), "shallower nesting"))
        } else {
            Ok(depth)
        }
    }

    // Each production returns the parsed node together with its tree height,
    // so that long operator chains are bounded as well as parentheses.

    fn expr(&mut self) -> Result<(Expr, usize), FormulaError> {
        let (mut lhs, mut height) = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok((lhs, height)),
            };
            self.bump();
            let (rhs, rh) = self.term()?;
            height = self.too_deep(height.max(rh) + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<(Expr, usize), FormulaError> {
        let (mut lhs, mut height) = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok((lhs, height)),
            };
            self.bump();
            let (rhs, rh) = self.unary()?;
            height = self.too_deep(height.max(rh) + 1)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<(Expr, usize), FormulaError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.depth = self.too_deep(self.depth + 1)?;
            let (operand, h) = self.unary()?;
            self.depth -= 1;
            return Ok((Expr::neg(operand), self.too_deep(h + 1)?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<(Expr, usize), FormulaError> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Number(v) => {
                self.bump();
                Ok((Expr::Number(v), 1))
            }
            Tok::Cell(addr) => {
                self.bump();
                if *self.peek() == Tok::Colon {
                    return Err(FormulaError::RangeOutsideAggregate { position: at });
                }
                Ok((Expr::Cell(addr), 1))
            }
            Tok::Ident(name) => {
                let func = Function::from_name(&name)
                    .ok_or_else(|| syntax(at, format!("function SUM, found name {name}")))?;
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                self.depth = self.too_deep(self.depth + 1)?;
                let (first, mut height) = self.argument()?;
                let mut args = vec![first];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    let (arg, h) = self.argument()?;
                    height = height.max(h);
                    args.push(arg);
                }
                self.expect(Tok::RParen, "',' or ')'")?;
                self.depth -= 1;
                Ok((Expr::Call { func, args }, self.too_deep(height + 1)?))
            }
            Tok::LParen => {
                self.bump();
                self.depth = self.too_deep(self.depth + 1)?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                self.depth -= 1;
                Ok(inner)
            }
            _ => Err(self.unexpected("a number, cell, function or '('")),
        }
    }

    fn argument(&mut self) -> Result<(Expr, usize), FormulaError> {
        if let (Tok::Cell(a), Tok::Colon) = (self.peek().clone(), self.peek_at(1)) {
            let at = self.offset();
            self.bump();
            self.bump();
            let Tok::Cell(b) = self.peek().clone() else {
                return Err(self.unexpected("a cell reference after ':'"));
            };
            self.bump();
            let range = CellRange::new(a, b);
            if range.cell_count() > MAX_RANGE_CELLS {
                return Err(FormulaError::RangeTooLarge { position: at });
            }
            // `A1:B2 * 3` inside an argument list is still a bare range
            // used outside aggregation.
            if !matches!(self.peek(), Tok::Comma | Tok::RParen) {
                return Err(FormulaError::RangeOutsideAggregate { position: at });
            }
            return Ok((Expr::Range(range), 1));
        }
        self.expr()
    }
}

/// Parse formula source text, which must start with `=`.
pub fn parse_formula(text: &str) -> Result<Expr, FormulaError> {
    let Some(body) = text.strip_prefix('=') else {
        return Err(syntax(0, "'=' at the start of a formula"));
    };
    let toks = tokenize(body, 1)?;
    let mut parser = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let (expr, _) = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected("an operator or end of formula"));
    }
    Ok(expr)
}
