use std::fmt::Write;

use super::ast::Expr;

/// Render an expression as canonical formula text, leading `=` included.
///
/// Parentheses are emitted only where the parse would otherwise produce a
/// different tree: around a lower-precedence left operand, and around a
/// right operand of equal or lower precedence (operators associate left).
pub fn print_formula(expr: &Expr) -> String {
    let mut out = String::from("=");
    write_expr(&mut out, expr);
    out
}

fn precedence(expr: &Expr) -> u8 {
    match expr {
        Expr::Binary { op, .. } => op.precedence(),
        Expr::Unary { .. } => 3,
        _ => 4,
    }
}

fn write_expr(out: &mut String, expr: &Expr) {
    match expr {
        // Display for f64 never switches to exponent notation.
        Expr::Number(v) => write!(out, "{v}").unwrap(),
        Expr::Cell(addr) => write!(out, "{addr}").unwrap(),
        Expr::Range(range) => write!(out, "{}:{}", range.start(), range.end()).unwrap(),
        Expr::Unary { operand, .. } => {
            out.push('-');
            write_operand(out, operand, precedence(operand) < 3);
        }
        Expr::Binary { op, lhs, rhs } => {
            let p = op.precedence();
            write_operand(out, lhs, precedence(lhs) < p);
            out.push(op.symbol());
            write_operand(out, rhs, precedence(rhs) <= p);
        }
        Expr::Call { func, args } => {
            out.push_str(func.name());
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_expr(out, arg);
            }
            out.push(')');
        }
    }
}

fn write_operand(out: &mut String, expr: &Expr, parens: bool) {
    if parens {
        out.push('(');
        write_expr(out, expr);
        out.push(')');
    } else {
        write_expr(out, expr);
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_formula(self))
    }
}
