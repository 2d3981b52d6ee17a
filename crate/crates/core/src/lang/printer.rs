use std::fmt::Write;

use super::ast::{Expr, ExprKind, Program, Stmt, StmtKind};

const INDENT: &str = "  ";

/// Canonical rendering of a program. Parsing the output yields a program
/// with the same structure.
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    let _ = write!(out, "fn {}({}) {{", program.name, program.params.join(", "));
    out.push('\n');
    print_block(&mut out, &program.body, 1);
    out.push('}');
    out
}

/// Canonical rendering of a single expression.
pub fn print_expr(expr: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, expr, 0, false);
    out
}

fn print_block(out: &mut String, stmts: &[Stmt], depth: usize) {
    for stmt in stmts {
        print_stmt(out, stmt, depth);
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn print_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    indent(out, depth);
    match &stmt.kind {
        StmtKind::Assign { target, value } => {
            let _ = writeln!(out, "{target} = {}", print_expr(value));
        }
        StmtKind::Return(value) => {
            let _ = writeln!(out, "return {}", print_expr(value));
        }
        StmtKind::While { cond, body } => {
            let _ = writeln!(out, "while ({}) {{", print_expr(cond));
            print_block(out, body, depth + 1);
            indent(out, depth);
            out.push_str("}\n");
        }
        StmtKind::If { cond, then_body, else_body } => {
            let _ = writeln!(out, "if ({}) {{", print_expr(cond));
            print_block(out, then_body, depth + 1);
            indent(out, depth);
            if else_body.is_empty() {
                out.push_str("}\n");
            } else {
                out.push_str("} else {\n");
                print_block(out, else_body, depth + 1);
                indent(out, depth);
                out.push_str("}\n");
            }
        }
    }
}

fn write_expr(out: &mut String, expr: &Expr, parent_prec: u8, right_operand: bool) {
    match &expr.kind {
        ExprKind::Int(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            let parens = prec < parent_prec || (right_operand && prec == parent_prec);
            if parens {
                out.push('(');
            }
            write_expr(out, lhs, prec, false);
            let _ = write!(out, " {op} ");
            write_expr(out, rhs, prec, true);
            if parens {
                out.push(')');
            }
        }
    }
}
