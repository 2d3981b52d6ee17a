//! The toy imperative language: AST, parser and canonical printer.
//!
//! ```text
//! program := "fn" IDENT "(" [IDENT ("," IDENT)*] ")" block
//! block   := "{" (stmt | ";")* "}"
//! stmt    := ["let"] IDENT "=" expr | IDENT "++"
//!          | "while" cond block
//!          | "if" cond block ["else" (block | if-stmt)]
//!          | "return" expr
//! cond    := expr                      (must be a comparison)
//! expr    := sum (("<"|"<="|">"|">="|"=="|"!=") sum)*
//! sum     := term (("+"|"-") term)*
//! term    := atom (("*"|"/"|"%") atom)*
//! atom    := INT | "-" INT | IDENT | "(" expr ")"
//! ```
//!
//! `#` starts a line comment.

mod ast;
mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use ast::{BinOp, Expr, ExprKind, Program, SourceSpan, Stmt, StmtKind};
pub use parser::parse;
pub use printer::{pretty_print, print_expr};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: u32, column: u32, message: impl Into<String>) -> Self {
        ParseError { line, column, message: message.into() }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pretty_print(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const POWER: &str = include_str!("../../../../examples/power.tl");

    fn ret(e: &Program) -> &Expr {
        match &e.body[0].kind {
            StmtKind::Return(e) => e,
            other => panic!("expected return, got {other:?}"),
        }
    }

    #[test]
    fn identity_function() {
        let p = parse("fn id(x) { return x }").unwrap();
        assert_eq!(p.name, "id");
        assert_eq!(p.params, vec!["x"]);
        assert_eq!(p.body.len(), 1);
        assert!(matches!(&ret(&p).kind, ExprKind::Var(v) if v == "x"));
    }

    #[test]
    fn missing_close_paren_is_reported_at_the_brace() {
        let err = parse("fn bad(x { return x }").unwrap_err();
        assert_eq!((err.line, err.column), (1, 10));
        assert!(err.message.contains("`)`"), "{}", err.message);
    }

    #[test]
    fn power_listing_has_one_loop_with_two_assignments() {
        let p = parse(POWER).unwrap();
        assert_eq!(p.params, vec!["a", "b"]);
        let loops: Vec<&Stmt> = p.body.iter().filter(|s| matches!(s.kind, StmtKind::While { .. })).collect();
        assert_eq!(loops.len(), 1);
        let StmtKind::While { body, .. } = &loops[0].kind else { unreachable!() };
        assert_eq!(body.len(), 2);
        assert!(body.iter().all(|s| matches!(s.kind, StmtKind::Assign { .. })));
        assert!(pretty_print(&p).contains("while (i <= b) {"));
    }

    #[test]
    fn single_return_prints_canonically() {
        let p = parse("fn f() { return 1 }").unwrap();
        assert_eq!(pretty_print(&p), "fn f() {\n  return 1\n}");
    }

    #[test]
    fn increment_desugars_to_addition() {
        let a = parse("fn f(i) { i++; return i }").unwrap();
        let b = parse("fn f(i) { i = i + 1\n return i }").unwrap();
        assert!(a.same_structure(&b));
    }

    #[test]
    fn let_is_plain_assignment() {
        let a = parse("fn f() { let x = 2 return x }").unwrap();
        let b = parse("fn f() { x = 2 return x }").unwrap();
        assert!(a.same_structure(&b));
    }

    #[test]
    fn precedence_and_parentheses() {
        let p = parse("fn f(a, b, c) { return (a + b) * c - a / (b - c) }").unwrap();
        assert_eq!(print_expr(ret(&p)), "(a + b) * c - a / (b - c)");
        let p = parse("fn f(a, b, c) { return a - (b - c) }").unwrap();
        assert_eq!(print_expr(ret(&p)), "a - (b - c)");
        let p = parse("fn f(a, b, c) { return (a - b) - c }").unwrap();
        assert_eq!(print_expr(ret(&p)), "a - b - c");
    }

    #[test]
    fn negative_literals() {
        let p = parse("fn f(a) { return a - -9223372036854775808 }").unwrap();
        let ExprKind::Binary { rhs, .. } = &ret(&p).kind else { panic!() };
        assert_eq!(rhs.kind, ExprKind::Int(i64::MIN));
        assert!(parse("fn f() { return 9223372036854775808 }").is_err());
    }

    #[test]
    fn else_branches() {
        let src = "fn sign(x) { if (x < 0) { return -1 } else if (x == 0) { return 0 } else { return 1 } }";
        let p = parse(src).unwrap();
        let again = parse(&pretty_print(&p)).unwrap();
        assert!(p.same_structure(&again));
    }

    #[test]
    fn rejects_non_comparison_conditions() {
        let err = parse("fn f(x) { while (x) { x = x - 1 } return x }").unwrap_err();
        assert!(err.message.contains("comparison"));
    }

    #[test]
    fn rejects_duplicate_params() {
        let err = parse("fn f(x, x) { return x }").unwrap_err();
        assert_eq!((err.line, err.column), (1, 9));
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse("# header\nfn f(x) { # trailing\n return x # done\n}").unwrap();
        assert_eq!(p.body.len(), 1);
    }

    #[test]
    fn spans_point_at_source() {
        let src = "fn f(a, b) {\n  return a * b\n}";
        let p = parse(src).unwrap();
        assert_eq!(p.body[0].span, SourceSpan::new(2, 3, 12));
        assert_eq!(ret(&p).span, SourceSpan::new(2, 10, 5));
    }

    #[test]
    fn trailing_tokens_are_errors() {
        let err = parse("fn f() { return 1 } x").unwrap_err();
        assert_eq!((err.line, err.column), (1, 21));
    }

    #[test]
    fn unexpected_character() {
        let err = parse("fn f() {\n  return 1 & 2\n}").unwrap_err();
        assert_eq!((err.line, err.column), (2, 12));
    }
}
