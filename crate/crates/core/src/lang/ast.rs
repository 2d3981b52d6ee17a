use std::fmt;

/// Location of a node in the original source text. Line and column are
/// 1-based; `length` counts characters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceSpan {
    pub line: u32,
    pub column: u32,
    pub length: u32,
}

impl SourceSpan {
    pub fn new(line: u32, column: u32, length: u32) -> Self {
        SourceSpan { line, column, length }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl BinOp {
    pub const ARITHMETIC: [BinOp; 5] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Rem];
    pub const RELATIONAL: [BinOp; 6] = [BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
        }
    }

    pub fn is_relational(self) -> bool {
        Self::RELATIONAL.contains(&self)
    }

    pub fn is_arithmetic(self) -> bool {
        Self::ARITHMETIC.contains(&self)
    }

    /// Binding strength; all levels are left-associative.
    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::Eq | BinOp::Ne => 1,
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 3,
        }
    }
}

impl fmt::Display for BinOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Var(String),
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

impl Expr {
    pub fn int(value: i64, span: SourceSpan) -> Self {
        Expr { kind: ExprKind::Int(value), span }
    }

    pub fn var(name: impl Into<String>, span: SourceSpan) -> Self {
        Expr { kind: ExprKind::Var(name.into()), span }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr, span: SourceSpan) -> Self {
        Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span }
    }

    pub fn is_relational(&self) -> bool {
        matches!(&self.kind, ExprKind::Binary { op, .. } if op.is_relational())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Assign { target: String, value: Expr },
    While { cond: Expr, body: Vec<Stmt> },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Vec<Stmt> },
    Return(Expr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

/// A single toy-language function: the subject under test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub span: SourceSpan,
}

impl Program {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    /// Equality that ignores source spans.
    pub fn same_structure(&self, other: &Program) -> bool {
        self.without_spans() == other.without_spans()
    }

    /// A copy with every span reset to the default value.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        p.span = SourceSpan::default();
        for s in &mut p.body {
            clear_stmt(s);
        }
        p
    }

    /// Pre-order walk over every expression node in the program.
    pub fn for_each_expr<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        for s in &self.body {
            walk_stmt(s, f);
        }
    }

    /// Pre-order walk over every statement node.
    pub fn for_each_stmt<'a>(&'a self, f: &mut impl FnMut(&'a Stmt)) {
        fn go<'a>(stmts: &'a [Stmt], f: &mut impl FnMut(&'a Stmt)) {
            for s in stmts {
                f(s);
                match &s.kind {
                    StmtKind::While { body, .. } => go(body, f),
                    StmtKind::If { then_body, else_body, .. } => {
                        go(then_body, f);
                        go(else_body, f);
                    }
                    _ => {}
                }
            }
        }
        go(&self.body, f)
    }

    /// Mutable counterpart of [`Program::for_each_expr`], same visiting order.
    pub fn for_each_expr_mut(&mut self, f: &mut impl FnMut(&mut Expr)) {
        for s in &mut self.body {
            walk_stmt_mut(s, f);
        }
    }
}

fn walk_expr<'a>(e: &'a Expr, f: &mut impl FnMut(&'a Expr)) {
    f(e);
    if let ExprKind::Binary { lhs, rhs, .. } = &e.kind {
        walk_expr(lhs, f);
        walk_expr(rhs, f);
    }
}

fn walk_stmt<'a>(s: &'a Stmt, f: &mut impl FnMut(&'a Expr)) {
    match &s.kind {
        StmtKind::Assign { value, .. } => walk_expr(value, f),
        StmtKind::Return(e) => walk_expr(e, f),
        StmtKind::While { cond, body } => {
            walk_expr(cond, f);
            for s in body {
                walk_stmt(s, f);
            }
        }
        StmtKind::If { cond, then_body, else_body } => {
            walk_expr(cond, f);
            for s in then_body.iter().chain(else_body) {
                walk_stmt(s, f);
            }
        }
    }
}

fn walk_expr_mut(e: &mut Expr, f: &mut impl FnMut(&mut Expr)) {
    f(e);
    if let ExprKind::Binary { lhs, rhs, .. } = &mut e.kind {
        walk_expr_mut(lhs, f);
        walk_expr_mut(rhs, f);
    }
}

fn walk_stmt_mut(s: &mut Stmt, f: &mut impl FnMut(&mut Expr)) {
    match &mut s.kind {
        StmtKind::Assign { value, .. } => walk_expr_mut(value, f),
        StmtKind::Return(e) => walk_expr_mut(e, f),
        StmtKind::While { cond, body } => {
            walk_expr_mut(cond, f);
            for s in body {
                walk_stmt_mut(s, f);
            }
        }
        StmtKind::If { cond, then_body, else_body } => {
            walk_expr_mut(cond, f);
            for s in then_body.iter_mut().chain(else_body.iter_mut()) {
                walk_stmt_mut(s, f);
            }
        }
    }
}

fn clear_expr(e: &mut Expr) {
    e.span = SourceSpan::default();
    if let ExprKind::Binary { lhs, rhs, .. } = &mut e.kind {
        clear_expr(lhs);
        clear_expr(rhs);
    }
}

fn clear_stmt(s: &mut Stmt) {
    s.span = SourceSpan::default();
    match &mut s.kind {
        StmtKind::Assign { value, .. } => clear_expr(value),
        StmtKind::Return(e) => clear_expr(e),
        StmtKind::While { cond, body } => {
            clear_expr(cond);
            body.iter_mut().for_each(clear_stmt);
        }
        StmtKind::If { cond, then_body, else_body } => {
            clear_expr(cond);
            then_body.iter_mut().for_each(clear_stmt);
            else_body.iter_mut().for_each(clear_stmt);
        }
    }
}
