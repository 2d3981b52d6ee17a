use super::ast::{BinOp, Expr, Program, SourceSpan, Stmt, StmtKind};
use super::lexer::{tokenize, Pos, Tok, Token};
use super::ParseError;

/// Parses the source text of a single toy-language function.
pub fn parse(source: &str) -> Result<Program, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0 };
    let program = parser.program()?;
    parser.expect(Tok::Eof)?;
    Ok(program)
}

fn span(start: Pos, end: Pos) -> SourceSpan {
    SourceSpan::new(start.line, start.column, end.offset - start.offset)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn current(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&self, expected: &str) -> ParseError {
        let tok = self.current();
        ParseError::new(tok.start.line, tok.start.column, format!("expected {expected}, found {}", tok.tok.describe()))
    }

    fn expect(&mut self, want: Tok) -> Result<Token, ParseError> {
        if *self.peek() == want {
            Ok(self.bump())
        } else {
            let expected = match &want {
                Tok::Eof => "end of input".to_string(),
                other => other.describe(),
            };
            Err(self.error_here(&expected))
        }
    }

    fn ident(&mut self) -> Result<(String, Token), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => Ok((name, self.bump())),
            _ => Err(self.error_here("identifier")),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let fn_tok = self.expect(Tok::Fn)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;

        let mut params: Vec<String> = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                let (param, tok) = self.ident()?;
                if params.contains(&param) {
                    return Err(ParseError::new(
                        tok.start.line,
                        tok.start.column,
                        format!("duplicate parameter `{param}`"),
                    ));
                }
                params.push(param);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => break,
                    _ => return Err(self.error_here("`,` or `)`")),
                }
            }
        }
        self.expect(Tok::RParen)?;
        let (body, end) = self.block()?;
        Ok(Program { name, params, body, span: span(fn_tok.start, end) })
    }

    /// Returns the statements and the position just past the closing brace.
    fn block(&mut self) -> Result<(Vec<Stmt>, Pos), ParseError> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                Tok::RBrace => break,
                Tok::Semi => {
                    self.bump();
                }
                Tok::Eof => return Err(self.error_here("`}`")),
                _ => stmts.push(self.statement()?),
            }
        }
        let close = self.bump();
        Ok((stmts, close.end))
    }

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let start = self.current().start;
        match self.peek().clone() {
            Tok::Let => {
                self.bump();
                let (target, _) = self.ident()?;
                self.expect(Tok::Assign)?;
                let (value, _, end) = self.expr()?;
                Ok(Stmt { kind: StmtKind::Assign { target, value }, span: span(start, end) })
            }
            Tok::Ident(target) => {
                let name_tok = self.bump();
                match self.peek() {
                    Tok::Assign => {
                        self.bump();
                        let (value, _, end) = self.expr()?;
                        Ok(Stmt { kind: StmtKind::Assign { target, value }, span: span(start, end) })
                    }
                    Tok::PlusPlus => {
                        // `x++` becomes `x = x + 1`
                        let inc = self.bump();
                        let whole = span(start, inc.end);
                        let value = Expr::binary(
                            BinOp::Add,
                            Expr::var(target.clone(), span(name_tok.start, name_tok.end)),
                            Expr::int(1, span(inc.start, inc.end)),
                            whole,
                        );
                        Ok(Stmt { kind: StmtKind::Assign { target, value }, span: whole })
                    }
                    _ => Err(self.error_here("`=` or `++`")),
                }
            }
            Tok::While => {
                self.bump();
                let cond = self.condition()?;
                let (body, end) = self.block()?;
                Ok(Stmt { kind: StmtKind::While { cond, body }, span: span(start, end) })
            }
            Tok::If => self.if_statement(),
            Tok::Return => {
                self.bump();
                let (value, _, end) = self.expr()?;
                Ok(Stmt { kind: StmtKind::Return(value), span: span(start, end) })
            }
            _ => Err(self.error_here("statement")),
        }
    }

    fn if_statement(&mut self) -> Result<Stmt, ParseError> {
        let start = self.expect(Tok::If)?.start;
        let cond = self.condition()?;
        let (then_body, mut end) = self.block()?;
        let mut else_body = Vec::new();
        if *self.peek() == Tok::Else {
            self.bump();
            if *self.peek() == Tok::If {
                let nested = self.if_statement()?;
                end = self.tokens[self.pos - 1].end;
                else_body.push(nested);
            } else {
                let (stmts, close) = self.block()?;
                else_body = stmts;
                end = close;
            }
        }
        Ok(Stmt { kind: StmtKind::If { cond, then_body, else_body }, span: span(start, end) })
    }

    fn condition(&mut self) -> Result<Expr, ParseError> {
        let at = self.current().start;
        let (cond, _, _) = self.expr()?;
        if !cond.is_relational() {
            return Err(ParseError::new(at.line, at.column, "condition must be a comparison"));
        }
        Ok(cond)
    }

    /// Expressions return the node plus the outer extent, which includes
    /// any enclosing parentheses.
    fn expr(&mut self) -> Result<(Expr, Pos, Pos), ParseError> {
        self.binary_level(1)
    }

    fn binary_level(&mut self, level: u8) -> Result<(Expr, Pos, Pos), ParseError> {
        if level > 3 {
            return self.primary();
        }
        let (mut lhs, start, mut end) = self.binary_level(level + 1)?;
        while let Some(op) = binop_of(self.peek()).filter(|op| op.precedence() == level) {
            self.bump();
            let (rhs, _, rhs_end) = self.binary_level(level + 1)?;
            end = rhs_end;
            lhs = Expr::binary(op, lhs, rhs, span(start, end));
        }
        Ok((lhs, start, end))
    }

    fn primary(&mut self) -> Result<(Expr, Pos, Pos), ParseError> {
        let tok = self.current().clone();
        match tok.tok {
            Tok::Int(v) => {
                self.bump();
                let value = i64::try_from(v).map_err(|_| {
                    ParseError::new(tok.start.line, tok.start.column, format!("integer literal `{v}` is out of range"))
                })?;
                Ok((Expr::int(value, span(tok.start, tok.end)), tok.start, tok.end))
            }
            Tok::Minus => {
                self.bump();
                let lit = self.current().clone();
                let Tok::Int(magnitude) = lit.tok else {
                    return Err(self.error_here("integer literal after `-`"));
                };
                self.bump();
                let value = i64::try_from(-(magnitude as i128)).map_err(|_| {
                    ParseError::new(
                        tok.start.line,
                        tok.start.column,
                        format!("integer literal `-{magnitude}` is out of range"),
                    )
                })?;
                Ok((Expr::int(value, span(tok.start, lit.end)), tok.start, lit.end))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok((Expr::var(name, span(tok.start, tok.end)), tok.start, tok.end))
            }
            Tok::LParen => {
                self.bump();
                let (inner, _, _) = self.expr()?;
                let close = self.expect(Tok::RParen)?;
                Ok((inner, tok.start, close.end))
            }
            _ => Err(self.error_here("expression")),
        }
    }
}

fn binop_of(tok: &Tok) -> Option<BinOp> {
    Some(match tok {
        Tok::Plus => BinOp::Add,
        Tok::Minus => BinOp::Sub,
        Tok::Star => BinOp::Mul,
        Tok::Slash => BinOp::Div,
        Tok::Percent => BinOp::Rem,
        Tok::Lt => BinOp::Lt,
        Tok::Le => BinOp::Le,
        Tok::Gt => BinOp::Gt,
        Tok::Ge => BinOp::Ge,
        Tok::EqEq => BinOp::Eq,
        Tok::NotEq => BinOp::Ne,
        _ => return None,
    })
}
