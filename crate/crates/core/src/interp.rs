//! Tree-walking evaluator with a step budget.
//!
//! One step is one statement evaluation; a `while` costs one step per
//! condition check and nothing for the loop statement itself. Running out of
//! steps is an ordinary [`Outcome`], so looping mutants stay observable.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{BinOp, Expr, ExprKind, Program, Stmt, StmtKind};
use crate::Error;

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuntimeErrorKind {
    UndefinedVariable,
    DivisionByZero,
    Overflow,
    NoReturn,
}

/// Result of running a program. Two outcomes are the same observable
/// behavior exactly when they compare equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Value(i64),
    RuntimeError(RuntimeErrorKind),
    FuelExhausted,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(v) => write!(f, "value {v}"),
            Outcome::RuntimeError(kind) => write!(f, "error {kind:?}"),
            Outcome::FuelExhausted => f.write_str("fuel exhausted"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExecBudget {
    fuel: u64,
}

impl ExecBudget {
    pub fn new(fuel: u64) -> Result<Self, Error> {
        if fuel == 0 {
            return Err(Error::Config("fuel must be at least 1".into()));
        }
        Ok(ExecBudget { fuel })
    }

    pub fn fuel(self) -> u64 {
        self.fuel
    }
}

impl Default for ExecBudget {
    fn default() -> Self {
        ExecBudget { fuel: DEFAULT_FUEL }
    }
}

/// Runs `program` on `inputs`. Fails only when the input count does not
/// match the parameter count.
pub fn execute(program: &Program, inputs: &[i64], budget: ExecBudget) -> Result<Outcome, Error> {
    if inputs.len() != program.arity() {
        return Err(Error::ArityMismatch { expected: program.arity(), found: inputs.len() });
    }
    let mut machine = Machine {
        vars: program.params.iter().map(String::as_str).zip(inputs.iter().copied()).collect(),
        steps: 0,
        fuel: budget.fuel,
    };
    Ok(match machine.block(&program.body) {
        Ok(()) => Outcome::RuntimeError(RuntimeErrorKind::NoReturn),
        Err(Halt::Return(v)) => Outcome::Value(v),
        Err(Halt::Error(kind)) => Outcome::RuntimeError(kind),
        Err(Halt::OutOfFuel) => Outcome::FuelExhausted,
    })
}

enum Halt {
    Return(i64),
    Error(RuntimeErrorKind),
    OutOfFuel,
}

struct Machine<'p> {
    vars: HashMap<&'p str, i64>,
    steps: u64,
    fuel: u64,
}

impl<'p> Machine<'p> {
    fn tick(&mut self) -> Result<(), Halt> {
        if self.steps >= self.fuel {
            return Err(Halt::OutOfFuel);
        }
        self.steps += 1;
        Ok(())
    }

    fn block(&mut self, stmts: &'p [Stmt]) -> Result<(), Halt> {
        stmts.iter().try_for_each(|s| self.stmt(s))
    }

    fn stmt(&mut self, stmt: &'p Stmt) -> Result<(), Halt> {
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                self.tick()?;
                let v = self.eval(value)?;
                self.vars.insert(target, v);
                Ok(())
            }
            StmtKind::Return(value) => {
                self.tick()?;
                Err(Halt::Return(self.eval(value)?))
            }
            StmtKind::If { cond, then_body, else_body } => {
                self.tick()?;
                if self.eval(cond)? != 0 {
                    self.block(then_body)
                } else {
                    self.block(else_body)
                }
            }
            StmtKind::While { cond, body } => loop {
                self.tick()?;
                if self.eval(cond)? == 0 {
                    return Ok(());
                }
                self.block(body)?;
            },
        }
    }

    fn eval(&self, expr: &Expr) -> Result<i64, Halt> {
        match &expr.kind {
            ExprKind::Int(v) => Ok(*v),
            ExprKind::Var(name) => {
                self.vars.get(name.as_str()).copied().ok_or(Halt::Error(RuntimeErrorKind::UndefinedVariable))
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                apply(*op, l, r).map_err(Halt::Error)
            }
        }
    }
}

pub(crate) fn apply(op: BinOp, l: i64, r: i64) -> Result<i64, RuntimeErrorKind> {
    use RuntimeErrorKind::{DivisionByZero, Overflow};
    match op {
        BinOp::Add => l.checked_add(r).ok_or(Overflow),
        BinOp::Sub => l.checked_sub(r).ok_or(Overflow),
        BinOp::Mul => l.checked_mul(r).ok_or(Overflow),
        BinOp::Div | BinOp::Rem if r == 0 => Err(DivisionByZero),
        BinOp::Div => l.checked_div(r).ok_or(Overflow),
        BinOp::Rem => l.checked_rem(r).ok_or(Overflow),
        BinOp::Lt => Ok((l < r) as i64),
        BinOp::Le => Ok((l <= r) as i64),
        BinOp::Gt => Ok((l > r) as i64),
        BinOp::Ge => Ok((l >= r) as i64),
        BinOp::Eq => Ok((l == r) as i64),
        BinOp::Ne => Ok((l != r) as i64),
    }
}
