//! First-order mutant generation, kill decisions and the kill matrix.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ga::{InputDomain, TestCase};
use crate::interp::{execute, ExecBudget, Outcome};
use crate::lang::{print_expr, BinOp, Expr, ExprKind, Program, SourceSpan};
use crate::{Error, Parallelism, Result};

pub type MutantId = usize;

/// Default cap on executions for an exhaustive equivalence scan.
pub const DEFAULT_SCAN_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MutationOperator {
    /// Arithmetic operator replacement.
    #[serde(rename = "AOR")]
    Aor,
    /// Relational operator replacement.
    #[serde(rename = "ROR")]
    Ror,
    /// Constant replacement: c+1, c-1, 0, 1.
    #[serde(rename = "CRP")]
    Crp,
}

impl MutationOperator {
    pub const ALL: [MutationOperator; 3] = [MutationOperator::Aor, MutationOperator::Ror, MutationOperator::Crp];

    pub fn name(self) -> &'static str {
        match self {
            MutationOperator::Aor => "AOR",
            MutationOperator::Ror => "ROR",
            MutationOperator::Crp => "CRP",
        }
    }

    /// Parses a comma separated list such as `aor,ror`.
    pub fn parse_list(list: &str) -> Result<Vec<MutationOperator>> {
        let mut ops: Vec<MutationOperator> = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let op = part.parse()?;
            if !ops.contains(&op) {
                ops.push(op);
            }
        }
        if ops.is_empty() {
            return Err(Error::Config("empty operator list".into()));
        }
        ops.sort();
        Ok(ops)
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MutationOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aor" => Ok(MutationOperator::Aor),
            "ror" => Ok(MutationOperator::Ror),
            "crp" => Ok(MutationOperator::Crp),
            other => Err(Error::Config(format!("unknown mutation operator `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mutant {
    pub id: MutantId,
    pub operator: MutationOperator,
    pub site: SourceSpan,
    pub original_fragment: String,
    pub mutated_fragment: String,
    pub program: Program,
}

/// Export shape of a mutant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutantRecord {
    pub id: MutantId,
    pub operator: MutationOperator,
    pub line: u32,
    pub column: u32,
    pub original: String,
    pub mutated: String,
}

impl From<&Mutant> for MutantRecord {
    fn from(m: &Mutant) -> Self {
        MutantRecord {
            id: m.id,
            operator: m.operator,
            line: m.site.line,
            column: m.site.column,
            original: m.original_fragment.clone(),
            mutated: m.mutated_fragment.clone(),
        }
    }
}

pub fn mutants_to_json(mutants: &[Mutant]) -> String {
    let records: Vec<MutantRecord> = mutants.iter().map(MutantRecord::from).collect();
    serde_json::to_string_pretty(&records).expect("mutant records serialize")
}

fn replacements(expr: &Expr, operators: &[MutationOperator]) -> Vec<(MutationOperator, ExprKind)> {
    let mut out = Vec::new();
    match &expr.kind {
        ExprKind::Binary { op, lhs, rhs } => {
            let (kind, family): (MutationOperator, &[BinOp]) = if op.is_arithmetic() {
                (MutationOperator::Aor, &BinOp::ARITHMETIC)
            } else {
                (MutationOperator::Ror, &BinOp::RELATIONAL)
            };
            if operators.contains(&kind) {
                for &alt in family.iter().filter(|&&alt| alt != *op) {
                    out.push((kind, ExprKind::Binary { op: alt, lhs: lhs.clone(), rhs: rhs.clone() }));
                }
            }
        }
        ExprKind::Int(c) if operators.contains(&MutationOperator::Crp) => {
            let mut seen = vec![*c];
            for v in [c.checked_add(1), c.checked_sub(1), Some(0), Some(1)].into_iter().flatten() {
                if !seen.contains(&v) {
                    seen.push(v);
                    out.push((MutationOperator::Crp, ExprKind::Int(v)));
                }
            }
        }
        _ => {}
    }
    out
}

/// Every first-order mutant the enabled operators can produce, ordered by
/// source position and then by operator enumeration order. Ids are dense
/// from zero in that order.
pub fn generate_mutants(program: &Program, operators: &[MutationOperator]) -> Vec<Mutant> {
    struct Site {
        index: usize,
        span: SourceSpan,
        original: String,
        candidates: Vec<(MutationOperator, ExprKind)>,
    }

    let mut sites = Vec::new();
    let mut index = 0;
    program.for_each_expr(&mut |e| {
        let candidates = replacements(e, operators);
        if !candidates.is_empty() {
            sites.push(Site { index, span: e.span, original: print_expr(e), candidates });
        }
        index += 1;
    });
    // stable: nodes starting at the same position keep pre-order
    sites.sort_by_key(|s| (s.span.line, s.span.column));

    let mut mutants = Vec::new();
    for site in sites {
        for (operator, kind) in site.candidates {
            let mut mutated = program.clone();
            let mut fragment = String::new();
            let mut i = 0;
            mutated.for_each_expr_mut(&mut |e| {
                if i == site.index {
                    e.kind = kind.clone();
                    fragment = print_expr(e);
                }
                i += 1;
            });
            mutants.push(Mutant {
                id: mutants.len(),
                operator,
                site: site.span,
                original_fragment: site.original.clone(),
                mutated_fragment: fragment,
                program: mutated,
            });
        }
    }
    mutants
}

/// True when the mutant's outcome on `test` differs from the original's.
pub fn kills(original: &Program, mutant: &Mutant, test: &TestCase, budget: ExecBudget) -> Result<bool> {
    let expected = execute(original, &test.genes, budget)?;
    let actual = execute(&mutant.program, &test.genes, budget)?;
    Ok(expected != actual)
}

/// Boolean test x mutant table: rows are tests in suite order, columns are
/// mutants in list order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillMatrix {
    mutant_ids: Vec<MutantId>,
    rows: usize,
    cells: Vec<bool>,
}

impl KillMatrix {
    pub fn new(mutant_ids: Vec<MutantId>, rows: Vec<Vec<bool>>) -> Result<Self> {
        let width = mutant_ids.len();
        if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
            return Err(Error::SuiteFormat { row: i + 1, message: format!("expected {width} cells") });
        }
        Ok(KillMatrix { mutant_ids, rows: rows.len(), cells: rows.concat() })
    }

    pub fn mutant_ids(&self) -> &[MutantId] {
        &self.mutant_ids
    }

    pub fn test_count(&self) -> usize {
        self.rows
    }

    pub fn killed(&self, test: usize, mutant_index: usize) -> bool {
        self.cells[test * self.mutant_ids.len() + mutant_index]
    }

    pub fn row(&self, test: usize) -> &[bool] {
        let w = self.mutant_ids.len();
        &self.cells[test * w..(test + 1) * w]
    }

    /// Ids of the mutants killed by one test.
    pub fn kill_set(&self, test: usize) -> BTreeSet<MutantId> {
        self.row(test).iter().zip(&self.mutant_ids).filter_map(|(&k, &id)| k.then_some(id)).collect()
    }

    /// Ids killed by at least one test.
    pub fn killed_union(&self) -> BTreeSet<MutantId> {
        (0..self.rows).flat_map(|t| self.kill_set(t)).collect()
    }

    /// Header `m<id>,...` followed by one `0`/`1` row per test.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.mutant_ids.iter().map(|id| format!("m{id}")).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for t in 0..self.rows {
            let row: Vec<&str> = self.row(t).iter().map(|&k| if k { "1" } else { "0" }).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::SuiteFormat { row: 0, message: "missing header".into() })?;
        let mutant_ids = header
            .split(',')
            .filter(|h| !h.is_empty())
            .map(|h| {
                h.strip_prefix('m')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| Error::SuiteFormat { row: 0, message: format!("bad column `{h}`") })
            })
            .collect::<Result<Vec<MutantId>>>()?;
        let rows = lines
            .enumerate()
            .map(|(i, line)| {
                line.split(',')
                    .filter(|c| !c.is_empty())
                    .map(|c| match c {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        other => Err(Error::SuiteFormat { row: i + 1, message: format!("bad cell `{other}`") }),
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        KillMatrix::new(mutant_ids, rows)
    }
}

pub fn build_kill_matrix(
    original: &Program,
    mutants: &[Mutant],
    suite: &[TestCase],
    budget: ExecBudget,
    parallelism: Parallelism,
) -> Result<KillMatrix> {
    let row = |test: &TestCase| -> Result<Vec<bool>> {
        let expected = execute(original, &test.genes, budget)?;
        mutants.iter().map(|m| Ok(execute(&m.program, &test.genes, budget)? != expected)).collect()
    };
    let rows = match parallelism {
        Parallelism::Sequential => suite.iter().map(row).collect::<Result<Vec<_>>>()?,
        Parallelism::Parallel => suite.par_iter().map(row).collect::<Result<Vec<_>>>()?,
    };
    KillMatrix::new(mutants.iter().map(|m| m.id).collect(), rows)
}

/// Ids of mutants no input of `domain` can kill. Exact relative to the
/// domain; fails if the enumeration would exceed `cap` executions.
pub fn equivalent_mutant_scan(
    original: &Program,
    mutants: &[Mutant],
    domain: &InputDomain,
    budget: ExecBudget,
    cap: u64,
    parallelism: Parallelism,
) -> Result<BTreeSet<MutantId>> {
    if mutants.is_empty() {
        return Ok(BTreeSet::new());
    }
    if domain.arity() != original.arity() {
        return Err(Error::ArityMismatch { expected: original.arity(), found: domain.arity() });
    }
    let executions = domain.size().saturating_mul(mutants.len() as u128 + 1);
    if executions > cap as u128 {
        return Err(Error::DomainTooLarge { executions, cap });
    }

    let inputs: Vec<TestCase> = domain.iter_all().collect();
    let expected: Vec<Outcome> = inputs.iter().map(|t| execute(original, &t.genes, budget)).collect::<Result<_>>()?;
    let survives = |m: &Mutant| -> Result<bool> {
        for (t, want) in inputs.iter().zip(&expected) {
            if execute(&m.program, &t.genes, budget)? != *want {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let flags: Vec<bool> = match parallelism {
        Parallelism::Sequential => mutants.iter().map(survives).collect::<Result<_>>()?,
        Parallelism::Parallel => mutants.par_iter().map(survives).collect::<Result<_>>()?,
    };
    Ok(mutants.iter().zip(flags).filter_map(|(m, eq)| eq.then_some(m.id)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse, pretty_print};
    use MutationOperator::*;

    fn power() -> Program {
        parse(include_str!("../../../examples/power.tl")).unwrap()
    }

    fn by_fragments<'a>(ms: &'a [Mutant], orig: &str, mutated: &str) -> &'a Mutant {
        ms.iter()
            .find(|m| m.original_fragment == orig && m.mutated_fragment == mutated)
            .unwrap_or_else(|| panic!("no mutant {orig} -> {mutated}"))
    }

    #[test]
    fn power_contains_the_two_listed_mutants() {
        let ms = generate_mutants(&power(), &[Aor, Ror]);
        let cond = by_fragments(&ms, "i <= b", "i < b");
        assert_eq!(cond.operator, Ror);
        assert_eq!((cond.site.line, cond.site.column), (11, 10));
        let mul = by_fragments(&ms, "P * a", "P + a");
        assert_eq!(mul.operator, Aor);
        assert!(pretty_print(&mul.program).contains("P = P + a"));
    }

    #[test]
    fn no_sites_no_mutants() {
        let p = parse("fn f(x) { return x }").unwrap();
        assert!(generate_mutants(&p, &MutationOperator::ALL).is_empty());
    }

    #[test]
    fn loop_condition_has_five_relational_mutants() {
        let ms = generate_mutants(&power(), &[Ror]);
        let at_loop: Vec<&str> =
            ms.iter().filter(|m| m.original_fragment == "i <= b").map(|m| m.mutated_fragment.as_str()).collect();
        assert_eq!(at_loop, vec!["i < b", "i > b", "i >= b", "i == b", "i != b"]);
    }

    #[test]
    fn constant_replacement_skips_duplicates() {
        let p = parse("fn f() { return 1 }").unwrap();
        let ms = generate_mutants(&p, &[Crp]);
        let vals: Vec<&str> = ms.iter().map(|m| m.mutated_fragment.as_str()).collect();
        assert_eq!(vals, vec!["2", "0"]);
        let p = parse("fn f() { return 0 }").unwrap();
        let vals: Vec<String> = generate_mutants(&p, &[Crp]).into_iter().map(|m| m.mutated_fragment).collect();
        assert_eq!(vals, vec!["1", "-1"]);
        let p = parse("fn f() { return 9223372036854775807 }").unwrap();
        let vals: Vec<String> = generate_mutants(&p, &[Crp]).into_iter().map(|m| m.mutated_fragment).collect();
        assert_eq!(vals, vec!["9223372036854775806", "0", "1"]);
    }

    #[test]
    fn ids_are_dense_and_order_is_positional() {
        let ms = generate_mutants(&power(), &MutationOperator::ALL);
        assert!(ms.iter().enumerate().all(|(i, m)| m.id == i));
        let positions: Vec<(u32, u32)> = ms.iter().map(|m| (m.site.line, m.site.column)).collect();
        let mut sorted = positions.clone();
        sorted.sort();
        assert_eq!(positions, sorted);
        assert_eq!(ms, generate_mutants(&power(), &MutationOperator::ALL));
    }

    #[test]
    fn nested_sites_keep_outer_first() {
        let p = parse("fn f(a, b) { return a * b + 1 }").unwrap();
        let ms = generate_mutants(&p, &[Aor]);
        assert_eq!(ms[0].original_fragment, "a * b + 1");
        assert_eq!(ms[4].original_fragment, "a * b");
    }

    #[test]
    fn kill_examples_on_power() {
        let p = power();
        let ms = generate_mutants(&p, &[Aor, Ror]);
        let b = ExecBudget::default();
        let cond = by_fragments(&ms, "i <= b", "i < b");
        let mul = by_fragments(&ms, "P * a", "P + a");
        let t23 = TestCase::new(vec![2, 3]);
        assert!(kills(&p, cond, &t23, b).unwrap());
        assert!(kills(&p, mul, &t23, b).unwrap());
        let t17 = TestCase::new(vec![1, 7]);
        assert!(!kills(&p, cond, &t17, b).unwrap());
        assert!(!kills(&p, mul, &t17, b).unwrap());
    }

    #[test]
    fn identical_program_is_never_killed() {
        let p = power();
        let twin = Mutant {
            id: 0,
            operator: Aor,
            site: SourceSpan::default(),
            original_fragment: String::new(),
            mutated_fragment: String::new(),
            program: p.clone(),
        };
        for t in InputDomain::uniform(2, 1, 8).unwrap().iter_all() {
            assert!(!kills(&p, &twin, &t, ExecBudget::default()).unwrap());
        }
    }

    #[test]
    fn matrix_rows_for_loop_mutants() {
        let p = power();
        let ms = generate_mutants(&p, &[Aor, Ror]);
        let pair = vec![by_fragments(&ms, "i <= b", "i < b").clone(), by_fragments(&ms, "P * a", "P + a").clone()];
        let km =
            build_kill_matrix(&p, &pair, &[TestCase::new(vec![2, 3])], ExecBudget::default(), Parallelism::Sequential)
                .unwrap();
        assert_eq!(km.row(0), &[true, true]);
        let empty = build_kill_matrix(&p, &pair, &[], ExecBudget::default(), Parallelism::Parallel).unwrap();
        assert_eq!(empty.test_count(), 0);
        assert_eq!(empty.to_csv().lines().count(), 1);
    }

    #[test]
    fn matrix_csv_shape() {
        let km = KillMatrix::new(vec![3, 7], vec![vec![true, false], vec![false, false]]).unwrap();
        let csv = km.to_csv();
        assert_eq!(csv, "m3,m7\n1,0\n0,0\n");
        assert_eq!(KillMatrix::from_csv(&csv).unwrap(), km);
        assert!(KillMatrix::from_csv("m0\n2\n").is_err());
    }

    #[test]
    fn arity_mismatch_propagates() {
        let p = power();
        let ms = generate_mutants(&p, &[Aor]);
        let err = build_kill_matrix(&p, &ms, &[TestCase::new(vec![1])], ExecBudget::default(), Parallelism::Parallel)
            .unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { .. }));
    }

    #[test]
    fn b_le_one_is_equivalent_on_positive_domain() {
        let p = power();
        let ms = generate_mutants(&p, &[Ror]);
        let relaxed = by_fragments(&ms, "b == 1", "b <= 1");
        let cond = by_fragments(&ms, "i <= b", "i < b");
        let domain = InputDomain::uniform(2, 1, 8).unwrap();
        let eq =
            equivalent_mutant_scan(&p, &ms, &domain, ExecBudget::default(), DEFAULT_SCAN_CAP, Parallelism::Parallel)
                .unwrap();
        assert!(eq.contains(&relaxed.id));
        assert!(!eq.contains(&cond.id));
        assert!(equivalent_mutant_scan(&p, &[], &domain, ExecBudget::default(), 1, Parallelism::Parallel)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn scan_respects_cap() {
        let p = power();
        let ms = generate_mutants(&p, &[Ror]);
        let domain = InputDomain::uniform(2, 1, 8).unwrap();
        let err =
            equivalent_mutant_scan(&p, &ms, &domain, ExecBudget::default(), 100, Parallelism::Sequential).unwrap_err();
        assert!(matches!(err, Error::DomainTooLarge { cap: 100, .. }));
    }

    #[test]
    fn operator_list_parsing() {
        assert_eq!(MutationOperator::parse_list("ror, AOR,ror").unwrap(), vec![Aor, Ror]);
        assert!(MutationOperator::parse_list("xyz").is_err());
        assert!(MutationOperator::parse_list("").is_err());
    }

    #[test]
    fn json_export_fields() {
        let ms = generate_mutants(&parse("fn f(a) { return a + 2 }").unwrap(), &[Aor]);
        let v: serde_json::Value = serde_json::from_str(&mutants_to_json(&ms)).unwrap();
        assert_eq!(v[0]["operator"], "AOR");
        assert_eq!(v[0]["original"], "a + 2");
        assert_eq!(v[0]["mutated"], "a - 2");
        assert_eq!(v[0]["line"], 1);
        assert_eq!(v[0]["column"], 18);
        assert_eq!(v.as_array().unwrap().len(), 4);
    }
}
