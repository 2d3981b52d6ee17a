use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mutagen::ga::{evaluate_all, EvalContext, InputDomain, TestCase};
use mutagen::interp::{execute, ExecBudget, Outcome};
use mutagen::lang::{parse, Program};
use mutagen::mutation::{build_kill_matrix, equivalent_mutant_scan, generate_mutants, Mutant, MutationOperator};
use mutagen::suite::{mutation_score, Score};
use mutagen::Parallelism;

const POWER: &str = include_str!("../../../examples/power.tl");

fn power() -> Program {
    parse(POWER).unwrap()
}

fn domain() -> InputDomain {
    InputDomain::uniform(2, 1, 8).unwrap()
}

fn budget() -> ExecBudget {
    ExecBudget::default()
}

#[test]
fn power_matches_integer_pow() {
    let p = power();
    for a in 1..=8i64 {
        for b in 1..=8u32 {
            let got = execute(&p, &[a, b as i64], budget()).unwrap();
            assert_eq!(got, Outcome::Value(a.pow(b)), "power({a}, {b})");
        }
    }
}

#[test]
fn kill_matrix_cells_match_direct_execution() {
    let p = power();
    let mutants = generate_mutants(&p, &MutationOperator::ALL);
    let suite: Vec<TestCase> = domain().iter_all().collect();
    let matrix = build_kill_matrix(&p, &mutants, &suite, budget(), Parallelism::Parallel).unwrap();
    assert_eq!(matrix.test_count(), 64);
    for (t, test) in suite.iter().enumerate() {
        let expected = execute(&p, &test.genes, budget()).unwrap();
        for (j, m) in mutants.iter().enumerate() {
            let got = execute(&m.program, &test.genes, budget()).unwrap();
            assert_eq!(matrix.killed(t, j), got != expected, "test {test} mutant {}", m.id);
        }
    }
}

#[test]
fn scan_finds_exactly_the_unkilled_columns() {
    let p = power();
    let mutants = generate_mutants(&p, &MutationOperator::ALL);
    let suite: Vec<TestCase> = domain().iter_all().collect();
    let matrix = build_kill_matrix(&p, &mutants, &suite, budget(), Parallelism::Sequential).unwrap();
    let never_killed: BTreeSet<usize> = mutants
        .iter()
        .enumerate()
        .filter(|&(j, _)| (0..suite.len()).all(|t| !matrix.killed(t, j)))
        .map(|(_, m)| m.id)
        .collect();
    let scanned = equivalent_mutant_scan(&p, &mutants, &domain(), budget(), 1_000_000, Parallelism::Parallel).unwrap();
    assert_eq!(scanned, never_killed);
    assert!(!scanned.is_empty());
}

#[test]
fn exhaustive_suite_reaches_the_achievable_score() {
    let p = power();
    let mutants = generate_mutants(&p, &MutationOperator::ALL);
    let ctx = EvalContext {
        original: &p,
        mutants: &mutants,
        domain: &domain(),
        budget: budget(),
        parallelism: Parallelism::Parallel,
    };
    let all = evaluate_all(domain().iter_all().collect(), &ctx).unwrap();
    let score = mutation_score(&all, mutants.len()).unwrap();
    let equivalent =
        equivalent_mutant_scan(&p, &mutants, &domain(), budget(), 1_000_000, Parallelism::Parallel).unwrap();
    assert_eq!(score, Score::new(mutants.len() - equivalent.len(), mutants.len()).unwrap());
    let expected = 1.0 - equivalent.len() as f64 / mutants.len() as f64;
    assert!((score.as_f64() - expected).abs() < 1e-12);
}

/// Killed mutants computed the slow way: one execution pair per (test, mutant).
fn union_oracle(p: &Program, mutants: &[Mutant], suite: &[TestCase]) -> BTreeSet<usize> {
    let mut killed = BTreeSet::new();
    for test in suite {
        let expected = execute(p, &test.genes, budget()).unwrap();
        for m in mutants {
            if execute(&m.program, &test.genes, budget()).unwrap() != expected {
                killed.insert(m.id);
            }
        }
    }
    killed
}

#[test]
fn random_suites_score_like_the_union_oracle() {
    let p = power();
    let all = generate_mutants(&p, &MutationOperator::ALL);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let mutants: Vec<Mutant> = all.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        if mutants.is_empty() {
            continue;
        }
        let n = rng.gen_range(0..=12);
        let suite: Vec<TestCase> =
            (0..n).map(|_| TestCase::new(vec![rng.gen_range(1..=8), rng.gen_range(1..=8)])).collect();
        let ctx = EvalContext {
            original: &p,
            mutants: &mutants,
            domain: &domain(),
            budget: budget(),
            parallelism: Parallelism::Sequential,
        };
        let members = evaluate_all(suite.clone(), &ctx).unwrap();
        let score = mutation_score(&members, mutants.len()).unwrap();
        let oracle = union_oracle(&p, &mutants, &suite);
        assert_eq!(score.killed, oracle.len());
        assert_eq!(score.total, mutants.len());
    }
}
