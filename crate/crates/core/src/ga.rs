//! Genetic algorithm over test cases.
//!
//! One test case is one chromosome and each input value is a gene. Fitness
//! is the number of mutants a test kills.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::interp::{execute, ExecBudget, DEFAULT_FUEL};
use crate::lang::Program;
use crate::mutation::{Mutant, MutantId};
use crate::{Error, Parallelism, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TestCase {
    pub genes: Vec<i64>,
}

impl TestCase {
    pub fn new(genes: Vec<i64>) -> Self {
        TestCase { genes }
    }

    pub fn arity(&self) -> usize {
        self.genes.len()
    }
}

impl From<Vec<i64>> for TestCase {
    fn from(genes: Vec<i64>) -> Self {
        TestCase { genes }
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, g) in self.genes.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str(")")
    }
}

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Config(format!("empty interval {lo}..{hi}")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(self, v: i64) -> bool {
        self.lo <= v && v <= self.hi
    }

    /// Number of integers in the interval.
    pub fn count(self) -> u128 {
        (self.hi as i128 - self.lo as i128) as u128 + 1
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Per-parameter input bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputDomain {
    intervals: Vec<Interval>,
}

impl InputDomain {
    pub fn new(intervals: Vec<Interval>) -> Self {
        InputDomain { intervals }
    }

    /// The same `[lo, hi]` for each of `arity` parameters.
    pub fn uniform(arity: usize, lo: i64, hi: i64) -> Result<Self> {
        Ok(InputDomain { intervals: vec![Interval::new(lo, hi)?; arity] })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn arity(&self) -> usize {
        self.intervals.len()
    }

    pub fn contains(&self, test: &TestCase) -> bool {
        test.arity() == self.arity() && test.genes.iter().zip(&self.intervals).all(|(g, iv)| iv.contains(*g))
    }

    /// Number of distinct inputs; saturates at `u128::MAX`.
    pub fn size(&self) -> u128 {
        self.intervals.iter().fold(1u128, |acc, iv| acc.saturating_mul(iv.count()))
    }

    /// Every input in the domain, last parameter varying fastest.
    pub fn iter_all(&self) -> impl Iterator<Item = TestCase> + '_ {
        let mut next = Some(self.intervals.iter().map(|iv| iv.lo).collect::<Vec<_>>());
        std::iter::from_fn(move || {
            let current = next.take()?;
            let mut succ = current.clone();
            for i in (0..succ.len()).rev() {
                if succ[i] < self.intervals[i].hi {
                    succ[i] += 1;
                    next = Some(succ);
                    break;
                }
                succ[i] = self.intervals[i].lo;
            }
            Some(TestCase::new(current))
        })
    }
}

impl fmt::Display for InputDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Evolution parameters. Every key is optional when deserializing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub max_generations: usize,
    pub crossover_rate: f64,
    pub gene_mutation_rate: f64,
    pub tournament_size: usize,
    pub elitism_count: usize,
    /// Tests whose own kill ratio is at or below this are dropped.
    pub drop_threshold: f64,
    pub target_score: f64,
    /// Scores strictly above this are labelled "best fit" in reports.
    pub best_fit_display_threshold: f64,
    pub seed: u64,
    pub fuel: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 20,
            max_generations: 100,
            crossover_rate: 0.9,
            gene_mutation_rate: 0.1,
            tournament_size: 3,
            elitism_count: 1,
            drop_threshold: 0.20,
            target_score: 1.0,
            best_fit_display_threshold: 0.50,
            seed: 0,
            fuel: DEFAULT_FUEL,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        let unit = |name: &str, v: f64| -> Result<()> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be within [0, 1], got {v}")))
            }
        };
        if self.population_size == 0 {
            return fail("population_size must be positive".into());
        }
        if self.tournament_size == 0 || self.tournament_size > self.population_size {
            return fail(format!(
                "tournament_size must be within 1..={}, got {}",
                self.population_size, self.tournament_size
            ));
        }
        if self.elitism_count >= self.population_size {
            return fail(format!(
                "elitism_count must be below population_size ({}), got {}",
                self.population_size, self.elitism_count
            ));
        }
        unit("crossover_rate", self.crossover_rate)?;
        unit("gene_mutation_rate", self.gene_mutation_rate)?;
        unit("drop_threshold", self.drop_threshold)?;
        unit("best_fit_display_threshold", self.best_fit_display_threshold)?;
        if !(self.target_score > 0.0 && self.target_score <= 1.0) {
            return fail(format!("target_score must be within (0, 1], got {}", self.target_score));
        }
        if self.fuel == 0 {
            return fail("fuel must be at least 1".into());
        }
        Ok(())
    }

    pub fn budget(&self) -> ExecBudget {
        ExecBudget::new(self.fuel).unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub test: TestCase,
    pub fitness: usize,
    pub kill_set: BTreeSet<MutantId>,
}

impl Individual {
    /// Higher fitness first, then lexicographically smaller genes.
    fn rank(&self, other: &Individual) -> Ordering {
        other.fitness.cmp(&self.fitness).then_with(|| self.test.cmp(&other.test))
    }
}

/// Everything fitness evaluation and breeding need besides the population.
#[derive(Clone, Copy, Debug)]
pub struct EvalContext<'a> {
    pub original: &'a Program,
    pub mutants: &'a [Mutant],
    pub domain: &'a InputDomain,
    pub budget: ExecBudget,
    pub parallelism: Parallelism,
}

pub fn random_test<R: Rng + ?Sized>(domain: &InputDomain, rng: &mut R) -> TestCase {
    TestCase::new(domain.intervals.iter().map(|iv| rng.gen_range(iv.lo..=iv.hi)).collect())
}

pub fn evaluate_fitness(
    test: &TestCase,
    original: &Program,
    mutants: &[Mutant],
    budget: ExecBudget,
) -> Result<Individual> {
    let expected = execute(original, &test.genes, budget)?;
    let mut kill_set = BTreeSet::new();
    for m in mutants {
        if execute(&m.program, &test.genes, budget)? != expected {
            kill_set.insert(m.id);
        }
    }
    Ok(Individual { test: test.clone(), fitness: kill_set.len(), kill_set })
}

/// Evaluates a batch of tests, preserving order.
pub fn evaluate_all(tests: Vec<TestCase>, ctx: &EvalContext<'_>) -> Result<Vec<Individual>> {
    let eval = |t: &TestCase| evaluate_fitness(t, ctx.original, ctx.mutants, ctx.budget);
    match ctx.parallelism {
        Parallelism::Sequential => tests.iter().map(eval).collect(),
        Parallelism::Parallel => tests.par_iter().map(eval).collect(),
    }
}

/// Tournament selection: draws `k` distinct members uniformly and returns
/// the index of the fittest. Ties go to the lexicographically smaller test,
/// then to the earlier index.
pub fn select<R: Rng + ?Sized>(population: &[Individual], k: usize, rng: &mut R) -> usize {
    assert!(!population.is_empty(), "tournament over an empty population");
    let k = k.clamp(1, population.len());
    rand::seq::index::sample(rng, population.len(), k)
        .into_iter()
        .min_by(|&a, &b| population[a].rank(&population[b]).then(a.cmp(&b)))
        .expect("k >= 1")
}

/// Single-point crossover, applied with probability `rate`.
pub fn crossover<R: Rng + ?Sized>(a: &TestCase, b: &TestCase, rate: f64, rng: &mut R) -> (TestCase, TestCase) {
    debug_assert_eq!(a.arity(), b.arity());
    let apply = rng.gen_bool(rate);
    if !apply || a.arity() < 2 {
        return (a.clone(), b.clone());
    }
    let cut = rng.gen_range(1..a.arity());
    crossover_at(a, b, cut)
}

/// Children `a[..cut] ++ b[cut..]` and `b[..cut] ++ a[cut..]`.
pub fn crossover_at(a: &TestCase, b: &TestCase, cut: usize) -> (TestCase, TestCase) {
    let left = a.genes[..cut].iter().chain(&b.genes[cut..]).copied().collect();
    let right = b.genes[..cut].iter().chain(&a.genes[cut..]).copied().collect();
    (TestCase::new(left), TestCase::new(right))
}

pub fn mutate_genes<R: Rng + ?Sized>(test: &TestCase, domain: &InputDomain, rate: f64, rng: &mut R) -> TestCase {
    let genes = test
        .genes
        .iter()
        .zip(&domain.intervals)
        .map(|(&g, iv)| if rng.gen_bool(rate) { rng.gen_range(iv.lo..=iv.hi) } else { g })
        .collect();
    TestCase::new(genes)
}

/// Indices of the population ordered best first.
pub fn ranking(population: &[Individual]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| population[a].rank(&population[b]).then(a.cmp(&b)));
    order
}

/// Breeds the next population: elites are copied unchanged, the rest come
/// from selection, crossover and gene mutation.
pub fn next_generation<R: Rng + ?Sized>(
    population: &[Individual],
    config: &GaConfig,
    ctx: &EvalContext<'_>,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    assert!(!population.is_empty(), "cannot breed from an empty population");
    let target = config.population_size;
    let mut next: Vec<Individual> =
        ranking(population).into_iter().take(config.elitism_count.min(target)).map(|i| population[i].clone()).collect();

    let mut children = Vec::with_capacity(target - next.len());
    while next.len() + children.len() < target {
        let a = select(population, config.tournament_size, rng);
        let b = select(population, config.tournament_size, rng);
        let (c1, c2) = crossover(&population[a].test, &population[b].test, config.crossover_rate, rng);
        children.push(mutate_genes(&c1, ctx.domain, config.gene_mutation_rate, rng));
        let c2 = mutate_genes(&c2, ctx.domain, config.gene_mutation_rate, rng);
        if next.len() + children.len() < target {
            children.push(c2);
        }
    }
    next.extend(evaluate_all(children, ctx)?);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ind(genes: Vec<i64>, fitness: usize) -> Individual {
        Individual { test: TestCase::new(genes), fitness, kill_set: (0..fitness).collect() }
    }

    #[test]
    fn degenerate_domain_gives_fixed_test() {
        let d = InputDomain::uniform(2, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(random_test(&d, &mut rng).genes, vec![1, 1]);
        }
    }

    #[test]
    fn seeded_draws_repeat() {
        let d = InputDomain::uniform(2, 1, 8).unwrap();
        let a = random_test(&d, &mut ChaCha8Rng::seed_from_u64(42));
        let b = random_test(&d, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_gene_frequencies() {
        // 10 000 draws: each of 8 values should land near 12.5%
        let d = InputDomain::uniform(1, 1, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut counts = [0usize; 8];
        for _ in 0..10_000 {
            counts[(random_test(&d, &mut rng).genes[0] - 1) as usize] += 1;
        }
        for c in counts {
            let pct = c as f64 / 100.0;
            assert!((pct - 12.5).abs() <= 5.0, "{counts:?}");
        }
    }

    #[test]
    fn interval_rejects_inverted_bounds() {
        assert!(Interval::new(3, 2).is_err());
        assert!(InputDomain::uniform(2, 5, 1).is_err());
    }

    #[test]
    fn domain_enumeration() {
        let d = InputDomain::new(vec![Interval::new(1, 2).unwrap(), Interval::new(-1, 0).unwrap()]);
        let all: Vec<Vec<i64>> = d.iter_all().map(|t| t.genes).collect();
        assert_eq!(all, vec![vec![1, -1], vec![1, 0], vec![2, -1], vec![2, 0]]);
        assert_eq!(d.size(), 4);
        assert_eq!(InputDomain::new(vec![]).iter_all().count(), 1);
        let wide = InputDomain::uniform(3, i64::MIN, i64::MAX).unwrap();
        assert_eq!(wide.size(), u128::MAX);
    }

    #[test]
    fn single_point_crossover_at_one() {
        let (x, y) = crossover_at(&TestCase::new(vec![2, 3]), &TestCase::new(vec![5, 7]), 1);
        assert_eq!(x.genes, vec![2, 7]);
        assert_eq!(y.genes, vec![5, 3]);
    }

    #[test]
    fn arity_one_crossover_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = TestCase::new(vec![4]);
        let b = TestCase::new(vec![9]);
        for _ in 0..10 {
            assert_eq!(crossover(&a, &b, 1.0, &mut rng), (a.clone(), b.clone()));
        }
    }

    #[test]
    fn zero_rate_mutation_is_identity() {
        let d = InputDomain::uniform(3, 1, 8).unwrap();
        let t = TestCase::new(vec![1, 5, 8]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(mutate_genes(&t, &d, 0.0, &mut rng), t);
        let fixed = InputDomain::uniform(2, 5, 5).unwrap();
        let t = TestCase::new(vec![5, 5]);
        assert_eq!(mutate_genes(&t, &fixed, 1.0, &mut rng), t);
    }

    #[test]
    fn full_tournament_returns_global_best() {
        let pop = vec![ind(vec![1], 3), ind(vec![2], 9), ind(vec![3], 9), ind(vec![4], 1)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            // ties on fitness go to the smaller genes
            assert_eq!(select(&pop, 4, &mut rng), 1);
        }
        assert_eq!(select(&pop[..1], 3, &mut rng), 0);
    }

    #[test]
    fn tie_on_genes_goes_to_earlier_index() {
        let pop = vec![ind(vec![2], 5), ind(vec![2], 5)];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            assert_eq!(select(&pop, 2, &mut rng), 0);
        }
    }

    #[test]
    fn binary_tournament_win_rate() {
        // one fit member out of four: it enters a 2-subset with probability 1 - C(3,2)/C(4,2) = 1/2
        let pop = vec![ind(vec![1], 0), ind(vec![2], 10), ind(vec![3], 0), ind(vec![4], 0)];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 20_000;
        let wins = (0..trials).filter(|_| select(&pop, 2, &mut rng) == 1).count();
        let p = wins as f64 / trials as f64;
        assert!((p - 0.5).abs() < 0.02, "p = {p}");
    }

    #[test]
    fn config_validation() {
        assert!(GaConfig::default().validate().is_ok());
        let bad = [
            GaConfig { elitism_count: 20, ..GaConfig::default() },
            GaConfig { tournament_size: 21, ..GaConfig::default() },
            GaConfig { tournament_size: 0, ..GaConfig::default() },
            GaConfig { crossover_rate: 1.5, ..GaConfig::default() },
            GaConfig { gene_mutation_rate: -0.1, ..GaConfig::default() },
            GaConfig { target_score: 0.0, ..GaConfig::default() },
            GaConfig { population_size: 0, ..GaConfig::default() },
            GaConfig { fuel: 0, ..GaConfig::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}
