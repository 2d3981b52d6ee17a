//! Suite-level scoring, the drop rule, and the outer optimization loop.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ga::{self, EvalContext, GaConfig, Individual, InputDomain, TestCase};
use crate::mutation::{equivalent_mutant_scan, generate_mutants, MutantId, MutationOperator, DEFAULT_SCAN_CAP};
use crate::{Error, Parallelism, Result};

/// Exact ratio of killed to total mutants.
#[derive(Clone, Copy, Debug, Eq, Serialize, Deserialize)]
pub struct Score {
    pub killed: usize,
    pub total: usize,
}

impl Score {
    pub fn new(killed: usize, total: usize) -> Result<Self> {
        if total == 0 {
            return Err(Error::NoMutants);
        }
        assert!(killed <= total, "{killed} killed out of {total}");
        Ok(Score { killed, total })
    }

    pub fn as_f64(self) -> f64 {
        self.killed as f64 / self.total as f64
    }
}

impl PartialEq for Score {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.killed as u128 * other.total as u128;
        let rhs = other.killed as u128 * self.total as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.killed, self.total)
    }
}

/// |union of kill sets| / total mutants. Duplicated tests count once.
pub fn mutation_score(members: &[Individual], total_mutants: usize) -> Result<Score> {
    let union: BTreeSet<MutantId> = members.iter().flat_map(|m| m.kill_set.iter().copied()).collect();
    Score::new(union.len(), total_mutants)
}

/// The current population viewed as a test suite.
#[derive(Clone, Debug, PartialEq)]
pub struct Suite {
    pub members: Vec<Individual>,
    pub total_mutants: usize,
}

impl Suite {
    pub fn new(members: Vec<Individual>, total_mutants: usize) -> Self {
        Suite { members, total_mutants }
    }

    pub fn tests(&self) -> impl Iterator<Item = &TestCase> {
        self.members.iter().map(|m| &m.test)
    }

    /// A single test's kill ratio over all mutants.
    pub fn ratio(&self, index: usize) -> f64 {
        self.members[index].fitness as f64 / self.total_mutants as f64
    }

    pub fn score(&self) -> Result<Score> {
        mutation_score(&self.members, self.total_mutants)
    }

    pub fn killed(&self) -> BTreeSet<MutantId> {
        self.members.iter().flat_map(|m| m.kill_set.iter().copied()).collect()
    }
}

/// Drops every test whose own ratio is at or below `threshold`. When that
/// would drop everything, the best test is kept.
pub fn refine_suite(suite: &Suite, threshold: f64) -> Suite {
    let kept: Vec<Individual> =
        (0..suite.members.len()).filter(|&i| suite.ratio(i) > threshold).map(|i| suite.members[i].clone()).collect();
    if !kept.is_empty() || suite.members.is_empty() {
        return Suite::new(kept, suite.total_mutants);
    }
    let best = ga::ranking(&suite.members)[0];
    Suite::new(vec![suite.members[best].clone()], suite.total_mutants)
}

/// Whether to compute the domain-equivalent mutants before evolving.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScanMode {
    Off,
    /// Scan only when the domain fits under the cap.
    #[default]
    Auto,
    /// Scan, failing with `DomainTooLarge` over the cap.
    On,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub scan: ScanMode,
    pub scan_cap: u64,
    pub parallelism: Parallelism,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { scan: ScanMode::Auto, scan_cap: DEFAULT_SCAN_CAP, parallelism: Parallelism::Parallel }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: usize,
    pub suite_score: f64,
    pub mean_fitness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub generations_run: usize,
    pub final_score: f64,
    pub killed_count: usize,
    pub total_mutants: usize,
    /// Best score any suite can reach over the domain; known only after a scan.
    pub achievable_score: Option<f64>,
    pub target_reached: bool,
    pub best_fit_flag: bool,
    pub killed_mutant_ids: BTreeSet<MutantId>,
    pub surviving_mutant_ids: BTreeSet<MutantId>,
    pub equivalent_mutant_ids: Option<BTreeSet<MutantId>>,
    pub final_suite: Vec<TestCase>,
    pub per_generation_history: Vec<GenerationStats>,
    pub config_echo: GaConfig,
    pub seed: u64,
}

impl RunReport {
    pub fn score(&self) -> Score {
        Score { killed: self.killed_count, total: self.total_mutants }
    }
}

fn stats(generation: usize, population: &[Individual], score: Score) -> GenerationStats {
    let best_fitness = population.iter().map(|i| i.fitness).max().unwrap_or(0);
    let sum: usize = population.iter().map(|i| i.fitness).sum();
    GenerationStats {
        generation,
        best_fitness,
        suite_score: score.as_f64(),
        mean_fitness: sum as f64 / population.len() as f64,
    }
}

/// Runs the whole optimization: generate mutants, seed a random population,
/// then score, stop-test, refine and breed until the target, the achievable
/// maximum or the generation cap is reached.
pub fn optimize(
    program: &crate::lang::Program,
    operators: &[MutationOperator],
    domain: &InputDomain,
    config: &GaConfig,
    options: &RunOptions,
) -> Result<RunReport> {
    config.validate()?;
    if domain.arity() != program.arity() {
        return Err(Error::ArityMismatch { expected: program.arity(), found: domain.arity() });
    }
    let mutants = generate_mutants(program, operators);
    if mutants.is_empty() {
        return Err(Error::NoMutants);
    }
    let total = mutants.len();
    let budget = config.budget();

    let scan = |cap| equivalent_mutant_scan(program, &mutants, domain, budget, cap, options.parallelism);
    let equivalent = match options.scan {
        ScanMode::Off => None,
        ScanMode::On => Some(scan(options.scan_cap)?),
        ScanMode::Auto => match scan(options.scan_cap) {
            Ok(set) => Some(set),
            Err(Error::DomainTooLarge { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    let achievable = equivalent.as_ref().map(|eq| total - eq.len());

    let ctx = EvalContext { original: program, mutants: &mutants, domain, budget, parallelism: options.parallelism };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let initial: Vec<TestCase> = (0..config.population_size).map(|_| ga::random_test(domain, &mut rng)).collect();
    let mut population = ga::evaluate_all(initial, &ctx)?;
    let mut history = Vec::new();
    let mut generation = 0;

    let (suite, score, target_reached) = loop {
        let suite = Suite::new(population, total);
        let score = suite.score()?;
        history.push(stats(generation, &suite.members, score));

        let target_reached = score.as_f64() >= config.target_score || achievable == Some(score.killed);
        if target_reached || generation >= config.max_generations {
            break (suite, score, target_reached);
        }

        let mut parents = refine_suite(&suite, config.drop_threshold).members;
        let refill: Vec<TestCase> =
            (parents.len()..config.population_size).map(|_| ga::random_test(domain, &mut rng)).collect();
        parents.extend(ga::evaluate_all(refill, &ctx)?);
        population = ga::next_generation(&parents, config, &ctx, &mut rng)?;
        generation += 1;
    };

    let killed = suite.killed();
    let no_equivalents = BTreeSet::new();
    let equivalent_ids = equivalent.as_ref().unwrap_or(&no_equivalents);
    let surviving = (0..total).filter(|id| !killed.contains(id) && !equivalent_ids.contains(id)).collect();
    let mut final_suite: Vec<TestCase> = Vec::new();
    for t in suite.tests() {
        if !final_suite.contains(t) {
            final_suite.push(t.clone());
        }
    }

    Ok(RunReport {
        generations_run: generation,
        final_score: score.as_f64(),
        killed_count: score.killed,
        total_mutants: total,
        achievable_score: achievable.map(|a| a as f64 / total as f64),
        target_reached,
        best_fit_flag: score.as_f64() > config.best_fit_display_threshold,
        killed_mutant_ids: killed,
        surviving_mutant_ids: surviving,
        equivalent_mutant_ids: equivalent,
        final_suite,
        per_generation_history: history,
        config_echo: config.clone(),
        seed: config.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn member(genes: Vec<i64>, kills: &[MutantId]) -> Individual {
        let kill_set: BTreeSet<MutantId> = kills.iter().copied().collect();
        Individual { test: TestCase::new(genes), fitness: kill_set.len(), kill_set }
    }

    #[test]
    fn half_the_mutants() {
        let s = mutation_score(&[member(vec![1], &[0]), member(vec![2], &[1, 0])], 4).unwrap();
        assert_eq!(s.as_f64(), 0.5);
        assert_eq!(s, Score::new(2, 4).unwrap());
        assert_eq!(s, Score::new(1, 2).unwrap());
    }

    #[test]
    fn all_killed_is_one() {
        let s = mutation_score(&[member(vec![1], &[0, 1, 2])], 3).unwrap();
        assert_eq!(s.as_f64(), 1.0);
    }

    #[test]
    fn zero_total_is_an_error() {
        assert!(matches!(mutation_score(&[], 0), Err(Error::NoMutants)));
    }

    #[test]
    fn duplicates_count_once() {
        let a = member(vec![1], &[0, 1]);
        let s = mutation_score(&[a.clone(), a], 4).unwrap();
        assert_eq!(s.killed, 2);
    }

    #[test]
    fn drop_rule_is_inclusive() {
        // 100 mutants: ratios 0.20, 0.25 and 0.21
        let at = member(vec![1], &(0..20).collect::<Vec<_>>());
        let above = member(vec![2], &(0..25).collect::<Vec<_>>());
        let just = member(vec![3], &(0..21).collect::<Vec<_>>());
        let refined = refine_suite(&Suite::new(vec![at, above.clone(), just.clone()], 100), 0.20);
        assert_eq!(refined.members, vec![above, just]);
    }

    #[test]
    fn all_zero_keeps_best() {
        let s = Suite::new(vec![member(vec![3, 1], &[]), member(vec![2, 9], &[]), member(vec![2, 9], &[])], 5);
        let refined = refine_suite(&s, 0.2);
        assert_eq!(refined.members.len(), 1);
        assert_eq!(refined.members[0].test.genes, vec![2, 9]);
    }

    #[test]
    fn score_ordering_is_exact() {
        assert!(Score::new(1, 3).unwrap() < Score::new(34, 100).unwrap());
        assert!(Score::new(2, 6).unwrap() == Score::new(1, 3).unwrap());
    }
}
