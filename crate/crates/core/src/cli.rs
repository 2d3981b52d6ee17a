//! Command-line front end.
//!
//! Exit codes: 0 success, 1 optimization finished below target, 2 parse,
//! usage or configuration error, 65 no mutants, 66 input file unreadable,
//! 74 output file unwritable.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{parse_config_keys, parse_domain, parse_suite};
use crate::ga::{GaConfig, InputDomain};
use crate::interp::{execute, ExecBudget, DEFAULT_FUEL};
use crate::lang::{parse, pretty_print, Program};
use crate::mutation::{
    build_kill_matrix, equivalent_mutant_scan, generate_mutants, mutants_to_json, MutationOperator, DEFAULT_SCAN_CAP,
};
use crate::suite::{optimize, RunOptions, ScanMode};
use crate::{report, Error, Parallelism};

pub const EXIT_OK: i32 = 0;
pub const EXIT_BELOW_TARGET: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_MUTANTS: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_IO: i32 = 74;

pub const SEED_ENV: &str = "MUTAGEN_SEED";
const DEFAULT_DOMAIN: &str = "1..8";

#[derive(Debug, Parser)]
#[command(name = "mutagen", version, about = "Evolve test inputs that kill program mutants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct MutantArgs {
    /// Comma separated subset of aor,ror,crp.
    #[arg(long, default_value = "aor,ror,crp")]
    pub operators: String,
}

#[derive(Debug, Args)]
pub struct GaOverrides {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub population: Option<usize>,
    #[arg(long)]
    pub generations: Option<usize>,
    #[arg(long)]
    pub crossover_rate: Option<f64>,
    #[arg(long)]
    pub mutation_rate: Option<f64>,
    #[arg(long)]
    pub tournament: Option<usize>,
    #[arg(long)]
    pub elitism: Option<usize>,
    #[arg(long)]
    pub drop_threshold: Option<f64>,
    #[arg(long)]
    pub target_score: Option<f64>,
    #[arg(long)]
    pub best_fit_threshold: Option<f64>,
    #[arg(long)]
    pub fuel: Option<u64>,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Parse a program and print its canonical form.
    Parse { program: PathBuf },
    /// Execute a program on the given inputs.
    Run {
        program: PathBuf,
        #[arg(allow_negative_numbers = true)]
        inputs: Vec<i64>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
    },
    /// List the first-order mutants of a program.
    Mutants {
        program: PathBuf,
        #[command(flatten)]
        mutants: MutantArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kill matrix of a CSV suite against the program's mutants.
    Matrix {
        program: PathBuf,
        /// Headerless CSV, one test per row.
        #[arg(long)]
        suite: PathBuf,
        #[command(flatten)]
        mutants: MutantArgs,
        /// Restrict columns to these mutant ids.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a test suite maximizing the mutation score.
    Optimize {
        program: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        ga: GaOverrides,
        #[command(flatten)]
        mutants: MutantArgs,
        /// `lo..hi`, or one interval per parameter separated by commas.
        #[arg(long, default_value = DEFAULT_DOMAIN, allow_hyphen_values = true)]
        domain: String,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the per-generation history as CSV.
        #[arg(long)]
        history: Option<PathBuf>,
        /// Always scan for equivalent mutants, failing if the domain is too large.
        #[arg(long, conflicts_with = "no_scan_equivalents")]
        scan_equivalents: bool,
        /// Never scan for equivalent mutants.
        #[arg(long)]
        no_scan_equivalents: bool,
        #[arg(long, default_value_t = DEFAULT_SCAN_CAP)]
        scan_cap: u64,
        /// Evaluate fitness on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Mutants no input in the domain can kill.
    ScanEquivalents {
        program: PathBuf,
        #[command(flatten)]
        mutants: MutantArgs,
        #[arg(long, default_value = DEFAULT_DOMAIN, allow_hyphen_values = true)]
        domain: String,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: u64,
        #[arg(long, default_value_t = DEFAULT_SCAN_CAP)]
        scan_cap: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn from_error(err: Error, path: &Path) -> Self {
        let code = match err {
            Error::NoMutants => EXIT_NO_MUTANTS,
            _ => EXIT_USAGE,
        };
        let message = match &err {
            Error::Parse(p) => format!("{}:{}:{}: {}", path.display(), p.line, p.column, p.message),
            Error::SuiteFormat { row, message } => format!("{}: row {row}: {message}", path.display()),
            other => format!("{}: {other}", path.display()),
        };
        Failure { code, message }
    }
}

type CmdResult = Result<(String, i32, Option<PathBuf>), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new(EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let source = read(path)?;
    parse(&source).map_err(|e| Failure::from_error(e.into(), path))
}

fn operators(args: &MutantArgs, path: &Path) -> Result<Vec<MutationOperator>, Failure> {
    MutationOperator::parse_list(&args.operators).map_err(|e| Failure::from_error(e, path))
}

fn budget(fuel: u64, path: &Path) -> Result<ExecBudget, Failure> {
    ExecBudget::new(fuel).map_err(|e| Failure::from_error(e, path))
}

fn domain(spec: &str, program: &Program, path: &Path) -> Result<InputDomain, Failure> {
    parse_domain(spec, program.arity()).map_err(|e| Failure::from_error(e, path))
}

/// Defaults, then the config file, then `MUTAGEN_SEED` if the file did not
/// set a seed, then flags.
fn resolve_config(config_path: Option<&Path>, ga: &GaOverrides, env_seed: Option<&str>) -> Result<GaConfig, Failure> {
    let (mut config, keys) = match config_path {
        Some(path) => parse_config_keys(&read(path)?).map_err(|e| Failure::from_error(e, path))?,
        None => (GaConfig::default(), Vec::new()),
    };
    if !keys.iter().any(|k| k == "seed") {
        if let Some(raw) = env_seed {
            config.seed = raw
                .trim()
                .parse()
                .map_err(|_| Failure::new(EXIT_USAGE, format!("{SEED_ENV}: `{raw}` is not a valid seed")))?;
        }
    }
    macro_rules! apply {
        ($($flag:ident => $field:ident),* $(,)?) => {
            $(if let Some(v) = ga.$flag { config.$field = v; })*
        };
    }
    apply!(
        seed => seed,
        population => population_size,
        generations => max_generations,
        crossover_rate => crossover_rate,
        mutation_rate => gene_mutation_rate,
        tournament => tournament_size,
        elitism => elitism_count,
        drop_threshold => drop_threshold,
        target_score => target_score,
        best_fit_threshold => best_fit_display_threshold,
        fuel => fuel,
    );
    config.validate().map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    Ok(config)
}

fn execute_command(command: Command, env_seed: Option<&str>) -> CmdResult {
    match command {
        Command::Parse { program } => {
            let p = load_program(&program)?;
            Ok((pretty_print(&p) + "\n", EXIT_OK, None))
        }
        Command::Run { program, inputs, fuel } => {
            let p = load_program(&program)?;
            let outcome =
                execute(&p, &inputs, budget(fuel, &program)?).map_err(|e| Failure::from_error(e, &program))?;
            Ok((format!("{outcome}\n"), EXIT_OK, None))
        }
        Command::Mutants { program, mutants, format, out } => {
            let p = load_program(&program)?;
            let ms = generate_mutants(&p, &operators(&mutants, &program)?);
            let text = match format {
                Format::Json => mutants_to_json(&ms) + "\n",
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    let _ = w.write_record(["id", "operator", "line", "column", "original", "mutated"]);
                    for m in &ms {
                        let _ = w.write_record([
                            m.id.to_string(),
                            m.operator.to_string(),
                            m.site.line.to_string(),
                            m.site.column.to_string(),
                            m.original_fragment.clone(),
                            m.mutated_fragment.clone(),
                        ]);
                    }
                    String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
                }
                Format::Text => {
                    let mut s = String::new();
                    for m in &ms {
                        let _ = writeln!(
                            s,
                            "{:>4} {} {}: {} -> {}",
                            m.id, m.operator, m.site, m.original_fragment, m.mutated_fragment
                        );
                    }
                    s
                }
            };
            Ok((text, EXIT_OK, out))
        }
        Command::Matrix { program, suite, mutants, only, fuel, out } => {
            let p = load_program(&program)?;
            let tests = parse_suite(&read(&suite)?, p.arity()).map_err(|e| Failure::from_error(e, &suite))?;
            let mut ms = generate_mutants(&p, &operators(&mutants, &program)?);
            if !only.is_empty() {
                let wanted: BTreeSet<usize> = only.iter().copied().collect();
                if let Some(missing) = wanted.iter().find(|id| **id >= ms.len()) {
                    return Err(Failure::new(EXIT_USAGE, format!("no mutant with id {missing}")));
                }
                ms.retain(|m| wanted.contains(&m.id));
            }
            let km = build_kill_matrix(&p, &ms, &tests, budget(fuel, &program)?, Parallelism::Parallel)
                .map_err(|e| Failure::from_error(e, &suite))?;
            Ok((km.to_csv(), EXIT_OK, out))
        }
        Command::Optimize {
            program,
            config,
            ga,
            mutants,
            domain: domain_spec,
            format,
            out,
            history,
            scan_equivalents,
            no_scan_equivalents,
            scan_cap,
            sequential,
        } => {
            let p = load_program(&program)?;
            let config = resolve_config(config.as_deref(), &ga, env_seed)?;
            let ops = operators(&mutants, &program)?;
            let domain = domain(&domain_spec, &p, &program)?;
            let options = RunOptions {
                scan: if scan_equivalents {
                    ScanMode::On
                } else if no_scan_equivalents {
                    ScanMode::Off
                } else {
                    ScanMode::Auto
                },
                scan_cap,
                parallelism: if sequential { Parallelism::Sequential } else { Parallelism::Parallel },
            };
            let run = optimize(&p, &ops, &domain, &config, &options).map_err(|e| Failure::from_error(e, &program))?;
            if let Some(path) = history {
                std::fs::write(&path, report::history_csv(&run))
                    .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
            }
            let text = match format {
                Format::Json => report::to_json(&run),
                Format::Csv => report::history_csv(&run),
                Format::Text => report::to_text(&run),
            };
            let code = if run.target_reached { EXIT_OK } else { EXIT_BELOW_TARGET };
            Ok((text, code, out))
        }
        Command::ScanEquivalents { program, mutants, domain: domain_spec, fuel, scan_cap, format } => {
            let p = load_program(&program)?;
            let ms = generate_mutants(&p, &operators(&mutants, &program)?);
            let domain = domain(&domain_spec, &p, &program)?;
            let eq = equivalent_mutant_scan(&p, &ms, &domain, budget(fuel, &program)?, scan_cap, Parallelism::Parallel)
                .map_err(|e| Failure::from_error(e, &program))?;
            let text = match format {
                Format::Json => serde_json::to_string(&eq).expect("ids serialize") + "\n",
                Format::Csv | Format::Text => {
                    let mut s = String::new();
                    for id in &eq {
                        let m = &ms[*id];
                        let _ = writeln!(
                            s,
                            "{id},{},{},{},{}",
                            m.operator, m.site, m.original_fragment, m.mutated_fragment
                        );
                    }
                    s
                }
            };
            Ok((text, EXIT_OK, None))
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Output is written in one piece once the command has finished.
pub fn run_with(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    env_seed: Option<&str>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute_command(cli.command, env_seed) {
        Ok((text, code, out)) => {
            let written = match out {
                Some(path) => std::fs::write(&path, &text).map_err(|e| (path, e)),
                None => stdout.write_all(text.as_bytes()).map_err(|e| (PathBuf::from("<stdout>"), e)),
            };
            match written {
                Ok(()) => code,
                Err((path, e)) => {
                    let _ = writeln!(stderr, "{}: {e}", path.display());
                    EXIT_IO
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.message);
            f.code
        }
    }
}

pub fn main_exit_code() -> i32 {
    let env_seed = std::env::var(SEED_ENV).ok();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(std::env::args_os(), env_seed.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}
