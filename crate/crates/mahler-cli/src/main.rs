//! Command line front end: prime ladders, factorization trees, optimal
//! factorization search, t-norm bounds, measure class graphs, and theorem
//! verification runs.
//!
//! Exit codes: 0 success (all checks pass), 1 verification failure,
//! 2 usage or parse error, 3 capacity exceeded.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mahler_core::{
    mt_upper_with, optimal_factorizations_with, quotient, sample_alpha, staged_frontier_with,
    verify_theorems_with, CheckStatus, Error, ExportFormat, ReducedRational, Result, SearchConfig,
    SearchStrategy, TreeBuilder, VerifyConfig,
};

#[derive(Parser)]
#[command(
    name = "mahler",
    version,
    about = "Exact factorization search for the t-metric Mahler measure of positive rationals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the prime ladder of a positive rational.
    Factor { rational: String },
    /// Build a factorization tree and export it.
    Tree {
        rational: String,
        #[arg(long, value_enum, default_value_t = TreeKindArg::Primitive)]
        kind: TreeKindArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Compute the optimal factorizations and their measure vector.
    Optimal {
        rational: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Staged)]
        strategy: StrategyArg,
        /// Print each pruning step with the surviving candidates.
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate the factorization upper bound for the t-metric measure.
    Mt {
        rational: String,
        #[arg(long)]
        t: f64,
    },
    /// Export the measure class graph of a factorization tree.
    Quotient {
        rational: String,
        #[arg(long, value_enum, default_value_t = TreeKindArg::Primitive)]
        kind: TreeKindArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Re-prove the structural theorems on one rational or a random sweep.
    Verify {
        rational: Option<String>,
        /// Check this many randomly sampled rationals instead of one input.
        #[arg(long, conflicts_with = "rational")]
        random: Option<usize>,
        /// Largest number of prime occurrences in a sampled rational.
        #[arg(long, default_value_t = 6)]
        max_primes: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ReportFormatArg::Text)]
        format: ReportFormatArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TreeKindArg {
    Primitive,
    Optimal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Dot,
}

impl From<FormatArg> for ExportFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Text => ExportFormat::Text,
            FormatArg::Json => ExportFormat::Json,
            FormatArg::Dot => ExportFormat::Dot,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Canonical,
    Primitive,
    Staged,
}

impl From<StrategyArg> for SearchStrategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Canonical => SearchStrategy::Canonical,
            StrategyArg::Primitive => SearchStrategy::Primitive,
            StrategyArg::Staged => SearchStrategy::Staged,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormatArg {
    Text,
    Json,
}

struct CliConfig {
    node_cap: usize,
    oracle_prime_cap: usize,
    t_cap: f64,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            node_cap: 1_000_000,
            oracle_prime_cap: 7,
            t_cap: 65536.0,
        }
    }
}

impl CliConfig {
    fn from_env() -> Result<Self> {
        let mut config = CliConfig::default();
        if let Ok(raw) = std::env::var("MAHLER_NODE_CAP") {
            let cap: usize = raw.trim().parse().map_err(|_| {
                Error::InvalidInput(format!(
                    "MAHLER_NODE_CAP must be a positive integer, got {raw:?}"
                ))
            })?;
            if cap == 0 {
                return Err(Error::InvalidInput(
                    "MAHLER_NODE_CAP must be positive".into(),
                ));
            }
            config.node_cap = cap;
        }
        Ok(config)
    }

    fn search(&self) -> SearchConfig {
        SearchConfig {
            node_cap: self.node_cap,
        }
    }

    fn verify(&self) -> VerifyConfig {
        VerifyConfig {
            node_cap: self.node_cap,
            oracle_primitive_cap: self.oracle_prime_cap,
            oracle_all_cap: self.oracle_prime_cap.min(7),
            t_cap: self.t_cap,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((output, code)) => {
            emit(&output);
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parse(_) | Error::InvalidInput(_) => 2,
                Error::CapacityExceeded(_) => 3,
                _ => 1,
            })
        }
    }
}

/// Writes to stdout, treating a closed pipe as a normal early exit.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: cannot write to stdout: {e}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<(String, ExitCode)> {
    let config = CliConfig::from_env()?;
    match cli.command {
        Command::Factor { rational } => Ok((cmd_factor(&rational)?, ExitCode::SUCCESS)),
        Command::Tree {
            rational,
            kind,
            format,
        } => Ok((
            cmd_tree(&config, &rational, kind, format)?,
            ExitCode::SUCCESS,
        )),
        Command::Optimal {
            rational,
            strategy,
            trace,
        } => Ok((
            cmd_optimal(&config, &rational, strategy, trace)?,
            ExitCode::SUCCESS,
        )),
        Command::Mt { rational, t } => Ok((cmd_mt(&config, &rational, t)?, ExitCode::SUCCESS)),
        Command::Quotient {
            rational,
            kind,
            format,
        } => Ok((
            cmd_quotient(&config, &rational, kind, format)?,
            ExitCode::SUCCESS,
        )),
        Command::Verify {
            rational,
            random,
            max_primes,
            seed,
            format,
        } => cmd_verify(&config, rational, random, max_primes, seed, format),
    }
}

fn cmd_factor(text: &str) -> Result<String> {
    let alpha = ReducedRational::parse(text)?;
    let ladder = alpha.prime_ladder()?;
    if ladder.is_empty() {
        return Ok("empty ladder (N = 0)\n".into());
    }
    let parts: Vec<String> = ladder
        .entries()
        .iter()
        .map(|e| format!("{}({})", e.prime, e.sign))
        .collect();
    Ok(format!("{}\n", parts.join(" ")))
}

fn build_tree(
    config: &CliConfig,
    alpha: &ReducedRational,
    kind: TreeKindArg,
) -> Result<mahler_core::FactorizationTree> {
    let builder = TreeBuilder::default().with_node_cap(config.node_cap);
    match kind {
        TreeKindArg::Primitive => builder.maximal_primitive(alpha),
        TreeKindArg::Optimal => builder.canonical_optimal(alpha),
    }
}

fn cmd_tree(
    config: &CliConfig,
    text: &str,
    kind: TreeKindArg,
    format: FormatArg,
) -> Result<String> {
    let alpha = ReducedRational::parse(text)?;
    let tree = build_tree(config, &alpha, kind)?;
    Ok(format!("{}\n", tree.export(format.into())))
}

fn cmd_optimal(
    config: &CliConfig,
    text: &str,
    strategy: StrategyArg,
    trace: bool,
) -> Result<String> {
    let alpha = ReducedRational::parse(text)?;
    let search_config = config.search();
    let result = optimal_factorizations_with(&alpha, strategy.into(), &search_config)?;
    let mut out = String::new();
    if trace {
        for record in &result.pruning_trace {
            let _ = writeln!(
                out,
                "level {}: frontier {} -> {}",
                record.level, record.before, record.after
            );
            if strategy == StrategyArg::Staged {
                for survivor in staged_frontier_with(&alpha, record.level, &search_config)? {
                    let _ = writeln!(out, "  keep {survivor}");
                }
            }
        }
    }
    for factorization in &result.optimal_set {
        let _ = writeln!(out, "{factorization}");
    }
    let _ = writeln!(out, "measure {}", result.measure);
    Ok(out)
}

fn cmd_mt(config: &CliConfig, text: &str, t: f64) -> Result<String> {
    let alpha = ReducedRational::parse(text)?;
    if t > config.t_cap {
        return Err(Error::InvalidInput(format!(
            "t = {t} exceeds the cap {}",
            config.t_cap
        )));
    }
    let bound = mt_upper_with(&alpha, t, &config.search())?;
    Ok(format!("{bound}\n"))
}

fn cmd_quotient(
    config: &CliConfig,
    text: &str,
    kind: TreeKindArg,
    format: FormatArg,
) -> Result<String> {
    let alpha = ReducedRational::parse(text)?;
    let tree = build_tree(config, &alpha, kind)?;
    let graph = quotient(&tree);
    Ok(format!("{}\n", graph.export(format.into())))
}

fn cmd_verify(
    config: &CliConfig,
    rational: Option<String>,
    random: Option<usize>,
    max_primes: usize,
    seed: u64,
    format: ReportFormatArg,
) -> Result<(String, ExitCode)> {
    let verify_config = config.verify();
    match (rational, random) {
        (Some(text), None) => {
            let alpha = ReducedRational::parse(&text)?;
            let report = verify_theorems_with(&alpha, &verify_config)?;
            let out = match format {
                ReportFormatArg::Text => format!("{report}\n"),
                ReportFormatArg::Json => format!("{}\n", report.to_json()),
            };
            let code = if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            Ok((out, code))
        }
        (None, Some(count)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut all = true;
            let mut out = String::new();
            let mut documents = Vec::new();
            for _ in 0..count {
                let alpha = sample_alpha(&mut rng, max_primes, true);
                let report = verify_theorems_with(&alpha, &verify_config)?;
                let ok = report.all_passed();
                all &= ok;
                match format {
                    ReportFormatArg::Text => {
                        let _ = writeln!(
                            out,
                            "{}: {}",
                            report.alpha,
                            if ok { "pass" } else { "fail" }
                        );
                        if !ok {
                            for check in report
                                .checks
                                .iter()
                                .filter(|c| c.status == CheckStatus::Fail)
                            {
                                let _ = writeln!(
                                    out,
                                    "  [fail] {}: {}",
                                    check.name,
                                    check.witness.as_deref().unwrap_or("")
                                );
                            }
                        }
                    }
                    ReportFormatArg::Json => documents.push(
                        serde_json::from_str::<serde_json::Value>(&report.to_json())
                            .expect("report serialization round-trips"),
                    ),
                }
            }
            match format {
                ReportFormatArg::Text => {
                    let _ = writeln!(
                        out,
                        "checked {count} rationals: {}",
                        if all { "all pass" } else { "failures found" }
                    );
                }
                ReportFormatArg::Json => {
                    let _ = writeln!(
                        out,
                        "{}",
                        serde_json::to_string_pretty(&serde_json::Value::Array(documents))
                            .expect("report serialization round-trips")
                    );
                }
            }
            let code = if all {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            Ok((out, code))
        }
        (None, None) => Err(Error::InvalidInput(
            "verify needs a rational argument or --random <count>".into(),
        )),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}
