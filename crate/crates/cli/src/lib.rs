//! `twmatch`: command-line front end for the treewidth matching solvers.
//!
//! Every subcommand writes its result to standard output. `solve` exits
//! with 0 on a yes answer and 1 on a no; any usage or input error exits
//! with 2.

mod bench;
mod gen;
mod report;
mod solve;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use twmatch_core::JoinMode;

pub use bench::{run_suite, BenchRow, SuiteConfig};
pub use report::{RunReport, SCHEMA_VERSION};

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "twmatch",
    version,
    about = "Matching problems on graphs of bounded treewidth"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide one instance and print a JSON run report.
    Solve(SolveArgs),
    /// Exhaustive matching numbers for a small graph.
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        /// Largest component target to tabulate (default n / 2).
        #[arg(long)]
        cmax: Option<usize>,
    },
    /// Instance generators.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Min-fill tree decomposition in PACE `.td` form.
    Decompose {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a TOML benchmark suite in both join modes and writes CSV rows.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// The Hitting Set reduction: graph, path decomposition and a JSON
    /// sidecar naming every vertex.
    HittingSet {
        #[arg(long)]
        k: usize,
        /// Sets separated by `;`, each a list of `(row,column)` cells,
        /// e.g. `"(1,1) (2,2); (1,2)"`.
        #[arg(long, allow_hyphen_values = true)]
        sets: String,
        /// Directory for `instance.gr`, `instance.td` and `instance.json`.
        /// Without it one JSON object is printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Induced,
    Acyclic,
    Cdisc,
    Disc,
}

impl Problem {
    pub fn tag(self) -> &'static str {
        match self {
            Problem::Induced => "induced",
            Problem::Acyclic => "acyclic",
            Problem::Cdisc => "cdisc",
            Problem::Disc => "disc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum JoinArg {
    Naive,
    Conv,
}

impl From<JoinArg> for JoinMode {
    fn from(j: JoinArg) -> Self {
        match j {
            JoinArg::Naive => JoinMode::Naive,
            JoinArg::Conv => JoinMode::Convolution,
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    /// Matching size, in edges.
    #[arg(long)]
    ell: usize,
    /// Component target for `cdisc` and `disc`.
    #[arg(long)]
    c: Option<usize>,
    #[arg(long)]
    graph: PathBuf,
    /// PACE `.td` file; min-fill is used when absent.
    #[arg(long)]
    td: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = twmatch_core::acyclic::DEFAULT_TRIALS)]
    trials: usize,
    #[arg(long, value_enum, default_value = "conv")]
    join: JoinArg,
    /// Cross-check the answer against the exhaustive oracle (n <= 10).
    #[arg(long)]
    check_oracle: bool,
    /// Also report a matching that witnesses a yes answer.
    #[arg(long)]
    certificate: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // `--help` and `--version` arrive here too, on standard output.
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_YES;
        }
    };
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Solve(args) => {
            let mut notes = Vec::new();
            let g = read_graph(&args.graph, &mut notes)?;
            let outcome = with_threads(args.threads, || solve::solve(&args, &g));
            for note in notes.iter().chain(outcome.as_ref().map_or(&[][..], |o| &o.notes[..])) {
                writeln!(err, "note: {note}")?;
            }
            let outcome = outcome?;
            writeln!(out, "{}", serde_json::to_string_pretty(&outcome.report)?)?;
            Ok(if outcome.report.answer { EXIT_YES } else { EXIT_NO })
        }
        Command::Oracle { graph, cmax } => {
            let g = read_graph(&graph, &mut Vec::new())?;
            let cmax = cmax.unwrap_or(g.n() / 2);
            let report = twmatch_core::oracle::brute_matching_numbers(&g, cmax)?;
            let json = serde_json::json!({ "schema_version": SCHEMA_VERSION, "n": g.n(), "report": report });
            writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?;
            Ok(EXIT_YES)
        }
        Command::Gen(GenCommand::HittingSet { k, sets, out: dir }) => {
            gen::hitting_set(k, &sets, dir.as_deref(), out)?;
            Ok(EXIT_YES)
        }
        Command::Decompose { graph, out: path } => {
            let g = read_graph(&graph, &mut Vec::new())?;
            let td = twmatch_core::decomp::min_fill_decompose(&g);
            let text = twmatch_core::decomp::write_td(&td, g.n());
            writeln!(err, "width {}", td.width())?;
            match path {
                Some(p) => fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => out.write_all(text.as_bytes())?,
            }
            Ok(EXIT_YES)
        }
        Command::Bench {
            config,
            out: path,
            threads,
        } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let suite: SuiteConfig = toml::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
            let rows = with_threads(threads, || run_suite(&suite))?;
            bench::write_csv(&path, &rows)?;
            writeln!(err, "{} rows written to {}", rows.len(), path.display())?;
            Ok(EXIT_YES)
        }
    }
}

/// Runs `f` on a dedicated pool so `--threads` holds regardless of what
/// the global pool was initialised with.
fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> Result<R> + Send) -> Result<R> {
    anyhow::ensure!(threads >= 1, "--threads must be at least 1");
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    pool.install(f)
}

fn read_graph(path: &Path, notes: &mut Vec<String>) -> Result<twmatch_core::Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = twmatch_core::parse_graph(&text).with_context(|| format!("parsing {}", path.display()))?;
    if parsed.duplicate_edges > 0 {
        notes.push(format!("{} duplicate edges ignored", parsed.duplicate_edges));
    }
    Ok(parsed.graph)
}
