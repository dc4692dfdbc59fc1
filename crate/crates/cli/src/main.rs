use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use histslice::{Command, Format, RunConfig, Source};

/// Slice linear commit histories, eliminating the commit coupling of
/// systematic edits.
#[derive(Parser)]
#[command(name = "histslice", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the slice of a criterion commit (or of every commit).
    Slice(Opts),
    /// Classify every commit of the range as systematic or not.
    Detect(Opts),
    /// Print the dependency graph.
    Deps(Opts),
    /// Compare slice sizes with and without elimination.
    Report(Opts),
}

#[derive(Args)]
#[group(skip)]
#[command(group = ArgGroup::new("source").required(true).multiple(false))]
struct Opts {
    /// Git repository to read.
    #[arg(long, group = "source", requires = "range")]
    repo: Option<PathBuf>,
    /// Commit range FROM..TO; FROM itself is the base and is not sliced.
    #[arg(long, value_name = "A..B", requires = "repo")]
    range: Option<String>,
    /// JSON history fixture to read instead of a repository.
    #[arg(long, group = "source")]
    fixture: Option<PathBuf>,
    /// Commit id, or unique id prefix, to slice from; all commits when absent.
    #[arg(long)]
    criterion: Option<String>,
    /// Context lines around each change when looking for overlaps.
    #[arg(long, value_name = "N", default_value_t = 3)]
    context: usize,
    /// Keep commit dependencies of systematic commits.
    #[arg(long)]
    no_elimination: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the slice as an mbox patch series into DIR (slice with --criterion only).
    #[arg(long, value_name = "DIR")]
    patches: Option<PathBuf>,
    /// Smallest original slice size counted in the report's mean.
    #[arg(long, value_name = "N", default_value_t = 3)]
    min_size: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

fn config(command: Command, o: Opts) -> anyhow::Result<RunConfig> {
    let source = match (o.repo, o.range, o.fixture) {
        (Some(repo), Some(range), None) => {
            let Some((from, to)) = range.split_once("..") else {
                bail!(histslice::Error::InvalidConfig(format!("range {range:?} is not of the form A..B")));
            };
            if from.is_empty() || to.is_empty() || to.starts_with('.') {
                bail!(histslice::Error::InvalidConfig(format!("range {range:?} is not of the form A..B")));
            }
            Source::Git { repo, from: from.to_owned(), to: to.to_owned() }
        }
        (None, None, Some(path)) => Source::Fixture(path),
        _ => unreachable!("clap enforces exactly one source"),
    };
    let mut c = RunConfig::new(command, source);
    c.criterion = o.criterion;
    c.context = o.context;
    c.elimination = !o.no_elimination;
    c.format = match o.format {
        OutputFormat::Json => Format::Json,
        OutputFormat::Csv => Format::Csv,
    };
    c.patches = o.patches;
    c.min_slice_size_report = o.min_size;
    Ok(c)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let (command, opts) = match cli.command {
        Cmd::Slice(o) => (Command::Slice, o),
        Cmd::Detect(o) => (Command::Detect, o),
        Cmd::Deps(o) => (Command::Deps, o),
        Cmd::Report(o) => (Command::Report, o),
    };
    let config = config(command, opts)?;
    let out = histslice::run(&config)?;
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(out.stdout.as_bytes()).context("writing output")?;
    if let Some(dir) = &config.patches {
        eprintln!("wrote {} patches to {}", out.patches.len(), dir.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<histslice::Error>().map_or(2, |e| e.exit_code());
            ExitCode::from(code as u8)
        }
    }
}
