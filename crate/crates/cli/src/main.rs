use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use prio_core::patterns::{self, ExactSearch, DEFAULT_BUDGET};
use prio_core::rates::{rate_report, rates_to_csv, rates_to_text};
use prio_core::{verify_code, CellState, CodeDescriptor, PatternSource, PrioCode};

/// Build, use and check two-page codes for three-level flash cells.
#[derive(Parser)]
#[command(name = "prio", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a code and write its descriptor.
    Build {
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(2..=24))]
        n: u8,
        #[arg(long, value_enum, default_value_t = Strategy::Builtin)]
        strategy: Strategy,
        /// Include the full second-page listing in the descriptor.
        #[arg(long)]
        list_page_two: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Encode a message pair into a cell state.
    Encode {
        #[command(flatten)]
        source: Source,
        m1: usize,
        m2: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Decode both pages from a cell state such as 102.
    Decode {
        #[command(flatten)]
        source: Source,
        state: String,
        #[command(flatten)]
        out: Output,
    },
    /// Print the encoding table, one row per second-page message.
    Table {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Sum rates of the shipped codes.
    Rates {
        #[arg(default_value_t = 3)]
        n_min: usize,
        #[arg(default_value_t = 15)]
        n_max: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Run every check; exit status 1 if any fails.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Find a support pattern family for one weight.
    SearchPatterns {
        #[arg(long = "u")]
        u: usize,
        #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(2..=24))]
        n: u8,
        #[arg(long, value_enum, default_value_t = Strategy::Exact)]
        strategy: Strategy,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Descriptor written by `build`.
    #[arg(long, value_name = "FILE")]
    code: Option<PathBuf>,
    /// Build the shipped code of this length instead of loading one.
    #[arg(short = 'n', value_parser = clap::value_parser!(u8).range(2..=24))]
    n: Option<u8>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Builtin,
    Greedy,
    Exact,
}

impl From<Strategy> for PatternSource {
    fn from(s: Strategy) -> Self {
        match s {
            Strategy::Builtin => PatternSource::Builtin,
            Strategy::Greedy => PatternSource::Greedy,
            Strategy::Exact => PatternSource::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

/// Bad flag combinations are usage errors and exit with status 2.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn format_or(out: &Output, default: Format, allowed: &[Format]) -> Result<Format> {
    let format = out.format.unwrap_or(default);
    if !allowed.contains(&format) {
        let names: Vec<_> = allowed
            .iter()
            .map(|f| f.to_possible_value().expect("named").get_name().to_string())
            .collect();
        return Err(UsageError(format!(
            "this command supports --format {}",
            names.join("|")
        ))
        .into());
    }
    Ok(format)
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load(source: &Source) -> Result<PrioCode> {
    match (&source.code, source.n) {
        (Some(path), _) => load_file(path),
        (None, Some(n)) => Ok(PrioCode::construct(n.into(), PatternSource::Builtin)?),
        (None, None) => bail!("either --code or -n is required"),
    }
}

fn load_file(path: &Path) -> Result<PrioCode> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let code = CodeDescriptor::from_json(&text)?.to_code()?;
    Ok(code)
}

fn json(value: serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Build {
            n,
            strategy,
            list_page_two,
            out,
        } => {
            format_or(&out, Format::Json, &[Format::Json])?;
            let code = PrioCode::construct(n.into(), strategy.into())?;
            let descriptor = CodeDescriptor::from_code(&code, list_page_two).to_json();
            match &out.output {
                Some(_) => {
                    emit(&out, &descriptor)?;
                    println!("{}", code.banner());
                }
                None => {
                    eprintln!("{}", code.banner());
                    emit(&out, &descriptor)?;
                }
            }
        }
        Command::Encode {
            source,
            m1,
            m2,
            out,
        } => {
            let format = format_or(&out, Format::Text, &[Format::Text, Format::Json])?;
            let state = load(&source)?.encode(m1, m2)?;
            let text = match format {
                Format::Json => json(serde_json::json!({ "m1": m1, "m2": m2, "state": state }))?,
                _ => format!("{state}\n"),
            };
            emit(&out, &text)?;
        }
        Command::Decode { source, state, out } => {
            let format = format_or(&out, Format::Text, &[Format::Text, Format::Json])?;
            let code = load(&source)?;
            let x: CellState = state.parse()?;
            let (page1, page2) = code.decode(&x)?;
            let text = match format {
                Format::Json => json(serde_json::json!({ "page1": page1, "page2": page2 }))?,
                _ => format!("page1={page1} page2={page2}\n"),
            };
            emit(&out, &text)?;
        }
        Command::Table { source, out } => {
            let format = format_or(
                &out,
                Format::Csv,
                &[Format::Csv, Format::Text, Format::Json],
            )?;
            let table = load(&source)?.emit_table()?;
            let text = match format {
                Format::Csv => table.to_csv(),
                Format::Text => table.to_text(),
                Format::Json => json(serde_json::to_value(&table)?)?,
            };
            emit(&out, &text)?;
        }
        Command::Rates { n_min, n_max, out } => {
            let format = format_or(
                &out,
                Format::Csv,
                &[Format::Csv, Format::Text, Format::Json],
            )?;
            let rows = rate_report(n_min, n_max)?;
            let text = match format {
                Format::Csv => rates_to_csv(&rows),
                Format::Text => rates_to_text(&rows),
                Format::Json => json(serde_json::to_value(&rows)?)?,
            };
            emit(&out, &text)?;
        }
        Command::Verify { source, out } => {
            let format = format_or(&out, Format::Text, &[Format::Text, Format::Json])?;
            let report = verify_code(&load(&source)?);
            let text = match format {
                Format::Json => json(serde_json::to_value(&report)?)?,
                _ => report.to_text(),
            };
            emit(&out, &text)?;
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::SearchPatterns {
            u,
            n,
            strategy,
            budget,
            out,
        } => {
            let format = format_or(&out, Format::Json, &[Format::Json, Format::Text])?;
            let n = usize::from(n);
            let family = match strategy {
                Strategy::Builtin => patterns::builtin_family(u, n)?,
                Strategy::Greedy => patterns::search_greedy(u, n)?,
                Strategy::Exact => {
                    let config = ExactSearch {
                        budget,
                        target: None,
                    };
                    let outcome = patterns::search_exact_with(u, n, &config)?;
                    eprintln!(
                        "{} patterns, {}, {} nodes, upper bound {}",
                        outcome.family.len(),
                        if outcome.complete {
                            "complete"
                        } else {
                            "incomplete"
                        },
                        outcome.nodes,
                        outcome.upper_bound
                    );
                    outcome.family
                }
            };
            let text = match format {
                Format::Text => family
                    .patterns()
                    .iter()
                    .map(|p| format!("{:?}\n", p.positions()))
                    .collect(),
                _ => format!("{}\n", serde_json::to_string(&family)?),
            };
            emit(&out, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
