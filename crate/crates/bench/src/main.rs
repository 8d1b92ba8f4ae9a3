use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use puzzlers_bench::*;
use puzzlers_core::{bundled_manifest_path, load_puzzle_set_from_path, PuzzleSet};
use puzzlers_llm::{MockProvider, ModelId, OpenAiProvider, Provider};

#[derive(Parser)]
#[command(name = "bench", about = "Run models over the puzzle set and inspect puzzles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a plan and write one CSV row per attempt.
    Run(RunArgs),
    /// Check a manifest and every puzzle it lists.
    Validate {
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Print a puzzle, optionally next to a model attempt.
    Show(ShowArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Defaults to the bundled set.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Comma-separated puzzle ids; all puzzles when omitted.
    #[arg(long, value_delimiter = ',')]
    puzzles: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "gpt-4o", value_parser = parse_model)]
    models: Vec<ModelId>,
    #[arg(long, value_delimiter = ',', required = true)]
    examples: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    attempts: usize,
    /// JSON array of replies, or `echo` to answer with the test input.
    #[arg(long, conflicts_with = "live")]
    mock: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Call the configured chat-completion API (costs money).
    #[arg(long)]
    live: bool,
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShowArgs {
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    id: String,
    /// A results CSV (reads its sidecar) or a file with one raw reply.
    #[arg(long)]
    attempt_from: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    num_examples: Option<usize>,
    #[arg(long)]
    attempt: Option<usize>,
}

fn parse_model(s: &str) -> Result<ModelId, String> {
    ModelId::new(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Validate { manifest } => Ok(validate(manifest.as_deref())),
        Command::Show(args) => show(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn manifest_or_bundled(manifest: Option<&Path>) -> &Path {
    manifest.unwrap_or(bundled_manifest_path())
}

fn load_set(manifest: Option<&Path>) -> Result<PuzzleSet> {
    let path = manifest_or_bundled(manifest);
    load_puzzle_set_from_path(path).with_context(|| format!("loading {}", path.display()))
}

fn run(args: RunArgs) -> Result<ExitCode> {
    let set = load_set(args.manifest.as_deref())?;
    let provider: Arc<dyn Provider> = match (args.mock.as_deref(), args.live) {
        (Some("echo"), _) => Arc::new(MockProvider::echo()),
        (Some(path), _) => Arc::new(MockProvider::from_script_file(Path::new(path))?),
        (None, true) => Arc::new(OpenAiProvider::from_env()),
        (None, false) => bail!("pass --mock SCRIPT, --mock echo, or --live"),
    };
    let plan = BenchPlan {
        puzzle_ids: args.puzzles,
        models: args.models,
        example_counts: args.examples,
        attempts: args.attempts,
        seed: args.seed,
    };
    plan.check()?;
    plan.size(&set)?;
    println!("{}", plan.describe(&set));

    let result = run_bench(&plan, &set, provider.as_ref(), args.parallel)?;
    let out = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(BufWriter::new(out), &result.records)?;
    write_texts(&sidecar_path(&args.out), &result.texts)?;
    print!("{}", Summary::of(&result.records));
    println!("wrote {} rows to {}", result.records.len(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn validate(manifest: Option<&Path>) -> ExitCode {
    let report = validate_set(manifest_or_bundled(manifest));
    print!("{report}");
    match report.first_violation() {
        None => ExitCode::SUCCESS,
        Some((id, v)) => {
            eprintln!("invalid: {id} ({v:?})");
            ExitCode::from(v.exit_code() as u8)
        }
    }
}

fn show(args: ShowArgs) -> Result<ExitCode> {
    let set = load_set(args.manifest.as_deref())?;
    let Some(puzzle) = set.get(&args.id) else {
        bail!("unknown puzzle {:?}", args.id);
    };
    let attempt = match &args.attempt_from {
        Some(path) => {
            let filter = AttemptFilter {
                model: args.model,
                num_examples: args.num_examples,
                attempt: args.attempt,
            };
            Some(load_attempt(path, &puzzle.id, &filter)?)
        }
        None => None,
    };
    print!("{}", render_puzzle(puzzle, attempt.as_ref()));
    Ok(ExitCode::SUCCESS)
}
