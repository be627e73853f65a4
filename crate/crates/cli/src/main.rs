mod commands;
mod report;
mod suite;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Output;
use report::{Ctx, RunReport, Status};

/// Finite groupoid correspondences: validation, composition, coherence,
/// convolution algebras, Hilbert modules, Conduché fibrations, k-graphs
/// and self-similar actions.
#[derive(Parser)]
#[command(name = "grpd", version)]
struct Cli {
    /// Print a machine-readable JSON report.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every randomised check.
    #[arg(long, global = true, env = "GRPD_SEED", default_value_t = grpd_core::random::DEFAULT_SEED)]
    seed: u64,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Groupoid tables.
    #[command(subcommand)]
    Groupoid(GroupoidCmd),
    /// Correspondence files.
    #[command(subcommand)]
    Corr(CorrCmd),
    /// Compose two correspondences `X: H ← G` and `Y: G ← K`.
    Compose {
        x: PathBuf,
        y: PathBuf,
        /// Write the composite as a correspondence file.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Unitors, associators, triangles and pentagon on a chain.
    Coherence {
        #[arg(num_args = 1..=4, required = true)]
        chain: Vec<PathBuf>,
    },
    /// Convolution algebra of a groupoid.
    #[command(subcommand)]
    Algebra(AlgebraCmd),
    /// Hilbert module of a correspondence.
    #[command(subcommand)]
    Module(ModuleCmd),
    /// Discrete Conduché fibrations (fibration or k-graph files).
    #[command(subcommand)]
    Conduche(ConducheCmd),
    /// k-graphs given by skeleton and factorisation rules.
    #[command(subcommand)]
    Kgraph(KGraphCmd),
    /// Self-similar actions.
    #[command(subcommand)]
    Selfsim(SelfSimCmd),
    /// Run every invariant check on each JSON file under a directory.
    Suite { dir: PathBuf },
}

#[derive(Subcommand)]
enum GroupoidCmd {
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum CorrCmd {
    /// Check the axioms and the bracket laws.
    Validate { file: PathBuf },
    /// The arrow `⟨x1|x2⟩` carrying `x1` to `x2`.
    Bracket { file: PathBuf, x1: String, x2: String },
    /// Properness and tightness.
    Classify { file: PathBuf },
}

#[derive(Subcommand)]
enum AlgebraCmd {
    /// Operator norm of an element under the regular representation.
    Norm { groupoid: PathBuf, element: PathBuf },
    /// Multiplication table of the arrows.
    Table { groupoid: PathBuf },
}

#[derive(Subcommand)]
enum ModuleCmd {
    /// `⟨ξ|η⟩`.
    Inner { corr: PathBuf, xi: PathBuf, eta: PathBuf },
    /// Sum-of-squares witness and spectrum of `⟨ξ|ξ⟩`.
    Positivity { corr: PathBuf, xi: PathBuf },
    /// `μ(t)` in the module of `X∘Y` for a tensor file `t`.
    Mu { x: PathBuf, y: PathBuf, tensor: PathBuf },
}

#[derive(Subcommand)]
enum ConducheCmd {
    Check {
        file: PathBuf,
        /// Truncation depth for k-graph path categories.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Generators and relations of the Cuntz–Pimsner algebra.
    Present { file: PathBuf },
}

#[derive(Subcommand)]
enum KGraphCmd {
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    Present { file: PathBuf },
}

#[derive(Subcommand)]
enum SelfSimCmd {
    /// Image of a word under a group element.
    Act { file: PathBuf, element: String, word: String },
    /// Verify the restriction cocycle identity.
    Cocycle {
        file: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Search for short elements acting trivially.
    Faithful {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long)]
        depth: Option<usize>,
    },
}

fn dispatch(ctx: &mut Ctx, command: &Command) -> grpd_core::Result<Output> {
    use commands::*;
    match command {
        Command::Groupoid(GroupoidCmd::Validate { file }) => groupoid_validate(ctx, file),
        Command::Corr(CorrCmd::Validate { file }) => corr_validate(ctx, file),
        Command::Corr(CorrCmd::Bracket { file, x1, x2 }) => corr_bracket(ctx, file, x1, x2),
        Command::Corr(CorrCmd::Classify { file }) => corr_classify(ctx, file),
        Command::Compose { x, y, out } => compose_files(ctx, x, y, out.as_deref()),
        Command::Coherence { chain } => coherence(ctx, chain),
        Command::Algebra(AlgebraCmd::Norm { groupoid, element }) => algebra_norm(ctx, groupoid, element),
        Command::Algebra(AlgebraCmd::Table { groupoid }) => algebra_table(ctx, groupoid),
        Command::Module(ModuleCmd::Inner { corr, xi, eta }) => module_inner(ctx, corr, xi, eta),
        Command::Module(ModuleCmd::Positivity { corr, xi }) => module_positivity(ctx, corr, xi),
        Command::Module(ModuleCmd::Mu { x, y, tensor }) => module_mu(ctx, x, y, tensor),
        Command::Conduche(ConducheCmd::Check { file, depth }) => conduche_check(ctx, file, *depth),
        Command::Conduche(ConducheCmd::Present { file }) => conduche_present(ctx, file),
        Command::Kgraph(KGraphCmd::Check { file, depth }) => kgraph_check(ctx, file, *depth),
        Command::Kgraph(KGraphCmd::Present { file }) => kgraph_present(ctx, file),
        Command::Selfsim(SelfSimCmd::Act { file, element, word }) => selfsim_act(ctx, file, element, word),
        Command::Selfsim(SelfSimCmd::Cocycle { file, depth }) => selfsim_cocycle(ctx, file, *depth),
        Command::Selfsim(SelfSimCmd::Faithful { file, max_len, depth }) => selfsim_faithful(ctx, file, *max_len, *depth),
        Command::Suite { dir } => {
            let n = suite::run_suite(ctx, dir)?;
            Ok(Output { json: Some(serde_json::json!({"files": n})), text: format!("{n} files\n") })
        }
    }
}

/// Write errors (a closed pipe, say) are ignored: the exit code still
/// carries the result.
fn print_text(report: &RunReport, text: &str) {
    let mut out = std::io::stdout().lock();
    let quiet = report.status == Status::Pass && !text.is_empty();
    if !quiet {
        for c in &report.checks {
            let mut line = format!("{} {}", c.status.label(), c.name);
            if let Some(w) = &c.witness {
                line.push_str(&format!(": {w}"));
            } else if let Some(d) = &c.detail {
                line.push_str(&format!(" ({d})"));
            }
            if let Some(ms) = c.millis {
                line.push_str(&format!(" [{ms:.1} ms]"));
            }
            let _ = writeln!(out, "{line}");
        }
    }
    let _ = write!(out, "{text}");
    if let Some(e) = &report.error {
        eprintln!("error: {e}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut ctx = Ctx::new(cli.seed, cli.timing);
    let result = dispatch(&mut ctx, &cli.command);
    let (status, error, output) = match result {
        Ok(out) => (if ctx.passed() { Status::Pass } else { Status::Fail }, None, out),
        Err(e) => {
            let status = if e.is_input_error() { Status::Error } else { Status::Fail };
            (status, Some(e.to_string()), Output::default())
        }
    };
    let report = RunReport {
        command: std::iter::once("grpd".to_owned()).chain(std::env::args().skip(1)).collect(),
        seed: cli.seed,
        inputs: ctx.inputs,
        checks: ctx.checks,
        status,
        error,
        output: output.json,
        millis: cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    if cli.json {
        let json = serde_json::to_string_pretty(&report).expect("report serialises");
        let _ = writeln!(std::io::stdout().lock(), "{json}");
    } else {
        print_text(&report, &output.text);
    }
    ExitCode::from(report.status.exit_code())
}
