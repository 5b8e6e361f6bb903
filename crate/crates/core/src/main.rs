use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stratgen::cli::commands::{cmd_check, cmd_eval, cmd_generalise, cmd_lattice, Outcome};
use stratgen::graph::EvalContext;

#[derive(Parser)]
#[command(name = "stratgen", about = "Replay, generalise and evaluate proof strategies")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Replay a script against a conjecture.
    Check { theory: PathBuf, conjecture: String, script: String },
    /// Replay a script and generalise its trace into a strategy.
    Generalise {
        theory: PathBuf,
        conjecture: String,
        script: String,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
    },
    /// Run a strategy file on a conjecture.
    Eval {
        theory: PathBuf,
        conjecture: String,
        strategy: PathBuf,
        #[arg(long, default_value_t = EvalContext::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Evaluate a lattice expression, e.g. `meet top_symbol [[/\]] [[*]]`.
    Lattice {
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        expr: Vec<String>,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Outcome { code, stdout, stderr } = match args.cmd {
        Cmd::Check { theory, conjecture, script } => cmd_check(&theory, &conjecture, &script),
        Cmd::Generalise { theory, conjecture, script, out } => cmd_generalise(&theory, &conjecture, &script, &out),
        Cmd::Eval { theory, conjecture, strategy, budget } => cmd_eval(&theory, &conjecture, &strategy, budget),
        Cmd::Lattice { expr } => cmd_lattice(&expr.join(" ")),
    };
    print!("{stdout}");
    eprint!("{stderr}");
    ExitCode::from(code as u8)
}
