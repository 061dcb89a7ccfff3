use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellfilter::{CompletionChoice, Tolerances};
use bellfilter_cli::commands::{self, parse_completion};
use bellfilter_cli::{exit, CliError, Outcome, SCHEMA};
use clap::{Args, Parser, Subcommand};

/// Local filtering of two-qubit states to Bell diagonal form.
#[derive(Parser)]
#[command(name = "bellfilter", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write the JSON result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Multiply every default tolerance by this factor.
    #[arg(long, default_value_t = 1.0, value_parser = parse_scale)]
    tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline on a state file.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        /// canonical, optimal, tau=R or hyperbolic=H (the last three need rank 2).
        #[arg(long, default_value = "canonical", value_parser = parse_completion)]
        completion: CompletionChoice,
        #[command(flatten)]
        common: Common,
    },
    /// Closed forms for the four-parameter family next to the pipeline.
    Family {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// p1,p2,p3,p4
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        p: Vec<f64>,
        /// |tau2| / |tau1| for p3 = p4 = 0.
        #[arg(long)]
        tau_ratio: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Apply the filter pair from a file to a state.
    Transform {
        #[arg(long)]
        state: PathBuf,
        /// File with `fA` and `fB`, or a report.
        #[arg(long)]
        filter: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check whether a state is Bell diagonal; exits 1 when it is not.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Analyze every JSON file in a directory.
    Batch {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = "canonical", value_parser = parse_completion)]
        completion: CompletionChoice,
        #[command(flatten)]
        common: Common,
    },
    /// Print the JSON Schema for every document this tool writes.
    Schema,
}

fn parse_scale(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{s}: {e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("tolerance scale must be positive, got {s}"))
    }
}

fn emit(outcome: &Outcome, out: Option<&Path>) -> Result<(), CliError> {
    let text = bellfilter_cli::json::to_text(&outcome.document);
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (outcome, out) = match cli.command {
        Command::Analyze {
            input,
            completion,
            common,
        } => {
            let tol = Tolerances::scaled(common.tol);
            (
                commands::analyze_file(&input, completion, &tol)?,
                common.out,
            )
        }
        Command::Family {
            alpha,
            p,
            tau_ratio,
            common,
        } => {
            let tol = Tolerances::scaled(common.tol);
            let p: [f64; 4] = p
                .try_into()
                .map_err(|_| CliError::invalid("--p needs four values"))?;
            (commands::family(alpha, p, tau_ratio, &tol)?, common.out)
        }
        Command::Transform {
            state,
            filter,
            common,
        } => {
            let tol = Tolerances::scaled(common.tol);
            (commands::transform(&state, &filter, &tol)?, common.out)
        }
        Command::Verify { input, common } => {
            let tol = Tolerances::scaled(common.tol);
            (commands::verify(&input, &tol)?, common.out)
        }
        Command::Batch {
            input,
            jobs,
            completion,
            common,
        } => {
            let tol = Tolerances::scaled(common.tol);
            (commands::batch(&input, jobs, completion, &tol)?, common.out)
        }
        Command::Schema => {
            print!("{SCHEMA}");
            return Ok(exit::OK);
        }
    };
    emit(&outcome, out.as_deref())?;
    if outcome.code != exit::OK {
        let note = outcome.document["report"]["warnings"]
            .get(0)
            .or_else(|| outcome.document["warnings"].get(0))
            .and_then(|w| w.as_str());
        if let Some(note) = note {
            eprintln!("{note}");
        }
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    // Usage errors share the invalid-input code rather than clap's 2, which
    // means "separable" here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::INVALID as u8
            } else {
                0
            });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    };
    ExitCode::from(code as u8)
}
