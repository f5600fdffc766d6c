use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use zalc_core::abstraction::abstract_problem;
use zalc_core::cgraph::{embed_finite, ConstraintGraph};
use zalc_core::normalize::{normalize, normalize_shallow};
use zalc_core::pipeline::{
    describe_automata, prepare, render_report, solve_prepared, witness_dot, SolveOptions, Verdict,
};
use zalc_core::syntax::{
    parse_alcp_problem, parse_problem, problem_to_string, translate_alcp, Problem,
};

#[derive(Parser, Debug)]
#[command(
    name = "zalc",
    version,
    about = "Satisfiability of ALCF concepts with integer registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Stage {
    Nnf,
    Anf,
    Abstract,
    Automata,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide satisfiability. Exit code 0 = SAT, 1 = UNSAT, 2 = error.
    Check {
        file: PathBuf,
        /// Print the witness and an integer prefix of the given depth.
        #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "4", value_name = "DEPTH")]
        witness: Option<usize>,
        /// Print automaton sizes and timing.
        #[arg(long)]
        stats: bool,
        /// Registers may be undefined.
        #[arg(long)]
        und: bool,
        /// Write the witness as Graphviz files into this directory.
        #[arg(long, value_name = "DIR")]
        dot: Option<PathBuf>,
        /// Print one intermediate stage instead of solving.
        #[arg(long, value_enum)]
        dump: Option<Stage>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
        /// The input uses the two-path comparison syntax.
        #[arg(long)]
        alcp: bool,
        /// Route every constraint with a nonempty path through copy registers.
        #[arg(long)]
        full_normal_form: bool,
        /// Bound on explored automaton states.
        #[arg(long, default_value_t = 1_000_000)]
        state_limit: usize,
    },
    /// Print the atomic normal form with its naming table.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        alcp: bool,
        /// Keep atomic constraints along a single role.
        #[arg(long)]
        shallow: bool,
    },
    /// Print the abstraction of the normal form with its placeholder table.
    Abstract {
        file: PathBuf,
        #[arg(long)]
        alcp: bool,
        /// Use the full normal form instead of the shallow one.
        #[arg(long)]
        full_normal_form: bool,
    },
    /// Translate two-path comparisons into the core syntax.
    TranslateAlcp { file: PathBuf },
    /// Decide embeddability of a constraint graph. Exit code 0 = embeddable, 1 = not.
    Oracle { file: PathBuf },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load(path: &Path, alcp: bool) -> Result<Problem, String> {
    let src = read(path)?;
    if alcp {
        let p = parse_alcp_problem(&src).map_err(|e| format!("{}: {e}", path.display()))?;
        translate_alcp(&p).map_err(|e| format!("{}: {e}", path.display()))
    } else {
        parse_problem(&src).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check {
            file,
            witness,
            stats,
            und,
            dot,
            dump,
            json,
            alcp,
            full_normal_form,
            state_limit,
        } => {
            let p = load(&file, alcp)?;
            let opts = SolveOptions {
                witness_depth: witness.unwrap_or(4),
                und,
                state_limit,
                full_normal_form,
            };
            let start = std::time::Instant::now();
            let prep = prepare(&p, &opts).map_err(|e| e.to_string())?;
            if let Some(stage) = dump {
                let text = match stage {
                    Stage::Nnf => problem_to_string(&prep.normalized.nnf),
                    Stage::Anf => {
                        let mut s = problem_to_string(&prep.anf);
                        s.push_str(&prep.normalized.sidecar());
                        s
                    }
                    Stage::Abstract => prep.abstracted.render(),
                    Stage::Automata => describe_automata(&prep),
                };
                print!("{text}");
                return Ok(ExitCode::SUCCESS);
            }
            let report = solve_prepared(&prep, &opts, start).map_err(|e| e.to_string())?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
                );
            } else {
                print!("{}", render_report(&report, witness.is_some(), stats));
            }
            if let (Some(dir), Some(run)) = (dot, &report.run) {
                fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
                let out = dir.join("witness.dot");
                fs::write(&out, witness_dot(run, &prep.abstracted))
                    .map_err(|e| format!("{}: {e}", out.display()))?;
                log::info!("wrote {}", out.display());
            }
            if report.validation.as_ref().is_some_and(|v| !v.ok()) {
                log::error!("witness failed re-validation");
            }
            Ok(match report.verdict {
                Verdict::Sat => ExitCode::SUCCESS,
                Verdict::Unsat => ExitCode::from(1),
            })
        }
        Command::Normalize {
            file,
            alcp,
            shallow,
        } => {
            let p = load(&file, alcp)?;
            let n = if shallow {
                normalize_shallow(&p)
            } else {
                normalize(&p)
            }
            .map_err(|e| e.to_string())?;
            print!("{}", n.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::Abstract {
            file,
            alcp,
            full_normal_form,
        } => {
            let p = load(&file, alcp)?;
            let n = if full_normal_form {
                normalize(&p)
            } else {
                normalize_shallow(&p)
            }
            .map_err(|e| e.to_string())?;
            let a = abstract_problem(&n.pruned()).map_err(|e| e.to_string())?;
            print!("{}", a.render());
            Ok(ExitCode::SUCCESS)
        }
        Command::TranslateAlcp { file } => {
            let p = load(&file, true)?;
            print!("{}", problem_to_string(&p));
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { file } => {
            let g = ConstraintGraph::parse(&read(&file)?)
                .map_err(|e| format!("{}: {e}", file.display()))?;
            match embed_finite(&g) {
                Ok(kappa) => {
                    println!("embeddable");
                    for (n, v) in g.names.iter().zip(&kappa) {
                        println!("{n} = {v}");
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(c) => {
                    println!("not embeddable");
                    println!("cycle: {}", c.describe(&g));
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("ZALC_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
