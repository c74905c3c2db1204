use std::path::PathBuf;

use clap::{Parser, Subcommand};

use fedce_bench::{emit_report, run_experiment, ExperimentConfig};
use fedce_game::{
    least_core, load_game_file, nucleolus, shapley_exact, shapley_monte_carlo, PermutationSampler,
};
use fedce_lp::Simplex;

#[derive(Parser)]
#[command(
    name = "fedce",
    about = "Contribution-evaluation benchmark for federated learning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a key-value config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute report artifacts from an existing results directory.
    Report {
        #[arg(long)]
        results: PathBuf,
    },
    /// Solve an explicit coalition game directly.
    Game {
        #[command(subcommand)]
        command: GameCommand,
    },
}

#[derive(Subcommand)]
enum GameCommand {
    /// Compute a solution concept for a game file.
    Solve {
        #[arg(long)]
        game_file: PathBuf,
        /// shapley | mc-shapley | least-core | nucleolus
        #[arg(long)]
        method: String,
        /// Permutations for mc-shapley.
        #[arg(long, default_value_t = 10_000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run() -> Result<(), Box<dyn std::error::Error>> {
    match Cli::parse().command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::from_file(&config)?;
            let dir = run_experiment(&cfg)?;
            println!("results written to {}", dir.display());
            let summary = std::fs::read_to_string(dir.join("summary.txt"))?;
            print!("{summary}");
        }
        Command::Report { results } => {
            emit_report(&results)?;
            println!("report artifacts refreshed in {}", results.display());
            let summary = std::fs::read_to_string(results.join("summary.txt"))?;
            print!("{summary}");
        }
        Command::Game { command } => match command {
            GameCommand::Solve {
                game_file,
                method,
                iterations,
                seed,
            } => {
                let game = load_game_file(&game_file)?;
                match method.as_str() {
                    "shapley" => {
                        let phi = shapley_exact(&game)?;
                        print_payoffs("shapley", phi.values());
                    }
                    "mc-shapley" => {
                        let mut sampler = PermutationSampler::new(game.n(), seed);
                        let phi = shapley_monte_carlo(&game, &mut sampler, iterations, None);
                        print_payoffs("mc-shapley", phi.values());
                    }
                    "least-core" => {
                        let solution = least_core(&game, &Simplex::new())?;
                        print_payoffs("least-core", solution.payoff.values());
                        println!("epsilon* = {}", solution.epsilon_star);
                        println!("core nonempty: {}", solution.core_nonempty);
                    }
                    "nucleolus" => {
                        let phi = nucleolus(&game, &Simplex::new())?;
                        print_payoffs("nucleolus", phi.values());
                    }
                    other => {
                        return Err(format!(
                            "unknown method {other:?}; use shapley, mc-shapley, least-core or nucleolus"
                        )
                        .into());
                    }
                }
            }
        },
    }
    Ok(())
}

fn print_payoffs(label: &str, values: &[f64]) {
    println!("{label} payoffs:");
    for (i, v) in values.iter().enumerate() {
        println!("  player {i}: {v}");
    }
}
