mod commands;
mod manifest;

use clap::{Parser, Subcommand};

/// Batch experiments over temporal conversation networks: generate
/// schedules, run seeded agent replications, score reachability, calibrate
/// parameters, and predict convergence for real contact networks.
#[derive(Parser)]
#[command(name = "mnemosim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the 16-node conversation schedule and its clique partition
    GenNetwork(commands::GenNetworkArgs),
    /// Run seeded agent replications of the conversation experiment
    Simulate(commands::SimulateArgs),
    /// Score reachability for a temporal-network file
    Reach(commands::ReachArgs),
    /// Grid-search the recency and propagation parameters
    Calibrate(commands::CalibrateArgs),
    /// Rank a contact network's edges and predict convergence per edge order
    Pipeline(commands::PipelineArgs),
}

fn main() {
    // MNEMOSIM_THREADS caps internal parallelism (betweenness sources etc.)
    if let Some(threads) = std::env::var("MNEMOSIM_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::GenNetwork(args) => commands::gen_network(args),
        Command::Simulate(args) => commands::simulate(args),
        Command::Reach(args) => commands::reach(args),
        Command::Calibrate(args) => commands::calibrate(args),
        Command::Pipeline(args) => commands::pipeline(args),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
