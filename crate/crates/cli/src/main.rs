mod args;
mod commands;
mod config;
mod error;

use clap::Parser;

use args::{Cli, Command};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Fit(a) => commands::fit(a),
        Command::Tune(a) => commands::tune(a),
        Command::Audit(a) => commands::audit(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::Summarize(a) => commands::summarize(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
