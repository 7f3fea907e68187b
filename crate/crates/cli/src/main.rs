mod args;
mod commands;
mod config;
mod error;
mod output;

use clap::Parser;

use args::{Cli, Command};
use config::PipelineConfig;
use error::{CliError, Result};

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::validation("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::validation(format!("thread pool: {e}")))?;
    }
    cfg.validate()?;
    match &cli.command {
        Command::G2p(a) => commands::g2p(&cfg, a),
        Command::Synth(a) => commands::synth(&mut cfg, a),
        Command::GecSynth(a) => commands::gec_synth(&mut cfg, a),
        Command::Prep(a) => commands::prep(&mut cfg, a),
        Command::TrainLm(a) => commands::train_lm(&mut cfg, a),
        Command::Correct(a) => commands::correct(&mut cfg, a),
        Command::Rover(a) => commands::rover(&mut cfg, a),
        Command::Score(a) => commands::score(a),
        Command::Gleu(a) => commands::gleu_cmd(&mut cfg, a),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("{}", e.to_json_line());
        std::process::exit(e.kind.exit_code());
    }
}
