use std::path::PathBuf;
use std::process::ExitCode;

use bundlegsp_cli::{run, Command, LoadedConfig};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bundlegsp", version, about = "Graph bundle signal processing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a bundle and write it as JSON with its validation report.
    MakeBundle(Common),
    /// Coherence and atom-norm spread over a stride/reach grid.
    Sweep(Common),
    /// Compare the Laplacian spectra and moments of two graphs.
    Spectra(Common),
    /// Denoise a landscape with the bundle dictionary and the total Fourier basis.
    Denoise(Common),
    /// Dump every dictionary atom, optionally analyzing a signal.
    Dictionary(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides `output` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::MakeBundle(a) => (Command::MakeBundle, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Spectra(a) => (Command::Spectra, a),
        Cmd::Denoise(a) => (Command::Denoise, a),
        Cmd::Dictionary(a) => (Command::Dictionary, a),
    };
    let result = LoadedConfig::load(&args.config)
        .and_then(|loaded| run(command, &loaded, args.out.as_deref(), args.seed));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
