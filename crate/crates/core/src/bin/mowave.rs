use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mowave::runner::{self, presets, Generator, IndicatorSet, HEATMAP_CELL};

#[derive(Parser)]
#[command(name = "mowave", version, about = "Moving-emitter scattering simulation and direct sampling imaging")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON configuration or a run metadata file.
    Run {
        config: PathBuf,
        /// Desk-scale factor on time steps, mesh resolution and receivers.
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// I1, I2 or both.
        #[arg(long)]
        indicator: Option<IndicatorSet>,
        /// bie or approx.
        #[arg(long)]
        generator: Option<Generator>,
    },
    /// List the built-in presets.
    Presets,
    /// Re-render the heatmap of an image CSV.
    Render {
        image: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Pixels per grid point.
        #[arg(long, default_value_t = HEATMAP_CELL)]
        cell: u32,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = format!("error: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                msg.push_str(&format!("\n  caused by: {s}"));
                src = s.source();
            }
            eprintln!("{msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> mowave::Result<()> {
    match cli.command {
        Command::Run {
            config,
            scale,
            out,
            seed,
            indicator,
            generator,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = runner::parse_config(&text)?;
            if let Some(s) = scale {
                cfg.scale = s;
            }
            if let Some(dir) = out {
                cfg.output_dir = Some(dir);
            }
            if let Some(s) = seed {
                cfg.noise.seed = s;
            }
            if let Some(i) = indicator {
                cfg.indicators = i;
            }
            if let Some(g) = generator {
                cfg.generator = g;
            }
            cfg.validate()?;
            let out = runner::run_experiment(&cfg)?;
            println!("config hash {}", out.config_hash);
            for img in &out.images {
                let peak = img.point(img.argmax());
                println!(
                    "{}: max {:.6e} at {:?}",
                    img.kind,
                    img.max(),
                    &peak.as_slice()[..img.grid.dim()]
                );
            }
            for f in &out.files {
                println!("wrote {}", f.display());
            }
        }
        Command::Presets => {
            let mut text = String::new();
            for (name, about) in presets::PRESETS {
                text.push_str(&format!("{name:<28}{about}\n"));
            }
            for (alias, target) in presets::ALIASES {
                text.push_str(&format!("{alias:<28}alias for {target}\n"));
            }
            // A closed pipe (e.g. `| head`) is not an error.
            if let Err(e) = std::io::stdout().write_all(text.as_bytes()) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    return Err(e.into());
                }
            }
        }
        Command::Render { image, out, cell } => {
            let path = runner::rerender(&image, out.as_deref(), cell)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
