use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use rupert_core::nieuwland::{DEFAULT_ANGLE_SAMPLES, DEFAULT_REFINE_ITERS};
use rupert_core::verify::Suite;
use rupert_core::OptConfig;
use rupert_kit::commands::{self, Failure, Outcome, EXIT_INVALID_INPUT};

/// Shadows, passages and Nieuwland constants of rectangular boxes.
#[derive(Parser, Debug)]
#[command(name = "rupert-kit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// Write an SVG figure here.
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
    /// Geometric tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args, Debug)]
struct BoxArgs {
    /// Box sides, e.g. `1,2,3`.
    #[arg(long, value_parser = parse_triple)]
    dims: [f64; 3],
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Shadow of the box along a direction.
    Shadow {
        #[command(flatten)]
        bx: BoxArgs,
        /// Viewing direction, normalized automatically.
        #[arg(long, value_parser = parse_triple)]
        dir: [f64; 3],
    },
    /// Straight tunnel letting `lambda` times the box pass.
    Passage {
        #[command(flatten)]
        bx: BoxArgs,
        #[arg(long, value_parser = parse_triple)]
        dir: [f64; 3],
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Numerical Nieuwland constant (a certified lower bound).
    Nieuwland {
        #[command(flatten)]
        bx: BoxArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lattice directions in one octant.
        #[arg(long, default_value_t = 4000)]
        sphere_samples: usize,
        #[arg(long, default_value_t = DEFAULT_ANGLE_SAMPLES)]
        angle_samples: usize,
        #[arg(long, default_value_t = DEFAULT_REFINE_ITERS)]
        refine_iters: usize,
        #[arg(long, default_value_t = 0.7)]
        refine_shrink: f64,
    },
    /// Randomized property suites.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("`{p}` is not finite"));
        }
    }
    Ok(out)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("RUPERT_KIT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| Failure {
        code: EXIT_INVALID_INPUT,
        message: format!("RUPERT_KIT_THREADS must be a non-negative integer, got `{raw}`"),
    })?;
    if n > 0 {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    configure_threads()?;
    let want_svg = cli.svg.is_some();
    match &cli.command {
        Command::Shadow { bx, dir } => commands::shadow(
            &commands::ShadowInputs {
                dims: bx.dims,
                direction: *dir,
                tol: cli.tol,
            },
            want_svg,
        ),
        Command::Passage { bx, dir, lambda } => commands::passage(
            &commands::PassageInputs {
                dims: bx.dims,
                direction: *dir,
                lambda: *lambda,
                tol: cli.tol,
            },
            want_svg,
        ),
        Command::Nieuwland {
            bx,
            seed,
            sphere_samples,
            angle_samples,
            refine_iters,
            refine_shrink,
        } => commands::nieuwland(
            &commands::NieuwlandInputs {
                dims: bx.dims,
                config: OptConfig {
                    sphere_samples: *sphere_samples,
                    angle_samples: *angle_samples,
                    refine_iters: *refine_iters,
                    refine_shrink: *refine_shrink,
                    seed: *seed,
                },
                tol: cli.tol,
            },
            want_svg,
        ),
        Command::Verify { suite, trials, seed } => commands::verify(&commands::VerifyInputs {
            suite: *suite,
            trials: *trials,
            seed: *seed,
            tol: cli.tol,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("error: {}", f.message);
            return ExitCode::from(f.code);
        }
    };
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    let written = match &cli.json {
        Some(path) => std::fs::write(path, &outcome.json),
        None => {
            print!("{}", outcome.json);
            Ok(())
        }
    };
    let written = written.and_then(|_| match (&cli.svg, &outcome.svg) {
        (Some(path), Some(svg)) => std::fs::write(path, svg),
        (Some(_), None) => {
            eprintln!("note: this command draws no figure");
            Ok(())
        }
        _ => Ok(()),
    });
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
    ExitCode::from(outcome.code)
}
