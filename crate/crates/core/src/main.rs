use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ovd::commands::{cmd_jerk_profile, cmd_simulate, cmd_spectrum, cmd_sweep, cmd_threshold};
use ovd::{Error, ExperimentConfig, Overrides, Preset, Scheme};

#[derive(Parser)]
#[command(
    name = "ovd",
    version,
    about = "Ring-road OVM / hybrid OVD experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// stable-paper, unstable-paper or unstable-long
    #[arg(long, global = true, value_parser = parse_preset)]
    preset: Option<Preset>,

    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    scheme: Option<SchemeArg>,

    #[arg(long, global = true)]
    dt: Option<f64>,

    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,

    /// Absolute initial displacement of the perturbed vehicle
    #[arg(long, global = true, allow_negative_numbers = true)]
    dx: Option<f64>,

    /// Fourier modes to track, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    modes: Option<Vec<usize>>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Integrate the ring and write trajectories, velocities and Fourier amplitudes
    Simulate,
    /// Dispersion-relation eigenvalues for every ring mode
    Spectrum,
    /// Closed-form threshold against spectrum bisection over a headway grid
    Threshold,
    /// Acceleration, effective sensitivity and jerk over a velocity grid
    JerkProfile,
    /// Analytic and simulated stability over a (b, a/a*) grid
    Sweep,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Euler,
    Rk4,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides {
        preset: cli.preset,
        output_dir: cli.out.clone(),
        scheme: cli.scheme.map(|s| match s {
            SchemeArg::Euler => Scheme::ForwardEuler,
            SchemeArg::Rk4 => Scheme::RungeKutta4,
        }),
        dt: cli.dt,
        t_end: cli.t_end,
        dx: cli.dx,
        modes: cli.modes.clone(),
    };

    match execute(cli.command, cli.config.as_deref(), &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Diverged { .. } => 3,
                ref e if e.is_config() => 2,
                Error::Domain(_) => 2,
                _ => 1,
            })
        }
    }
}

fn execute(
    command: Command,
    config: Option<&std::path::Path>,
    overrides: &Overrides,
) -> ovd::Result<()> {
    let cfg = ExperimentConfig::load(config, overrides)?;
    let out = cfg.output_dir.display();
    match command {
        Command::Simulate => {
            let o = cmd_simulate(&cfg)?;
            println!(
                "{}: a/a* = {:.4}, min v = {:.6}, collision = {}, {} samples -> {out}",
                o.meta.classification,
                o.meta.ratio,
                o.meta.min_velocity,
                o.meta.collision,
                o.meta.n_samples
            );
        }
        Command::Spectrum => {
            let s = cmd_spectrum(&cfg)?;
            println!(
                "{}: max Re lambda = {:e} (fastest mode {}) -> {out}",
                s.classification, s.max_re_lambda, s.fastest_mode
            );
        }
        Command::Threshold => {
            let rows = cmd_threshold(&cfg)?;
            let worst = rows
                .iter()
                .map(|r| r.relative_difference)
                .fold(0.0, f64::max);
            println!(
                "{} headways, max relative difference {worst:e} -> {out}",
                rows.len()
            );
        }
        Command::JerkProfile => {
            let rows = cmd_jerk_profile(&cfg)?;
            println!("{} velocities -> {out}", rows.len());
        }
        Command::Sweep => {
            let rows = cmd_sweep(&cfg)?;
            let failed = rows
                .iter()
                .filter(|r| r.status.starts_with("error"))
                .count();
            println!("{} cells ({failed} failed) -> {out}", rows.len());
        }
    }
    Ok(())
}
