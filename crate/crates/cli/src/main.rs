use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nfbeam::analytics::{BeamAnalytics, GainConvention};
use nfbeam::geometry::PolarPosition;
use nfbeam::grid::build_grid;
use nfbeam::sim::campaign::{run_campaign, run_trial, Scenario, TrackerKind};
use nfbeam::sim::metrics::summarize;
use nfbeam::sim::report::{csv_string, write_campaign, write_text};
use nfbeam::sim::selftest::run_selftest;
use nfbeam::sim::sweeps::{angle_sweep, coherence_table, depth_sweep, joint_sweep, log_space, threshold_table};
use nfbeam::sim::SimulationConfig;

#[derive(Parser)]
#[command(name = "nfbeam", version, about = "Near-field DMA beam focusing and tracking simulator")]
struct Cli {
    /// TOML scenario file; defaults apply to anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file (tables) or directory (campaign). Tables go to stdout if absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Whether κ% thresholds apply to power or to amplitude.
    #[arg(long, global = true, value_enum)]
    convention: Option<Convention>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Power,
    Amplitude,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sweep {
    /// Depth-of-focus edges `r ± Δ±_κ(r)` against the oracle.
    Depth,
    /// Angular edges `φ ± Δ_κ(φ)`.
    Angle,
    /// Window corners.
    Joint,
    /// Range and angle thresholds under both gain conventions.
    Thresholds,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form beam windows against brute-force correlations over an r0 sweep.
    Analyze {
        #[arg(value_enum)]
        sweep: Sweep,
        #[arg(long, default_value_t = 50.0)]
        kappa: f64,
        #[arg(long, default_value_t = 90.0)]
        phi_deg: f64,
        /// Defaults to the radius where the second-order expansion becomes accurate.
        #[arg(long)]
        r0_min: Option<f64>,
        /// Defaults to the Rayleigh distance.
        #[arg(long)]
        r0_max: Option<f64>,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Search grid around a position estimate, as JSON.
    Grid {
        #[arg(long)]
        r0: f64,
        #[arg(long, default_value_t = 90.0)]
        phi_deg: f64,
        /// Search radius; defaults to 2.5 c_κ at the centre.
        #[arg(long)]
        c_hat: Option<f64>,
        #[arg(long, default_value_t = 99.0)]
        delta: f64,
        #[arg(long, default_value_t = 50.0)]
        kappa: f64,
    },
    /// Minimum displacement c_κ and coherence time over an r0 sweep.
    Coherence {
        #[arg(long, value_delimiter = ',', default_values_t = [20.0, 40.0, 60.0, 80.0])]
        kappas: Vec<f64>,
        #[arg(long, default_value_t = 10.0)]
        speed: f64,
        #[arg(long, default_value_t = 90.0)]
        phi_deg: f64,
        #[arg(long)]
        r0_min: Option<f64>,
        #[arg(long, default_value_t = 100.0)]
        r0_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// One trajectory of the adaptive tracker; prints per-slot JSON lines.
    Track {
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Monte-Carlo campaign of both trackers; writes CSV aggregates.
    Campaign {
        #[arg(long)]
        no_benchmark: bool,
        #[arg(long)]
        no_records: bool,
    },
    /// Quick oracle checks of the analytic layer.
    Selftest,
    /// Print the effective configuration as TOML.
    Config,
}

fn load_config(cli: &Cli) -> nfbeam::Result<SimulationConfig> {
    let mut cfg = match &cli.config {
        Some(p) => SimulationConfig::load(p)?,
        None => SimulationConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.trials {
        cfg.trials = t;
    }
    if let Some(c) = cli.convention {
        cfg.convention = match c {
            Convention::Power => GainConvention::Power,
            Convention::Amplitude => GainConvention::Amplitude,
        };
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> nfbeam::Result<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = stdout.write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn analytics(scenario: &Scenario, kappas: &[f64]) -> nfbeam::Result<BeamAnalytics> {
    scenario.analytics()?.with_kappas(kappas)
}

fn run(cli: &Cli) -> nfbeam::Result<ExitCode> {
    let cfg = load_config(cli)?;
    let scenario = cfg.resolve()?;
    let fr = scenario.geometry.field_regions();
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Analyze { sweep, kappa, phi_deg, r0_min, r0_max, points } => {
            let an = analytics(&scenario, &[*kappa])?;
            let r0s = log_space(r0_min.unwrap_or(fr.r0_approx), r0_max.unwrap_or(fr.r_rayleigh), *points);
            let phi = phi_deg.to_radians();
            let text = match sweep {
                Sweep::Depth => csv_string("depth", &depth_sweep(&an, *kappa, phi, &r0s)?)?,
                Sweep::Angle => csv_string("angle", &angle_sweep(&an, *kappa, phi, &r0s)?)?,
                Sweep::Joint => csv_string("joint", &joint_sweep(&an, *kappa, phi, &r0s)?)?,
                Sweep::Thresholds => {
                    let kappas = [20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 95.0, 99.0];
                    csv_string("thresholds", &threshold_table(&an, &kappas, &[0.0, -0.5])?)?
                }
            };
            emit(out, &text)?;
        }
        Command::Grid { r0, phi_deg, c_hat, delta, kappa } => {
            let an = analytics(&scenario, &[*kappa, *delta])?;
            let r = scenario.geometry.r_from_r0(*r0);
            let phi = phi_deg.to_radians();
            let c = match c_hat {
                Some(c) => *c,
                None => 2.5 * an.chord_depth_min(r, phi, *kappa)?,
            };
            let grid = build_grid(&an, PolarPosition::new(r, phi)?, c, *delta)?;
            let text = serde_json::to_string_pretty(&grid).expect("grid serialises") + "\n";
            emit(out, &text)?;
        }
        Command::Coherence { kappas, speed, phi_deg, r0_min, r0_max, points } => {
            let an = analytics(&scenario, kappas)?;
            let r0s = log_space(r0_min.unwrap_or(fr.r_fresnel), *r0_max, *points);
            let rows = coherence_table(&an, kappas, phi_deg.to_radians(), *speed, &r0s)?;
            emit(out, &csv_string("coherence", &rows)?)?;
        }
        Command::Track { trial } => {
            let an = scenario.analytics()?;
            let result = run_trial(&scenario, &an, *trial, TrackerKind::Proposed, None)?;
            if let Some(e) = &result.error {
                eprintln!("trial {trial} failed: {e}");
                return Ok(ExitCode::from(2));
            }
            let mut text = String::new();
            for s in &result.slots {
                text += &serde_json::to_string(s).expect("slot serialises");
                text.push('\n');
            }
            emit(out, &text)?;
        }
        Command::Campaign { no_benchmark, no_records } => {
            let mut scenario = scenario;
            if *no_benchmark {
                scenario.benchmark = None;
            }
            let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.output.dir.clone());
            let result = run_campaign(&scenario)?;
            let written = write_campaign(&dir, &scenario, &result, cfg.output.records && !no_records)?;
            let tti = scenario.tracker.tti;
            let mut rows = vec![summarize(TrackerKind::Proposed, &result.proposed, tti)];
            if let Some((_, b)) = &result.benchmark {
                rows.push(summarize(TrackerKind::Benchmark, b, tti));
            }
            for s in &rows {
                eprintln!(
                    "{:?}: trials {} failed {} mean gain {:.3} time-avg p05 {:.3} mean T_c {:.4} s",
                    s.tracker, s.trials, s.failed, s.mean_gain, s.time_avg_p05, s.mean_coherence_time_s
                );
            }
            for p in written {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Selftest => {
            let checks = run_selftest()?;
            let mut ok = true;
            for c in &checks {
                ok &= c.passed;
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if !ok {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Config => emit(out, &cfg.to_toml())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
