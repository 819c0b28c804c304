use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use uwqkd_cli::config::{resolve_scenario, resolve_water};
use uwqkd_cli::sweep::{cells_at, evaluate_cells};
use uwqkd_cli::units::{parse_angle, parse_quantity, Dimension};
use uwqkd_cli::{
    load_config, run_sweep, solve_thresholds, write_csv, CliError, RunConfig, SearchRange,
};
use uwqkd_core::environment::noise_counts_y0;
use uwqkd_core::{AtmosphericScenario, LinkConfig, WaterType};

/// BBM92 over underwater optical links: QBER and key-rate sweeps,
/// secure-distance thresholds and Monte Carlo checks.
#[derive(Debug, Parser)]
#[command(name = "uwqkd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// QBER, SKR and coincidence probability against link length (CSV).
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Fill the Monte Carlo columns.
        #[arg(long)]
        mc: bool,
    },
    /// Distances where QBER reaches 11% and where the key rate vanishes.
    Thresholds {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimate next to the analytic QBER at one length (CSV).
    Mc {
        #[command(flatten)]
        common: Common,
        /// Link length, e.g. "1.5 m" (defaults to link.length of the config).
        #[arg(long)]
        length: Option<String>,
    },
    /// Lists the built-in water types and scenarios.
    Presets,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Water types, comma separated (clear, coastal, turbid).
    #[arg(long, value_delimiter = ',')]
    water: Vec<String>,
    /// Scenarios, comma separated (s1..s5).
    #[arg(long, value_delimiter = ',')]
    scenario: Vec<String>,
    /// Source angles, comma separated; radians or forms like pi/4.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    beta: Vec<String>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Monte Carlo master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo packets per cell.
    #[arg(long)]
    packets: Option<u64>,
    /// Photon pairs per packet.
    #[arg(long)]
    photons: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "QKD_SIM_JOBS")]
    jobs: Option<usize>,
    /// Scale arm efficiencies by the correction coefficient T.
    #[arg(long)]
    apply_correction: bool,
}

fn usage(e: CliError) -> CliError {
    match e {
        CliError::Config(msg) => CliError::Usage(msg),
        other => other,
    }
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        if self.apply_correction {
            cfg.link.detector.apply_correction = true;
            cfg.sweep.base.detector.apply_correction = true;
        }
        let link = cfg.link;
        if !self.water.is_empty() {
            cfg.sweep.waters = self
                .water
                .iter()
                .map(|w| {
                    Ok(resolve_water(
                        &link,
                        uwqkd_cli::config::water_kind(w).map_err(usage)?,
                    ))
                })
                .collect::<Result<Vec<WaterType>, CliError>>()?;
        }
        if !self.scenario.is_empty() {
            cfg.sweep.scenarios = self
                .scenario
                .iter()
                .map(|s| {
                    let id = uwqkd_cli::config::scenario(s).map_err(usage)?.id;
                    resolve_scenario(&link, id)
                })
                .collect::<Result<Vec<AtmosphericScenario>, CliError>>()?;
        }
        if !self.beta.is_empty() {
            cfg.sweep.betas = self
                .beta
                .iter()
                .map(|b| parse_angle(b).map_err(usage))
                .collect::<Result<_, _>>()?;
        }
        let mc = &mut cfg.montecarlo;
        mc.seed = self.seed.unwrap_or(mc.seed);
        mc.n_packets = self.packets.unwrap_or(mc.n_packets);
        mc.photons_per_packet = self.photons.unwrap_or(mc.photons_per_packet);
        if mc.n_packets == 0 || mc.photons_per_packet == 0 {
            return Err(CliError::Usage(
                "--packets and --photons must be positive".into(),
            ));
        }
        if cfg.sweep.mc.is_some() {
            cfg.sweep.mc = Some(*mc);
        }
        cfg.sweep.validate()?;
        Ok(cfg)
    }

    fn output(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn in_pool<T: Send>(
        &self,
        f: impl FnOnce() -> Result<T, CliError> + Send,
    ) -> Result<T, CliError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            if n == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {:?} workers: {e}", self.jobs)))?;
        pool.install(f)
    }
}

fn sweep(common: &Common, mc: bool) -> Result<(), CliError> {
    let mut cfg = common.load()?;
    if mc {
        cfg.sweep.mc = Some(cfg.montecarlo);
    }
    let rows = common.in_pool(|| run_sweep(&cfg.sweep))?;
    write_csv(&rows, common.output()?)
}

fn thresholds(common: &Common) -> Result<(), CliError> {
    let cfg = common.load()?;
    let s = &cfg.sweep;
    let range = SearchRange {
        l_min: s.l_min,
        l_max: s.l_max,
        step: s.step,
    };
    let jobs = cells_at(s, s.l_min);
    let reports = common.in_pool(|| {
        jobs.par_iter()
            .map(|c| solve_thresholds(&c.link, c.beta, range))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(common.output()?);
    w.write_record([
        "water",
        "scenario",
        "beta_rad",
        "qber_secure_distance_m",
        "skr_zero_distance_m",
    ])?;
    for r in reports {
        w.write_record([
            r.water.to_string(),
            format!("s{}", r.scenario),
            format!("{:.16e}", r.beta),
            r.qber_secure_distance.to_string(),
            r.skr_zero_distance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn monte_carlo(common: &Common, length: Option<&str>) -> Result<(), CliError> {
    let cfg = common.load()?;
    let length = match length {
        Some(l) => parse_quantity(l, Dimension::Length).map_err(usage)?,
        None => cfg.link.total_length,
    };
    let rows =
        common.in_pool(|| evaluate_cells(&cells_at(&cfg.sweep, length), Some(cfg.montecarlo)))?;
    write_csv(&rows, common.output()?)
}

fn presets() -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    writeln!(out, "water    alpha (1/m)  gamma_dep (1/m)")?;
    for kind in uwqkd_core::WaterKind::ALL {
        let w = WaterType::preset(kind);
        writeln!(out, "{:<8} {:<12} {:e}", kind.name(), w.alpha, w.gamma_dep)?;
    }
    writeln!(out)?;
    writeln!(out, "scenario  R0 (W/m^2)  y0")?;
    for s in AtmosphericScenario::all() {
        let link = LinkConfig {
            scenario: s,
            ..LinkConfig::default()
        };
        writeln!(
            out,
            "{:<9} {:<11} {:.6e}",
            s.name(),
            s.r0,
            noise_counts_y0(&link)
        )?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep { common, mc } => sweep(common, *mc),
        Command::Thresholds { common } => thresholds(common),
        Command::Mc { common, length } => monte_carlo(common, length.as_deref()),
        Command::Presets => presets(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("uwqkd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
