//! Distance sweeps and the CSV they produce.

use std::f64::consts::PI;
use std::io::{Read, Write};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use uwqkd_core::{evaluate_link, simulate, AtmosphericScenario, LinkConfig, SimConfig, WaterType};

use crate::error::CliError;

/// Column order of the CSV output. Consumers match it exactly.
pub const CSV_HEADER: [&str; 9] = [
    "water",
    "scenario",
    "beta_rad",
    "L_m",
    "qber",
    "skr_bits_per_pulse",
    "p_coincidence",
    "mc_qber",
    "mc_stderr",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSettings {
    pub n_packets: u64,
    pub photons_per_packet: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub l_min: f64,
    pub l_max: f64,
    pub step: f64,
    pub betas: Vec<f64>,
    pub waters: Vec<WaterType>,
    pub scenarios: Vec<AtmosphericScenario>,
    /// Link parameters shared by every cell; water, scenario and length are
    /// replaced per row.
    pub base: LinkConfig,
    /// Monte Carlo column settings, `None` to leave the columns blank.
    pub mc: Option<McSettings>,
}

impl SweepSpec {
    /// L ∈ [0, 4] m in 5 mm steps, β ∈ {π/4, π/5}, all waters and scenarios.
    pub fn with_defaults(base: LinkConfig) -> Self {
        Self {
            l_min: 0.0,
            l_max: 4.0,
            step: 0.005,
            betas: vec![PI / 4.0, PI / 5.0],
            waters: uwqkd_core::WaterKind::ALL
                .iter()
                .map(|&k| crate::config::resolve_water(&base, k))
                .collect(),
            scenarios: (1..=5)
                .map(|id| crate::config::resolve_scenario(&base, id).expect("1..=5"))
                .collect(),
            base,
            mc: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.l_min >= 0.0 && self.l_min.is_finite()) {
            return Err(CliError::Usage(format!(
                "l_min = {} must be >= 0",
                self.l_min
            )));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(CliError::Usage(format!("step = {} must be > 0", self.step)));
        }
        if !(self.l_max > self.l_min && self.l_max.is_finite()) {
            return Err(CliError::Usage(format!(
                "l_max = {} must exceed l_min = {}",
                self.l_max, self.l_min
            )));
        }
        if self.betas.is_empty() || self.waters.is_empty() || self.scenarios.is_empty() {
            return Err(CliError::Usage("empty beta, water or scenario list".into()));
        }
        if let Some(b) = self
            .betas
            .iter()
            .find(|b| !(0.0..=PI / 4.0 + 1e-15).contains(*b))
        {
            return Err(CliError::Usage(format!("beta = {b} outside [0, pi/4]")));
        }
        Ok(())
    }

    /// `l_min + i·step` up to `l_max` inclusive (to within 1e-9 of a step).
    pub fn lengths(&self) -> Vec<f64> {
        let n = ((self.l_max - self.l_min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| self.l_min + i as f64 * self.step).collect()
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub water: String,
    pub scenario: String,
    pub beta: f64,
    pub length: f64,
    pub qber: f64,
    pub skr: f64,
    pub p_coincidence: f64,
    pub mc: Option<(f64, f64)>,
}

impl Row {
    fn record(&self) -> [String; 9] {
        let f = |v: f64| format!("{v:.16e}");
        let (mc_q, mc_se) = match self.mc {
            Some((q, se)) => (f(q), f(se)),
            None => (String::new(), String::new()),
        };
        [
            self.water.clone(),
            self.scenario.clone(),
            f(self.beta),
            f(self.length),
            f(self.qber),
            f(self.skr),
            f(self.p_coincidence),
            mc_q,
            mc_se,
        ]
    }
}

/// A single operating point of the sweep.
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub link: LinkConfig,
    pub beta: f64,
}

/// Seed of the `index`-th cell, drawn from stream `index` of the master seed
/// so that cells never share random numbers.
pub fn cell_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Cells in output order: water, scenario, β, L.
pub fn cells(spec: &SweepSpec) -> Vec<Cell> {
    cells_over(spec, &spec.lengths())
}

/// The sweep's water × scenario × β cells at one fixed length.
pub fn cells_at(spec: &SweepSpec, length: f64) -> Vec<Cell> {
    cells_over(spec, &[length])
}

fn cells_over(spec: &SweepSpec, lengths: &[f64]) -> Vec<Cell> {
    let mut waters = spec.waters.clone();
    waters.sort_by_key(|w| w.kind);
    waters.dedup_by_key(|w| w.kind);
    let mut scenarios = spec.scenarios.clone();
    scenarios.sort_by_key(|s| s.id);
    scenarios.dedup_by_key(|s| s.id);
    let mut betas = spec.betas.clone();
    betas.sort_by(f64::total_cmp);
    betas.dedup();

    let mut out = Vec::with_capacity(waters.len() * scenarios.len() * betas.len() * lengths.len());
    for &water in &waters {
        for &scenario in &scenarios {
            for &beta in &betas {
                for &l in lengths {
                    let link = LinkConfig {
                        water,
                        scenario,
                        ..spec.base
                    }
                    .with_length(l);
                    out.push(Cell { link, beta });
                }
            }
        }
    }
    out
}

/// Evaluates each cell on the current rayon pool. Row `i` uses the Monte
/// Carlo seed `cell_seed(seed, i)`, so the output is independent of
/// scheduling.
pub fn evaluate_cells(cells: &[Cell], mc: Option<McSettings>) -> Result<Vec<Row>, CliError> {
    cells
        .par_iter()
        .enumerate()
        .map(|(i, cell)| {
            let r = evaluate_link(&cell.link, cell.beta)?;
            let mc = match mc {
                Some(m) => {
                    let sim = simulate(&SimConfig {
                        n_packets: m.n_packets,
                        photons_per_packet: m.photons_per_packet,
                        master_seed: cell_seed(m.seed, i as u64),
                        link: cell.link,
                        beta: cell.beta,
                    })?;
                    Some((sim.qber_estimate, sim.std_error))
                }
                None => None,
            };
            Ok(Row {
                water: cell.link.water.kind.to_string(),
                scenario: cell.link.scenario.name(),
                beta: cell.beta,
                length: cell.link.total_length,
                qber: r.qber,
                skr: r.skr,
                p_coincidence: r.p_coincidence,
                mc,
            })
        })
        .collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<Row>, CliError> {
    spec.validate()?;
    evaluate_cells(&cells(spec), spec.mc)
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows back, rejecting any header other than [`CSV_HEADER`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Row>, CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(CliError::Usage(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let num = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad number {s:?} in CSV")))
    };
    r.records()
        .map(|rec| {
            let rec = rec?;
            let mc = match (&rec[7], &rec[8]) {
                ("", "") => None,
                (q, se) => Some((num(q)?, num(se)?)),
            };
            Ok(Row {
                water: rec[0].to_string(),
                scenario: rec[1].to_string(),
                beta: num(&rec[2])?,
                length: num(&rec[3])?,
                qber: num(&rec[4])?,
                skr: num(&rec[5])?,
                p_coincidence: num(&rec[6])?,
                mc,
            })
        })
        .collect()
}
