//! Secure-distance solvers: where the QBER reaches the security bound and
//! where the key rate first vanishes.

use std::fmt;

use uwqkd_core::analysis::QBER_SECURITY_BOUND;
use uwqkd_core::{evaluate_link, LinkConfig, PerformanceResult, WaterKind};

use crate::error::CliError;

/// Bisection stops once the bracket is narrower than this (m).
pub const SOLVER_TOL: f64 = 1e-4;

/// Slack allowed when checking that QBER(L) never decreases on the grid.
const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing {
    /// Distance in metres; `0` when the condition already holds at `l_min`.
    At(f64),
    /// No crossing up to `l_max`.
    BeyondMax,
}

impl Crossing {
    pub fn distance(self) -> Option<f64> {
        match self {
            Crossing::At(d) => Some(d),
            Crossing::BeyondMax => None,
        }
    }
}

impl fmt::Display for Crossing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Crossing::At(d) => write!(f, "{d:.4}"),
            Crossing::BeyondMax => f.write_str("beyond_l_max"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub water: WaterKind,
    pub scenario: u8,
    pub beta: f64,
    pub qber_secure_distance: Crossing,
    pub skr_zero_distance: Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchRange {
    pub l_min: f64,
    pub l_max: f64,
    /// Grid spacing of the monotonicity pre-scan.
    pub step: f64,
}

impl Default for SearchRange {
    fn default() -> Self {
        Self {
            l_min: 0.0,
            l_max: 4.0,
            step: 0.005,
        }
    }
}

impl SearchRange {
    fn grid(&self) -> Vec<f64> {
        let n = ((self.l_max - self.l_min) / self.step).ceil().max(1.0) as usize;
        (0..=n)
            .map(|i| (self.l_min + i as f64 * self.step).min(self.l_max))
            .collect()
    }
}

/// Smallest grid point where `hit` holds, refined by bisection to
/// [`SOLVER_TOL`].
fn first_crossing<F>(grid: &[f64], at_grid: &[bool], mut hit: F) -> Result<Crossing, CliError>
where
    F: FnMut(f64) -> Result<bool, CliError>,
{
    let Some(i) = at_grid.iter().position(|&h| h) else {
        return Ok(Crossing::BeyondMax);
    };
    if i == 0 {
        return Ok(Crossing::At(0.0));
    }
    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
    while hi - lo > SOLVER_TOL {
        let mid = 0.5 * (lo + hi);
        if hit(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Crossing::At(0.5 * (lo + hi)))
}

pub fn solve_thresholds(
    cfg: &LinkConfig,
    beta: f64,
    range: SearchRange,
) -> Result<ThresholdReport, CliError> {
    if !(range.l_min >= 0.0 && range.l_max > range.l_min && range.step > 0.0) {
        return Err(CliError::Usage(format!("invalid search range {range:?}")));
    }
    let eval = |l: f64| -> Result<PerformanceResult, CliError> {
        Ok(evaluate_link(&cfg.with_length(l), beta)?)
    };
    let grid = range.grid();
    let scan: Vec<PerformanceResult> = grid.iter().map(|&l| eval(l)).collect::<Result<_, _>>()?;
    for (w, l) in scan.windows(2).zip(&grid[1..]) {
        if w[1].qber < w[0].qber - MONOTONE_SLACK {
            return Err(CliError::NonMonotone(format!(
                "QBER drops from {} to {} at L = {l} m ({} / {} / beta = {beta})",
                w[0].qber,
                w[1].qber,
                cfg.water.kind,
                cfg.scenario.name()
            )));
        }
    }

    let above = |r: &PerformanceResult| r.qber >= QBER_SECURITY_BOUND;
    let dead = |r: &PerformanceResult| r.skr == 0.0;
    let qber_flags: Vec<bool> = scan.iter().map(above).collect();
    let skr_flags: Vec<bool> = scan.iter().map(dead).collect();

    Ok(ThresholdReport {
        water: cfg.water.kind,
        scenario: cfg.scenario.id,
        beta,
        qber_secure_distance: first_crossing(&grid, &qber_flags, |l| Ok(above(&eval(l)?)))?,
        skr_zero_distance: first_crossing(&grid, &skr_flags, |l| Ok(dead(&eval(l)?)))?,
    })
}
