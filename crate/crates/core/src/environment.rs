//! Classical optics of the underwater link: Beer–Lambert attenuation,
//! ambient irradiance at depth, detector noise counts, and the mapping from
//! geometry to the quantum channel parameters.
//!
//! All quantities are SI. The source sits at `x = source_fraction · L`;
//! Alice's arm has length `x` and Bob's `L − x`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::channels::ChannelParams;
use crate::error::{domain, Result};

/// Planck constant (J·s).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WaterKind {
    Clear,
    Coastal,
    Turbid,
}

impl WaterKind {
    pub const ALL: [WaterKind; 3] = [WaterKind::Clear, WaterKind::Coastal, WaterKind::Turbid];

    pub fn name(self) -> &'static str {
        match self {
            WaterKind::Clear => "clear",
            WaterKind::Coastal => "coastal",
            WaterKind::Turbid => "turbid",
        }
    }
}

impl fmt::Display for WaterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WaterKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "clear" => Ok(WaterKind::Clear),
            "coastal" => Ok(WaterKind::Coastal),
            "turbid" => Ok(WaterKind::Turbid),
            other => Err(domain(format!(
                "unknown water type {other:?} (expected clear, coastal or turbid)"
            ))),
        }
    }
}

/// Optical properties of a water body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterType {
    pub kind: WaterKind,
    /// Extinction coefficient α (1/m).
    pub alpha: f64,
    /// Depolarization coefficient γ_dep (1/m).
    pub gamma_dep: f64,
}

impl WaterType {
    pub fn preset(kind: WaterKind) -> Self {
        let (alpha, gamma_dep) = match kind {
            WaterKind::Clear => (0.151, 2.4e-6),
            WaterKind::Coastal => (0.339, 3.7e-6),
            WaterKind::Turbid => (2.195, 7.5e-6),
        };
        Self {
            kind,
            alpha,
            gamma_dep,
        }
    }

    pub fn clear() -> Self {
        Self::preset(WaterKind::Clear)
    }

    pub fn coastal() -> Self {
        Self::preset(WaterKind::Coastal)
    }

    pub fn turbid() -> Self {
        Self::preset(WaterKind::Turbid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(domain(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(self.gamma_dep > 0.0 && self.gamma_dep.is_finite()) {
            return Err(domain(format!(
                "gamma_dep = {} must be positive",
                self.gamma_dep
            )));
        }
        Ok(())
    }
}

/// Surface illumination condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtmosphericScenario {
    pub id: u8,
    /// Surface irradiance R_0 (W/m²).
    pub r0: f64,
}

impl AtmosphericScenario {
    /// Scenarios 1–5: full moon, overcast/low sun, hazy/low sun,
    /// overcast/high sun, clear/high sun.
    pub const PRESET_IRRADIANCE: [f64; 5] = [1e-3, 10.0, 50.0, 125.0, 500.0];

    pub fn preset(id: u8) -> Result<Self> {
        match id {
            1..=5 => Ok(Self {
                id,
                r0: Self::PRESET_IRRADIANCE[id as usize - 1],
            }),
            _ => Err(domain(format!("scenario {id} outside 1..=5"))),
        }
    }

    pub fn all() -> Vec<Self> {
        (1..=5).map(|id| Self::preset(id).expect("1..=5")).collect()
    }

    pub fn name(&self) -> String {
        format!("s{}", self.id)
    }
}

impl FromStr for AtmosphericScenario {
    type Err = crate::Error;

    /// Accepts `s1`..`s5` or a bare id.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let digits = t.strip_prefix('s').unwrap_or(&t);
        let id: u8 = digits
            .parse()
            .map_err(|_| domain(format!("unknown scenario {s:?} (expected s1..s5)")))?;
        Self::preset(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub eta_alice: f64,
    pub eta_bob: f64,
    /// Dark-current rate I_dc (Hz).
    pub i_dc: f64,
    /// Pulse duration Δt (s).
    pub dt_pulse: f64,
    /// Receiver gate time Δt′ (s).
    pub dt_gate: f64,
    /// Lens diameter d (m).
    pub lens_d: f64,
    /// Filter bandwidth Δλ (m).
    pub d_lambda: f64,
    /// Field-of-view angle δ (rad).
    pub fov_delta: f64,
    pub e_det: f64,
    /// Correction coefficient T.
    pub t_corr: f64,
    /// Multiply both arm efficiencies by `t_corr`. Off by default.
    pub apply_correction: bool,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            eta_alice: 0.5,
            eta_bob: 0.5,
            i_dc: 60.0,
            dt_pulse: 40e-9,
            dt_gate: 200e-12,
            lens_d: 0.10,
            d_lambda: 0.2e-9,
            fov_delta: PI,
            e_det: 0.033,
            t_corr: 0.16,
            apply_correction: false,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eta_alice", self.eta_alice),
            ("eta_bob", self.eta_bob),
            ("e_det", self.e_det),
            ("t_corr", self.t_corr),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(domain(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if !(self.i_dc >= 0.0 && self.i_dc.is_finite()) {
            return Err(domain(format!("dark current {} must be >= 0", self.i_dc)));
        }
        for (name, v) in [
            ("pulse duration", self.dt_pulse),
            ("gate time", self.dt_gate),
            ("lens diameter", self.lens_d),
            ("filter bandwidth", self.d_lambda),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.fov_delta > 0.0 && self.fov_delta <= 2.0 * PI) {
            return Err(domain(format!(
                "field of view {} outside (0, 2pi]",
                self.fov_delta
            )));
        }
        Ok(())
    }
}

/// Everything needed to evaluate one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConfig {
    /// Total link length L (m).
    pub total_length: f64,
    /// Source position as a fraction of L.
    pub source_fraction: f64,
    /// Depth z (m).
    pub depth: f64,
    /// Wavelength λ (m).
    pub wavelength: f64,
    /// Irradiance attenuation coefficient K_∞ (1/m).
    pub k_inf: f64,
    /// Thermal parameter ξ of the damping channels.
    pub xi: f64,
    /// Error-correction code rate R_c.
    pub code_rate: f64,
    pub water: WaterType,
    pub scenario: AtmosphericScenario,
    pub detector: DetectorParams,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            total_length: 0.0,
            source_fraction: 0.2,
            depth: 80.0,
            wavelength: 530e-9,
            k_inf: 0.08,
            xi: 0.0,
            code_rate: 0.5,
            water: WaterType::clear(),
            scenario: AtmosphericScenario::preset(1).expect("preset"),
            detector: DetectorParams::default(),
        }
    }
}

impl LinkConfig {
    pub fn preset(water: WaterKind, scenario: u8) -> Result<Self> {
        Ok(Self {
            water: WaterType::preset(water),
            scenario: AtmosphericScenario::preset(scenario)?,
            ..Self::default()
        })
    }

    /// Same configuration at another link length.
    pub fn with_length(mut self, total_length: f64) -> Self {
        self.total_length = total_length;
        self
    }

    /// Source position x (m).
    pub fn source_pos(&self) -> f64 {
        self.source_fraction * self.total_length
    }

    /// Arm lengths (x, L − x).
    pub fn arm_lengths(&self) -> (f64, f64) {
        let x = self.source_pos();
        (x, (self.total_length - x).max(0.0))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_length >= 0.0 && self.total_length.is_finite()) {
            return Err(domain(format!(
                "link length {} must be >= 0",
                self.total_length
            )));
        }
        if !(0.0..=1.0).contains(&self.source_fraction) {
            return Err(domain(format!(
                "source fraction {} outside [0, 1]",
                self.source_fraction
            )));
        }
        if !(self.depth >= 0.0 && self.depth.is_finite()) {
            return Err(domain(format!("depth {} must be >= 0", self.depth)));
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return Err(domain("wavelength must be positive"));
        }
        if !(self.k_inf >= 0.0 && self.k_inf.is_finite()) {
            return Err(domain("K_inf must be >= 0"));
        }
        if !(0.0..=0.5).contains(&self.xi) {
            return Err(domain(format!("xi = {} outside [0, 1/2]", self.xi)));
        }
        if !(self.code_rate > 0.0 && self.code_rate <= 1.0) {
            return Err(domain(format!(
                "code rate {} outside (0, 1]",
                self.code_rate
            )));
        }
        if !(self.scenario.r0 >= 0.0 && self.scenario.r0.is_finite()) {
            return Err(domain("surface irradiance must be >= 0"));
        }
        self.water.validate()?;
        self.detector.validate()
    }
}

/// Beer–Lambert fraction `e^{−α d}` remaining after `dist` metres.
pub fn transmittance(alpha: f64, dist: f64) -> Result<f64> {
    if dist.is_nan() || dist < 0.0 {
        return Err(domain(format!("distance {dist} must be >= 0")));
    }
    Ok((-alpha * dist).exp())
}

/// `(η_A, η_B) = (η_Alice · A(x), η_Bob · A(L − x))`, optionally scaled by T.
pub fn arm_efficiencies(cfg: &LinkConfig) -> Result<(f64, f64)> {
    let (da, db) = cfg.arm_lengths();
    let det = &cfg.detector;
    let corr = if det.apply_correction {
        det.t_corr
    } else {
        1.0
    };
    Ok((
        corr * det.eta_alice * transmittance(cfg.water.alpha, da)?,
        corr * det.eta_bob * transmittance(cfg.water.alpha, db)?,
    ))
}

/// Photon-loss probabilities `p_X = 1 − A(d_X)`.
pub fn loss_probabilities(cfg: &LinkConfig) -> Result<(f64, f64)> {
    let (da, db) = cfg.arm_lengths();
    Ok((
        1.0 - transmittance(cfg.water.alpha, da)?,
        1.0 - transmittance(cfg.water.alpha, db)?,
    ))
}

/// Depolarization probabilities `q_X = 1 − e^{−γ_dep d_X}`.
pub fn depolarization_probabilities(cfg: &LinkConfig) -> Result<(f64, f64)> {
    let (da, db) = cfg.arm_lengths();
    let g = cfg.water.gamma_dep;
    Ok((-(-g * da).exp_m1(), -(-g * db).exp_m1()))
}

/// Ambient irradiance at the link depth, `R_0 e^{−K_∞ z}` (W/m²).
pub fn irradiance(cfg: &LinkConfig) -> f64 {
    cfg.scenario.r0 * (-cfg.k_inf * cfg.depth).exp()
}

/// Receiver solid angle `2π(1 − cos(δ/2))`.
pub fn solid_angle(fov_delta: f64) -> f64 {
    2.0 * PI * (1.0 - (fov_delta / 2.0).cos())
}

/// Dark-count part of y0, `4 I_dc Δt`.
pub fn dark_count_term(det: &DetectorParams) -> f64 {
    4.0 * det.i_dc * det.dt_pulse
}

/// Expected noise count per gate:
/// `y0 = 4 I_dc Δt + R S Δt′ λ Δλ Ω / (h c)` with `S = π (d/2)²`.
pub fn noise_counts_y0(cfg: &LinkConfig) -> f64 {
    let det = &cfg.detector;
    let aperture = PI * (det.lens_d / 2.0).powi(2);
    let background = irradiance(cfg)
        * aperture
        * det.dt_gate
        * cfg.wavelength
        * det.d_lambda
        * solid_angle(det.fov_delta)
        / (PLANCK * SPEED_OF_LIGHT);
    dark_count_term(det) + background
}

/// Channel parameters implied by the link geometry.
pub fn channel_params(cfg: &LinkConfig) -> Result<ChannelParams> {
    let (p_a, p_b) = loss_probabilities(cfg)?;
    let (q_a, q_b) = depolarization_probabilities(cfg)?;
    ChannelParams::new(p_a, p_b, q_a, q_b, cfg.xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(water: WaterKind, scenario: u8, length: f64) -> LinkConfig {
        LinkConfig::preset(water, scenario)
            .unwrap()
            .with_length(length)
    }

    #[test]
    fn transmittance_examples() {
        assert_eq!(transmittance(0.151, 0.0).unwrap(), 1.0);
        // exp(-0.46055), exp(-1.82185)
        assert!((transmittance(0.151, 3.05).unwrap() - 0.630937).abs() < 1e-6);
        assert!((transmittance(2.195, 0.83).unwrap() - 0.161726).abs() < 1e-6);
        assert!(transmittance(0.151, -1.0).is_err());
    }

    #[test]
    fn efficiencies() {
        let (a, b) = arm_efficiencies(&cfg(WaterKind::Clear, 1, 0.0)).unwrap();
        assert_eq!((a, b), (0.5, 0.5));
        let (a, b) = arm_efficiencies(&cfg(WaterKind::Clear, 1, 1.0)).unwrap();
        // 0.5 exp(-0.0302), 0.5 exp(-0.1208)
        assert!((a - 0.485126).abs() < 1e-6);
        assert!((b - 0.443106).abs() < 1e-6);
    }

    #[test]
    fn correction_factor_is_opt_in() {
        let mut c = cfg(WaterKind::Clear, 1, 0.0);
        c.detector.apply_correction = true;
        let (a, b) = arm_efficiencies(&c).unwrap();
        assert!((a - 0.08).abs() < 1e-15 && (b - 0.08).abs() < 1e-15);
    }

    #[test]
    fn loss_probability_examples() {
        let (pa, _) = loss_probabilities(&cfg(WaterKind::Clear, 1, 0.0)).unwrap();
        assert_eq!(pa, 0.0);
        // Bob's arm is 0.8 L; L = 3.8125 gives d_B = 3.05
        let (_, pb) = loss_probabilities(&cfg(WaterKind::Clear, 1, 3.8125)).unwrap();
        assert!((pb - 0.369063).abs() < 1e-6);
        let c = cfg(WaterKind::Turbid, 3, 1.7);
        let (pa, _) = loss_probabilities(&c).unwrap();
        let ta = transmittance(c.water.alpha, c.source_pos()).unwrap();
        assert_eq!(pa + ta, 1.0);
    }

    #[test]
    fn depolarization_examples() {
        let (qa, qb) = depolarization_probabilities(&cfg(WaterKind::Clear, 1, 0.0)).unwrap();
        assert_eq!((qa, qb), (0.0, 0.0));
        // L - x = 0.8 at L = 1
        let (_, qb) = depolarization_probabilities(&cfg(WaterKind::Turbid, 1, 1.0)).unwrap();
        assert!((qb - 6.0e-6).abs() < 1e-10);
        let c = cfg(WaterKind::Coastal, 2, 7.0);
        let (qa, qb) = depolarization_probabilities(&c).unwrap();
        assert!(qa + qb >= 1.0 - (-c.water.gamma_dep * 7.0).exp());
    }

    #[test]
    fn irradiance_examples() {
        let mut c = cfg(WaterKind::Clear, 5, 1.0);
        // 500 exp(-6.4)
        assert!((irradiance(&c) - 0.830779).abs() < 1e-6);
        c.depth = 0.0;
        assert_eq!(irradiance(&c), 500.0);
        let c = cfg(WaterKind::Clear, 1, 1.0);
        assert!((irradiance(&c) - 1.662e-6).abs() < 1e-9);
    }

    #[test]
    fn noise_count_examples() {
        let mut c = cfg(WaterKind::Clear, 1, 1.0);
        assert!((dark_count_term(&c.detector) - 9.6e-6).abs() < 1e-18);
        assert!((solid_angle(PI) - 2.0 * PI).abs() < 1e-15);
        c.scenario.r0 = 0.0;
        assert_eq!(noise_counts_y0(&c), dark_count_term(&c.detector));
    }

    #[test]
    fn scenario_and_water_parsing() {
        assert_eq!("s5".parse::<AtmosphericScenario>().unwrap().r0, 500.0);
        assert_eq!("2".parse::<AtmosphericScenario>().unwrap().r0, 10.0);
        assert!("s6".parse::<AtmosphericScenario>().is_err());
        assert_eq!("Coastal".parse::<WaterKind>().unwrap(), WaterKind::Coastal);
        assert!("muddy".parse::<WaterKind>().is_err());
    }

    #[test]
    fn default_config_is_valid() {
        LinkConfig::default().validate().unwrap();
        let c = LinkConfig {
            source_fraction: 1.5,
            ..LinkConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
