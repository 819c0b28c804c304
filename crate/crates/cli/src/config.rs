//! TOML run configuration.
//!
//! Every key is optional and falls back to the built-in defaults; an empty
//! file is a valid configuration (clear water, scenario s1). Dimensional
//! values are strings with a unit, e.g. `wavelength = "530 nm"`.
//!
//! ```toml
//! [link]
//! length = "2 m"
//! source_fraction = 0.2
//! depth = "80 m"
//! wavelength = "530 nm"
//! k_inf = "0.08 1/m"
//! xi = 0.0
//! code_rate = 0.5
//!
//! [detector]
//! eta_alice = 0.5
//! eta_bob = 0.5
//! dark_count_rate = "60 Hz"
//! pulse_duration = "40 ns"
//! gate_time = "200 ps"
//! lens_diameter = "10 cm"
//! filter_bandwidth = "0.2 nm"
//! field_of_view = "180 deg"
//! e_det = 0.033
//! t_corr = 0.16
//! apply_correction = false
//!
//! [water]
//! type = "coastal"
//! alpha = "0.339 1/m"
//! gamma_dep = "3.7e-6 1/m"
//!
//! [scenario]
//! id = "s3"
//! irradiance = "50 W/m^2"
//!
//! [sweep]
//! l_min = "0 m"
//! l_max = "4 m"
//! step = "5 mm"
//! betas = ["pi/4", "pi/5"]
//! waters = ["clear", "coastal", "turbid"]
//! scenarios = ["s1", "s2", "s3", "s4", "s5"]
//!
//! [montecarlo]
//! enabled = false
//! packets = 10000
//! photons_per_packet = 1000
//! seed = 0
//! ```
//!
//! Overrides in `[water]` and `[scenario]` apply to the selected type and
//! scenario wherever they appear in a sweep; the other cells use presets.

use std::path::Path;

use serde::Deserialize;
use uwqkd_core::montecarlo::{DEFAULT_PACKETS, DEFAULT_PHOTONS_PER_PACKET};
use uwqkd_core::{AtmosphericScenario, LinkConfig, WaterKind, WaterType};

use crate::error::CliError;
use crate::sweep::{McSettings, SweepSpec};
use crate::units::{parse_angle, parse_quantity, Dimension};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    link: RawLink,
    detector: RawDetector,
    water: RawWater,
    scenario: RawScenario,
    sweep: RawSweep,
    montecarlo: RawMonteCarlo,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawLink {
    length: Option<String>,
    source_fraction: Option<f64>,
    depth: Option<String>,
    wavelength: Option<String>,
    k_inf: Option<String>,
    xi: Option<f64>,
    code_rate: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawDetector {
    eta_alice: Option<f64>,
    eta_bob: Option<f64>,
    dark_count_rate: Option<String>,
    pulse_duration: Option<String>,
    gate_time: Option<String>,
    lens_diameter: Option<String>,
    filter_bandwidth: Option<String>,
    field_of_view: Option<String>,
    e_det: Option<f64>,
    t_corr: Option<f64>,
    apply_correction: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawWater {
    #[serde(rename = "type")]
    kind: Option<String>,
    alpha: Option<String>,
    gamma_dep: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NameOrNumber {
    Number(f64),
    Name(String),
}

impl NameOrNumber {
    fn text(&self) -> String {
        match self {
            NameOrNumber::Number(v) => v.to_string(),
            NameOrNumber::Name(s) => s.clone(),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawScenario {
    id: Option<NameOrNumber>,
    irradiance: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSweep {
    l_min: Option<String>,
    l_max: Option<String>,
    step: Option<String>,
    betas: Option<Vec<NameOrNumber>>,
    waters: Option<Vec<String>>,
    scenarios: Option<Vec<NameOrNumber>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawMonteCarlo {
    enabled: Option<bool>,
    packets: Option<u64>,
    photons_per_packet: Option<u64>,
    seed: Option<u64>,
}

/// Everything a run needs: the single-link configuration, the sweep grid
/// and Monte Carlo settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub link: LinkConfig,
    pub sweep: SweepSpec,
    pub montecarlo: McSettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

fn set(target: &mut f64, raw: &Option<String>, dim: Dimension, key: &str) -> Result<(), CliError> {
    if let Some(s) = raw {
        *target = parse_quantity(s, dim).map_err(|e| CliError::Config(format!("{key}: {e}")))?;
    }
    Ok(())
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub fn water_kind(name: &str) -> Result<WaterKind, CliError> {
    name.parse().map_err(config_err)
}

pub fn scenario(name: &str) -> Result<AtmosphericScenario, CliError> {
    name.parse().map_err(config_err)
}

/// Water properties for `kind`, keeping the configured overrides when it is
/// the configured type.
pub fn resolve_water(base: &LinkConfig, kind: WaterKind) -> WaterType {
    if base.water.kind == kind {
        base.water
    } else {
        WaterType::preset(kind)
    }
}

pub fn resolve_scenario(base: &LinkConfig, id: u8) -> Result<AtmosphericScenario, CliError> {
    if base.scenario.id == id {
        Ok(base.scenario)
    } else {
        AtmosphericScenario::preset(id).map_err(config_err)
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(config_err)?;
    let mut link = LinkConfig::default();

    let l = &raw.link;
    set(
        &mut link.total_length,
        &l.length,
        Dimension::Length,
        "link.length",
    )?;
    set(&mut link.depth, &l.depth, Dimension::Length, "link.depth")?;
    set(
        &mut link.wavelength,
        &l.wavelength,
        Dimension::Length,
        "link.wavelength",
    )?;
    set(
        &mut link.k_inf,
        &l.k_inf,
        Dimension::Attenuation,
        "link.k_inf",
    )?;
    link.source_fraction = l.source_fraction.unwrap_or(link.source_fraction);
    link.xi = l.xi.unwrap_or(link.xi);
    link.code_rate = l.code_rate.unwrap_or(link.code_rate);

    let d = &raw.detector;
    let det = &mut link.detector;
    det.eta_alice = d.eta_alice.unwrap_or(det.eta_alice);
    det.eta_bob = d.eta_bob.unwrap_or(det.eta_bob);
    det.e_det = d.e_det.unwrap_or(det.e_det);
    det.t_corr = d.t_corr.unwrap_or(det.t_corr);
    det.apply_correction = d.apply_correction.unwrap_or(det.apply_correction);
    set(
        &mut det.i_dc,
        &d.dark_count_rate,
        Dimension::Frequency,
        "detector.dark_count_rate",
    )?;
    set(
        &mut det.dt_pulse,
        &d.pulse_duration,
        Dimension::Time,
        "detector.pulse_duration",
    )?;
    set(
        &mut det.dt_gate,
        &d.gate_time,
        Dimension::Time,
        "detector.gate_time",
    )?;
    set(
        &mut det.lens_d,
        &d.lens_diameter,
        Dimension::Length,
        "detector.lens_diameter",
    )?;
    set(
        &mut det.d_lambda,
        &d.filter_bandwidth,
        Dimension::Length,
        "detector.filter_bandwidth",
    )?;
    set(
        &mut det.fov_delta,
        &d.field_of_view,
        Dimension::Angle,
        "detector.field_of_view",
    )?;

    if let Some(kind) = &raw.water.kind {
        link.water = WaterType::preset(water_kind(kind)?);
    }
    set(
        &mut link.water.alpha,
        &raw.water.alpha,
        Dimension::Attenuation,
        "water.alpha",
    )?;
    set(
        &mut link.water.gamma_dep,
        &raw.water.gamma_dep,
        Dimension::Attenuation,
        "water.gamma_dep",
    )?;

    if let Some(id) = &raw.scenario.id {
        link.scenario = scenario(&id.text())?;
    }
    set(
        &mut link.scenario.r0,
        &raw.scenario.irradiance,
        Dimension::Irradiance,
        "scenario.irradiance",
    )?;

    link.validate().map_err(config_err)?;

    let m = &raw.montecarlo;
    let montecarlo = McSettings {
        n_packets: m.packets.unwrap_or(DEFAULT_PACKETS),
        photons_per_packet: m.photons_per_packet.unwrap_or(DEFAULT_PHOTONS_PER_PACKET),
        seed: m.seed.unwrap_or(0),
    };
    if montecarlo.n_packets == 0 || montecarlo.photons_per_packet == 0 {
        return Err(CliError::Config(
            "montecarlo packets and photons must be positive".into(),
        ));
    }

    let s = &raw.sweep;
    let mut sweep = SweepSpec::with_defaults(link);
    set(&mut sweep.l_min, &s.l_min, Dimension::Length, "sweep.l_min")?;
    set(&mut sweep.l_max, &s.l_max, Dimension::Length, "sweep.l_max")?;
    set(&mut sweep.step, &s.step, Dimension::Length, "sweep.step")?;
    if let Some(betas) = &s.betas {
        sweep.betas = betas
            .iter()
            .map(|b| match b {
                NameOrNumber::Number(v) => Ok(*v),
                NameOrNumber::Name(s) => parse_angle(s).map_err(config_err),
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(waters) = &s.waters {
        sweep.waters = waters
            .iter()
            .map(|w| Ok(resolve_water(&link, water_kind(w)?)))
            .collect::<Result<_, CliError>>()?;
    }
    if let Some(scenarios) = &s.scenarios {
        sweep.scenarios = scenarios
            .iter()
            .map(|id| resolve_scenario(&link, scenario(&id.text())?.id))
            .collect::<Result<_, _>>()?;
    }
    if m.enabled.unwrap_or(false) {
        sweep.mc = Some(montecarlo);
    }
    sweep.validate().map_err(|e| match e {
        CliError::Usage(msg) => CliError::Config(msg),
        other => other,
    })?;

    Ok(RunConfig {
        link,
        sweep,
        montecarlo,
    })
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.link, LinkConfig::default());
        assert_eq!(cfg.link.water.kind, WaterKind::Clear);
        assert_eq!(cfg.link.scenario.id, 1);
        assert_eq!(cfg.sweep.waters.len() * cfg.sweep.scenarios.len(), 15);
        assert_eq!(cfg.sweep.betas, vec![PI / 4.0, PI / 5.0]);
        assert_eq!(
            (cfg.sweep.l_min, cfg.sweep.l_max, cfg.sweep.step),
            (0.0, 4.0, 0.005)
        );
        assert!(cfg.sweep.mc.is_none());
    }

    #[test]
    fn wavelength_override() {
        let cfg = parse_config("[link]\nwavelength = \"530 nm\"\n").unwrap();
        assert!((cfg.link.wavelength - 5.30e-7).abs() < 1e-20);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config("[link]\nlamda = \"530 nm\"\n").unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("lamda"), "{e}");
        let e = parse_config("[lnk]\n").unwrap_err();
        assert!(e.to_string().contains("lnk"), "{e}");
    }

    #[test]
    fn unit_mismatch_is_an_error() {
        let e = parse_config("[link]\nwavelength = \"530 ns\"\n").unwrap_err();
        assert!(e.to_string().contains("link.wavelength"), "{e}");
        assert!(parse_config("[link]\ndepth = 80\n").is_err());
        assert!(parse_config("[link]\ndepth = \"80\"\n").is_err());
    }

    #[test]
    fn water_and_scenario_overrides_follow_their_type() {
        let cfg = parse_config(
            "[water]\ntype = \"coastal\"\nalpha = \"0.4 1/m\"\n[scenario]\nid = 3\nirradiance = \"60 W/m^2\"\n",
        )
        .unwrap();
        assert_eq!(cfg.link.water.alpha, 0.4);
        assert_eq!(cfg.link.scenario.r0, 60.0);
        let coastal = cfg
            .sweep
            .waters
            .iter()
            .find(|w| w.kind == WaterKind::Coastal)
            .unwrap();
        assert_eq!(coastal.alpha, 0.4);
        let clear = cfg
            .sweep
            .waters
            .iter()
            .find(|w| w.kind == WaterKind::Clear)
            .unwrap();
        assert_eq!(clear.alpha, 0.151);
        assert_eq!(cfg.sweep.scenarios[2].r0, 60.0);
        assert_eq!(cfg.sweep.scenarios[1].r0, 10.0);
    }

    #[test]
    fn full_example_parses() {
        let text = include_str!("config.rs")
            .lines()
            .skip_while(|l| !l.starts_with("//! ```toml"))
            .skip(1)
            .take_while(|l| !l.starts_with("//! ```"))
            .map(|l| l.trim_start_matches("//!").trim_start())
            .collect::<Vec<_>>()
            .join("\n");
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.link.total_length, 2.0);
        assert_eq!(cfg.link.water.kind, WaterKind::Coastal);
        assert_eq!(cfg.sweep.step, 0.005);
        assert!((cfg.link.detector.fov_delta - PI).abs() < 1e-15);
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            "[link]\nsource_fraction = 1.5\n",
            "[detector]\ne_det = 2.0\n",
            "[water]\ntype = \"muddy\"\n",
            "[scenario]\nid = \"s9\"\n",
            "[sweep]\nstep = \"0 m\"\n",
            "[sweep]\nl_min = \"5 m\"\n",
            "[montecarlo]\npackets = 0\n",
        ] {
            assert_eq!(parse_config(text).unwrap_err().exit_code(), 3, "{text}");
        }
    }
}
