//! Quantities with explicit unit suffixes, converted to SI on parse.

use std::f64::consts::PI;
use std::fmt;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Time,
    Frequency,
    Angle,
    Attenuation,
    Irradiance,
}

impl Dimension {
    const ALL: [Dimension; 6] = [
        Dimension::Length,
        Dimension::Time,
        Dimension::Frequency,
        Dimension::Angle,
        Dimension::Attenuation,
        Dimension::Irradiance,
    ];

    fn units(self) -> &'static [(&'static str, f64)] {
        match self {
            Dimension::Length => &[
                ("km", 1e3),
                ("m", 1.0),
                ("cm", 1e-2),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
                ("nm", 1e-9),
            ],
            Dimension::Time => &[
                ("s", 1.0),
                ("ms", 1e-3),
                ("us", 1e-6),
                ("µs", 1e-6),
                ("ns", 1e-9),
                ("ps", 1e-12),
            ],
            Dimension::Frequency => &[("Hz", 1.0), ("kHz", 1e3), ("MHz", 1e6), ("GHz", 1e9)],
            Dimension::Angle => &[("rad", 1.0), ("mrad", 1e-3), ("deg", PI / 180.0)],
            Dimension::Attenuation => &[
                ("1/m", 1.0),
                ("/m", 1.0),
                ("m^-1", 1.0),
                ("1/cm", 1e2),
                ("1/km", 1e-3),
            ],
            Dimension::Irradiance => &[
                ("W/m^2", 1.0),
                ("W/m2", 1.0),
                ("mW/m^2", 1e-3),
                ("uW/m^2", 1e-6),
                ("W/cm^2", 1e4),
            ],
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Frequency => "frequency",
            Dimension::Angle => "angle",
            Dimension::Attenuation => "attenuation",
            Dimension::Irradiance => "irradiance",
        })
    }
}

/// Splits `"530 nm"` or `"530nm"` into the number and the longest unit of
/// `dim` it ends with.
fn split(s: &str, dim: Dimension) -> Option<(f64, &'static str, f64)> {
    let mut units: Vec<_> = dim.units().to_vec();
    units.sort_by_key(|(u, _)| std::cmp::Reverse(u.len()));
    units.into_iter().find_map(|(unit, factor)| {
        let number = s.strip_suffix(unit)?.trim_end();
        let value: f64 = number.parse().ok()?;
        Some((value, unit, factor))
    })
}

/// Parses a value of the given dimension to SI.
pub fn parse_quantity(input: &str, dim: Dimension) -> Result<f64, CliError> {
    let s = input.trim();
    if let Some((value, _, factor)) = split(s, dim) {
        let si = value * factor;
        if !si.is_finite() {
            return Err(CliError::Config(format!("{input:?} is not finite")));
        }
        return Ok(si);
    }
    if s.parse::<f64>().is_ok() {
        return Err(CliError::Config(format!(
            "{input:?} has no unit (expected a {dim} such as {:?})",
            format!("{s} {}", dim.units()[0].0)
        )));
    }
    for other in Dimension::ALL {
        if other != dim {
            if let Some((_, unit, _)) = split(s, other) {
                return Err(CliError::Config(format!(
                    "unit mismatch in {input:?}: {unit} is a {other} unit, expected {dim}"
                )));
            }
        }
    }
    Err(CliError::Config(format!(
        "cannot parse {input:?} as a {dim}"
    )))
}

/// Source angle: a plain number of radians, `pi/4`-style fractions,
/// or a quantity with an angle unit.
pub fn parse_angle(input: &str) -> Result<f64, CliError> {
    let s = input.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let lower = s.to_ascii_lowercase().replace('π', "pi");
    if let Some(rest) = lower.strip_suffix("pi").map(str::trim_end) {
        // "pi", "2pi", "0.25 pi", "2*pi"
        let rest = rest.trim_end_matches('*').trim_end();
        let k = if rest.is_empty() {
            Ok(1.0)
        } else {
            rest.parse::<f64>()
        };
        if let Ok(k) = k {
            return Ok(k * PI);
        }
    }
    if let Some((num, den)) = lower.split_once('/') {
        let num = num.trim().trim_end_matches('*').trim_end();
        if let (Some(k), Ok(d)) = (num.strip_suffix("pi"), den.trim().parse::<f64>()) {
            let k = k.trim().trim_end_matches('*').trim_end();
            let k = if k.is_empty() {
                Some(1.0)
            } else {
                k.parse::<f64>().ok()
            };
            if let Some(k) = k {
                if d != 0.0 {
                    return Ok(k * PI / d);
                }
            }
        }
    }
    parse_quantity(s, Dimension::Angle).map_err(|_| {
        CliError::Usage(format!(
            "cannot parse angle {input:?} (try 0.785, pi/4 or 45 deg)"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_in_nanometres() {
        assert!((parse_quantity("530 nm", Dimension::Length).unwrap() - 5.30e-7).abs() < 1e-20);
        assert!((parse_quantity("530nm", Dimension::Length).unwrap() - 5.30e-7).abs() < 1e-20);
        assert_eq!(
            parse_quantity("5.3e-7 m", Dimension::Length).unwrap(),
            5.3e-7
        );
    }

    #[test]
    fn length_prefixes() {
        for (s, v) in [
            ("2 km", 2e3),
            ("10 cm", 0.1),
            ("3 mm", 3e-3),
            ("4 um", 4e-6),
            ("0.2 m", 0.2),
        ] {
            assert!((parse_quantity(s, Dimension::Length).unwrap() - v).abs() < 1e-15 * v.max(1.0));
        }
    }

    #[test]
    fn other_dimensions() {
        let q = |s, d| parse_quantity(s, d).unwrap();
        assert!((q("40 ns", Dimension::Time) - 40e-9).abs() < 1e-24);
        assert!((q("200 ps", Dimension::Time) - 200e-12).abs() < 1e-26);
        assert_eq!(q("60 Hz", Dimension::Frequency), 60.0);
        assert_eq!(q("1.5 kHz", Dimension::Frequency), 1500.0);
        assert!((q("180 deg", Dimension::Angle) - PI).abs() < 1e-15);
        assert_eq!(q("0.151 1/m", Dimension::Attenuation), 0.151);
        assert_eq!(q("0.151 m^-1", Dimension::Attenuation), 0.151);
        assert_eq!(q("500 W/m^2", Dimension::Irradiance), 500.0);
        assert_eq!(q("1 mW/m^2", Dimension::Irradiance), 1e-3);
    }

    #[test]
    fn mismatched_and_missing_units() {
        let e = parse_quantity("40 ns", Dimension::Length)
            .unwrap_err()
            .to_string();
        assert!(e.contains("mismatch") && e.contains("time"), "{e}");
        let e = parse_quantity("530", Dimension::Length)
            .unwrap_err()
            .to_string();
        assert!(e.contains("no unit"), "{e}");
        assert!(parse_quantity("fast", Dimension::Time).is_err());
        assert!(parse_quantity("1e400 m", Dimension::Length).is_err());
    }

    #[test]
    fn angles() {
        let pi4 = std::f64::consts::FRAC_PI_4;
        for s in [
            "pi/4", "PI/4", "π/4", " pi / 4 ", "1pi/4", "0.25pi", "0.25 pi", "45 deg",
        ] {
            assert!((parse_angle(s).unwrap() - pi4).abs() < 1e-15, "{s}");
        }
        assert_eq!(parse_angle("0.6").unwrap(), 0.6);
        assert!((parse_angle("pi/5").unwrap() - PI / 5.0).abs() < 1e-15);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("quarter").is_err());
    }
}
