//! Entanglement-based (BBM92) quantum key distribution over underwater
//! optical links.
//!
//! A photon pair in `cos β |HH⟩ + sin β |VV⟩` travels through amplitude-damping
//! and depolarizing channels on each arm. The crate computes the resulting
//! QBER and secret key rate in closed form ([`analysis`]) and by photon-pair
//! Monte Carlo ([`montecarlo`]).
//!
//! Modules, bottom up:
//!
//! - [`quantum`]: 2x2/4x4 complex matrices, density matrices, Kraus sets.
//! - [`channels`]: damping and depolarizing operators and closed forms.
//! - [`environment`]: water and atmosphere presets, attenuation, noise.
//! - [`analysis`]: QBER and SKR.
//! - [`montecarlo`]: stochastic estimate of the QBER.

pub mod analysis;
pub mod channels;
pub mod environment;
mod error;
pub mod montecarlo;
pub mod quantum;

pub use analysis::{evaluate_link, PerformanceResult};
pub use environment::{AtmosphericScenario, DetectorParams, LinkConfig, WaterKind, WaterType};
pub use error::{Error, Result};
pub use montecarlo::{simulate, SimConfig, SimResult};
