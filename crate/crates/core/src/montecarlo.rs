//! Photon-pair Monte Carlo that estimates the QBER independently of the
//! closed-form pipeline.
//!
//! Event model for each emitted pair:
//!
//! 1. Each arm independently clicks on signal with probability `η_X`, on
//!    noise with probability `y0`, or not at all. A coincidence needs a click
//!    on both arms, so `P(coincidence) = (η_A + y0)(η_B + y0)`, which expands
//!    to `η_A η_B + y0(η_A + η_B) + y0²`.
//! 2. Both parties pick a basis uniformly; rounds with different bases are
//!    discarded.
//! 3. On a signal–signal round the channel outcome is drawn from the Born
//!    distribution of the propagated state in the D/A basis, whose
//!    anticorrelation probability is `1/2 − k1`. Bob's bit is then flipped
//!    once with probability `e_det`, and once more when a D/A Born draw on the
//!    source state is anticorrelated (probability `(1 − sin 2β)/2`).
//! 4. A party whose click is noise gets a uniformly random bit.
//!
//! The expected error fraction among sifted rounds is therefore
//! `(P_false-det · P_true + P_false / 2) / P_coincidence`, the analytic QBER.
//! The propagated state comes from brute-force Kraus application, not from
//! the closed form used by the analytic pipeline.
//!
//! Packet `k` draws from its own ChaCha8 stream `k` under the master seed, so
//! results do not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::propagate;
use crate::environment::{arm_efficiencies, channel_params, noise_counts_y0, LinkConfig};
use crate::error::{domain, Error, Result};
use crate::quantum::{ComplexMatrix, DensityMatrix};

/// Largest `y0` the per-gate click model accepts.
pub const MAX_NOISE_PROBABILITY: f64 = 0.1;

pub const DEFAULT_PACKETS: u64 = 10_000;
pub const DEFAULT_PHOTONS_PER_PACKET: u64 = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// {|H⟩, |V⟩}
    Rect,
    /// {|+⟩, |−⟩}
    Diag,
}

/// Joint measurement outcome; bit 0 is H or +, bit 1 is V or −.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcome {
    pub alice: u8,
    pub bob: u8,
}

impl Outcome {
    fn from_index(i: usize) -> Self {
        Self {
            alice: (i >> 1) as u8,
            bob: (i & 1) as u8,
        }
    }

    pub fn index(self) -> usize {
        ((self.alice as usize) << 1) | self.bob as usize
    }

    pub fn anticorrelated(self) -> bool {
        self.alice != self.bob
    }
}

/// Probabilities of outcomes 00, 01, 10, 11 in the given basis.
pub fn born_probabilities(rho: &DensityMatrix, basis: Basis) -> [f64; 4] {
    let m = match basis {
        Basis::Rect => rho.matrix().clone(),
        Basis::Diag => {
            let h = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0])
                .expect("2x2")
                .scale_real(std::f64::consts::FRAC_1_SQRT_2);
            let hh = crate::quantum::tensor_product(&h, &h).expect("2x2");
            &(&hh * rho.matrix()) * &hh
        }
    };
    let mut p = [0.0; 4];
    for (i, pi) in p.iter_mut().enumerate() {
        let v = m.get(i, i).re;
        // rounding residue from the basis change
        *pi = if v.abs() < 1e-15 { 0.0 } else { v.max(0.0) };
    }
    p
}

/// Draws a joint outcome given a uniform `u ∈ [0, 1)`.
pub fn born_sample(rho: &DensityMatrix, basis: Basis, u: f64) -> Outcome {
    Cdf::new(born_probabilities(rho, basis)).sample(u)
}

#[derive(Debug, Clone, Copy)]
struct Cdf([f64; 3]);

impl Cdf {
    fn new(p: [f64; 4]) -> Self {
        let total: f64 = p.iter().sum();
        let c0 = p[0] / total;
        let c1 = c0 + p[1] / total;
        let c2 = c1 + p[2] / total;
        Self([c0, c1, c2])
    }

    #[inline]
    fn sample(&self, u: f64) -> Outcome {
        let i = self.0.iter().take_while(|&&c| u >= c).count();
        Outcome::from_index(i)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_packets: u64,
    pub photons_per_packet: u64,
    pub master_seed: u64,
    pub link: LinkConfig,
    pub beta: f64,
}

impl SimConfig {
    pub fn new(link: LinkConfig, beta: f64, master_seed: u64) -> Self {
        Self {
            n_packets: DEFAULT_PACKETS,
            photons_per_packet: DEFAULT_PHOTONS_PER_PACKET,
            master_seed,
            link,
            beta,
        }
    }

    pub fn total_pairs(&self) -> u64 {
        self.n_packets * self.photons_per_packet
    }
}

/// Event counts of one packet.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PacketTally {
    pub coincidences: u64,
    pub sifted: u64,
    pub errors: u64,
}

impl PacketTally {
    pub fn qber(&self) -> Option<f64> {
        (self.sifted > 0).then(|| self.errors as f64 / self.sifted as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub coincidences: u64,
    pub sifted: u64,
    pub errors: u64,
    pub qber_estimate: f64,
    /// Binomial standard error `sqrt(q(1 − q)/sifted)`.
    pub std_error: f64,
    /// Per-packet QBER; `None` for packets without sifted rounds.
    pub per_packet_qber: Vec<Option<f64>>,
    pub packets: Vec<PacketTally>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Click {
    Signal,
    Noise,
    Nothing,
}

struct EventModel {
    eta_a: f64,
    eta_b: f64,
    y0: f64,
    e_det: f64,
    channel: Cdf,
    source: Cdf,
}

impl EventModel {
    fn build(cfg: &SimConfig) -> Result<Self> {
        cfg.link.validate()?;
        let (eta_a, eta_b) = arm_efficiencies(&cfg.link)?;
        let y0 = noise_counts_y0(&cfg.link);
        if y0 > MAX_NOISE_PROBABILITY {
            return Err(domain(format!(
                "y0 = {y0} exceeds {MAX_NOISE_PROBABILITY}; too large to treat as a click probability"
            )));
        }
        if eta_a + y0 > 1.0 || eta_b + y0 > 1.0 {
            return Err(domain("signal and noise click probabilities exceed 1"));
        }
        let source = DensityMatrix::initial_state(cfg.beta)?;
        let output = propagate(&source, &channel_params(&cfg.link)?)?;
        Ok(Self {
            eta_a,
            eta_b,
            y0,
            e_det: cfg.link.detector.e_det,
            channel: Cdf::new(born_probabilities(&output, Basis::Diag)),
            source: Cdf::new(born_probabilities(&source, Basis::Diag)),
        })
    }

    #[inline]
    fn click<R: Rng>(&self, eta: f64, rng: &mut R) -> Click {
        let u: f64 = rng.gen();
        if u < eta {
            Click::Signal
        } else if u < eta + self.y0 {
            Click::Noise
        } else {
            Click::Nothing
        }
    }

    fn run_packet(&self, seed: u64, index: u64, photons: u64) -> PacketTally {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut tally = PacketTally::default();
        for _ in 0..photons {
            let a = self.click(self.eta_a, &mut rng);
            let b = self.click(self.eta_b, &mut rng);
            if a == Click::Nothing || b == Click::Nothing {
                continue;
            }
            tally.coincidences += 1;
            let bases: u8 = rng.gen();
            if bases & 1 != (bases >> 1) & 1 {
                continue;
            }
            tally.sifted += 1;
            let joint = self.channel.sample(rng.gen());
            let (bit_a, bit_b) = match (a, b) {
                (Click::Signal, Click::Signal) => {
                    let mut bob = joint.bob;
                    if rng.gen::<f64>() < self.e_det {
                        bob ^= 1;
                    }
                    if self.source.sample(rng.gen()).anticorrelated() {
                        bob ^= 1;
                    }
                    (joint.alice, bob)
                }
                (Click::Signal, _) => (joint.alice, rng.gen::<bool>() as u8),
                (_, Click::Signal) => (rng.gen::<bool>() as u8, joint.bob),
                _ => (rng.gen::<bool>() as u8, rng.gen::<bool>() as u8),
            };
            if bit_a != bit_b {
                tally.errors += 1;
            }
        }
        tally
    }
}

/// Runs the simulation on the current rayon pool.
pub fn simulate(cfg: &SimConfig) -> Result<SimResult> {
    if cfg.n_packets == 0 || cfg.photons_per_packet == 0 {
        return Err(domain("need at least one packet and one photon per packet"));
    }
    let model = EventModel::build(cfg)?;
    let packets: Vec<PacketTally> = (0..cfg.n_packets)
        .into_par_iter()
        .map(|k| model.run_packet(cfg.master_seed, k, cfg.photons_per_packet))
        .collect();

    let (coincidences, sifted, errors) = packets.iter().fold((0, 0, 0), |acc, t| {
        (acc.0 + t.coincidences, acc.1 + t.sifted, acc.2 + t.errors)
    });
    if sifted == 0 {
        return Err(Error::InsufficientStatistics(format!(
            "no sifted rounds in {} pairs ({coincidences} coincidences)",
            cfg.total_pairs()
        )));
    }
    let q = errors as f64 / sifted as f64;
    Ok(SimResult {
        coincidences,
        sifted,
        errors,
        qber_estimate: q,
        std_error: (q * (1.0 - q) / sifted as f64).sqrt(),
        per_packet_qber: packets.iter().map(PacketTally::qber).collect(),
        packets,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::environment::WaterKind;

    #[test]
    fn bell_state_born_probabilities() {
        let bell = DensityMatrix::initial_state(PI / 4.0).unwrap();
        let rect = born_probabilities(&bell, Basis::Rect);
        let diag = born_probabilities(&bell, Basis::Diag);
        for p in [rect, diag] {
            assert!((p[0] - 0.5).abs() < 1e-15 && (p[3] - 0.5).abs() < 1e-15);
            assert_eq!((p[1], p[2]), (0.0, 0.0));
        }
    }

    #[test]
    fn nonmax_state_diag_anticorrelation() {
        let rho = DensityMatrix::initial_state(PI / 5.0).unwrap();
        let p = born_probabilities(&rho, Basis::Diag);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p[1] + p[2] - 0.024472).abs() < 1e-6);
        // rectilinear rounds of the source are always correlated
        let r = born_probabilities(&rho, Basis::Rect);
        assert_eq!(r[1] + r[2], 0.0);
    }

    #[test]
    fn sampling_uses_cumulative_order() {
        let bell = DensityMatrix::initial_state(PI / 4.0).unwrap();
        assert_eq!(
            born_sample(&bell, Basis::Rect, 0.0),
            Outcome { alice: 0, bob: 0 }
        );
        assert_eq!(
            born_sample(&bell, Basis::Rect, 0.49),
            Outcome { alice: 0, bob: 0 }
        );
        assert_eq!(
            born_sample(&bell, Basis::Rect, 0.51),
            Outcome { alice: 1, bob: 1 }
        );
        assert_eq!(
            born_sample(&bell, Basis::Rect, 0.999_999),
            Outcome { alice: 1, bob: 1 }
        );
    }

    fn small(link: LinkConfig, beta: f64) -> SimConfig {
        SimConfig {
            n_packets: 200,
            photons_per_packet: 1000,
            ..SimConfig::new(link, beta, 7)
        }
    }

    #[test]
    fn ideal_point_has_no_errors() {
        let mut link = LinkConfig::preset(WaterKind::Clear, 1).unwrap();
        link.detector.e_det = 0.0;
        link.detector.i_dc = 0.0;
        link.scenario.r0 = 0.0;
        let r = simulate(&small(link, PI / 4.0)).unwrap();
        assert_eq!(r.errors, 0);
        assert_eq!(r.qber_estimate, 0.0);
        assert!(r.sifted > 0);
    }

    #[test]
    fn noise_only_regime_is_a_coin_flip() {
        let mut link = LinkConfig::preset(WaterKind::Clear, 1).unwrap();
        link.detector.eta_alice = 0.0;
        link.detector.eta_bob = 0.0;
        // y0 = 4 I_dc dt = 0.05
        link.detector.i_dc = 0.05 / (4.0 * link.detector.dt_pulse);
        link.scenario.r0 = 0.0;
        let cfg = SimConfig {
            n_packets: 2000,
            ..small(link, PI / 5.0)
        };
        let r = simulate(&cfg).unwrap();
        assert!(r.sifted > 1000);
        assert!((r.qber_estimate - 0.5).abs() <= 3.0 * r.std_error);
    }

    #[test]
    fn zero_sifted_is_insufficient_statistics() {
        let mut link = LinkConfig::preset(WaterKind::Clear, 1).unwrap();
        link.detector.eta_alice = 0.0;
        link.detector.eta_bob = 0.0;
        link.detector.i_dc = 0.0;
        link.scenario.r0 = 0.0;
        let cfg = SimConfig {
            n_packets: 2,
            photons_per_packet: 10,
            ..SimConfig::new(link, PI / 4.0, 1)
        };
        assert!(matches!(
            simulate(&cfg),
            Err(Error::InsufficientStatistics(_))
        ));
    }

    #[test]
    fn large_noise_is_rejected() {
        let mut link = LinkConfig::preset(WaterKind::Clear, 1).unwrap();
        link.detector.i_dc = 1.0 / (4.0 * link.detector.dt_pulse);
        assert!(matches!(
            simulate(&small(link, PI / 4.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn pooled_packets_equal_whole_run() {
        let link = LinkConfig::preset(WaterKind::Coastal, 3)
            .unwrap()
            .with_length(1.0);
        let r = simulate(&small(link, PI / 5.0)).unwrap();
        let errors: u64 = r.packets.iter().map(|t| t.errors).sum();
        let sifted: u64 = r.packets.iter().map(|t| t.sifted).sum();
        assert_eq!(errors as f64 / sifted as f64, r.qber_estimate);
        assert!(r.errors <= r.sifted && r.sifted <= r.coincidences);
        assert!(r.coincidences <= 200 * 1000);
        assert_eq!(r.per_packet_qber.len(), 200);
    }

    #[test]
    fn zero_packets_rejected() {
        let mut cfg = small(LinkConfig::default(), PI / 4.0);
        cfg.n_packets = 0;
        assert!(simulate(&cfg).is_err());
    }
}
