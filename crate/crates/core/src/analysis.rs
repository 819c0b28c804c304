//! Closed-form QBER and secret key rate of BBM92 with a non-maximally
//! entangled source.
//!
//! Bit errors on true coincidences combine three independent flips by XOR:
//! the channel (from the D/A correlation of the output state), the detector
//! (`e_det`) and the non-maximality of the source. Coincidences involving a
//! noise click carry a uniformly random bit and err with probability ½.

use std::sync::OnceLock;

use crate::channels::{closed_form_output, propagate};
use crate::environment::{arm_efficiencies, channel_params, noise_counts_y0, LinkConfig};
use crate::error::{domain, Error, Result};
use crate::quantum::{check_beta, sigma_x_sigma_x, DensityMatrix};

/// Clamp applied to probabilities before entropy evaluation.
pub const PROBABILITY_GUARD: f64 = 1e-12;

/// The standard BBM92 security bound on the QBER.
pub const QBER_SECURITY_BOUND: f64 = 0.11;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBudget {
    /// Channel-induced error, `1/2 − k1`.
    pub p_kraus: f64,
    /// Source non-maximality error, `(1 − sin 2β)/2`.
    pub p_nonmax: f64,
    /// Channel ⊕ detector error.
    pub e_sig: f64,
    /// Total error on a true coincidence.
    pub p_false_det: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceResult {
    pub qber: f64,
    /// Secret key rate (bits per pulse).
    pub skr: f64,
    pub p_coincidence: f64,
    pub p_true: f64,
    pub p_false: f64,
    pub budget: ErrorBudget,
    /// Arm efficiencies and noise count used, kept for reporting.
    pub eta_a: f64,
    pub eta_b: f64,
    pub y0: f64,
}

/// `(P_true, P_false, P_coincidence)` with `P_true = η_A η_B` and
/// `P_false = y0 (η_A + η_B) + y0²`.
pub fn coincidence_probability(eta_a: f64, eta_b: f64, y0: f64) -> Result<(f64, f64, f64)> {
    if !(eta_a >= 0.0 && eta_b >= 0.0 && y0 >= 0.0) {
        return Err(domain("efficiencies and y0 must be non-negative"));
    }
    let p_true = eta_a * eta_b;
    let p_false = y0 * (eta_a + eta_b) + y0 * y0;
    Ok((p_true, p_false, p_true + p_false))
}

/// `(1 − ⟨σ_x ⊗ σ_x⟩)/2 = 1/2 − k1`.
pub fn kraus_error_probability(k1: f64) -> Result<f64> {
    if !(-0.5..=0.5).contains(&k1) {
        return Err(domain(format!(
            "k1 = {k1} outside [-1/2, 1/2]; the output state is not a density matrix"
        )));
    }
    Ok(0.5 - k1)
}

/// `(1 − sin 2β)/2`.
pub fn nonmax_error_probability(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(0.5 * (1.0 - (2.0 * beta).sin()))
}

/// `e_det + (1 − 2 e_det) P_Kraus`.
pub fn signal_error(e_det: f64, p_kraus: f64) -> f64 {
    e_det + (1.0 - 2.0 * e_det) * p_kraus
}

/// `e_sig (1 − P_non-max) + (1 − e_sig) P_non-max`.
pub fn false_detection_probability(e_sig: f64, p_nonmax: f64) -> f64 {
    e_sig * (1.0 - p_nonmax) + (1.0 - e_sig) * p_nonmax
}

/// `(P_false-det · P_true + P_false / 2) / P_coincidence`, clamped to [0, 1].
pub fn qber(p_false_det: f64, p_true: f64, p_false: f64) -> Result<f64> {
    let p_coincidence = p_true + p_false;
    if p_coincidence.is_nan() || p_coincidence <= 0.0 {
        return Err(Error::UndefinedOperatingPoint);
    }
    let q = (p_false_det * p_true + 0.5 * p_false) / p_coincidence;
    debug_assert!(
        (-PROBABILITY_GUARD..=1.0 + PROBABILITY_GUARD).contains(&q),
        "qber {q} out of range"
    );
    Ok(q.clamp(0.0, 1.0))
}

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!(
            "binary entropy argument {x} outside [0, 1]"
        )));
    }
    if !(PROBABILITY_GUARD..=1.0 - PROBABILITY_GUARD).contains(&x) {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

fn h_bound() -> f64 {
    static H: OnceLock<f64> = OnceLock::new();
    *H.get_or_init(|| binary_entropy(QBER_SECURITY_BOUND).expect("in range"))
}

/// Key fraction `R = 1 − (1 + (1 − R_c)/h(0.11)) h(QBER)`.
pub fn key_fraction(qber: f64, code_rate: f64) -> Result<f64> {
    check_code_rate(code_rate)?;
    Ok(1.0 - (1.0 + (1.0 - code_rate) / h_bound()) * binary_entropy(qber)?)
}

/// `(P_coincidence / 2) · max(0, R)` in bits per pulse.
pub fn skr(qber: f64, p_coincidence: f64, code_rate: f64) -> Result<f64> {
    Ok(0.5 * p_coincidence * key_fraction(qber, code_rate)?.max(0.0))
}

fn check_code_rate(code_rate: f64) -> Result<()> {
    if !(code_rate > 0.0 && code_rate <= 1.0) {
        return Err(domain(format!("code rate {code_rate} outside (0, 1]")));
    }
    Ok(())
}

/// Bisection tolerance of [`qber_root`].
pub const QBER_ROOT_TOL: f64 = 1e-10;

/// QBER at which the key fraction vanishes, found by bisection on [0, 1/2].
pub fn qber_root(code_rate: f64) -> Result<f64> {
    check_code_rate(code_rate)?;
    let f = |q: f64| key_fraction(q, code_rate).expect("valid arguments");
    // R(0) = 1 > 0 and R(1/2) = −(1 − R_c)/h(0.11) ≤ 0
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    if f(hi) > 0.0 {
        return Ok(hi);
    }
    while hi - lo > QBER_ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Assembles the error budget and QBER from its ingredients.
pub fn performance_from_parts(
    k1: f64,
    beta: f64,
    e_det: f64,
    eta_a: f64,
    eta_b: f64,
    y0: f64,
    code_rate: f64,
) -> Result<PerformanceResult> {
    let p_kraus = kraus_error_probability(k1)?;
    let p_nonmax = nonmax_error_probability(beta)?;
    let e_sig = signal_error(e_det, p_kraus);
    let p_false_det = false_detection_probability(e_sig, p_nonmax);
    let (p_true, p_false, p_coincidence) = coincidence_probability(eta_a, eta_b, y0)?;
    let q = qber(p_false_det, p_true, p_false)?;
    Ok(PerformanceResult {
        qber: q,
        skr: skr(q, p_coincidence, code_rate)?,
        p_coincidence,
        p_true,
        p_false,
        budget: ErrorBudget {
            p_kraus,
            p_nonmax,
            e_sig,
            p_false_det,
        },
        eta_a,
        eta_b,
        y0,
    })
}

/// Full pipeline for one link and source angle: environment, channel
/// closed form, then QBER and SKR.
pub fn evaluate_link(cfg: &LinkConfig, beta: f64) -> Result<PerformanceResult> {
    cfg.validate()?;
    let params = channel_params(cfg)?;
    let k1 = if cfg.xi == 0.0 {
        closed_form_output(beta, &params)?.k1
    } else {
        // no closed form with thermal noise: k1 = ⟨σx⊗σx⟩ / 2
        let out = propagate(&DensityMatrix::initial_state(beta)?, &params)?;
        0.5 * out.expectation(&sigma_x_sigma_x())?
    };
    let (eta_a, eta_b) = arm_efficiencies(cfg)?;
    performance_from_parts(
        k1,
        beta,
        cfg.detector.e_det,
        eta_a,
        eta_b,
        noise_counts_y0(cfg),
        cfg.code_rate,
    )
}
