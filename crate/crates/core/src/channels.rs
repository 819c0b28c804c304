//! Amplitude-damping and depolarizing channels acting on each photon of the
//! pair, their bipartite Kraus sets, and closed forms of the output state.
//!
//! Damping is applied first and depolarization second.
//!
//! # Depolarizing weights
//!
//! A single-qubit depolarizing channel with Kraus operators
//! `{√(1−q) I, √(q/3) σ_x, √(q/3) σ_y, √(q/3) σ_z}` maps
//!
//! ```text
//! [[a, c], [c*, b]]  ↦  [[n a + s b, f c], [f c*, s a + n b]]
//! n = 1 − 2q/3,  s = 2q/3,  f = 1 − 4q/3
//! ```
//!
//! The weight `n = 1 − 4q/3` (equal to `f`) does not conserve the trace:
//! `n + s` must be 1. The values above are the ones reproduced by direct
//! application of the sixteen bipartite operators (see the unit tests and
//! `tests/closed_form_oracle.rs`).

use crate::error::{domain, Result};
use crate::quantum::{check_beta, ComplexMatrix, DensityMatrix, KrausSet};

/// Amplitude-damping parameters of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingParams {
    p: f64,
    xi: f64,
}

impl DampingParams {
    /// `p ∈ [0, 1]` is the loss probability, `ξ ∈ [0, 1/2]` the thermal parameter.
    pub fn new(p: f64, xi: f64) -> Result<Self> {
        check_probability("p", p)?;
        if !(0.0..=0.5).contains(&xi) {
            return Err(domain(format!("xi = {xi} outside [0, 1/2]")));
        }
        Ok(Self { p, xi })
    }

    pub fn lossless() -> Self {
        Self { p: 0.0, xi: 0.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingParams {
    q: f64,
}

impl DepolarizingParams {
    pub fn new(q: f64) -> Result<Self> {
        check_probability("q", q)?;
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Loss and depolarization parameters of both arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub damp_a: DampingParams,
    pub damp_b: DampingParams,
    pub dep_a: DepolarizingParams,
    pub dep_b: DepolarizingParams,
}

impl ChannelParams {
    pub fn new(p_a: f64, p_b: f64, q_a: f64, q_b: f64, xi: f64) -> Result<Self> {
        Ok(Self {
            damp_a: DampingParams::new(p_a, xi)?,
            damp_b: DampingParams::new(p_b, xi)?,
            dep_a: DepolarizingParams::new(q_a)?,
            dep_b: DepolarizingParams::new(q_b)?,
        })
    }

    pub fn noiseless() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.0).expect("valid")
    }
}

fn check_probability(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

/// Single-photon amplitude-damping operators.
///
/// Returns `{K0, K1}` for `ξ = 0` and `{K0, K1, K2, K3}` otherwise. Zero
/// operators (for example `K1` at `p = 0`) are kept.
pub fn damping_kraus_single(params: DampingParams) -> KrausSet {
    let DampingParams { p, xi } = params;
    let keep = (1.0 - xi).sqrt();
    let t = (1.0 - p).sqrt();
    let sp = p.sqrt();
    let mut ops = vec![
        ComplexMatrix::from_real(2, 2, &[keep, 0.0, 0.0, keep * t]).expect("2x2"),
        ComplexMatrix::from_real(2, 2, &[0.0, keep * sp, 0.0, 0.0]).expect("2x2"),
    ];
    if xi > 0.0 {
        let th = xi.sqrt();
        ops.push(ComplexMatrix::from_real(2, 2, &[0.0, 0.0, th * sp, 0.0]).expect("2x2"));
        ops.push(ComplexMatrix::from_real(2, 2, &[th * t, 0.0, 0.0, th]).expect("2x2"));
    }
    KrausSet::new(ops).expect("amplitude damping is complete for valid parameters")
}

/// Single-photon depolarizing operators `{√(1−q) I, √(q/3) σ_x, √(q/3) σ_y, √(q/3) σ_z}`.
pub fn depolarizing_kraus_single(params: DepolarizingParams) -> KrausSet {
    let q = params.q;
    let w = (q / 3.0).sqrt();
    KrausSet::new(vec![
        ComplexMatrix::identity(2).scale_real((1.0 - q).sqrt()),
        ComplexMatrix::pauli_x().scale_real(w),
        ComplexMatrix::pauli_y().scale_real(w),
        ComplexMatrix::pauli_z().scale_real(w),
    ])
    .expect("depolarizing is complete for valid parameters")
}

/// `{A_i ⊗ B_j}` in `(i, j)` lexicographic order.
pub fn bipartite_set(set_a: &KrausSet, set_b: &KrausSet) -> Result<KrausSet> {
    KrausSet::bipartite(set_a, set_b)
}

/// Bipartite damping set `{K_i^A ⊗ K_j^B}`.
pub fn damping_set(params: &ChannelParams) -> KrausSet {
    bipartite_set(
        &damping_kraus_single(params.damp_a),
        &damping_kraus_single(params.damp_b),
    )
    .expect("single-qubit factors")
}

/// Bipartite depolarizing set `{L_i(q_A) ⊗ L_j(q_B)}`.
pub fn depolarizing_set(params: &ChannelParams) -> KrausSet {
    bipartite_set(
        &depolarizing_kraus_single(params.dep_a),
        &depolarizing_kraus_single(params.dep_b),
    )
    .expect("single-qubit factors")
}

/// Applies bipartite damping, then bipartite depolarization.
pub fn propagate(rho_in: &DensityMatrix, params: &ChannelParams) -> Result<DensityMatrix> {
    let damped = damping_set(params).apply(rho_in)?;
    depolarizing_set(params).apply(&damped)
}

/// Entries of the damped state (ξ = 0). The matrix is
/// `[[a0,0,0,f0],[0,b0,0,0],[0,0,c0,0],[f0,0,0,d0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedCoefficients {
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub d0: f64,
    pub f0: f64,
}

/// Entries of the damped-then-depolarized state, same X shape with corner `k1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizedCoefficients {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub d1: f64,
    pub k1: f64,
}

fn x_state(diag: [f64; 4], corner: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::diag(&diag);
    m.set(0, 3, corner.into());
    m.set(3, 0, corner.into());
    m
}

impl DampedCoefficients {
    pub fn to_matrix(&self) -> ComplexMatrix {
        x_state([self.a0, self.b0, self.c0, self.d0], self.f0)
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix())
    }
}

impl DepolarizedCoefficients {
    pub fn to_matrix(&self) -> ComplexMatrix {
        x_state([self.a1, self.b1, self.c1, self.d1], self.k1)
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.to_matrix())
    }
}

/// Damped state of `|Φ_β⟩` with loss probabilities `p_a`, `p_b` and no
/// thermal photons.
pub fn closed_form_damped(beta: f64, p_a: f64, p_b: f64) -> Result<DampedCoefficients> {
    check_beta(beta)?;
    check_probability("p_a", p_a)?;
    check_probability("p_b", p_b)?;
    let (s, c) = beta.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let (ta, tb) = (1.0 - p_a, 1.0 - p_b);
    Ok(DampedCoefficients {
        a0: c2 + p_a * p_b * s2,
        b0: p_a * tb * s2,
        c0: ta * p_b * s2,
        d0: ta * tb * s2,
        f0: (ta * tb).sqrt() * c * s,
    })
}

/// Diagonal mixing weights and coherence factor of one depolarized arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepolarizingWeights {
    /// Weight kept on the same polarization.
    pub n: f64,
    /// Weight moved to the orthogonal polarization.
    pub s: f64,
    /// Factor on off-diagonal coherences.
    pub f: f64,
}

impl DepolarizingWeights {
    pub fn new(q: f64) -> Self {
        Self {
            n: 1.0 - 2.0 * q / 3.0,
            s: 2.0 * q / 3.0,
            f: 1.0 - 4.0 * q / 3.0,
        }
    }
}

/// Closed-form depolarization of a damped X state.
pub fn closed_form_depolarized(
    damped: &DampedCoefficients,
    q_a: f64,
    q_b: f64,
) -> Result<DepolarizedCoefficients> {
    check_probability("q_a", q_a)?;
    check_probability("q_b", q_b)?;
    let DepolarizingWeights {
        n: na,
        s: sa,
        f: fa,
    } = DepolarizingWeights::new(q_a);
    let DepolarizingWeights {
        n: nb,
        s: sb,
        f: fb,
    } = DepolarizingWeights::new(q_b);
    let DampedCoefficients { a0, b0, c0, d0, f0 } = *damped;
    Ok(DepolarizedCoefficients {
        a1: na * nb * a0 + na * sb * b0 + sa * nb * c0 + sa * sb * d0,
        b1: na * sb * a0 + na * nb * b0 + sa * sb * c0 + sa * nb * d0,
        c1: sa * nb * a0 + sa * sb * b0 + na * nb * c0 + na * sb * d0,
        d1: sa * sb * a0 + sa * nb * b0 + na * sb * c0 + na * nb * d0,
        k1: fa * fb * f0,
    })
}

/// Convenience: both closed forms for one operating point.
pub fn closed_form_output(beta: f64, params: &ChannelParams) -> Result<DepolarizedCoefficients> {
    if params.damp_a.xi != 0.0 || params.damp_b.xi != 0.0 {
        return Err(domain("closed form only covers xi = 0"));
    }
    let damped = closed_form_damped(beta, params.damp_a.p, params.damp_b.p)?;
    closed_form_depolarized(&damped, params.dep_a.q, params.dep_b.q)
}
