use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use super::eigen::min_eigenvalue;
use super::matrix::ComplexMatrix;
use super::{HERMITIAN_TOL, PSD_TOL, TRACE_TOL};
use crate::error::{domain, Error, Result};

/// Two-photon polarization state over the fixed basis (HH, HV, VH, VV).
///
/// Photon A is the left tensor factor: index `2 * a + b` for single-photon
/// indices `a, b` with H = 0 and V = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

/// Basis labels in storage order.
pub const BASIS: [&str; 4] = ["HH", "HV", "VH", "VV"];

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positive semidefiniteness.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.rows() != 4 || mat.cols() != 4 {
            return Err(Error::Dimension(format!(
                "density matrix must be 4x4, got {}x{}",
                mat.rows(),
                mat.cols()
            )));
        }
        let herm = mat.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = mat.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let lambda = min_eigenvalue(&mat);
        if lambda < PSD_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {lambda:e})"
            )));
        }
        Ok(Self { mat })
    }

    /// `|Φ_β⟩⟨Φ_β|` for `|Φ_β⟩ = cos β |HH⟩ + sin β |VV⟩`, `0 ≤ β ≤ π/4`.
    pub fn initial_state(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let (s, c) = beta.sin_cos();
        let mut m = ComplexMatrix::zeros(4, 4);
        m.set(0, 0, Complex64::new(c * c, 0.0));
        m.set(3, 3, Complex64::new(s * s, 0.0));
        m.set(0, 3, Complex64::new(c * s, 0.0));
        m.set(3, 0, Complex64::new(c * s, 0.0));
        Self::new(m)
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        Self {
            mat: ComplexMatrix::identity(4).scale_real(0.25),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Real part of entry `(row, col)`.
    pub fn re(&self, row: usize, col: usize) -> f64 {
        self.mat.get(row, col).re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.mat)
    }

    /// `Tr(ρ·obs)` for a Hermitian observable.
    pub fn expectation(&self, obs: &ComplexMatrix) -> Result<f64> {
        if obs.rows() != 4 || obs.cols() != 4 {
            return Err(Error::Dimension("observable must be 4x4".into()));
        }
        if !obs.is_hermitian(HERMITIAN_TOL) {
            return Err(domain("observable is not Hermitian"));
        }
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..4 {
            for k in 0..4 {
                tr += self.mat.get(i, k) * obs.get(k, i);
            }
        }
        debug_assert!(tr.im.abs() <= 1e-12, "imaginary expectation {tr}");
        Ok(tr.re)
    }
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    // small slack so that FRAC_PI_4 computed by different routes is accepted
    if !(0.0..=FRAC_PI_4 + 1e-15).contains(&beta) {
        return Err(domain(format!("beta = {beta} outside [0, pi/4]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::quantum::tensor_product;

    fn xx() -> ComplexMatrix {
        let x = ComplexMatrix::pauli_x();
        tensor_product(&x, &x).unwrap()
    }

    #[test]
    fn bell_state_corners() {
        let rho = DensityMatrix::initial_state(PI / 4.0).unwrap();
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((rho.re(r, c) - 0.5).abs() < 1e-15);
        }
        assert_eq!(rho.re(1, 1), 0.0);
    }

    #[test]
    fn product_state_at_zero() {
        let rho = DensityMatrix::initial_state(0.0).unwrap();
        let mut want = ComplexMatrix::zeros(4, 4);
        want.set(0, 0, Complex64::new(1.0, 0.0));
        assert_eq!(rho.matrix(), &want);
    }

    #[test]
    fn pi_over_five_entries() {
        let rho = DensityMatrix::initial_state(PI / 5.0).unwrap();
        assert!((rho.re(0, 0) - 0.654508).abs() < 1e-6);
        assert!((rho.re(3, 3) - 0.345492).abs() < 1e-6);
        assert!((rho.re(0, 3) - 0.475528).abs() < 1e-6);
        assert!((rho.re(3, 0) - 0.475528).abs() < 1e-6);
    }

    #[test]
    fn beta_out_of_range() {
        assert!(matches!(
            DensityMatrix::initial_state(-0.1),
            Err(Error::Domain(_))
        ));
        assert!(DensityMatrix::initial_state(PI / 3.0).is_err());
        assert!(DensityMatrix::initial_state(f64::NAN).is_err());
    }

    #[test]
    fn xx_expectations() {
        let bell = DensityMatrix::initial_state(PI / 4.0).unwrap();
        assert!((bell.expectation(&xx()).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed();
        assert_eq!(mixed.expectation(&xx()).unwrap(), 0.0);
        let r5 = DensityMatrix::initial_state(PI / 5.0).unwrap();
        assert!((r5.expectation(&xx()).unwrap() - 0.951057).abs() < 1e-6);
    }

    #[test]
    fn expectation_rejects_non_hermitian() {
        let rho = DensityMatrix::maximally_mixed();
        let mut obs = ComplexMatrix::zeros(4, 4);
        obs.set(0, 1, Complex64::new(1.0, 0.0));
        assert!(matches!(rho.expectation(&obs), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_invalid_matrices() {
        // trace 2
        assert!(DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.5)).is_err());
        // negative eigenvalue
        let m = ComplexMatrix::diag(&[1.2, -0.2, 0.0, 0.0]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
        // wrong size
        assert!(DensityMatrix::new(ComplexMatrix::identity(2).scale_real(0.5)).is_err());
    }
}
