//! Small dense complex linear algebra, two-photon density matrices and
//! Kraus maps.

mod eigen;
mod kraus;
mod matrix;
mod state;

pub use eigen::{hermitian_eigenvalues, min_eigenvalue};
pub use kraus::{apply_kraus, KrausSet};
pub use matrix::{tensor_product, ComplexMatrix};
pub use state::{DensityMatrix, BASIS};

pub(crate) use state::check_beta;

/// Allowed `|ρ − ρ†|_max`.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = -1e-10;
/// Allowed `|Σ K†K − I|_max`.
pub const COMPLETENESS_TOL: f64 = 1e-12;

/// `σ_x ⊗ σ_x`, the D/A-basis correlation observable.
pub fn sigma_x_sigma_x() -> ComplexMatrix {
    let x = ComplexMatrix::pauli_x();
    tensor_product(&x, &x).expect("2x2 factors")
}

/// Expectation value `Tr(ρ·obs)`; see [`DensityMatrix::expectation`].
pub fn expectation(rho: &DensityMatrix, obs: &ComplexMatrix) -> crate::Result<f64> {
    rho.expectation(obs)
}
