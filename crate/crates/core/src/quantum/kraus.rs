use super::matrix::{kron, ComplexMatrix};
use super::state::DensityMatrix;
use super::COMPLETENESS_TOL;
use crate::error::{Error, Result};

/// Kraus representation of a quantum channel, `ρ ↦ Σ K ρ K†`.
///
/// Construction checks `|Σ K†K − I|_max ≤ 1e-12`. Zero operators are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let set = Self::unchecked(operators)?;
        let deviation = set.completeness_error();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel { deviation });
        }
        Ok(set)
    }

    /// Shape-checked but not completeness-checked.
    pub(crate) fn unchecked(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::Dimension("empty Kraus set".into()))?;
        let n = first.rows();
        if operators.iter().any(|k| k.rows() != n || k.cols() != n) {
            return Err(Error::Dimension(
                "Kraus operators must share one square dimension".into(),
            ));
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![ComplexMatrix::identity(dim)],
        }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.operators[0].rows()
    }

    /// `|Σ K†K − I|_max`.
    pub fn completeness_error(&self) -> f64 {
        let n = self.dim();
        let mut sum = ComplexMatrix::zeros(n, n);
        for k in &self.operators {
            sum = &sum + &(&k.dagger() * k);
        }
        sum.max_abs_diff(&ComplexMatrix::identity(n))
            .expect("same shape")
    }

    /// All pairwise products `A_i ⊗ B_j` in lexicographic `(i, j)` order.
    pub fn bipartite(set_a: &KrausSet, set_b: &KrausSet) -> Result<KrausSet> {
        if set_a.dim() != 2 || set_b.dim() != 2 {
            return Err(Error::Dimension(format!(
                "bipartite sets need single-qubit channels, got {} and {}",
                set_a.dim(),
                set_b.dim()
            )));
        }
        let ops = set_a
            .operators
            .iter()
            .flat_map(|a| set_b.operators.iter().map(move |b| kron(a, b)))
            .collect();
        KrausSet::new(ops)
    }

    /// Applies the channel to a two-photon state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim() != 4 {
            return Err(Error::Dimension(format!(
                "channel acts on dimension {}, state on 4",
                self.dim()
            )));
        }
        let deviation = self.completeness_error();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::InvalidChannel { deviation });
        }
        DensityMatrix::new(self.apply_raw(rho.matrix()))
    }

    /// `Σ K m K†` without validation; works for any matching dimension.
    pub fn apply_raw(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let n = m.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for k in &self.operators {
            out = &out + &(&(k * m) * &k.dagger());
        }
        out
    }
}

/// Free-function form of [`KrausSet::apply`].
pub fn apply_kraus(rho: &DensityMatrix, channel: &KrausSet) -> Result<DensityMatrix> {
    channel.apply(rho)
}
