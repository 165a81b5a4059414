use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::fock::{Occupation, C64};

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;
const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Hermitian, positive semidefinite, unit-trace operator. Rows and columns are
/// labelled by occupation patterns of the modes it lives on.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
    labels: Vec<Occupation>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>, labels: Vec<Occupation>) -> Result<Self> {
        let dim = labels.len();
        if dim == 0 || entries.nrows() != dim || entries.ncols() != dim {
            return Err(Error::InvalidDensity(format!(
                "{}x{} entries for {} labels",
                entries.nrows(),
                entries.ncols(),
                dim
            )));
        }
        let asym = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensity(format!("not Hermitian ({asym:.3e})")));
        }
        let trace = entries.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace {trace}")));
        }
        let rho = Self { entries, labels };
        if let Some(&min) = rho.eigenvalues().last() {
            if min < EIGENVALUE_FLOOR {
                return Err(Error::InvalidDensity(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for the (renormalized) amplitudes `psi`.
    pub fn from_pure(psi: &[(Occupation, C64)]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|(_, a)| a.norm_sqr()).sum();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        let scale = 1.0 / norm;
        let dim = psi.len();
        let entries = DMatrix::from_fn(dim, dim, |i, j| psi[i].1 * psi[j].1.conj() * scale);
        Self::new(entries, psi.iter().map(|(o, _)| o.clone()).collect())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn labels(&self) -> &[Occupation] {
        &self.labels
    }

    /// `⟨row|ρ|col⟩`, zero for labels outside the support.
    pub fn element(&self, row: &Occupation, col: &Occupation) -> C64 {
        match (self.position(row), self.position(col)) {
            (Some(i), Some(j)) => self.entries[(i, j)],
            _ => C64::default(),
        }
    }

    fn position(&self, label: &Occupation) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩` for an unnormalized pure vector given by labelled amplitudes.
    pub fn expectation(&self, psi: &[(Occupation, C64)]) -> C64 {
        let mut acc = C64::default();
        for (li, ai) in psi {
            for (lj, aj) in psi {
                acc += ai.conj() * self.element(li, lj) * aj;
            }
        }
        acc
    }

    /// Largest entrywise difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let mut labels: Vec<&Occupation> = self.labels.iter().chain(&other.labels).collect();
        labels.sort();
        labels.dedup();
        let mut worst = 0.0_f64;
        for a in &labels {
            for b in &labels {
                worst = worst.max((self.element(a, b) - other.element(a, b)).norm());
            }
        }
        worst
    }
}
