use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

/// Pure state over `n_qubits`; qubit 0 is the least significant index bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub n_qubits: usize,
    pub amps: Vec<C>,
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![C::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = C::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(amps: Vec<C>) -> Result<Self> {
        let n = amps.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("amplitude count {n} is not a power of two")));
        }
        Ok(Self { n_qubits: n.trailing_zeros() as usize, amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }
}

/// Density matrix stored row-major: `data[row * dim + col]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    pub n_qubits: usize,
    pub data: Vec<C>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Self {
        let dim = psi.dim();
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = psi.amps[r] * psi.amps[c].conj();
            }
        }
        Self { n_qubits: psi.n_qubits, data }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        Self::from_pure(&StateVector::basis(n_qubits, index))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C::new(1.0 / dim as f64, 0.0);
        }
        Self { n_qubits, data }
    }

    pub fn from_matrix(m: &DMatrix<C>) -> Result<Self> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() {
            return Err(Error::InvalidInput(format!("{}x{} is not a qubit density matrix", m.nrows(), m.ncols())));
        }
        let data = (0..dim * dim).map(|k| m[(k / dim, k % dim)]).collect();
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, data })
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.data[r * self.dim() + c]
    }

    pub fn to_matrix(&self) -> DMatrix<C> {
        let dim = self.dim();
        DMatrix::from_row_slice(dim, dim, &self.data)
    }

    pub fn trace(&self) -> C {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // ρ is Hermitian, so tr(ρ²) = Σ |ρ_rc|².
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_matrix()).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hermitian, unit trace and PSD within `tol`.
    pub fn check_valid(&self, tol: f64) -> Result<()> {
        let dim = self.dim();
        for r in 0..dim {
            for c in r..dim {
                if (self.get(r, c) - self.get(c, r).conj()).norm() > tol {
                    return Err(Error::InvalidInput(format!("density matrix not Hermitian at ({r},{c})")));
                }
            }
        }
        let t = self.trace();
        if (t - C::new(1.0, 0.0)).norm() > tol {
            return Err(Error::InvalidInput(format!("density matrix trace {t}")));
        }
        if let Some(&min) = self.eigenvalues().first() {
            if min < -tol {
                return Err(Error::InvalidInput(format!("density matrix eigenvalue {min}")));
            }
        }
        Ok(())
    }

    /// Eigenvector of the largest eigenvalue, with that eigenvalue.
    pub fn dominant_eigenvector(&self) -> (f64, StateVector) {
        let eig = SymmetricEigen::new(self.to_matrix());
        let (k, &w) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty matrix");
        let amps = eig.eigenvectors.column(k).iter().copied().collect();
        (w, StateVector { n_qubits: self.n_qubits, amps })
    }
}
