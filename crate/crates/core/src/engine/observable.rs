use std::collections::BTreeMap;

use num_complex::Complex64;

use super::state::{DensityMatrix, StateVector};
use crate::error::{Error, Result};
use crate::operators::{i_pow, PauliOperator};

type C = Complex64;

/// Terms sharing one X-flip mask: `P|b> = (Σ_k c_k (-1)^{|b & z_k|}) |b ^ flip>`.
#[derive(Debug, Clone)]
struct FlipGroup {
    flip: usize,
    terms: Vec<(C, usize)>,
}

impl FlipGroup {
    #[inline]
    fn weight(&self, b: usize) -> C {
        let mut w = C::new(0.0, 0.0);
        for &(c, z) in &self.terms {
            if (b & z).count_ones() & 1 == 0 {
                w += c;
            } else {
                w -= c;
            }
        }
        w
    }
}

/// A Hermitian Pauli operator grouped for fast application to amplitudes.
#[derive(Debug, Clone)]
pub struct CompiledObservable {
    /// Identity coefficient, added exactly (states are normalized).
    constant: f64,
    groups: Vec<FlipGroup>,
    support: u64,
    scale: f64,
}

impl CompiledObservable {
    pub fn new(op: &PauliOperator) -> Result<Self> {
        let op = op.simplify();
        if !op.is_hermitian() {
            return Err(Error::NonHermitian);
        }
        let mut groups: BTreeMap<u64, Vec<(C, usize)>> = BTreeMap::new();
        let mut constant = 0.0;
        for &(c, s) in &op.terms {
            if s.is_identity() {
                constant += c.re;
                continue;
            }
            // Y = i X Z: fold i^{#Y} into the coefficient.
            groups
                .entry(s.x_mask())
                .or_default()
                .push((C::new(c.re, 0.0) * i_pow(s.y_count()), s.z_mask() as usize));
        }
        Ok(Self {
            constant,
            groups: groups.into_iter().map(|(flip, terms)| FlipGroup { flip: flip as usize, terms }).collect(),
            support: op.support_mask(),
            scale: op.terms.iter().map(|(c, _)| c.norm()).sum::<f64>().max(1.0),
        })
    }

    pub fn support_mask(&self) -> u64 {
        self.support
    }

    /// Errors unless every touched qubit is below `n_system`.
    pub fn check_support(&self, n_system: usize) -> Result<()> {
        if n_system < 64 && self.support >> n_system != 0 {
            return Err(Error::InvalidInput(format!(
                "observable acts outside the {n_system}-qubit system register"
            )));
        }
        Ok(())
    }

    fn check_width(&self, n_qubits: usize) -> Result<()> {
        if n_qubits < 64 && self.support >> n_qubits != 0 {
            return Err(Error::InvalidInput(format!("observable wider than {n_qubits} qubits")));
        }
        Ok(())
    }

    fn real(&self, z: C) -> f64 {
        debug_assert!(z.im.abs() < 1e-10 * self.scale, "imaginary expectation residue {}", z.im);
        z.re
    }

    /// `<ψ|O|ψ>` without range checks.
    pub fn expectation_amps(&self, amps: &[C]) -> f64 {
        let mut acc = C::new(0.0, 0.0);
        for g in &self.groups {
            if g.flip == 0 {
                for (b, a) in amps.iter().enumerate() {
                    acc += g.weight(b) * a.norm_sqr();
                }
            } else {
                for (b, a) in amps.iter().enumerate() {
                    acc += amps[b ^ g.flip].conj() * g.weight(b) * a;
                }
            }
        }
        self.constant + self.real(acc)
    }

    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        self.check_width(psi.n_qubits)?;
        Ok(self.expectation_amps(&psi.amps))
    }

    /// `tr(O ρ)`.
    pub fn expectation_density(&self, rho: &DensityMatrix) -> Result<f64> {
        self.check_width(rho.n_qubits)?;
        let dim = rho.dim();
        let mut acc = C::new(0.0, 0.0);
        for g in &self.groups {
            for y in 0..dim {
                acc += g.weight(y) * rho.data[y * dim + (y ^ g.flip)];
            }
        }
        Ok(self.constant + self.real(acc))
    }

    /// `out = O ψ`.
    pub fn apply(&self, amps: &[C], out: &mut [C]) {
        out.iter_mut().zip(amps).for_each(|(z, a)| *z = a * self.constant);
        for g in &self.groups {
            for (b, a) in amps.iter().enumerate() {
                out[b ^ g.flip] += g.weight(b) * a;
            }
        }
    }
}

/// `<ψ|O|ψ>` for a Hermitian operator.
pub fn expectation(obs: &PauliOperator, psi: &StateVector) -> Result<f64> {
    CompiledObservable::new(obs)?.expectation(psi)
}

pub fn expectation_density(obs: &PauliOperator, rho: &DensityMatrix) -> Result<f64> {
    CompiledObservable::new(obs)?.expectation_density(rho)
}
