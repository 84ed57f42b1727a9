use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::kernels::{apply_gate_matrix, conjugate};
use super::state::{DensityMatrix, StateVector};
use crate::circuit::{gate_matrix, Circuit, GateKind};
use crate::error::{Error, Result};

type C = Complex64;

/// Largest register the simulators accept.
pub const MAX_QUBITS: usize = 24;
/// Largest register the density-matrix path accepts (a 2n-qubit vector).
pub const MAX_DENSITY_QUBITS: usize = 12;

fn check_params(c: &Circuit, params: &[f64]) -> Result<()> {
    if params.len() != c.n_params {
        return Err(Error::ParamLength { expected: c.n_params, got: params.len() });
    }
    Ok(())
}

/// Applies `c` (which must be measurement-free) to `psi` in place.
pub(crate) fn apply_unitary_gates(c: &Circuit, params: &[f64], amps: &mut [C]) {
    for g in &c.gates {
        let m = gate_matrix(&g.kind, params).expect("unitary gate");
        apply_gate_matrix(amps, &g.targets, &m);
    }
}

/// Runs a unitary circuit from `|reference> ⊗ |0…0>_anc`.
pub fn run_pure(c: &Circuit, params: &[f64]) -> Result<StateVector> {
    if c.channel {
        return Err(Error::CircuitKind("run_pure needs a circuit without measure-reset"));
    }
    check_params(c, params)?;
    if c.width() > MAX_QUBITS {
        return Err(Error::TooManyQubits { n: c.width(), max: MAX_QUBITS });
    }
    let mut psi = StateVector::basis(c.width(), c.initial_basis_index());
    apply_unitary_gates(c, params, &mut psi.amps);
    Ok(psi)
}

/// Embeds `rho` (system) with ancillas in |0…0>.
fn embed(rho: &DensityMatrix, n_ancilla: usize) -> DensityMatrix {
    let n = rho.n_qubits + n_ancilla;
    let (small, big) = (rho.dim(), 1usize << n);
    let mut data = vec![C::new(0.0, 0.0); big * big];
    for r in 0..small {
        for c in 0..small {
            data[r * big + c] = rho.data[r * small + c];
        }
    }
    DensityMatrix { n_qubits: n, data }
}

/// `ρ ← U ρ U†` via left and right kernels on the flattened matrix.
pub(crate) fn apply_to_density(rho: &mut DensityMatrix, targets: &[usize], kind: &GateKind, params: &[f64]) {
    let n = rho.n_qubits;
    let m = gate_matrix(kind, params).expect("unitary gate");
    // flat index = col + dim * row: column bits are 0..n, row bits n..2n
    let rows: Vec<usize> = targets.iter().map(|&q| q + n).collect();
    let shifted = match m {
        crate::circuit::GateMatrix::PauliRotation { theta, string } => {
            let mut s = crate::operators::PauliString::IDENTITY;
            for (q, a) in string.factors() {
                s = s.with(q + n, a);
            }
            crate::circuit::GateMatrix::PauliRotation { theta, string: s }
        }
        other => other,
    };
    apply_gate_matrix(&mut rho.data, &rows, &shifted);
    apply_gate_matrix(&mut rho.data, targets, &conjugate(&m));
}

/// Non-selective measurement of `q` followed by reset to |0>.
pub(crate) fn measure_reset(rho: &mut DensityMatrix, q: usize) {
    let dim = rho.dim();
    let bit = 1usize << q;
    for r in 0..dim {
        for c in 0..dim {
            if r & bit == 0 && c & bit == 0 {
                let moved = rho.data[(r | bit) * dim + (c | bit)];
                rho.data[r * dim + c] += moved;
            }
        }
    }
    for r in 0..dim {
        for c in 0..dim {
            if r & bit != 0 || c & bit != 0 {
                rho.data[r * dim + c] = C::new(0.0, 0.0);
            }
        }
    }
}

/// Runs a channel circuit on a system-register input state and returns the
/// system-register output with ancillas traced out.
///
/// Per layer this realizes `ρ ← tr_anc(U_l (ρ ⊗ |0…0><0…0|) U_l†)`.
pub fn run_channel(c: &Circuit, params: &[f64], rho_in: &DensityMatrix) -> Result<DensityMatrix> {
    if !c.channel {
        return Err(Error::CircuitKind("run_channel needs a measure-reset (channel) circuit"));
    }
    check_params(c, params)?;
    if rho_in.n_qubits != c.n_system {
        return Err(Error::DimensionMismatch(rho_in.n_qubits, c.n_system));
    }
    if c.width() > MAX_DENSITY_QUBITS {
        return Err(Error::TooManyQubits { n: c.width(), max: MAX_DENSITY_QUBITS });
    }
    let mut rho = embed(rho_in, c.n_ancilla);
    for g in &c.gates {
        match g.kind {
            GateKind::MeasureReset => {
                for &q in &g.targets {
                    measure_reset(&mut rho, q);
                }
            }
            _ => apply_to_density(&mut rho, &g.targets, &g.kind, params),
        }
    }
    let keep: Vec<usize> = (0..c.n_system).collect();
    partial_trace_density(&rho, &keep)
}

/// System-register output state `ρ^out` of any circuit started from its reference.
pub fn output_state(c: &Circuit, params: &[f64]) -> Result<DensityMatrix> {
    let keep: Vec<usize> = (0..c.n_system).collect();
    if c.channel {
        let rho_in = DensityMatrix::basis(c.n_system, c.initial_basis_index());
        run_channel(c, params, &rho_in)
    } else {
        partial_trace(&run_pure(c, params)?, &keep)
    }
}

/// Spreads the bits of `value` onto the positions in `qubits` (ascending).
fn deposit(value: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().fold(0, |acc, (i, &q)| acc | (((value >> i) & 1) << q))
}

fn split_keep(n: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(Error::InvalidInput("partial trace needs a non-empty keep set".into()));
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() != keep.len() || *k.last().unwrap() >= n {
        return Err(Error::InvalidInput(format!("keep set {keep:?} invalid for {n} qubits")));
    }
    let traced = (0..n).filter(|q| !k.contains(q)).collect();
    Ok((k, traced))
}

/// Reduced density matrix of a pure state on `keep` (ascending index order).
pub fn partial_trace(psi: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let (keep, traced) = split_keep(psi.n_qubits, keep)?;
    let (dk, dt) = (1usize << keep.len(), 1usize << traced.len());
    let kept_idx: Vec<usize> = (0..dk).map(|i| deposit(i, &keep)).collect();
    let mut data = vec![C::new(0.0, 0.0); dk * dk];
    let mut col = vec![C::new(0.0, 0.0); dk];
    for e in 0..dt {
        let off = deposit(e, &traced);
        for (i, &ki) in kept_idx.iter().enumerate() {
            col[i] = psi.amps[ki | off];
        }
        for i in 0..dk {
            if col[i] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dk {
                data[i * dk + j] += col[i] * col[j].conj();
            }
        }
    }
    Ok(DensityMatrix { n_qubits: keep.len(), data })
}

pub fn partial_trace_density(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let (keep, traced) = split_keep(rho.n_qubits, keep)?;
    let (dk, dt, dim) = (1usize << keep.len(), 1usize << traced.len(), rho.dim());
    let kept_idx: Vec<usize> = (0..dk).map(|i| deposit(i, &keep)).collect();
    let mut data = vec![C::new(0.0, 0.0); dk * dk];
    for e in 0..dt {
        let off = deposit(e, &traced);
        for i in 0..dk {
            let r = kept_idx[i] | off;
            for j in 0..dk {
                data[i * dk + j] += rho.data[r * dim + (kept_idx[j] | off)];
            }
        }
    }
    Ok(DensityMatrix { n_qubits: keep.len(), data })
}

/// `|<a|b>|²`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

fn psd_sqrt(m: DMatrix<C>) -> DMatrix<C> {
    let eig = SymmetricEigen::new(m);
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C::new(l.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(tr √(√ρ σ √ρ))²`.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.n_qubits != sigma.n_qubits {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let s = psd_sqrt(rho.to_matrix());
    let m = &s * sigma.to_matrix() * &s;
    let m = (&m + m.adjoint()) * C::new(0.5, 0.0);
    let tr: f64 = SymmetricEigen::new(m).eigenvalues.iter().map(|l| l.max(0.0).sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}
