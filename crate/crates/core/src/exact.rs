//! Brute-force reference computations: explicit operator matrices, exact
//! ground states within particle-number / spin sectors, and configuration
//! coefficient tables.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{gate_matrix, Circuit, GateMatrix};
use crate::engine::StateVector;
use crate::error::{Error, Result};
use crate::operators::{PauliOperator, PauliString};

type C = Complex64;

/// Hard limit on matrix construction.
pub const MAX_EXACT_QUBITS: usize = 16;
/// Hard limit on dense matrices.
pub const MAX_DENSE_QUBITS: usize = 12;
const DENSE_SECTOR_DIM: usize = 512;
const RESIDUAL_TOL: f64 = 1e-10;

fn check_op(op: &PauliOperator, n_qubits: usize, max: usize) -> Result<()> {
    if n_qubits > max {
        return Err(Error::TooManyQubits { n: n_qubits, max });
    }
    if op.n_qubits() > n_qubits {
        return Err(Error::InvalidInput(format!(
            "operator acts on {} qubits, matrix requested for {n_qubits}",
            op.n_qubits()
        )));
    }
    Ok(())
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub dim: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<C>,
}

impl SparseMatrix {
    /// Builds the matrix of `op` restricted to `basis` (sorted basis indices).
    fn restricted(op: &PauliOperator, n_qubits: usize, basis: &[usize]) -> Self {
        let mut position = vec![usize::MAX; 1 << n_qubits];
        for (i, &b) in basis.iter().enumerate() {
            position[b] = i;
        }
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut row: Vec<(usize, C)> = Vec::new();
        for &r in basis {
            row.clear();
            for &(c, s) in &op.terms {
                // <r|P|b> is non-zero only for b = r ^ flip
                let b = r ^ s.x_mask() as usize;
                let j = position[b];
                if j == usize::MAX {
                    continue;
                }
                let (ph, _) = s.apply_to_basis(b);
                row.push((j, c * ph));
            }
            row.sort_by_key(|e| e.0);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut v = C::new(0.0, 0.0);
                while k < row.len() && row[k].0 == j {
                    v += row[k].1;
                    k += 1;
                }
                if v.norm() > 0.0 {
                    indices.push(j);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        SparseMatrix { dim: basis.len(), indptr, indices, values }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        let (lo, hi) = (self.indptr[r], self.indptr[r + 1]);
        match self.indices[lo..hi].binary_search(&c) {
            Ok(k) => self.values[lo + k],
            Err(_) => C::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C], y: &mut [C]) {
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = C::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *out = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<C> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.indptr[r]..self.indptr[r + 1] {
                m[(r, self.indices[k])] = self.values[k];
            }
        }
        m
    }
}

/// Sparse matrix of `op` on `n_qubits` (at most 16).
pub fn to_matrix(op: &PauliOperator, n_qubits: usize) -> Result<SparseMatrix> {
    check_op(op, n_qubits, MAX_EXACT_QUBITS)?;
    let basis: Vec<usize> = (0..1 << n_qubits).collect();
    Ok(SparseMatrix::restricted(&op.simplify(), n_qubits, &basis))
}

/// Dense matrix of `op` on `n_qubits` (at most 12).
pub fn to_dense(op: &PauliOperator, n_qubits: usize) -> Result<DMatrix<C>> {
    check_op(op, n_qubits, MAX_DENSE_QUBITS)?;
    let dim = 1 << n_qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for &(c, s) in &op.terms {
        for b in 0..dim {
            let (ph, r) = s.apply_to_basis(b);
            m[(r, b)] += c * ph;
        }
    }
    Ok(m)
}

/// Embeds a gate into the full register by explicit index placement.
fn embed_gate(m: &GateMatrix, targets: &[usize], n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    match m {
        GateMatrix::PauliRotation { theta, string } => {
            let p = to_dense(&PauliOperator::from_term(C::new(1.0, 0.0), *string), n).expect("dense guard");
            let (s, c) = (theta / 2.0).sin_cos();
            DMatrix::<C>::identity(dim, dim) * C::new(c, 0.0) - p * C::new(0.0, s)
        }
        _ => {
            let k = targets.len();
            let local = |b: usize| targets.iter().enumerate().fold(0, |acc, (i, &q)| acc | (((b >> q) & 1) << i));
            let entry = |r: usize, c: usize| match m {
                GateMatrix::One(u) => u[r][c],
                GateMatrix::Two(u) => u[r][c],
                GateMatrix::PauliRotation { .. } => unreachable!(),
            };
            let mask: usize = targets.iter().map(|&q| 1 << q).sum();
            let mut full = DMatrix::zeros(dim, dim);
            for col in 0..dim {
                for l in 0..1usize << k {
                    let row = (col & !mask) | targets.iter().enumerate().fold(0, |acc, (i, &q)| acc | (((l >> i) & 1) << q));
                    full[(row, col)] = entry(l, local(col));
                }
            }
            full
        }
    }
}

/// Dense unitary of a measurement-free circuit as the product of embedded gate matrices.
pub fn circuit_unitary(c: &Circuit, params: &[f64]) -> Result<DMatrix<C>> {
    if c.channel {
        return Err(Error::CircuitKind("circuit_unitary needs a circuit without measure-reset"));
    }
    if params.len() != c.n_params {
        return Err(Error::ParamLength { expected: c.n_params, got: params.len() });
    }
    let n = c.width();
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n, max: MAX_DENSE_QUBITS });
    }
    let mut u = DMatrix::<C>::identity(1 << n, 1 << n);
    for g in &c.gates {
        let m = gate_matrix(&g.kind, params).expect("unitary gate");
        u = embed_gate(&m, &g.targets, n) * u;
    }
    Ok(u)
}

/// `|tr(U†V)| / dim`: equals 1 iff `U` and `V` agree up to a global phase.
pub fn phase_insensitive_overlap(u: &DMatrix<C>, v: &DMatrix<C>) -> f64 {
    (u.adjoint() * v).trace().norm() / u.nrows() as f64
}

/// Electron-number and spin filter on computational basis states (Jordan–Wigner,
/// interleaved spin orbitals).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SectorConstraint {
    pub electron_count: Option<usize>,
    pub sz: Option<f64>,
}

impl SectorConstraint {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn electrons(n: usize) -> Self {
        Self { electron_count: Some(n), sz: None }
    }

    pub fn electrons_sz(n: usize, sz: f64) -> Self {
        Self { electron_count: Some(n), sz: Some(sz) }
    }

    pub fn allows(&self, basis: usize) -> bool {
        let b = basis as u64;
        if let Some(n) = self.electron_count {
            if b.count_ones() as usize != n {
                return false;
            }
        }
        if let Some(sz) = self.sz {
            const EVEN: u64 = 0x5555_5555_5555_5555;
            let two_sz = (b & EVEN).count_ones() as i64 - (b & !EVEN).count_ones() as i64;
            if (two_sz as f64 - 2.0 * sz).abs() > 1e-9 {
                return false;
            }
        }
        true
    }

    pub fn basis(&self, n_qubits: usize) -> Vec<usize> {
        (0..1usize << n_qubits).filter(|&b| self.allows(b)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundState {
    pub energy: f64,
    pub state: StateVector,
    /// `‖Hψ − Eψ‖` within the sector.
    pub residual: f64,
    pub sector_dim: usize,
}

fn dvec_residual(m: &SparseMatrix, v: &[C], e: f64) -> f64 {
    let mut hv = vec![C::new(0.0, 0.0); v.len()];
    m.matvec(v, &mut hv);
    hv.iter().zip(v).map(|(a, b)| (a - b * e).norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
fn lanczos_lowest(m: &SparseMatrix, tol: f64) -> Result<(f64, Vec<C>)> {
    let dim = m.dim;
    let krylov = dim.min(80);
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a2b);
    let mut start: Vec<C> = (0..dim).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let mut best = (f64::INFINITY, start.clone(), f64::INFINITY);
    for _ in 0..200 {
        let norm = start.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut basis: Vec<Vec<C>> = vec![start.iter().map(|z| z / norm).collect()];
        let (mut alpha, mut beta) = (Vec::new(), Vec::new());
        let mut w = vec![C::new(0.0, 0.0); dim];
        for j in 0..krylov {
            m.matvec(&basis[j], &mut w);
            let a: f64 = basis[j].iter().zip(&w).map(|(v, x)| (v.conj() * x).re).sum();
            alpha.push(a);
            for _ in 0..2 {
                for v in &basis {
                    let proj: C = v.iter().zip(&w).map(|(p, x)| p.conj() * x).sum();
                    w.iter_mut().zip(v).for_each(|(x, p)| *x -= p * proj);
                }
            }
            let b = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if j + 1 == krylov || b < 1e-13 {
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
        let k = alpha.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (idx, &theta) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let y = eig.eigenvectors.column(idx);
        let mut x = vec![C::new(0.0, 0.0); dim];
        for (i, v) in basis.iter().enumerate() {
            x.iter_mut().zip(v).for_each(|(acc, p)| *acc += p * y[i]);
        }
        let n = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x.iter_mut().for_each(|z| *z /= n);
        let r = dvec_residual(m, &x, theta);
        if r < best.2 {
            best = (theta, x.clone(), r);
        }
        if r < tol {
            return Ok((theta, x));
        }
        start = x;
    }
    Err(Error::NoConvergence(best.2))
}

/// Lowest eigenpair of `op` within the basis states allowed by `sector`.
pub fn ground_state(op: &PauliOperator, n_qubits: usize, sector: &SectorConstraint) -> Result<GroundState> {
    check_op(op, n_qubits, MAX_EXACT_QUBITS)?;
    let op = op.simplify();
    if !op.is_hermitian() {
        return Err(Error::NonHermitian);
    }
    let basis = sector.basis(n_qubits);
    if basis.is_empty() {
        return Err(Error::InvalidInput("sector contains no basis states".into()));
    }
    let m = SparseMatrix::restricted(&op, n_qubits, &basis);
    let (energy, vec) = if basis.len() <= DENSE_SECTOR_DIM {
        let eig = SymmetricEigen::new(m.to_dense());
        let (idx, &e) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let v: DVector<C> = eig.eigenvectors.column(idx).into_owned();
        (e, v.iter().copied().collect::<Vec<_>>())
    } else {
        lanczos_lowest(&m, RESIDUAL_TOL)?
    };
    let residual = dvec_residual(&m, &vec, energy);
    if residual >= RESIDUAL_TOL {
        return Err(Error::NoConvergence(residual));
    }
    let mut full = vec![C::new(0.0, 0.0); 1 << n_qubits];
    for (&b, &v) in basis.iter().zip(&vec) {
        full[b] = v;
    }
    let mut state = StateVector { n_qubits, amps: full };
    fix_phase(&mut state.amps);
    Ok(GroundState { energy, state, residual, sector_dim: basis.len() })
}

/// Rotates the global phase so the largest-magnitude amplitude is positive real.
fn fix_phase(amps: &mut [C]) {
    // ties within 1e-12 go to the lowest basis index
    let top = amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
    if let Some(&big) = amps.iter().find(|a| a.norm() >= top - 1e-12) {
        if top > 0.0 {
            let ph = big.conj() / big.norm();
            amps.iter_mut().for_each(|a| *a *= ph);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationEntry {
    pub index: usize,
    /// Occupation string, highest qubit first.
    pub bitstring: String,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigurationTable {
    pub n_qubits: usize,
    pub entries: Vec<ConfigurationEntry>,
    /// Probability weight of the input state inside the sector before renormalizing.
    pub sector_weight: f64,
}

impl ConfigurationTable {
    pub fn coefficient(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |e| e.index)
            .map_or(0.0, |k| self.entries[k].coefficient)
    }

    /// Largest coefficient difference over the union of listed configurations.
    pub fn max_deviation(&self, other: &ConfigurationTable) -> f64 {
        self.entries
            .iter()
            .chain(&other.entries)
            .map(|e| (self.coefficient(e.index) - other.coefficient(e.index)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("index,bitstring,coefficient\n");
        for e in &self.entries {
            s.push_str(&format!("{},{},{:.16e}\n", e.index, e.bitstring, e.coefficient));
        }
        s
    }
}

/// Configuration coefficients of `psi` within `sector`, phase-fixed so the
/// largest coefficient is positive, sorted by basis index. Entries below
/// 1e-12 in magnitude are omitted.
pub fn configuration_table(psi: &StateVector, sector: &SectorConstraint) -> ConfigurationTable {
    let basis = sector.basis(psi.n_qubits);
    let mut amps: Vec<C> = basis.iter().map(|&b| psi.amps[b]).collect();
    let weight: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if weight > 0.0 {
        amps.iter_mut().for_each(|a| *a /= weight.sqrt());
    }
    fix_phase(&mut amps);
    let width = psi.n_qubits;
    let entries = basis
        .iter()
        .zip(&amps)
        .filter(|(_, a)| a.norm() >= 1e-12)
        .map(|(&index, a)| ConfigurationEntry {
            index,
            bitstring: format!("{index:0width$b}"),
            coefficient: a.re,
        })
        .collect();
    ConfigurationTable { n_qubits: width, entries, sector_weight: weight }
}

/// `|<a|b>|²`.
pub fn state_overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Matrix of a single Pauli string (test helper re-exported for oracles).
pub fn pauli_dense(s: &PauliString, n_qubits: usize) -> Result<DMatrix<C>> {
    to_dense(&PauliOperator::from_term(C::new(1.0, 0.0), *s), n_qubits)
}
