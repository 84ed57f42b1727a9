//! Loading an FCIDUMP and solving one VQE point against its exact ground state.

use std::path::Path;

use haa_core::chemio::{assemble, parse_fcidump, MolecularHamiltonian, MolecularIntegrals};
use haa_core::circuit::{build_ansatz, AnsatzSpec};
use haa_core::engine::{expectation_density, output_state, DensityMatrix, StateVector};
use haa_core::exact::{ground_state, GroundState, SectorConstraint, MAX_EXACT_QUBITS};
use haa_core::operators::{jordan_wigner, number_operator, s2_operator, PauliOperator};
use haa_core::vqe::{minimize, VqeResult};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::OptimizerArgs;
use crate::failure::Failure;
use crate::manifest::{InputDigest, CHEMICAL_ACCURACY};

pub struct Problem {
    pub digest: InputDigest,
    pub integrals: MolecularIntegrals,
    pub hamiltonian: MolecularHamiltonian,
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let bytes = std::fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let text = String::from_utf8_lossy(&bytes);
        let integrals = parse_fcidump(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let hamiltonian = assemble(&integrals)?;
        Ok(Self { digest: InputDigest::new(path, &bytes), integrals, hamiltonian })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits
    }

    pub fn n_electrons(&self) -> usize {
        self.integrals.n_elec
    }

    /// Fixed electron number and `S_z = MS2/2`.
    pub fn sector(&self) -> SectorConstraint {
        SectorConstraint::electrons_sz(self.integrals.n_elec, self.integrals.ms2 as f64 / 2.0)
    }

    /// Exact ground state in the input's sector, or `None` past the exact-solver guard.
    pub fn exact(&self) -> Result<Option<GroundState>, Failure> {
        if self.n_qubits() > MAX_EXACT_QUBITS {
            return Ok(None);
        }
        Ok(Some(ground_state(&self.hamiltonian.qubit_op, self.n_qubits(), &self.sector())?))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Penalties {
    pub number_mean: f64,
    /// `⟨(N − n)²⟩`
    pub number_deviation: f64,
    pub s2_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RestartRow {
    pub index: usize,
    pub seed: u64,
    pub status: String,
    pub energy: f64,
    pub loss: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// One solved geometry.
pub struct Point {
    pub label: String,
    pub spec: AnsatzSpec,
    pub n_params: usize,
    pub vqe: VqeResult,
    pub fci_energy: Option<f64>,
    pub purity: f64,
    /// `⟨ψ_FCI|ρ^out|ψ_FCI⟩`
    pub fci_fidelity: Option<f64>,
    pub penalties: Penalties,
    pub rho: DensityMatrix,
}

impl Point {
    pub fn error(&self) -> Option<f64> {
        self.fci_energy.map(|e| (self.vqe.best_energy - e).abs())
    }

    pub fn chemically_accurate(&self) -> Option<bool> {
        self.error().map(|e| e < CHEMICAL_ACCURACY)
    }

    pub fn restarts(&self) -> Vec<RestartRow> {
        self.vqe
            .restarts
            .iter()
            .map(|o| RestartRow {
                index: o.index,
                seed: o.seed,
                status: format!("{:?}", o.status),
                energy: o.final_energy,
                loss: o.final_loss,
                iterations: o.trace.len().saturating_sub(1),
                gradient_norm: o.gradient_norm,
            })
            .collect()
    }

    pub fn summary(&self) -> Value {
        json!({
            "ansatz": self.label,
            "spec": self.spec,
            "n_params": self.n_params,
            "best_energy": self.vqe.best_energy,
            "best_loss": self.vqe.best_loss,
            "fci_energy": self.fci_energy,
            "error": self.error(),
            "chemically_accurate": self.chemically_accurate(),
            "purity": self.purity,
            "fci_fidelity": self.fci_fidelity,
            "penalty_expectations": self.penalties,
            "best_restart": self.vqe.best_restart,
            "basin_fraction": self.vqe.basin_fraction,
            "low_success": self.vqe.low_success,
            "restarts_run": self.vqe.restarts.len(),
        })
    }
}

pub fn fidelity_with(rho: &DensityMatrix, psi: &StateVector) -> f64 {
    let m = rho.to_matrix();
    let v = nalgebra::DVector::from_column_slice(&psi.amps);
    let f: Complex64 = (v.adjoint() * m * &v)[(0, 0)];
    f.re
}

/// Runs the multi-start VQE for `spec` on `problem`.
pub fn solve(problem: &Problem, exact: Option<&GroundState>, spec: &AnsatzSpec, opt: &OptimizerArgs) -> Result<Point, Failure> {
    let circuit = build_ansatz(spec)?;
    let mut cfg = opt.vqe_config()?;
    if let (Some(t), Some(gs)) = (opt.target_error, exact) {
        cfg.stop_below = Some(gs.energy + t);
    }
    let ints = &problem.integrals;
    let loss = opt.loss_spec(problem.hamiltonian.qubit_op.clone(), ints.n_elec, ints.ms2);
    let vqe = minimize(&circuit, &loss, &cfg)?;
    let rho = output_state(&circuit, &vqe.best_params)?;
    let n = problem.n_qubits();
    let shift = PauliOperator::identity(-(ints.n_elec as f64));
    let number = jordan_wigner(&number_operator(n), n)?;
    let deviation = number.add(&shift);
    let penalties = Penalties {
        number_mean: expectation_density(&number, &rho)?,
        number_deviation: expectation_density(&deviation.mul(&deviation), &rho)?,
        s2_mean: expectation_density(&jordan_wigner(&s2_operator(n)?, n)?, &rho)?,
    };
    Ok(Point {
        label: spec.label(),
        spec: spec.clone(),
        n_params: circuit.n_params,
        fci_energy: exact.map(|g| g.energy),
        purity: rho.purity(),
        fci_fidelity: exact.map(|g| fidelity_with(&rho, &g.state)),
        penalties,
        vqe,
        rho,
    })
}
