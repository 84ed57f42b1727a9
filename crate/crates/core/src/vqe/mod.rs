//! Variational energy minimization with symmetry penalties and seeded multi-start.

mod optim;

pub use optim::{adam, lbfgs, Outcome, Status, StopRule};

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::engine::{adjoint_gradient, energy, gradient_compiled, CompiledObservable};
use crate::error::{Error, Result};
use crate::operators::{jordan_wigner, number_operator, s2_operator, PauliOperator};

/// Objective `⟨H⟩ + λ_N ⟨(N − n)²⟩ + λ_S ⟨(S² − s(s+1))²⟩`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub hamiltonian: PauliOperator,
    pub lambda_number: f64,
    pub lambda_spin: f64,
    pub target_electrons: usize,
    /// Total spin quantum number `s`.
    pub target_s: f64,
}

impl LossSpec {
    /// Plain energy, no penalties.
    pub fn energy(hamiltonian: PauliOperator) -> Self {
        Self { hamiltonian, lambda_number: 0.0, lambda_spin: 0.0, target_electrons: 0, target_s: 0.0 }
    }

    /// Default penalties: number penalty 1.0, no spin penalty.
    pub fn molecular(hamiltonian: PauliOperator, target_electrons: usize) -> Self {
        Self { lambda_number: 1.0, target_electrons, ..Self::energy(hamiltonian) }
    }

    pub fn with_spin_penalty(mut self, lambda: f64, target_s: f64) -> Self {
        self.lambda_spin = lambda;
        self.target_s = target_s;
        self
    }

    /// The full loss as one operator over `n_modes` spin orbitals.
    pub fn operator(&self, n_modes: usize) -> Result<PauliOperator> {
        if self.lambda_number < 0.0 || self.lambda_spin < 0.0 || !self.lambda_number.is_finite() || !self.lambda_spin.is_finite() {
            return Err(Error::InvalidInput("penalty weights must be finite and non-negative".into()));
        }
        let mut op = self.hamiltonian.clone();
        if self.lambda_number > 0.0 {
            let n = jordan_wigner(&number_operator(n_modes), n_modes)?.add(&PauliOperator::identity(-(self.target_electrons as f64)));
            op = op.add(&n.mul(&n).scale(self.lambda_number.into()));
        }
        if self.lambda_spin > 0.0 {
            let s = self.target_s;
            let s2 = jordan_wigner(&s2_operator(n_modes)?, n_modes)?.add(&PauliOperator::identity(-s * (s + 1.0)));
            op = op.add(&s2.mul(&s2).scale(self.lambda_spin.into()));
        }
        Ok(op.simplify())
    }
}

/// Loss and plain-energy observables compiled for one circuit.
#[derive(Debug, Clone)]
pub struct LossEvaluator {
    circuit: Circuit,
    loss: CompiledObservable,
    energy: CompiledObservable,
}

impl LossEvaluator {
    pub fn new(circuit: &Circuit, spec: &LossSpec) -> Result<Self> {
        let loss = CompiledObservable::new(&spec.operator(circuit.n_system)?)?;
        let energy = CompiledObservable::new(&spec.hamiltonian)?;
        loss.check_support(circuit.n_system)?;
        energy.check_support(circuit.n_system)?;
        Ok(Self { circuit: circuit.clone(), loss, energy })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn loss(&self, params: &[f64]) -> Result<f64> {
        energy(&self.circuit, params, &self.loss)
    }

    pub fn energy(&self, params: &[f64]) -> Result<f64> {
        energy(&self.circuit, params, &self.energy)
    }

    /// Loss and its gradient: one adjoint sweep for unitary circuits,
    /// parameter shift for channel circuits.
    pub fn loss_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        if self.circuit.channel {
            Ok((self.loss(params)?, gradient_compiled(&self.circuit, params, &self.loss)?))
        } else {
            adjoint_gradient(&self.circuit, params, &self.loss)
        }
    }
}

/// Loss of `circuit` at `params`.
pub fn loss(circuit: &Circuit, params: &[f64], spec: &LossSpec) -> Result<f64> {
    LossEvaluator::new(circuit, spec)?.loss(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitDistribution {
    /// Uniform on `[0, 2π)`.
    Uniform,
    Gaussian { sigma: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    /// L-BFGS; switches to Adam if the line search stalls away from a stationary point.
    Lbfgs,
    Adam,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub gradient_norm_tol: f64,
    pub energy_change_tol: f64,
    pub patience: usize,
    pub init: InitDistribution,
    pub base_seed: u64,
    pub optimizer: OptimizerKind,
    pub lbfgs_memory: usize,
    pub adam_learning_rate: f64,
    /// Restarts whose final loss is within this of the best count as reaching its basin.
    pub basin_tol: f64,
    /// Stop launching restarts once one reaches a loss at or below this value.
    /// Restarts then run in fixed batches of `batch_size`, so results stay deterministic.
    pub stop_below: Option<f64>,
    pub batch_size: usize,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            restarts: 10,
            max_iterations: 2000,
            gradient_norm_tol: 1e-8,
            energy_change_tol: 1e-10,
            patience: 10,
            init: InitDistribution::Uniform,
            base_seed: 0,
            optimizer: OptimizerKind::Lbfgs,
            lbfgs_memory: 20,
            adam_learning_rate: 0.02,
            basin_tol: 1e-6,
            stop_below: None,
            batch_size: 4,
        }
    }
}

impl VqeConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.into()));
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if !(self.gradient_norm_tol > 0.0 && self.energy_change_tol > 0.0 && self.basin_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.patience == 0 || self.batch_size == 0 || self.lbfgs_memory == 0 {
            return bad("patience, batch size and memory must be positive");
        }
        if let InitDistribution::Gaussian { sigma } = self.init {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return bad("gaussian sigma must be positive");
            }
        }
        Ok(())
    }

    fn stop_rule(&self) -> StopRule {
        StopRule {
            max_iterations: self.max_iterations,
            gradient_norm_tol: self.gradient_norm_tol,
            energy_change_tol: self.energy_change_tol,
            patience: self.patience,
        }
    }
}

/// Starting point of restart `r` (seed `base_seed + r`).
pub fn initial_parameters(cfg: &VqeConfig, n_params: usize, restart: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.base_seed.wrapping_add(restart as u64));
    match cfg.init {
        InitDistribution::Uniform => (0..n_params).map(|_| rng.random_range(0.0..TAU)).collect(),
        InitDistribution::Gaussian { sigma } => {
            let normal = Normal::new(0.0, sigma).expect("validated sigma");
            (0..n_params).map(|_| normal.sample(&mut rng)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub index: usize,
    pub seed: u64,
    pub final_params: Vec<f64>,
    pub final_loss: f64,
    /// Plain `⟨H⟩` at the final parameters.
    pub final_energy: f64,
    /// Loss per iteration.
    pub trace: Vec<f64>,
    pub status: Status,
    pub converged: bool,
    pub gradient_norm: f64,
    pub evaluations: usize,
}

impl RestartOutcome {
    pub fn diverged(&self) -> bool {
        self.status == Status::Diverged
    }

    /// Running minimum of the trace.
    pub fn best_so_far(&self) -> Vec<f64> {
        self.trace
            .iter()
            .scan(f64::INFINITY, |m, &v| {
                *m = m.min(v);
                Some(*m)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    /// Plain `⟨H⟩` of the restart with the lowest loss.
    pub best_energy: f64,
    pub best_loss: f64,
    pub best_params: Vec<f64>,
    pub best_restart: usize,
    pub restarts: Vec<RestartOutcome>,
    /// Fraction of completed restarts within `basin_tol` of the best loss.
    pub basin_fraction: f64,
    /// Set when fewer than 10% of restarts reach the best basin.
    pub low_success: bool,
}

fn run_restart(eval: &LossEvaluator, cfg: &VqeConfig, r: usize) -> Result<RestartOutcome> {
    let x0 = initial_parameters(cfg, eval.circuit.n_params, r);
    let mut obj = |x: &[f64]| eval.loss_and_gradient(x);
    let rule = cfg.stop_rule();
    let out = match cfg.optimizer {
        OptimizerKind::Adam => adam(&mut obj, x0, rule, cfg.adam_learning_rate)?,
        OptimizerKind::Lbfgs => {
            let first = lbfgs(&mut obj, x0, rule, cfg.lbfgs_memory)?;
            let used = first.trace.len() - 1;
            if first.status == Status::Stalled && first.gradient_norm > 1e-6 && used < rule.max_iterations {
                let rest = StopRule { max_iterations: rule.max_iterations - used, ..rule };
                let second = adam(&mut obj, first.x.clone(), rest, cfg.adam_learning_rate)?;
                let mut trace = first.trace;
                trace.extend_from_slice(&second.trace[1..]);
                Outcome { trace, evaluations: first.evaluations + second.evaluations, ..second }
            } else {
                first
            }
        }
    };
    let final_energy = if out.status == Status::Diverged { f64::NAN } else { eval.energy(&out.x)? };
    Ok(RestartOutcome {
        index: r,
        seed: cfg.base_seed.wrapping_add(r as u64),
        final_loss: if out.status == Status::Diverged { f64::NAN } else { out.f },
        final_energy,
        converged: out.status.converged(),
        status: out.status,
        gradient_norm: out.gradient_norm,
        evaluations: out.evaluations,
        trace: out.trace,
        final_params: out.x,
    })
}

/// Multi-start minimization. Restarts run concurrently and are merged by index.
pub fn minimize(circuit: &Circuit, spec: &LossSpec, cfg: &VqeConfig) -> Result<VqeResult> {
    cfg.validate()?;
    let eval = LossEvaluator::new(circuit, spec)?;
    let mut outcomes: Vec<RestartOutcome> = Vec::with_capacity(cfg.restarts);
    let chunk = if cfg.stop_below.is_some() { cfg.batch_size } else { cfg.restarts };
    let mut next = 0;
    while next < cfg.restarts {
        let end = (next + chunk).min(cfg.restarts);
        let batch: Vec<RestartOutcome> = (next..end).into_par_iter().map(|r| run_restart(&eval, cfg, r)).collect::<Result<_>>()?;
        outcomes.extend(batch);
        next = end;
        if let Some(t) = cfg.stop_below {
            if outcomes.iter().any(|o| o.final_loss <= t) {
                break;
            }
        }
    }
    summarize(outcomes, cfg.basin_tol)
}

fn summarize(restarts: Vec<RestartOutcome>, basin_tol: f64) -> Result<VqeResult> {
    let best = restarts
        .iter()
        .filter(|o| !o.diverged())
        .min_by(|a, b| a.final_loss.total_cmp(&b.final_loss))
        .ok_or(Error::AllRestartsFailed(restarts.len()))?;
    let hits = restarts.iter().filter(|o| !o.diverged() && o.final_loss - best.final_loss <= basin_tol).count();
    let basin_fraction = hits as f64 / restarts.len() as f64;
    Ok(VqeResult {
        best_energy: best.final_energy,
        best_loss: best.final_loss,
        best_params: best.final_params.clone(),
        best_restart: best.index,
        basin_fraction,
        low_success: basin_fraction < 0.1,
        restarts,
    })
}
