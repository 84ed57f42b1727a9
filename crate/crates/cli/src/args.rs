//! Flag groups shared by several commands.

use std::ops::RangeInclusive;

use clap::{Args, ValueEnum};
use haa_core::circuit::{AnsatzFamily, AnsatzSpec, Coupling, GateCombo};
use haa_core::vqe::{InitDistribution, LossSpec, OptimizerKind, VqeConfig};
use haa_core::operators::PauliOperator;
use serde::Serialize;

use crate::failure::Failure;

#[derive(Args, Debug, Clone, Serialize)]
pub struct AnsatzArgs {
    #[arg(long, env = "HAA_ANSATZ", default_value = "haa")]
    pub ansatz: AnsatzFamily,
    /// Ancilla qubits (default 1 for haa/qrqnn, 0 otherwise).
    #[arg(long, env = "HAA_ANCILLA")]
    pub ancilla: Option<usize>,
    #[arg(long, env = "HAA_LAYERS", default_value_t = 1)]
    pub layers: usize,
    #[arg(long, env = "HAA_GATE_COMBO")]
    pub gate_combo: Option<GateCombo>,
    #[arg(long, env = "HAA_COUPLING")]
    pub coupling: Option<Coupling>,
}

impl AnsatzArgs {
    pub fn ancilla_count(&self) -> usize {
        self.ancilla.unwrap_or(match self.ansatz {
            AnsatzFamily::Haa | AnsatzFamily::Qrqnn => 1,
            _ => 0,
        })
    }

    /// Validated spec with the given ancilla and layer counts.
    pub fn spec_with(&self, n_system: usize, n_ancilla: usize, layers: usize, electrons: Option<usize>) -> Result<AnsatzSpec, Failure> {
        let mut spec = match self.ansatz {
            AnsatzFamily::Hea => AnsatzSpec::hea(n_system, layers),
            AnsatzFamily::Haa => AnsatzSpec::haa(n_system, n_ancilla, layers),
            AnsatzFamily::Qrqnn => AnsatzSpec::qrqnn(n_system, n_ancilla, layers),
            AnsatzFamily::Uccsd => AnsatzSpec::uccsd(n_system, electrons.unwrap_or(n_system / 2)),
        };
        spec.n_ancilla = n_ancilla;
        if let Some(g) = self.gate_combo {
            spec.gate_combo = g;
        }
        if let Some(c) = self.coupling {
            spec.coupling = c;
        }
        if let Some(n) = electrons {
            spec = spec.with_electrons(n);
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn spec(&self, n_system: usize, electrons: Option<usize>) -> Result<AnsatzSpec, Failure> {
        self.spec_with(n_system, self.ancilla_count(), self.layers, electrons)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Uniform,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerChoice {
    Lbfgs,
    Adam,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OptimizerArgs {
    #[arg(long, env = "HAA_RESTARTS", default_value_t = 10)]
    pub restarts: usize,
    /// Restart `r` is seeded with `seed + r`.
    #[arg(long, env = "HAA_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "HAA_MAX_ITERATIONS", default_value_t = 2000)]
    pub max_iterations: usize,
    #[arg(long, env = "HAA_INIT", value_enum, default_value = "uniform")]
    pub init: InitKind,
    /// Standard deviation of gaussian initial parameters.
    #[arg(long, env = "HAA_SIGMA", default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, env = "HAA_OPTIMIZER", value_enum, default_value = "lbfgs")]
    pub optimizer: OptimizerChoice,
    #[arg(long, env = "HAA_LEARNING_RATE", default_value_t = 0.02)]
    pub learning_rate: f64,
    /// A restart stops after `--patience` consecutive steps that each move the loss less than this.
    #[arg(long, env = "HAA_ENERGY_TOL", default_value_t = 1e-10)]
    pub energy_tol: f64,
    #[arg(long, env = "HAA_PATIENCE", default_value_t = 10)]
    pub patience: usize,
    /// Weight of the (N - n)^2 penalty.
    #[arg(long, env = "HAA_PENALTY_NUMBER", default_value_t = 1.0)]
    pub penalty_number: f64,
    /// Weight of the (S^2 - s(s+1))^2 penalty.
    #[arg(long, env = "HAA_PENALTY_SPIN", default_value_t = 0.0)]
    pub penalty_spin: f64,
    /// Target total spin s (default |MS2|/2 of the input).
    #[arg(long, env = "HAA_SPIN")]
    pub spin: Option<f64>,
    /// Stop launching restarts once one is within this many Hartree of the exact energy.
    #[arg(long, env = "HAA_TARGET_ERROR")]
    pub target_error: Option<f64>,
}

impl OptimizerArgs {
    pub fn vqe_config(&self) -> Result<VqeConfig, Failure> {
        let cfg = VqeConfig {
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            init: match self.init {
                InitKind::Uniform => InitDistribution::Uniform,
                InitKind::Gaussian => InitDistribution::Gaussian { sigma: self.sigma },
            },
            base_seed: self.seed,
            optimizer: match self.optimizer {
                OptimizerChoice::Lbfgs => OptimizerKind::Lbfgs,
                OptimizerChoice::Adam => OptimizerKind::Adam,
            },
            adam_learning_rate: self.learning_rate,
            energy_change_tol: self.energy_tol,
            patience: self.patience,
            ..VqeConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn loss_spec(&self, hamiltonian: PauliOperator, n_electrons: usize, ms2: i64) -> LossSpec {
        LossSpec {
            lambda_number: self.penalty_number,
            ..LossSpec::molecular(hamiltonian, n_electrons)
        }
        .with_spin_penalty(self.penalty_spin, self.spin.unwrap_or(ms2.unsigned_abs() as f64 / 2.0))
    }
}

/// Parses `a:b` or a single value `a` into an inclusive range.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once(':').unwrap_or((s, s));
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start in `{s}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end in `{s}`"))?;
    if a > b {
        return Err(format!("empty range `{s}`"));
    }
    Ok(a..=b)
}
