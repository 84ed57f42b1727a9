//! Gate-level circuit representation, ansatz builders and CZ compilation.

mod ansatz;
mod compile;

pub use ansatz::{build_ansatz, AnsatzFamily, AnsatzSpec, Coupling, GateCombo};
pub use compile::{
    can_unitary, decompose_to_cz, gate_matrix, hadamard, resource_report, rx, ry, rz, u3, GateMatrix, Mat2, Mat4,
    ResourceReport,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::PauliString;

/// A gate angle: either a literal or `scale * params[index]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Angle {
    Fixed(f64),
    Param { index: usize, scale: f64 },
}

impl Angle {
    pub fn param(index: usize) -> Self {
        Angle::Param { index, scale: 1.0 }
    }

    pub fn resolve(&self, params: &[f64]) -> f64 {
        match *self {
            Angle::Fixed(v) => v,
            Angle::Param { index, scale } => scale * params[index],
        }
    }

    pub fn param_index(&self) -> Option<usize> {
        match *self {
            Angle::Fixed(_) => None,
            Angle::Param { index, .. } => Some(index),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateKind {
    /// `RZ(phi) · RY(theta) · RZ(lambda)`.
    U3 { theta: Angle, phi: Angle, lambda: Angle },
    Rx { theta: Angle },
    Ry { theta: Angle },
    Rz { theta: Angle },
    H,
    /// First target is the control.
    Cnot,
    Cz,
    /// `exp(-(i/2)(tx XX + ty YY + tz ZZ))`.
    Can { tx: Angle, ty: Angle, tz: Angle },
    /// `exp(-(i/2) theta P)`; targets are the support of `string`.
    PauliRot { theta: Angle, string: PauliString },
    /// Non-selective measurement followed by reset to |0> on every target.
    MeasureReset,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::U3 { .. } => "u3",
            GateKind::Rx { .. } => "rx",
            GateKind::Ry { .. } => "ry",
            GateKind::Rz { .. } => "rz",
            GateKind::H => "h",
            GateKind::Cnot => "cnot",
            GateKind::Cz => "cz",
            GateKind::Can { .. } => "can",
            GateKind::PauliRot { .. } => "pauli_rot",
            GateKind::MeasureReset => "measure_reset",
        }
    }

    pub fn angles(&self) -> Vec<Angle> {
        match *self {
            GateKind::U3 { theta, phi, lambda } => vec![theta, phi, lambda],
            GateKind::Rx { theta } | GateKind::Ry { theta } | GateKind::Rz { theta } => vec![theta],
            GateKind::Can { tx, ty, tz } => vec![tx, ty, tz],
            GateKind::PauliRot { theta, .. } => vec![theta],
            GateKind::H | GateKind::Cnot | GateKind::Cz | GateKind::MeasureReset => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    #[serde(flatten)]
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Self { kind, targets }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.targets.len() == 2 && !matches!(self.kind, GateKind::MeasureReset)
    }

    fn expected_arity(&self) -> Option<usize> {
        match &self.kind {
            GateKind::U3 { .. } | GateKind::Rx { .. } | GateKind::Ry { .. } | GateKind::Rz { .. } | GateKind::H => Some(1),
            GateKind::Cnot | GateKind::Cz | GateKind::Can { .. } => Some(2),
            GateKind::PauliRot { string, .. } => Some(string.weight()),
            GateKind::MeasureReset => None,
        }
    }
}

/// A concrete parameterized program over `n_system + n_ancilla` qubits.
///
/// Ancillas occupy indices `n_system..n_system + n_ancilla` and always start
/// in |0>. System qubits listed in `reference_occupations` start in |1>.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_system: usize,
    pub n_ancilla: usize,
    pub n_params: usize,
    pub reference_occupations: Vec<usize>,
    /// True when the circuit contains mid-circuit measure-and-reset.
    pub channel: bool,
    pub gates: Vec<Gate>,
}

impl Circuit {
    /// Validates and assembles a circuit.
    pub fn new(
        n_system: usize,
        n_ancilla: usize,
        n_params: usize,
        reference_occupations: Vec<usize>,
        channel: bool,
        gates: Vec<Gate>,
    ) -> Result<Self> {
        let c = Circuit { n_system, n_ancilla, n_params, reference_occupations, channel, gates };
        c.validate()?;
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.n_system + self.n_ancilla
    }

    pub fn validate(&self) -> Result<()> {
        let width = self.width();
        let mut used = vec![false; self.n_params];
        for (i, g) in self.gates.iter().enumerate() {
            let bad = |m: String| Error::InvalidInput(format!("gate {i} ({}): {m}", g.kind.name()));
            if let Some(k) = g.expected_arity() {
                if g.targets.len() != k {
                    return Err(bad(format!("expected {k} targets, got {}", g.targets.len())));
                }
            }
            for (j, &t) in g.targets.iter().enumerate() {
                if t >= width {
                    return Err(bad(format!("target {t} outside width {width}")));
                }
                if g.targets[..j].contains(&t) {
                    return Err(bad(format!("repeated target {t}")));
                }
            }
            if let GateKind::PauliRot { string, .. } = &g.kind {
                let mut support: Vec<usize> = string.factors().map(|(q, _)| q).collect();
                let mut t = g.targets.clone();
                support.sort_unstable();
                t.sort_unstable();
                if support != t {
                    return Err(bad("targets differ from Pauli support".into()));
                }
            }
            if matches!(g.kind, GateKind::MeasureReset) && !self.channel {
                return Err(bad("measure-reset in a non-channel circuit".into()));
            }
            for a in g.kind.angles() {
                if let Some(p) = a.param_index() {
                    if p >= self.n_params {
                        return Err(bad(format!("parameter slot {p} >= {}", self.n_params)));
                    }
                    used[p] = true;
                }
            }
        }
        if let Some(p) = used.iter().position(|u| !u) {
            return Err(Error::InvalidInput(format!("parameter slot {p} is never used")));
        }
        if let Some(&q) = self.reference_occupations.iter().find(|&&q| q >= self.n_system) {
            return Err(Error::InvalidInput(format!("reference occupation {q} is not a system qubit")));
        }
        Ok(())
    }

    /// Computational basis index of the initial state.
    pub fn initial_basis_index(&self) -> usize {
        self.reference_occupations.iter().fold(0, |b, &q| b | (1 << q))
    }

    /// Same circuit with every measure-reset removed (a unitary circuit).
    pub fn without_measurements(&self) -> Circuit {
        Circuit {
            gates: self
                .gates
                .iter()
                .filter(|g| !matches!(g.kind, GateKind::MeasureReset))
                .cloned()
                .collect(),
            channel: false,
            ..self.clone()
        }
    }

    pub fn with_reference(mut self, occupations: Vec<usize>) -> Result<Self> {
        self.reference_occupations = occupations;
        self.validate()?;
        Ok(self)
    }

    /// Number of (gate, angle) slots that read each parameter.
    pub fn param_occurrences(&self) -> Vec<usize> {
        let mut n = vec![0; self.n_params];
        for g in &self.gates {
            for a in g.kind.angles() {
                if let Some(p) = a.param_index() {
                    n[p] += 1;
                }
            }
        }
        n
    }
}
