//! Layered ansatz builders.
//!
//! Parameter slots are allocated in gate order, one fresh slot per angle,
//! except for the UCCSD baseline where every Pauli rotation of one spatial
//! excitation shares a slot.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Angle, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::operators::{jordan_wigner, FermionOperator, Ladder};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzFamily {
    Hea,
    Haa,
    Qrqnn,
    Uccsd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateCombo {
    Can,
    U3cx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coupling {
    Adjacent,
    Cross,
}

macro_rules! str_enum {
    ($t:ty { $($name:literal => $v:expr),* $(,)? }) => {
        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($v),)*
                    other => Err(Error::InvalidInput(format!(
                        concat!("unknown ", stringify!($t), " '{}'"), other))),
                }
            }
        }
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $v { return f.write_str($name); })*
                unreachable!()
            }
        }
    };
}

str_enum!(AnsatzFamily { "hea" => AnsatzFamily::Hea, "haa" => AnsatzFamily::Haa, "qrqnn" => AnsatzFamily::Qrqnn, "uccsd" => AnsatzFamily::Uccsd });
str_enum!(GateCombo { "can" => GateCombo::Can, "u3cx" => GateCombo::U3cx });
str_enum!(Coupling { "adjacent" => Coupling::Adjacent, "cross" => Coupling::Cross });

/// Declarative description of an ansatz circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub n_system: usize,
    pub n_ancilla: usize,
    pub layers: usize,
    pub gate_combo: GateCombo,
    pub coupling: Coupling,
    /// Hartree–Fock filling: the first `n_electrons` system qubits start in |1>.
    pub n_electrons: Option<usize>,
}

impl AnsatzSpec {
    /// HEA(L): U3 on every qubit, then an open CNOT chain.
    pub fn hea(n_system: usize, layers: usize) -> Self {
        Self {
            family: AnsatzFamily::Hea,
            n_system,
            n_ancilla: 0,
            layers,
            gate_combo: GateCombo::U3cx,
            coupling: Coupling::Adjacent,
            n_electrons: None,
        }
    }

    /// HAA(n, L) with its default gate layout: CAN/cross, or CAN/adjacent without ancillas.
    pub fn haa(n_system: usize, n_ancilla: usize, layers: usize) -> Self {
        Self {
            family: AnsatzFamily::Haa,
            n_system,
            n_ancilla,
            layers,
            gate_combo: GateCombo::Can,
            coupling: if n_ancilla == 0 { Coupling::Adjacent } else { Coupling::Cross },
            n_electrons: None,
        }
    }

    pub fn qrqnn(n_system: usize, n_ancilla: usize, layers: usize) -> Self {
        Self { family: AnsatzFamily::Qrqnn, ..Self::haa(n_system, n_ancilla, layers) }
    }

    pub fn uccsd(n_system: usize, n_electrons: usize) -> Self {
        Self {
            family: AnsatzFamily::Uccsd,
            n_system,
            n_ancilla: 0,
            layers: 1,
            gate_combo: GateCombo::Can,
            coupling: Coupling::Adjacent,
            n_electrons: Some(n_electrons),
        }
    }

    pub fn with_electrons(mut self, n: usize) -> Self {
        self.n_electrons = Some(n);
        self
    }

    pub fn with_layout(mut self, gate_combo: GateCombo, coupling: Coupling) -> Self {
        self.gate_combo = gate_combo;
        self.coupling = coupling;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidAnsatz(m.to_string()));
        if self.n_system == 0 {
            return bad("at least one system qubit is required");
        }
        if let Some(n) = self.n_electrons {
            if n > self.n_system {
                return bad("more electrons than system qubits");
            }
        }
        match self.family {
            AnsatzFamily::Hea => {
                if self.n_ancilla != 0 {
                    return bad("HEA takes no ancilla qubits");
                }
                if self.gate_combo != GateCombo::U3cx || self.coupling != Coupling::Adjacent {
                    return bad("HEA layers are U3CX with adjacent coupling");
                }
            }
            AnsatzFamily::Haa | AnsatzFamily::Qrqnn => {
                if self.coupling == Coupling::Cross && self.n_ancilla == 0 {
                    return bad("cross coupling needs at least one ancilla");
                }
                if self.family == AnsatzFamily::Qrqnn && self.n_ancilla == 0 {
                    return bad("qrQNN needs at least one ancilla to measure and reset");
                }
            }
            AnsatzFamily::Uccsd => {
                if self.n_ancilla != 0 {
                    return bad("UCCSD takes no ancilla qubits");
                }
                if self.n_electrons.is_none() {
                    return bad("UCCSD needs an electron count");
                }
                if self.n_system % 2 != 0 || self.n_electrons.unwrap() % 2 != 0 {
                    return bad("UCCSD builder needs closed-shell filling of interleaved spin orbitals");
                }
            }
        }
        if self.family != AnsatzFamily::Uccsd && self.layers == 0 {
            return bad("layer count must be at least 1");
        }
        if self.n_system + self.n_ancilla > 64 {
            return bad("at most 64 qubits");
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        match self.family {
            AnsatzFamily::Hea => format!("HEA({})", self.layers),
            AnsatzFamily::Haa => format!("HAA({},{})", self.n_ancilla, self.layers),
            AnsatzFamily::Qrqnn => format!("qrQNN({},{})", self.n_ancilla, self.layers),
            AnsatzFamily::Uccsd => "UCCSD".to_string(),
        }
    }
}

struct Builder {
    gates: Vec<Gate>,
    n_params: usize,
}

impl Builder {
    fn fresh(&mut self) -> Angle {
        let a = Angle::param(self.n_params);
        self.n_params += 1;
        a
    }

    fn u3(&mut self, q: usize) {
        let (theta, phi, lambda) = (self.fresh(), self.fresh(), self.fresh());
        self.gates.push(Gate::new(GateKind::U3 { theta, phi, lambda }, vec![q]));
    }

    fn can(&mut self, a: usize, b: usize) {
        let (tx, ty, tz) = (self.fresh(), self.fresh(), self.fresh());
        self.gates.push(Gate::new(GateKind::Can { tx, ty, tz }, vec![a, b]));
    }

    fn cnot(&mut self, c: usize, t: usize) {
        self.gates.push(Gate::new(GateKind::Cnot, vec![c, t]));
    }

    /// One layer of the chosen gate combination and coupling.
    fn layer(&mut self, spec: &AnsatzSpec) {
        let width = spec.n_system + spec.n_ancilla;
        match (spec.gate_combo, spec.coupling) {
            (GateCombo::Can, Coupling::Cross) => {
                for a in spec.n_system..width {
                    for s in 0..spec.n_system {
                        self.can(s, a);
                    }
                }
            }
            (GateCombo::U3cx, Coupling::Cross) => {
                for a in spec.n_system..width {
                    for s in 0..spec.n_system {
                        self.u3(s);
                        self.u3(a);
                        self.cnot(s, a);
                    }
                }
            }
            (GateCombo::Can, Coupling::Adjacent) => {
                for q in 0..width.saturating_sub(1) {
                    self.can(q, q + 1);
                }
            }
            (GateCombo::U3cx, Coupling::Adjacent) => {
                for q in 0..width {
                    self.u3(q);
                }
                for q in 0..width.saturating_sub(1) {
                    self.cnot(q, q + 1);
                }
            }
        }
    }
}

/// Compiles an [`AnsatzSpec`] into a validated [`Circuit`].
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    spec.validate()?;
    let reference: Vec<usize> = (0..spec.n_electrons.unwrap_or(0)).collect();
    if spec.family == AnsatzFamily::Uccsd {
        return build_uccsd(spec.n_system, spec.n_electrons.unwrap());
    }
    let mut b = Builder { gates: Vec::new(), n_params: 0 };
    let channel = spec.family == AnsatzFamily::Qrqnn;
    let ancillas: Vec<usize> = (spec.n_system..spec.n_system + spec.n_ancilla).collect();
    for _ in 0..spec.layers {
        b.layer(spec);
        if channel {
            b.gates.push(Gate::new(GateKind::MeasureReset, ancillas.clone()));
        }
    }
    Circuit::new(spec.n_system, spec.n_ancilla, b.n_params, reference, channel, b.gates)
}

/// Single-Trotter-step UCCSD from the Hartree–Fock reference.
fn build_uccsd(n_system: usize, n_electrons: usize) -> Result<Circuit> {
    let n_spatial = n_system / 2;
    let n_occ = n_electrons / 2;
    let occ: Vec<usize> = (0..n_occ).collect();
    let virt: Vec<usize> = (n_occ..n_spatial).collect();
    let spin = |p: usize, s: usize| 2 * p + s;

    // Each entry: spin-orbital excitations (created, annihilated) sharing one parameter.
    let mut excitations: Vec<Vec<(Vec<usize>, Vec<usize>)>> = Vec::new();
    for &i in &occ {
        for &a in &virt {
            excitations.push((0..2).map(|s| (vec![spin(a, s)], vec![spin(i, s)])).collect());
        }
    }
    for (ii, &i) in occ.iter().enumerate() {
        for &j in &occ[ii..] {
            for (aa, &a) in virt.iter().enumerate() {
                for &b in &virt[aa..] {
                    let mut group = Vec::new();
                    for s1 in 0..2 {
                        for s2 in 0..2 {
                            let (p, q) = (spin(i, s1), spin(j, s2));
                            let (r, t) = (spin(a, s1), spin(b, s2));
                            if p >= q || r >= t {
                                continue;
                            }
                            group.push((vec![r, t], vec![q, p]));
                        }
                    }
                    if !group.is_empty() {
                        excitations.push(group);
                    }
                }
            }
        }
    }

    let mut gates = Vec::new();
    for (index, group) in excitations.iter().enumerate() {
        for (create, annihilate) in group {
            let mut ops: Vec<Ladder> = create.iter().map(|&m| Ladder::create(m)).collect();
            ops.extend(annihilate.iter().map(|&m| Ladder::annihilate(m)));
            let t = FermionOperator::zero().with_term(1.0, ops);
            let mut gen = t.clone();
            gen.extend(t.adjoint().scale(Complex64::new(-1.0, 0.0)));
            // T - T† maps to Σ i r_k P_k, so exp(θ(T - T†)) = Π exp(-(i/2)(-2 r_k θ) P_k).
            for (c, string) in jordan_wigner(&gen, n_system)?.terms {
                let targets: Vec<usize> = string.factors().map(|(q, _)| q).collect();
                gates.push(Gate::new(
                    GateKind::PauliRot { theta: Angle::Param { index, scale: -2.0 * c.im }, string },
                    targets,
                ));
            }
        }
    }
    if excitations.is_empty() {
        return Err(Error::InvalidAnsatz("UCCSD has no excitations for this filling".into()));
    }
    Circuit::new(n_system, 0, excitations.len(), (0..n_electrons).collect(), false, gates)
}
