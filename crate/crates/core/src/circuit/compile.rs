//! Gate unitaries, CZ-basis compilation and resource counting.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Angle, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::operators::{Axis, PauliString};

type C = Complex64;
pub type Mat2 = [[C; 2]; 2];
pub type Mat4 = [[C; 4]; 4];

/// Concrete action of a gate at fixed parameters.
///
/// Two-qubit matrices use the local index `bit(targets[0]) + 2 * bit(targets[1])`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
    /// `cos(θ/2) I − i sin(θ/2) P`.
    PauliRotation { theta: f64, string: PauliString },
}

const O: C = C::new(0.0, 0.0);
const L: C = C::new(1.0, 0.0);

fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[O; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

pub fn rx(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C::new(c, 0.0), C::new(0.0, -s)], [C::new(0.0, -s), C::new(c, 0.0)]]
}

pub fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [[C::new(c, 0.0), C::new(-s, 0.0)], [C::new(s, 0.0), C::new(c, 0.0)]]
}

pub fn rz(theta: f64) -> Mat2 {
    [[C::from_polar(1.0, -theta / 2.0), O], [O, C::from_polar(1.0, theta / 2.0)]]
}

pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    matmul2(&rz(phi), &matmul2(&ry(theta), &rz(lambda)))
}

pub fn hadamard() -> Mat2 {
    let h = C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

/// `exp(-(i/2)(tx XX + ty YY + tz ZZ))`.
///
/// The generator is block diagonal on span{|00>,|11>} and span{|01>,|10>}.
pub fn can_unitary(tx: f64, ty: f64, tz: f64) -> Mat4 {
    let mut m = [[O; 4]; 4];
    let (sd, cd) = ((tx - ty) / 2.0).sin_cos();
    let (ss, cs) = ((tx + ty) / 2.0).sin_cos();
    let even = C::from_polar(1.0, -tz / 2.0);
    let odd = C::from_polar(1.0, tz / 2.0);
    m[0][0] = even * cd;
    m[3][3] = even * cd;
    m[0][3] = even * C::new(0.0, -sd);
    m[3][0] = even * C::new(0.0, -sd);
    m[1][1] = odd * cs;
    m[2][2] = odd * cs;
    m[1][2] = odd * C::new(0.0, -ss);
    m[2][1] = odd * C::new(0.0, -ss);
    m
}

fn cnot() -> Mat4 {
    let mut m = [[O; 4]; 4];
    m[0][0] = L;
    m[2][2] = L;
    m[3][1] = L;
    m[1][3] = L;
    m
}

fn cz() -> Mat4 {
    let mut m = [[O; 4]; 4];
    m[0][0] = L;
    m[1][1] = L;
    m[2][2] = L;
    m[3][3] = -L;
    m
}

/// Unitary of a gate at `params`; `None` for measure-reset.
pub fn gate_matrix(kind: &GateKind, params: &[f64]) -> Option<GateMatrix> {
    let r = |a: &Angle| a.resolve(params);
    Some(match kind {
        GateKind::U3 { theta, phi, lambda } => GateMatrix::One(u3(r(theta), r(phi), r(lambda))),
        GateKind::Rx { theta } => GateMatrix::One(rx(r(theta))),
        GateKind::Ry { theta } => GateMatrix::One(ry(r(theta))),
        GateKind::Rz { theta } => GateMatrix::One(rz(r(theta))),
        GateKind::H => GateMatrix::One(hadamard()),
        GateKind::Cnot => GateMatrix::Two(cnot()),
        GateKind::Cz => GateMatrix::Two(cz()),
        GateKind::Can { tx, ty, tz } => GateMatrix::Two(can_unitary(r(tx), r(ty), r(tz))),
        GateKind::PauliRot { theta, string } => GateMatrix::PauliRotation { theta: r(theta), string: *string },
        GateKind::MeasureReset => return None,
    })
}

struct CzEmitter {
    out: Vec<Gate>,
    optimize: bool,
}

impl CzEmitter {
    fn one(&mut self, kind: GateKind, q: usize) {
        self.push(Gate::new(kind, vec![q]));
    }

    fn cz(&mut self, a: usize, b: usize) {
        self.push(Gate::new(GateKind::Cz, vec![a, b]));
    }

    fn cnot(&mut self, c: usize, t: usize) {
        self.one(GateKind::H, t);
        self.cz(c, t);
        self.one(GateKind::H, t);
    }

    fn rz(&mut self, q: usize, a: Angle) {
        self.one(GateKind::Rz { theta: a }, q);
    }

    fn ry(&mut self, q: usize, a: Angle) {
        self.one(GateKind::Ry { theta: a }, q);
    }

    /// Appends `g`, cancelling it against the latest overlapping gate when both
    /// are the same self-inverse gate (H·H or CZ·CZ on the same qubits).
    fn push(&mut self, g: Gate) {
        if self.optimize && matches!(g.kind, GateKind::H | GateKind::Cz) {
            let overlapping = self
                .out
                .iter()
                .rposition(|p| p.targets.iter().any(|q| g.targets.contains(q)));
            if let Some(i) = overlapping {
                let p = &self.out[i];
                let same_set = p.targets.len() == g.targets.len() && p.targets.iter().all(|q| g.targets.contains(q));
                if p.kind == g.kind && same_set {
                    self.out.remove(i);
                    return;
                }
            }
        }
        self.out.push(g);
    }

    fn pauli_rotation(&mut self, theta: Angle, string: PauliString) {
        let factors: Vec<(usize, Axis)> = string.factors().collect();
        if factors.is_empty() {
            return; // global phase
        }
        for &(q, a) in &factors {
            match a {
                Axis::X => self.one(GateKind::H, q),
                Axis::Y => self.one(GateKind::Rx { theta: Angle::Fixed(FRAC_PI_2) }, q),
                Axis::Z => {}
            }
        }
        for w in factors.windows(2) {
            self.cnot(w[0].0, w[1].0);
        }
        self.rz(factors.last().unwrap().0, theta);
        for w in factors.windows(2).rev() {
            self.cnot(w[0].0, w[1].0);
        }
        for &(q, a) in &factors {
            match a {
                Axis::X => self.one(GateKind::H, q),
                Axis::Y => self.one(GateKind::Rx { theta: Angle::Fixed(-FRAC_PI_2) }, q),
                Axis::Z => {}
            }
        }
    }

    /// Three-CNOT synthesis of the canonical gate (equal up to global phase).
    fn can_three_cnot(&mut self, a: usize, b: usize, tx: Angle, ty: Angle, tz: Angle) {
        let neg = |t: Angle| match t {
            Angle::Fixed(v) => Angle::Fixed(-v),
            Angle::Param { index, scale } => Angle::Param { index, scale: -scale },
        };
        self.rz(b, Angle::Fixed(FRAC_PI_2));
        self.cnot(b, a);
        self.rz(a, Angle::Fixed(FRAC_PI_2));
        self.rz(a, tz);
        self.ry(b, Angle::Fixed(FRAC_PI_2));
        self.ry(b, tx);
        self.cnot(a, b);
        self.ry(b, Angle::Fixed(-FRAC_PI_2));
        self.ry(b, neg(ty));
        self.cnot(b, a);
        self.rz(a, Angle::Fixed(-FRAC_PI_2));
    }

    fn gate(&mut self, g: &Gate) {
        let t = &g.targets;
        match &g.kind {
            GateKind::Cnot => self.cnot(t[0], t[1]),
            GateKind::Cz => self.cz(t[0], t[1]),
            GateKind::PauliRot { theta, string } => self.pauli_rotation(*theta, *string),
            GateKind::Can { tx, ty, tz } => {
                if self.optimize {
                    self.can_three_cnot(t[0], t[1], *tx, *ty, *tz);
                } else {
                    let xx = PauliString::from_factors([(t[0], Axis::X), (t[1], Axis::X)]);
                    let yy = PauliString::from_factors([(t[0], Axis::Y), (t[1], Axis::Y)]);
                    let zz = PauliString::from_factors([(t[0], Axis::Z), (t[1], Axis::Z)]);
                    self.pauli_rotation(*tx, xx);
                    self.pauli_rotation(*ty, yy);
                    self.pauli_rotation(*tz, zz);
                }
            }
            GateKind::MeasureReset => unreachable!("channel circuits are rejected earlier"),
            _ => self.push(g.clone()),
        }
    }
}

/// Rewrites a unitary circuit into single-qubit gates and CZ.
///
/// With `optimize`, CAN gates use the 3-CNOT canonical synthesis and adjacent
/// H·H / CZ·CZ pairs cancel, giving 3 CZ per CAN; without it every two-qubit
/// Pauli rotation costs 2 CZ (6 per CAN).
pub fn decompose_to_cz(c: &Circuit, optimize: bool) -> Result<Circuit> {
    if c.channel {
        return Err(Error::CircuitKind("CZ decomposition needs a circuit without measure-reset"));
    }
    let mut e = CzEmitter { out: Vec::new(), optimize };
    for g in &c.gates {
        e.gate(g);
    }
    Circuit::new(c.n_system, c.n_ancilla, c.n_params, c.reference_occupations.clone(), false, e.out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub n_params: usize,
    pub n_two_qubit_gates: usize,
    pub n_cz_after_decomposition: usize,
    pub depth: usize,
}

/// Counts parameters, two-qubit gates, CZ gates after optimized compilation,
/// and greedy moment depth. Measure-reset gates are skipped for the CZ count.
pub fn resource_report(c: &Circuit) -> ResourceReport {
    let n_two = c.gates.iter().filter(|g| g.is_two_qubit()).count();
    let unitary = c.without_measurements();
    let n_cz = decompose_to_cz(&unitary, true)
        .map(|d| d.gates.iter().filter(|g| matches!(g.kind, GateKind::Cz)).count())
        .unwrap_or(0);
    let mut level = vec![0usize; c.width()];
    let mut depth = 0;
    for g in &c.gates {
        let m = 1 + g.targets.iter().map(|&q| level[q]).max().unwrap_or(0);
        for &q in &g.targets {
            level[q] = m;
        }
        depth = depth.max(m);
    }
    ResourceReport { n_params: c.n_params, n_two_qubit_gates: n_two, n_cz_after_decomposition: n_cz, depth }
}
