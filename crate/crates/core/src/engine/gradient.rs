//! Analytic gradients.
//!
//! Every parameterized gate factors into rotations `exp(-i(θ/2)P)` with a
//! Pauli generator (U3 = RZ·RY·RZ, CAN = XX·YY·ZZ rotations), so the
//! two-point shift rule `∂E/∂θ = ½[E(θ+π/2) − E(θ−π/2)]` is exact per slot.
//! For unitary circuits the same derivative is also available from a single
//! reverse sweep ([`adjoint_gradient`]).

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::kernels::{apply_gate_matrix, apply_one, inverse, pauli_matrix_element};
use super::observable::CompiledObservable;
use super::sim::{run_channel, run_pure};
use super::state::DensityMatrix;
use crate::circuit::{can_unitary, gate_matrix, rx, ry, rz, Angle, Circuit, GateKind, GateMatrix};
use crate::error::{Error, Result};
use crate::operators::{Axis, PauliOperator, PauliString};

type C = Complex64;

/// Energy of a circuit from its reference state (pure or channel).
pub fn energy(c: &Circuit, params: &[f64], obs: &CompiledObservable) -> Result<f64> {
    obs.check_support(c.n_system)?;
    if c.channel {
        let rho_in = DensityMatrix::basis(c.n_system, c.initial_basis_index());
        obs.expectation_density(&run_channel(c, params, &rho_in)?)
    } else {
        obs.expectation(&run_pure(c, params)?)
    }
}

fn with_angle(kind: &GateKind, slot: usize, value: f64) -> GateKind {
    let f = Angle::Fixed(value);
    let mut k = kind.clone();
    match &mut k {
        GateKind::U3 { theta, phi, lambda } => *[theta, phi, lambda][slot] = f,
        GateKind::Rx { theta } | GateKind::Ry { theta } | GateKind::Rz { theta } | GateKind::PauliRot { theta, .. } => {
            *theta = f
        }
        GateKind::Can { tx, ty, tz } => *[tx, ty, tz][slot] = f,
        _ => unreachable!("gate has no angle slots"),
    }
    k
}

/// Parameter-shift gradient; works for unitary and channel circuits.
///
/// A parameter read by several slots (shared UCCSD parameters) gets the
/// scale-weighted sum of the per-slot shifts.
pub fn gradient(c: &Circuit, params: &[f64], obs: &PauliOperator) -> Result<Vec<f64>> {
    let obs = CompiledObservable::new(obs)?;
    gradient_compiled(c, params, &obs)
}

pub fn gradient_compiled(c: &Circuit, params: &[f64], obs: &CompiledObservable) -> Result<Vec<f64>> {
    if params.len() != c.n_params {
        return Err(Error::ParamLength { expected: c.n_params, got: params.len() });
    }
    obs.check_support(c.n_system)?;
    let mut grad = vec![0.0; c.n_params];
    let mut shifted = c.clone();
    for (gi, g) in c.gates.iter().enumerate() {
        for (slot, a) in g.kind.angles().into_iter().enumerate() {
            let Angle::Param { index, scale } = a else { continue };
            let base = a.resolve(params);
            shifted.gates[gi].kind = with_angle(&g.kind, slot, base + FRAC_PI_2);
            let plus = energy(&shifted, params, obs)?;
            shifted.gates[gi].kind = with_angle(&g.kind, slot, base - FRAC_PI_2);
            let minus = energy(&shifted, params, obs)?;
            shifted.gates[gi].kind = g.kind.clone();
            grad[index] += scale * 0.5 * (plus - minus);
        }
    }
    Ok(grad)
}

/// `∂E/∂θ_index` by parameter shift over the slots that read `index` only.
pub fn partial_derivative(c: &Circuit, params: &[f64], obs: &CompiledObservable, index: usize) -> Result<f64> {
    if params.len() != c.n_params {
        return Err(Error::ParamLength { expected: c.n_params, got: params.len() });
    }
    if index >= c.n_params {
        return Err(Error::InvalidInput(format!("parameter {index} >= {}", c.n_params)));
    }
    obs.check_support(c.n_system)?;
    let mut d = 0.0;
    let mut shifted = c.clone();
    for (gi, g) in c.gates.iter().enumerate() {
        for (slot, a) in g.kind.angles().into_iter().enumerate() {
            let Angle::Param { index: p, scale } = a else { continue };
            if p != index {
                continue;
            }
            let base = a.resolve(params);
            shifted.gates[gi].kind = with_angle(&g.kind, slot, base + FRAC_PI_2);
            let plus = energy(&shifted, params, obs)?;
            shifted.gates[gi].kind = with_angle(&g.kind, slot, base - FRAC_PI_2);
            let minus = energy(&shifted, params, obs)?;
            shifted.gates[gi].kind = g.kind.clone();
            d += scale * 0.5 * (plus - minus);
        }
    }
    Ok(d)
}

/// Central finite differences of the energy (reference oracle).
pub fn finite_difference_gradient(c: &Circuit, params: &[f64], obs: &PauliOperator, step: f64) -> Result<Vec<f64>> {
    let obs = CompiledObservable::new(obs)?;
    let mut p = params.to_vec();
    let mut grad = Vec::with_capacity(params.len());
    for k in 0..params.len() {
        p[k] = params[k] + step;
        let plus = energy(c, &p, &obs)?;
        p[k] = params[k] - step;
        let minus = energy(c, &p, &obs)?;
        p[k] = params[k];
        grad.push((plus - minus) / (2.0 * step));
    }
    Ok(grad)
}

fn generator(q: &[usize], axes: &[Axis]) -> PauliString {
    PauliString::from_factors(q.iter().copied().zip(axes.iter().copied()))
}

/// `Im <λ|P|ψ>` is `∂E/∂θ` for a rotation `exp(-i(θ/2)P)` sitting where `ψ`, `λ` are.
#[inline]
fn shift_term(lambda: &[C], p: &PauliString, psi: &[C]) -> f64 {
    pauli_matrix_element(lambda, p, psi).im
}

/// Energy and gradient of a unitary circuit by one forward and one reverse sweep.
pub fn adjoint_gradient(c: &Circuit, params: &[f64], obs: &CompiledObservable) -> Result<(f64, Vec<f64>)> {
    obs.check_support(c.n_system)?;
    let psi = run_pure(c, params)?;
    let mut psi = psi.amps;
    let mut lambda = vec![C::new(0.0, 0.0); psi.len()];
    obs.apply(&psi, &mut lambda);
    let energy: f64 = psi.iter().zip(&lambda).map(|(a, b)| (a.conj() * b).re).sum();
    let mut grad = vec![0.0; c.n_params];
    let mut acc = |a: &Angle, g: f64| {
        if let Angle::Param { index, scale } = *a {
            grad[index] += scale * g;
        }
    };
    let undo1 = |v: &mut [C], w: &mut [C], q: usize, m: [[C; 2]; 2]| {
        apply_one(v, q, &m);
        apply_one(w, q, &m);
    };
    for g in c.gates.iter().rev() {
        let t = &g.targets;
        match &g.kind {
            GateKind::U3 { theta, phi, lambda: lam } => {
                let (th, ph, la) = (theta.resolve(params), phi.resolve(params), lam.resolve(params));
                let z = generator(t, &[Axis::Z]);
                let y = generator(t, &[Axis::Y]);
                acc(phi, shift_term(&lambda, &z, &psi));
                undo1(&mut psi, &mut lambda, t[0], rz(-ph));
                acc(theta, shift_term(&lambda, &y, &psi));
                undo1(&mut psi, &mut lambda, t[0], ry(-th));
                acc(lam, shift_term(&lambda, &z, &psi));
                undo1(&mut psi, &mut lambda, t[0], rz(-la));
            }
            GateKind::Rx { theta } | GateKind::Ry { theta } | GateKind::Rz { theta } => {
                let (axis, m) = match g.kind {
                    GateKind::Rx { .. } => (Axis::X, rx(-theta.resolve(params))),
                    GateKind::Ry { .. } => (Axis::Y, ry(-theta.resolve(params))),
                    _ => (Axis::Z, rz(-theta.resolve(params))),
                };
                acc(theta, shift_term(&lambda, &generator(t, &[axis]), &psi));
                undo1(&mut psi, &mut lambda, t[0], m);
            }
            GateKind::Can { tx, ty, tz } => {
                // the three generators commute, so all derivatives are taken after the gate
                for (a, axis) in [(tx, Axis::X), (ty, Axis::Y), (tz, Axis::Z)] {
                    acc(a, shift_term(&lambda, &generator(t, &[axis, axis]), &psi));
                }
                let inv = GateMatrix::Two(can_unitary(-tx.resolve(params), -ty.resolve(params), -tz.resolve(params)));
                apply_gate_matrix(&mut psi, t, &inv);
                apply_gate_matrix(&mut lambda, t, &inv);
            }
            GateKind::PauliRot { theta, string } => {
                acc(theta, shift_term(&lambda, string, &psi));
                let inv = GateMatrix::PauliRotation { theta: -theta.resolve(params), string: *string };
                apply_gate_matrix(&mut psi, t, &inv);
                apply_gate_matrix(&mut lambda, t, &inv);
            }
            GateKind::H | GateKind::Cnot | GateKind::Cz => {
                let inv = inverse(&gate_matrix(&g.kind, params).expect("unitary gate"));
                apply_gate_matrix(&mut psi, t, &inv);
                apply_gate_matrix(&mut lambda, t, &inv);
            }
            GateKind::MeasureReset => unreachable!("run_pure rejects channel circuits"),
        }
    }
    Ok((energy, grad))
}
