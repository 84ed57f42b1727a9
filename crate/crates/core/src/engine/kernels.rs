//! In-place gate kernels on amplitude arrays.

use num_complex::Complex64;

use crate::circuit::{GateMatrix, Mat2, Mat4};
use crate::operators::PauliString;

type C = Complex64;

/// Applies a 2x2 unitary to qubit `q`.
pub fn apply_one(amps: &mut [C], q: usize, m: &Mat2) {
    let stride = 1usize << q;
    let [[m00, m01], [m10, m11]] = *m;
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a0, *a1);
            *a0 = m00 * x + m01 * y;
            *a1 = m10 * x + m11 * y;
        }
    }
}

#[inline]
fn insert_zero_bit(i: usize, bit: usize) -> usize {
    let low = i & ((1 << bit) - 1);
    ((i >> bit) << (bit + 1)) | low
}

/// Applies a 4x4 unitary with local index `bit(q0) + 2 * bit(q1)`.
pub fn apply_two(amps: &mut [C], q0: usize, q1: usize, m: &Mat4) {
    let (b0, b1) = (1usize << q0, 1usize << q1);
    let (lo, hi) = if q0 < q1 { (q0, q1) } else { (q1, q0) };
    for i in 0..amps.len() / 4 {
        let base = insert_zero_bit(insert_zero_bit(i, lo), hi);
        let idx = [base, base | b0, base | b1, base | b0 | b1];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (r, &k) in idx.iter().enumerate() {
            let row = &m[r];
            amps[k] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

/// `ψ ← (cos(θ/2) − i sin(θ/2) P) ψ`.
pub fn apply_pauli_rotation(amps: &mut [C], theta: f64, p: &PauliString) {
    let (s, c) = (theta / 2.0).sin_cos();
    let flip = p.x_mask() as usize;
    let mis = C::new(0.0, -s);
    if flip == 0 {
        for (b, a) in amps.iter_mut().enumerate() {
            let (ph, _) = p.apply_to_basis(b);
            *a *= c + mis * ph;
        }
        return;
    }
    for x in 0..amps.len() {
        let y = x ^ flip;
        if x > y {
            continue;
        }
        // P|x> = ph_x |y>, P|y> = ph_y |x>
        let (ph_x, _) = p.apply_to_basis(x);
        let (ph_y, _) = p.apply_to_basis(y);
        let (ax, ay) = (amps[x], amps[y]);
        amps[x] = c * ax + mis * ph_y * ay;
        amps[y] = c * ay + mis * ph_x * ax;
    }
}

pub fn apply_gate_matrix(amps: &mut [C], targets: &[usize], g: &GateMatrix) {
    match g {
        GateMatrix::One(m) => apply_one(amps, targets[0], m),
        GateMatrix::Two(m) => apply_two(amps, targets[0], targets[1], m),
        GateMatrix::PauliRotation { theta, string } => apply_pauli_rotation(amps, *theta, string),
    }
}

/// Entry-wise conjugate of a gate (used for right multiplication by `U†`).
pub fn conjugate(g: &GateMatrix) -> GateMatrix {
    match g {
        GateMatrix::One(m) => GateMatrix::One(m.map(|row| row.map(|z| z.conj()))),
        GateMatrix::Two(m) => GateMatrix::Two(m.map(|row| row.map(|z| z.conj()))),
        GateMatrix::PauliRotation { theta, string } => {
            // conj(P) = (-1)^{#Y} P
            let sign = if string.y_count() % 2 == 0 { -1.0 } else { 1.0 };
            GateMatrix::PauliRotation { theta: sign * theta, string: *string }
        }
    }
}

/// Conjugate transpose of a gate.
pub fn inverse(g: &GateMatrix) -> GateMatrix {
    fn dagger<const N: usize>(m: &[[C; N]; N]) -> [[C; N]; N] {
        let mut out = [[C::new(0.0, 0.0); N]; N];
        for i in 0..N {
            for j in 0..N {
                out[i][j] = m[j][i].conj();
            }
        }
        out
    }
    match g {
        GateMatrix::One(m) => GateMatrix::One(dagger(m)),
        GateMatrix::Two(m) => GateMatrix::Two(dagger(m)),
        GateMatrix::PauliRotation { theta, string } => GateMatrix::PauliRotation { theta: -theta, string: *string },
    }
}

/// `<a|P|b>`.
pub fn pauli_matrix_element(a: &[C], p: &PauliString, b: &[C]) -> C {
    let mut acc = C::new(0.0, 0.0);
    for (x, &bx) in b.iter().enumerate() {
        let (ph, y) = p.apply_to_basis(x);
        acc += a[y].conj() * ph * bx;
    }
    acc
}
