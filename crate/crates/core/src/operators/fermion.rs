//! Fermionic ladder-operator sums and the Jordan–Wigner map.
//!
//! Spin orbitals are interleaved: mode `2p` is the alpha spin orbital of
//! spatial orbital `p`, mode `2p + 1` the beta one.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::pauli::{pauli_multiply, Axis, PauliOperator, PauliString};
use crate::error::{Error, Result};

/// A single creation (`dagger = true`) or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ladder {
    pub mode: usize,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self { mode, dagger: false }
    }
}

/// Sum of coefficient-weighted ladder products, kept in insertion order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FermionOperator {
    pub terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl FermionOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: vec![(Complex64::new(c, 0.0), Vec::new())] }
    }

    pub fn push(&mut self, coeff: impl Into<Complex64>, ops: Vec<Ladder>) {
        self.terms.push((coeff.into(), ops));
    }

    pub fn with_term(mut self, coeff: impl Into<Complex64>, ops: Vec<Ladder>) -> Self {
        self.push(coeff, ops);
        self
    }

    pub fn extend(&mut self, other: FermionOperator) {
        self.terms.extend(other.terms);
    }

    pub fn scale(mut self, k: Complex64) -> Self {
        for (c, _) in &mut self.terms {
            *c *= k;
        }
        self
    }

    /// Product, concatenating ladder sequences term by term.
    pub fn mul(&self, other: &FermionOperator) -> FermionOperator {
        let mut out = FermionOperator::zero();
        for (ca, la) in &self.terms {
            for (cb, lb) in &other.terms {
                let mut ops = la.clone();
                ops.extend_from_slice(lb);
                out.push(ca * cb, ops);
            }
        }
        out
    }

    /// Hermitian adjoint: conjugate coefficients, reverse and flip each sequence.
    pub fn adjoint(&self) -> FermionOperator {
        FermionOperator {
            terms: self
                .terms
                .iter()
                .map(|(c, ops)| {
                    let rev = ops
                        .iter()
                        .rev()
                        .map(|l| Ladder { mode: l.mode, dagger: !l.dagger })
                        .collect();
                    (c.conj(), rev)
                })
                .collect(),
        }
    }

    pub fn max_mode(&self) -> Option<usize> {
        self.terms.iter().flat_map(|(_, ops)| ops.iter().map(|l| l.mode)).max()
    }
}

/// `Σ_j a_j† a_j`.
pub fn number_operator(n_modes: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for j in 0..n_modes {
        op.push(1.0, vec![Ladder::create(j), Ladder::annihilate(j)]);
    }
    op
}

fn check_even(n_modes: usize) -> Result<()> {
    if n_modes % 2 != 0 {
        return Err(Error::InvalidInput(format!(
            "spin operators need an even mode count, got {n_modes}"
        )));
    }
    Ok(())
}

/// `½ Σ_p (n_pα − n_pβ)`.
pub fn sz_operator(n_modes: usize) -> Result<FermionOperator> {
    check_even(n_modes)?;
    let mut op = FermionOperator::zero();
    for p in 0..n_modes / 2 {
        let (a, b) = (2 * p, 2 * p + 1);
        op.push(0.5, vec![Ladder::create(a), Ladder::annihilate(a)]);
        op.push(-0.5, vec![Ladder::create(b), Ladder::annihilate(b)]);
    }
    Ok(op)
}

/// `S² = S₋S₊ + S_z(S_z + 1)` with `S₊ = Σ_p a_pα† a_pβ`.
pub fn s2_operator(n_modes: usize) -> Result<FermionOperator> {
    let sz = sz_operator(n_modes)?;
    let mut s_plus = FermionOperator::zero();
    for p in 0..n_modes / 2 {
        s_plus.push(1.0, vec![Ladder::create(2 * p), Ladder::annihilate(2 * p + 1)]);
    }
    let s_minus = s_plus.adjoint();
    let mut op = s_minus.mul(&s_plus);
    let mut sz_plus_one = sz.clone();
    sz_plus_one.push(1.0, Vec::new());
    op.extend(sz.mul(&sz_plus_one));
    Ok(op)
}

/// Pauli expansion of one ladder operator:
/// `a_j† = ½(X_j − iY_j) Z_{j−1}…Z_0`, `a_j = ½(X_j + iY_j) Z_{j−1}…Z_0`.
fn ladder_to_pauli(l: Ladder) -> [(Complex64, PauliString); 2] {
    let z_string = if l.mode == 0 { 0 } else { (1u64 << l.mode) - 1 };
    let parity = PauliString::from_masks(0, z_string);
    let x = parity.with(l.mode, Axis::X);
    let y = parity.with(l.mode, Axis::Y);
    let iy = if l.dagger { -0.5 } else { 0.5 };
    [(Complex64::new(0.5, 0.0), x), (Complex64::new(0.0, iy), y)]
}

/// Jordan–Wigner transform; every mode index must be `< n_modes`.
pub fn jordan_wigner(op: &FermionOperator, n_modes: usize) -> Result<PauliOperator> {
    if n_modes > 64 {
        return Err(Error::InvalidInput(format!("at most 64 modes supported, got {n_modes}")));
    }
    if let Some(m) = op.max_mode() {
        if m >= n_modes {
            return Err(Error::ModeOutOfRange { mode: m, n_modes });
        }
    }
    let mut terms = Vec::new();
    for (coeff, ops) in &op.terms {
        let mut partial: Vec<(Complex64, PauliString)> = vec![(*coeff, PauliString::IDENTITY)];
        for &l in ops {
            let factors = ladder_to_pauli(l);
            let mut next = Vec::with_capacity(partial.len() * 2);
            for &(c, s) in &partial {
                for &(fc, fs) in &factors {
                    let (ph, p) = pauli_multiply(&s, &fs);
                    next.push((c * fc * ph, p));
                }
            }
            partial = PauliOperator::from_terms(next).simplify().terms;
        }
        terms.extend(partial);
    }
    Ok(PauliOperator::from_terms(terms).simplify())
}
