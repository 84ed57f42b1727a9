//! Pauli strings and weighted sums of them.
//!
//! A [`PauliString`] is stored in symplectic form: bit `q` of `x` / `z`
//! records whether qubit `q` carries an X / Z component, and a qubit with
//! both bits set carries Y. The string therefore supports up to 64 qubits,
//! far beyond the 16-qubit simulation guard.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Coefficients below this magnitude are dropped by [`PauliOperator::simplify`].
pub const ZERO_TOL: f64 = 1e-12;
/// Imaginary parts below this magnitude still count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis; identity factors are implicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliString {
    x: u64,
    z: u64,
}

/// `i^k` for `k` taken mod 4.
pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn single(qubit: usize, axis: Axis) -> Self {
        Self::IDENTITY.with(qubit, axis)
    }

    /// Builds a string from `(qubit, axis)` factors.
    ///
    /// Panics if a qubit index repeats or exceeds 63.
    pub fn from_factors<I: IntoIterator<Item = (usize, Axis)>>(factors: I) -> Self {
        let mut s = Self::IDENTITY;
        for (q, a) in factors {
            assert!(s.axis(q).is_none(), "qubit {q} appears twice in Pauli string");
            s = s.with(q, a);
        }
        s
    }

    /// Returns a copy with qubit `q` set to `axis`, replacing any existing factor.
    pub fn with(mut self, qubit: usize, axis: Axis) -> Self {
        assert!(qubit < 64, "Pauli strings support at most 64 qubits");
        let bit = 1u64 << qubit;
        let (xb, zb) = axis.bits();
        self.x = if xb { self.x | bit } else { self.x & !bit };
        self.z = if zb { self.z | bit } else { self.z & !bit };
        self
    }

    pub fn from_masks(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Qubits acted on non-trivially.
    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support_mask() == 0
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn axis(&self, qubit: usize) -> Option<Axis> {
        if qubit >= 64 {
            return None;
        }
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    /// Non-identity factors in ascending qubit order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, Axis)> + '_ {
        let mut rest = self.support_mask();
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let q = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((q, self.axis(q).expect("support bit set")))
        })
    }

    /// Highest qubit index acted on, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        let s = self.support_mask();
        (s != 0).then(|| 63 - s.leading_zeros() as usize)
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Action on a computational basis state: `P|b> = phase |b ^ flip>`.
    #[inline]
    pub fn apply_to_basis(&self, basis: usize) -> (Complex64, usize) {
        let b = basis as u64;
        let sign = (b & self.z).count_ones() % 2 == 1;
        let mut phase = i_pow(self.y_count());
        if sign {
            phase = -phase;
        }
        (phase, (b ^ self.x) as usize)
    }
}

/// Product of two Pauli strings: `a * b = phase * product`.
pub fn pauli_multiply(a: &PauliString, b: &PauliString) -> (Complex64, PauliString) {
    // P = i^{|x&z|} X^x Z^z; moving Z^{z_a} past X^{x_b} costs (-1)^{|z_a & x_b|}.
    let x = a.x ^ b.x;
    let z = a.z ^ b.z;
    let k = (a.x & a.z).count_ones() + (b.x & b.z).count_ones() + 2 * (a.z & b.x).count_ones();
    let k = (k + 4 * 64 - (x & z).count_ones()) % 4;
    (i_pow(k), PauliString { x, z })
}

impl Ord for PauliString {
    /// Lexicographic over the `(qubit, axis)` factor sequence; identity sorts first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.factors().cmp(other.factors())
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, a) in self.factors() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", a.symbol(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// Weighted sum of Pauli strings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliOperator {
    pub terms: Vec<(Complex64, PauliString)>,
}

impl PauliOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity(coeff: f64) -> Self {
        Self::from_term(Complex64::new(coeff, 0.0), PauliString::IDENTITY)
    }

    pub fn from_term(coeff: Complex64, string: PauliString) -> Self {
        Self { terms: vec![(coeff, string)] }
    }

    pub fn from_terms<I: IntoIterator<Item = (Complex64, PauliString)>>(terms: I) -> Self {
        Self { terms: terms.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merges duplicate strings, drops `|c| < 1e-12`, and sorts terms.
    pub fn simplify(&self) -> PauliOperator {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for &(c, s) in &self.terms {
            *acc.entry(s).or_default() += c;
        }
        PauliOperator {
            terms: acc
                .into_iter()
                .filter(|(_, c)| c.norm() >= ZERO_TOL)
                .map(|(s, c)| (c, s))
                .collect(),
        }
    }

    /// True when every simplified coefficient is real within 1e-10.
    pub fn is_hermitian(&self) -> bool {
        self.simplify().terms.iter().all(|(c, _)| c.im.abs() <= HERMITIAN_TOL)
    }

    /// One past the highest qubit index touched (0 for a pure constant).
    pub fn n_qubits(&self) -> usize {
        self.terms
            .iter()
            .filter_map(|(_, s)| s.max_qubit())
            .max()
            .map_or(0, |q| q + 1)
    }

    pub fn support_mask(&self) -> u64 {
        self.terms.iter().fold(0, |m, (_, s)| m | s.support_mask())
    }

    /// Coefficient of the identity string (after merging).
    pub fn constant(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|(_, s)| s.is_identity())
            .map(|(c, _)| *c)
            .sum()
    }

    pub fn scale(&self, k: Complex64) -> PauliOperator {
        PauliOperator { terms: self.terms.iter().map(|&(c, s)| (c * k, s)).collect() }
    }

    pub fn add(&self, other: &PauliOperator) -> PauliOperator {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        PauliOperator { terms }.simplify()
    }

    pub fn mul(&self, other: &PauliOperator) -> PauliOperator {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for &(ca, sa) in &self.terms {
            for &(cb, sb) in &other.terms {
                let (ph, s) = pauli_multiply(&sa, &sb);
                terms.push((ca * cb * ph, s));
            }
        }
        PauliOperator { terms }.simplify()
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &PauliOperator) -> PauliOperator {
        self.mul(other).add(&other.mul(self).scale(Complex64::new(-1.0, 0.0)))
    }

    /// Renders one term per line, e.g. `(-0.5+0j) Z0 X3`.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

fn fmt_coeff(c: Complex64) -> String {
    let sign = if c.im < 0.0 || (c.im == 0.0 && c.im.is_sign_negative()) { '-' } else { '+' };
    format!("({}{}{}j)", c.re, sign, c.im.abs())
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", fmt_coeff(*c))?;
            if !s.is_identity() {
                write!(f, " {s}")?;
            }
        }
        Ok(())
    }
}
