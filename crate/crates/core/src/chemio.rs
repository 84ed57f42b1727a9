//! FCIDUMP ingestion and molecular Hamiltonian assembly.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{jordan_wigner, FermionOperator, Ladder, PauliOperator};

const DUPLICATE_TOL: f64 = 1e-8;

/// Spatial-orbital integrals in chemists' notation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolecularIntegrals {
    pub n_orb: usize,
    pub n_elec: usize,
    pub ms2: i64,
    pub e_core: f64,
    /// Row-major `n_orb × n_orb`.
    pub h: Vec<f64>,
    /// `(pq|rs)` at `((p·n + q)·n + r)·n + s`.
    pub eri: Vec<f64>,
}

impl MolecularIntegrals {
    pub fn zeros(n_orb: usize, n_elec: usize, ms2: i64) -> Self {
        Self { n_orb, n_elec, ms2, e_core: 0.0, h: vec![0.0; n_orb * n_orb], eri: vec![0.0; n_orb.pow(4)] }
    }

    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[p * self.n_orb + q]
    }

    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n_orb;
        self.eri[((p * n + q) * n + r) * n + s]
    }

    /// Sets `(pq|rs)` and its seven symmetry images.
    pub fn set_eri(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let n = self.n_orb;
        for (a, b, c, d) in eri_images(p, q, r, s) {
            self.eri[((a * n + b) * n + c) * n + d] = v;
        }
    }

    pub fn set_h(&mut self, p: usize, q: usize, v: f64) {
        let n = self.n_orb;
        self.h[p * n + q] = v;
        self.h[q * n + p] = v;
    }

    /// Relabels spatial orbitals: new orbital `perm[p]` is old orbital `p`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n_orb;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput(format!("{perm:?} is not a permutation of {n} orbitals")));
        }
        let mut out = Self { e_core: self.e_core, ..Self::zeros(n, self.n_elec, self.ms2) };
        for p in 0..n {
            for q in 0..n {
                out.h[perm[p] * n + perm[q]] = self.h(p, q);
                for r in 0..n {
                    for s in 0..n {
                        out.eri[((perm[p] * n + perm[q]) * n + perm[r]) * n + perm[s]] = self.eri(p, q, r, s);
                    }
                }
            }
        }
        Ok(out)
    }
}

fn eri_images(p: usize, q: usize, r: usize, s: usize) -> [(usize, usize, usize, usize); 8] {
    [(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r), (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)]
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Header fields of interest; ORBSYM and ISYM are read past and dropped.
fn parse_header(header: &str, line: usize) -> Result<(usize, usize, i64)> {
    let body = header.trim_start();
    let body = body
        .strip_prefix("&FCI")
        .or_else(|| body.strip_prefix("&fci"))
        .ok_or_else(|| parse_err(1, "header must start with &FCI"))?;
    let (mut norb, mut nelec, mut ms2) = (None, None, None);
    for token in body.split([',', '\n', '\r']) {
        let Some((key, value)) = token.split_once('=') else { continue };
        let value = value.trim();
        let bad = || parse_err(line, format!("bad value {value:?} for {}", key.trim()));
        match key.trim().to_ascii_uppercase().as_str() {
            "NORB" => norb = Some(value.parse::<usize>().map_err(|_| bad())?),
            "NELEC" => nelec = Some(value.parse::<usize>().map_err(|_| bad())?),
            "MS2" => ms2 = Some(value.parse::<i64>().map_err(|_| bad())?),
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| parse_err(line, "header lacks NORB"))?;
    let nelec = nelec.ok_or_else(|| parse_err(line, "header lacks NELEC"))?;
    if norb == 0 {
        return Err(parse_err(line, "NORB must be positive"));
    }
    Ok((norb, nelec, ms2.unwrap_or(0)))
}

fn parse_value(s: &str) -> Option<f64> {
    s.replace(['D', 'd'], "E").parse().ok()
}

/// Parses Molpro FCIDUMP text (`&FCI … &END` or `/` terminated header).
pub fn parse_fcidump(text: &str) -> Result<MolecularIntegrals> {
    let mut lines = text.lines().enumerate();
    let mut header = String::new();
    let mut header_end = 0;
    loop {
        let Some((i, line)) = lines.next() else {
            return Err(parse_err(header_end + 1, "unterminated header"));
        };
        header_end = i + 1;
        let t = line.trim();
        let upper = t.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END") {
            header.push_str(&t[..pos]);
            break;
        }
        if t == "/" || (t.ends_with('/') && !header.is_empty()) {
            header.push_str(t.trim_end_matches('/'));
            break;
        }
        header.push_str(t);
        header.push('\n');
    }
    let (n, n_elec, ms2) = parse_header(&header, header_end)?;
    let mut ints = MolecularIntegrals::zeros(n, n_elec, ms2);
    let mut eri_set = vec![false; n.pow(4)];
    let mut h_set = vec![false; n * n];
    let mut core_set = false;
    for (i, line) in lines {
        let ln = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(parse_err(ln, format!("expected `value i j k l`, found {} fields", fields.len())));
        }
        let v = parse_value(fields[0]).ok_or_else(|| parse_err(ln, format!("bad value {:?}", fields[0])))?;
        let mut idx = [0usize; 4];
        for (k, f) in fields[1..].iter().enumerate() {
            idx[k] = f.parse().map_err(|_| parse_err(ln, format!("bad index {f:?}")))?;
            if idx[k] > n {
                return Err(parse_err(ln, format!("index {} outside [1, {n}]", idx[k])));
            }
        }
        let conflict = |old: f64| (old - v).abs() > DUPLICATE_TOL;
        match idx {
            [0, 0, 0, 0] => {
                if core_set && conflict(ints.e_core) {
                    return Err(parse_err(ln, "conflicting core energy records"));
                }
                ints.e_core = v;
                core_set = true;
            }
            [p, q, 0, 0] if p > 0 && q > 0 => {
                let (p, q) = (p - 1, q - 1);
                if h_set[p * n + q] && conflict(ints.h(p, q)) {
                    return Err(parse_err(ln, format!("conflicting duplicate for h({}, {})", p + 1, q + 1)));
                }
                ints.set_h(p, q, v);
                h_set[p * n + q] = true;
                h_set[q * n + p] = true;
            }
            [p, q, r, s] if p > 0 && q > 0 && r > 0 && s > 0 => {
                let (p, q, r, s) = (p - 1, q - 1, r - 1, s - 1);
                let flat = ((p * n + q) * n + r) * n + s;
                if eri_set[flat] && conflict(ints.eri[flat]) {
                    return Err(parse_err(ln, format!("conflicting duplicate for ({} {}|{} {})", p + 1, q + 1, r + 1, s + 1)));
                }
                ints.set_eri(p, q, r, s, v);
                for (a, b, c, d) in eri_images(p, q, r, s) {
                    eri_set[((a * n + b) * n + c) * n + d] = true;
                }
            }
            _ => return Err(parse_err(ln, format!("index pattern {idx:?} is not a valid record"))),
        }
    }
    Ok(ints)
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<MolecularIntegrals> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.as_ref().display())))?;
    parse_fcidump(&text)
}

/// Writes integrals in FCIDUMP form, one record per symmetry-unique non-zero value.
pub fn render_fcidump(ints: &MolecularIntegrals) -> String {
    let n = ints.n_orb;
    let mut out = String::new();
    writeln!(out, " &FCI NORB={n},NELEC={},MS2={},", ints.n_elec, ints.ms2).unwrap();
    writeln!(out, "  ORBSYM={}", "1,".repeat(n)).unwrap();
    writeln!(out, "  ISYM=1,\n &END").unwrap();
    let pair = |a: usize, b: usize| a * (a + 1) / 2 + b;
    for p in 0..n {
        for q in 0..=p {
            for r in 0..n {
                for s in 0..=r {
                    let v = ints.eri(p, q, r, s);
                    if pair(p, q) >= pair(r, s) && v != 0.0 {
                        writeln!(out, "{v:.17e} {} {} {} {}", p + 1, q + 1, r + 1, s + 1).unwrap();
                    }
                }
            }
        }
    }
    for p in 0..n {
        for q in 0..=p {
            if ints.h(p, q) != 0.0 {
                writeln!(out, "{:.17e} {} {} 0 0", ints.h(p, q), p + 1, q + 1).unwrap();
            }
        }
    }
    writeln!(out, "{:.17e} 0 0 0 0", ints.e_core).unwrap();
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MolecularHamiltonian {
    pub integrals: MolecularIntegrals,
    pub fermion_op: FermionOperator,
    pub qubit_op: PauliOperator,
    pub n_qubits: usize,
}

/// Second-quantized Hamiltonian over interleaved spin orbitals (`2p` = α, `2p+1` = β):
///
/// `H = e_core + Σ h_pq a†_P a_Q + ½ Σ ⟨PQ|RS⟩ a†_P a†_Q a_R a_S`
///
/// with `⟨PQ|RS⟩ = (ps|qr) δ(σ_P, σ_S) δ(σ_Q, σ_R)`.
pub fn assemble(ints: &MolecularIntegrals) -> Result<MolecularHamiltonian> {
    let n = ints.n_orb;
    let n_so = 2 * n;
    let mut op = FermionOperator::constant(ints.e_core);
    for p in 0..n {
        for q in 0..n {
            let v = ints.h(p, q);
            if v == 0.0 {
                continue;
            }
            for sigma in 0..2 {
                op.push(v, vec![Ladder::create(2 * p + sigma), Ladder::annihilate(2 * q + sigma)]);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = 0.5 * ints.eri(p, s, q, r);
                    if v == 0.0 {
                        continue;
                    }
                    for a in 0..2 {
                        for b in 0..2 {
                            let (pp, qq, rr, ss) = (2 * p + a, 2 * q + b, 2 * r + b, 2 * s + a);
                            if pp == qq || rr == ss {
                                continue;
                            }
                            op.push(
                                v,
                                vec![Ladder::create(pp), Ladder::create(qq), Ladder::annihilate(rr), Ladder::annihilate(ss)],
                            );
                        }
                    }
                }
            }
        }
    }
    let qubit_op = jordan_wigner(&op, n_so)?.simplify();
    // imaginary parts come only from rounding in the mapping
    let qubit_op = PauliOperator::from_terms(qubit_op.terms.into_iter().map(|(c, s)| (Complex64::new(c.re, 0.0), s))).simplify();
    Ok(MolecularHamiltonian { integrals: ints.clone(), fermion_op: op, qubit_op, n_qubits: n_so })
}
