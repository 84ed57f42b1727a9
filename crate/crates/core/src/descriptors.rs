//! Circuit descriptors: expressibility against the Haar fidelity law,
//! gradient variance of the first parameter, and state purity.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::engine::{fidelity, output_state, partial_derivative, run_pure, uhlmann_fidelity, CompiledObservable, DensityMatrix};
use crate::error::{Error, Result};
use crate::operators::{Axis, PauliOperator, PauliString};

/// Probability floor applied to Haar bin masses.
pub const HAAR_FLOOR: f64 = 1e-18;

/// Register on which fidelities are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityTarget {
    /// Pure-state fidelity over system plus ancilla qubits (unitary circuits only).
    Full,
    /// Uhlmann fidelity between reduced system-register states.
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressibilityConfig {
    pub n_pairs: usize,
    pub n_bins: usize,
    pub target: FidelityTarget,
    pub seed: u64,
    pub bootstrap: usize,
}

impl Default for ExpressibilityConfig {
    fn default() -> Self {
        Self { n_pairs: 5000, n_bins: 75, target: FidelityTarget::Reduced, seed: 0, bootstrap: 200 }
    }
}

impl ExpressibilityConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pairs < 100 || self.n_bins < 10 {
            return Err(Error::InvalidInput("expressibility needs n_pairs >= 100 and n_bins >= 10".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorResult {
    pub d_kl: f64,
    /// Bootstrap standard deviation of `d_kl`.
    pub d_kl_std: f64,
    pub histogram: Vec<f64>,
    pub haar_reference: Vec<f64>,
    pub n_effective_dim: usize,
    pub n_pairs: usize,
}

/// Haar probability of each of `n_bins` equal fidelity bins for dimension `dim`:
/// `(1 − F_lo)^{N−1} − (1 − F_hi)^{N−1}`.
pub fn haar_bin_masses(n_bins: usize, dim: usize) -> Vec<f64> {
    let k = (dim - 1) as i32;
    (0..n_bins)
        .map(|b| {
            let (lo, hi) = (b as f64 / n_bins as f64, (b + 1) as f64 / n_bins as f64);
            (1.0 - lo).powi(k) - (1.0 - hi).powi(k)
        })
        .collect()
}

pub fn histogram(fidelities: &[f64], n_bins: usize) -> Vec<f64> {
    let mut h = vec![0.0; n_bins];
    for &f in fidelities {
        let b = ((f.clamp(0.0, 1.0) * n_bins as f64) as usize).min(n_bins - 1);
        h[b] += 1.0;
    }
    let n = fidelities.len() as f64;
    h.iter_mut().for_each(|x| *x /= n);
    h
}

/// `Σ p ln(p/q)`, empty bins contribute nothing and `q` is floored.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(pb, _)| **pb > 0.0)
        .map(|(pb, qb)| pb * (pb / qb.max(HAAR_FLOOR)).ln())
        .sum::<f64>()
        .max(0.0)
}

fn bootstrap_std(samples: &[f64], resamples: usize, seed: u64, stat: impl Fn(&[f64]) -> f64) -> f64 {
    if resamples < 2 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xb007_57a9);
    let mut buf = vec![0.0; samples.len()];
    let values: Vec<f64> = (0..resamples)
        .map(|_| {
            buf.iter_mut().for_each(|x| *x = samples[rng.random_range(0..samples.len())]);
            stat(&buf)
        })
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64).sqrt()
}

/// D_KL of a fidelity sample against the Haar law for dimension `dim`.
pub fn expressibility_from_fidelities(fidelities: &[f64], n_bins: usize, dim: usize, bootstrap: usize, seed: u64) -> DescriptorResult {
    let q = haar_bin_masses(n_bins, dim);
    let p = histogram(fidelities, n_bins);
    let d_kl = kl_divergence(&p, &q);
    let d_kl_std = bootstrap_std(fidelities, bootstrap, seed, |s| kl_divergence(&histogram(s, n_bins), &q));
    DescriptorResult { d_kl, d_kl_std, histogram: p, haar_reference: q, n_effective_dim: dim, n_pairs: fidelities.len() }
}

/// Per-sample generator: stream `index` of the ChaCha generator seeded by `seed`.
fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn uniform_params(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..TAU)).collect()
}

/// Fidelities of `n_pairs` independently sampled parameter pairs.
pub fn sample_fidelities(c: &Circuit, cfg: &ExpressibilityConfig) -> Result<Vec<f64>> {
    let reduced = cfg.target == FidelityTarget::Reduced || c.channel;
    // without ancillas the reduced state is the pure system state
    let pure = !c.channel && (!reduced || c.n_ancilla == 0);
    (0..cfg.n_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(cfg.seed, i);
            let (a, b) = (uniform_params(&mut rng, c.n_params), uniform_params(&mut rng, c.n_params));
            if pure {
                fidelity(&run_pure(c, &a)?, &run_pure(c, &b)?)
            } else {
                uhlmann_fidelity(&output_state(c, &a)?, &output_state(c, &b)?)
            }
        })
        .collect()
}

/// Expressibility of a circuit started from its reference state.
pub fn expressibility(c: &Circuit, cfg: &ExpressibilityConfig) -> Result<DescriptorResult> {
    cfg.validate()?;
    let reduced = cfg.target == FidelityTarget::Reduced || c.channel;
    let qubits = if reduced { c.n_system } else { c.width() };
    let fids = sample_fidelities(c, cfg)?;
    Ok(expressibility_from_fidelities(&fids, cfg.n_bins, 1 << qubits, cfg.bootstrap, cfg.seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientVariance {
    /// Unbiased sample variance of `∂E/∂θ₀`.
    pub variance: f64,
    pub mean: f64,
    /// Bootstrap standard deviation of `variance`.
    pub variance_std: f64,
    pub n_samples: usize,
}

fn unbiased_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Default probe observable `Z₀Z₁`.
pub fn default_probe() -> PauliOperator {
    PauliOperator::from_term(Complex64::new(1.0, 0.0), PauliString::from_factors([(0, Axis::Z), (1, Axis::Z)]))
}

/// Variance of the first-parameter derivative over uniform parameter draws.
pub fn gradient_variance(c: &Circuit, obs: &PauliOperator, n_samples: usize, seed: u64, bootstrap: usize) -> Result<GradientVariance> {
    if n_samples < 100 {
        return Err(Error::InvalidInput("gradient variance needs at least 100 samples".into()));
    }
    if c.n_params == 0 {
        return Err(Error::InvalidInput("circuit has no parameters".into()));
    }
    let obs = CompiledObservable::new(obs)?;
    let grads: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| partial_derivative(c, &uniform_params(&mut sample_rng(seed, i), c.n_params), &obs, 0))
        .collect::<Result<_>>()?;
    Ok(GradientVariance {
        variance: unbiased_variance(&grads),
        mean: grads.iter().sum::<f64>() / n_samples as f64,
        variance_std: bootstrap_std(&grads, bootstrap, seed, unbiased_variance),
        n_samples,
    })
}

/// `tr(ρ²)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Angle, Gate, GateKind};
    use crate::engine::StateVector;

    #[test]
    fn haar_masses_sum_to_one() {
        for dim in [2, 4, 16, 1024] {
            let s: f64 = haar_bin_masses(75, dim).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!((haar_bin_masses(75, 2)[74] - 1.0 / 75.0).abs() < 1e-15);
    }

    #[test]
    fn parameterless_single_qubit_circuit() {
        let c = Circuit::new(1, 0, 0, vec![], false, vec![]).unwrap();
        let cfg = ExpressibilityConfig { n_pairs: 200, ..Default::default() };
        let r = expressibility(&c, &cfg).unwrap();
        assert!((r.d_kl - 75f64.ln()).abs() < 1e-12, "{}", r.d_kl);
        assert!((r.histogram.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(r.n_effective_dim, 2);
    }

    #[test]
    fn haar_samples_have_small_divergence() {
        // F ~ Beta(1, N − 1) for Haar-random pure states
        let dim = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fids: Vec<f64> = (0..5000).map(|_| 1.0 - rng.random::<f64>().powf(1.0 / (dim - 1) as f64)).collect();
        let r = expressibility_from_fidelities(&fids, 75, dim, 50, 0);
        assert!(r.d_kl < 0.05, "{}", r.d_kl);
    }

    #[test]
    fn empty_bins_and_floor() {
        assert_eq!(kl_divergence(&[0.0, 1.0], &[1.0, 0.0]), (1.0 / HAAR_FLOOR).ln());
        assert_eq!(kl_divergence(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
    }

    fn rx() -> Circuit {
        Circuit::new(1, 0, 1, vec![], false, vec![Gate::new(GateKind::Rx { theta: Angle::param(0) }, vec![0])]).unwrap()
    }

    #[test]
    fn rx_gradient_variance_is_half() {
        let z = PauliOperator::from_term(Complex64::new(1.0, 0.0), PauliString::single(0, Axis::Z));
        let g = gradient_variance(&rx(), &z, 2000, 3, 20).unwrap();
        assert!((g.variance - 0.5).abs() < 0.05, "{}", g.variance);
    }

    #[test]
    fn constant_observable_has_zero_variance() {
        let g = gradient_variance(&rx(), &PauliOperator::identity(2.5), 100, 0, 10).unwrap();
        assert_eq!((g.variance, g.mean), (0.0, 0.0));
        assert!(gradient_variance(&rx(), &PauliOperator::identity(1.0), 99, 0, 0).is_err());
    }

    #[test]
    fn purity_examples() {
        let psi = StateVector::from_amplitudes(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        assert!((purity(&DensityMatrix::from_pure(&psi)) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(1)) - 0.5).abs() < 1e-15);
    }
}
