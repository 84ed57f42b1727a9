use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use haa_core::circuit::{build_ansatz, AnsatzFamily};
use haa_core::descriptors::{default_probe, expressibility, gradient_variance, ExpressibilityConfig, FidelityTarget};
use haa_core::operators::{Axis, PauliOperator, PauliString};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::args::{parse_range, AnsatzArgs};
use crate::failure::Failure;
use crate::output::{num, Format, Report, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetChoice {
    Full,
    Reduced,
}

#[derive(Args, Debug, Serialize)]
pub struct DescriptorArgs {
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[arg(long, env = "HAA_SYSTEM", default_value_t = 4)]
    pub system: usize,
    /// Reference filling; UCCSD defaults to half filling, other families to the empty register.
    #[arg(long, env = "HAA_ELECTRONS")]
    pub electrons: Option<usize>,
    /// Ancilla counts as `min:max` (default: the --ancilla value).
    #[arg(long, env = "HAA_ANCILLA_RANGE", value_parser = parse_range)]
    pub ancilla_range: Option<RangeInclusive<usize>>,
    /// Layer counts as `min:max` (default: the --layers value).
    #[arg(long, env = "HAA_LAYER_RANGE", value_parser = parse_range)]
    pub layer_range: Option<RangeInclusive<usize>>,
    #[arg(long, env = "HAA_PAIRS", default_value_t = 5000)]
    pub pairs: usize,
    #[arg(long, env = "HAA_BINS", default_value_t = 75)]
    pub bins: usize,
    /// Gradient samples; 0 skips the gradient variance.
    #[arg(long, env = "HAA_SAMPLES", default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, env = "HAA_BOOTSTRAP", default_value_t = 200)]
    pub bootstrap: usize,
    #[arg(long, env = "HAA_TARGET", value_enum, default_value = "reduced")]
    pub target: TargetChoice,
    #[arg(long, env = "HAA_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Also write per-bin histograms and Haar masses here.
    #[arg(long, env = "HAA_HISTOGRAMS")]
    pub histograms: Option<PathBuf>,
}

pub const HEADER: [&str; 10] =
    ["family", "n_ancilla", "layers", "n_params", "d_kl", "d_kl_std", "grad_variance", "grad_variance_std", "n_samples", "seed"];

/// `Z₀Z₁`, or `Z₀` on a single qubit.
fn probe(n_system: usize) -> PauliOperator {
    if n_system >= 2 {
        default_probe()
    } else {
        PauliOperator::from_term(Complex64::new(1.0, 0.0), PauliString::single(0, Axis::Z))
    }
}

pub fn run(args: &DescriptorArgs) -> Result<Report, Failure> {
    let cfg = ExpressibilityConfig {
        n_pairs: args.pairs,
        n_bins: args.bins,
        target: match args.target {
            TargetChoice::Full => FidelityTarget::Full,
            TargetChoice::Reduced => FidelityTarget::Reduced,
        },
        seed: args.seed,
        bootstrap: args.bootstrap,
    };
    cfg.validate()?;
    let fixed_width = matches!(args.ansatz.ansatz, AnsatzFamily::Hea | AnsatzFamily::Uccsd);
    let ancillas = match (&args.ancilla_range, fixed_width) {
        (_, true) => 0..=0,
        (Some(r), false) => r.clone(),
        (None, false) => args.ansatz.ancilla_count()..=args.ansatz.ancilla_count(),
    };
    let layers = args.layer_range.clone().unwrap_or(args.ansatz.layers..=args.ansatz.layers);
    let layers = if args.ansatz.ansatz == AnsatzFamily::Uccsd { 1..=1 } else { layers };

    let mut table = Table::new(&HEADER);
    let mut hist = Table::new(&["family", "n_ancilla", "layers", "bin", "lower", "upper", "probability", "haar_probability"]);
    for n in ancillas {
        for l in layers.clone() {
            let spec = args.ansatz.spec_with(args.system, n, l, args.electrons)?;
            let c = build_ansatz(&spec)?;
            let d = expressibility(&c, &cfg)?;
            let g = if args.samples > 0 && c.n_params > 0 {
                Some(gradient_variance(&c, &probe(args.system), args.samples, args.seed, args.bootstrap)?)
            } else {
                None
            };
            let family = spec.family.to_string();
            table.push(vec![
                family.clone(),
                n.to_string(),
                l.to_string(),
                c.n_params.to_string(),
                num(d.d_kl),
                num(d.d_kl_std),
                num(g.as_ref().map_or(f64::NAN, |g| g.variance)),
                num(g.as_ref().map_or(f64::NAN, |g| g.variance_std)),
                g.as_ref().map_or(0, |g| g.n_samples).to_string(),
                args.seed.to_string(),
            ]);
            for (b, (p, q)) in d.histogram.iter().zip(&d.haar_reference).enumerate() {
                let w = 1.0 / args.bins as f64;
                hist.push(vec![family.clone(), n.to_string(), l.to_string(), b.to_string(), num(b as f64 * w), num((b + 1) as f64 * w), num(*p), num(*q)]);
            }
        }
    }
    let result = json!({ "rows": table.to_json() });
    let mut report = Report::new(json!({ "command": args }), Vec::new(), result, table, Format::Csv);
    if let Some(p) = &args.histograms {
        report.attachments.push((p.clone(), hist));
    }
    Ok(report)
}
