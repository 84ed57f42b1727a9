use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::args::{AnsatzArgs, OptimizerArgs};
use crate::failure::Failure;
use crate::manifest::CHEMICAL_ACCURACY;
use crate::output::{num, opt_num, Format, Report, Table};
use crate::problem::{solve, Problem};

pub const MAX_LAYERS: usize = 30;

#[derive(Args, Debug, Serialize)]
pub struct MinLayersArgs {
    #[arg(short = 'f', long, env = "HAA_FCIDUMP")]
    pub fcidump: PathBuf,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    #[arg(long, env = "HAA_MAX_LAYERS", default_value_t = 10)]
    pub max_layers: usize,
    /// Run every restart at every depth instead of stopping at the first accurate one.
    #[arg(long, env = "HAA_EXHAUSTIVE")]
    pub exhaustive: bool,
}

pub fn run(args: &MinLayersArgs) -> Result<Report, Failure> {
    if args.max_layers == 0 || args.max_layers > MAX_LAYERS {
        return Err(Failure::usage(format!("--max-layers must be in 1..={MAX_LAYERS}")));
    }
    let problem = Problem::load(&args.fcidump)?;
    let exact = problem.exact()?.ok_or_else(|| Failure::usage("min-layers needs an input within the exact-solver guard"))?;
    let mut opt = args.optimizer.clone();
    if !args.exhaustive {
        opt.target_error = Some(opt.target_error.unwrap_or(CHEMICAL_ACCURACY).min(CHEMICAL_ACCURACY));
    }

    let mut table = Table::new(&["layers", "n_params", "best_energy", "fci_energy", "abs_error", "purity", "restarts_run", "chemically_accurate"]);
    let mut rows = Vec::new();
    let mut found = None;
    for layers in 1..=args.max_layers {
        let spec = args.ansatz.spec_with(problem.n_qubits(), args.ansatz.ancilla_count(), layers, Some(problem.n_electrons()))?;
        let p = solve(&problem, Some(&exact), &spec, &opt)?;
        let ok = p.chemically_accurate() == Some(true);
        table.push(vec![
            layers.to_string(),
            p.n_params.to_string(),
            num(p.vqe.best_energy),
            opt_num(p.fci_energy),
            opt_num(p.error()),
            num(p.purity),
            p.vqe.restarts.len().to_string(),
            ok.to_string(),
        ]);
        let mut s = p.summary();
        s["layers"] = json!(layers);
        rows.push(s);
        if ok {
            found = Some(layers);
            break;
        }
    }
    let message = match found {
        Some(l) => format!("chemical accuracy reached with {l} layer(s)"),
        None => format!("not found <= {}", args.max_layers),
    };
    let result = json!({
        "ansatz": args.ansatz.ansatz,
        "n_ancilla": args.ansatz.ancilla_count(),
        "max_layers": args.max_layers,
        "fci_energy": exact.energy,
        "min_layers": found,
        "found": found.is_some(),
        "message": message,
        "table": rows,
    });
    Ok(Report::new(json!({ "command": args, "vqe": opt.vqe_config()? }), vec![problem.digest.clone()], result, table, Format::Json))
}
