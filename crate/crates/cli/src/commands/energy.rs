use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::Args;
use haa_core::exact::configuration_table;
use serde::Serialize;
use serde_json::json;

use crate::args::{AnsatzArgs, OptimizerArgs};
use crate::failure::Failure;
use crate::output::{num, Format, Report, Table};
use crate::problem::{solve, Problem};

#[derive(Args, Debug, Serialize)]
pub struct EnergyArgs {
    #[arg(short = 'f', long, env = "HAA_FCIDUMP")]
    pub fcidump: PathBuf,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Also write the configuration coefficients of the optimized and exact states here.
    #[arg(long, env = "HAA_CONFIGURATIONS")]
    pub configurations: Option<PathBuf>,
}

pub fn run(args: &EnergyArgs) -> Result<Report, Failure> {
    let problem = Problem::load(&args.fcidump)?;
    let exact = problem.exact()?;
    let spec = args.ansatz.spec(problem.n_qubits(), Some(problem.n_electrons()))?;
    let point = solve(&problem, exact.as_ref(), &spec, &args.optimizer)?;

    let mut table = Table::new(&["restart", "seed", "status", "energy", "loss", "iterations", "gradient_norm"]);
    let restarts = point.restarts();
    for r in &restarts {
        table.push(vec![
            r.index.to_string(),
            r.seed.to_string(),
            r.status.clone(),
            num(r.energy),
            num(r.loss),
            r.iterations.to_string(),
            num(r.gradient_norm),
        ]);
    }

    let mut result = point.summary();
    result["restarts"] = json!(restarts);
    result["best_params"] = json!(point.vqe.best_params);

    let mut report = Report::new(
        json!({ "command": args, "vqe": args.optimizer.vqe_config()?, "ansatz_spec": spec }),
        vec![problem.digest.clone()],
        json!(null),
        table,
        Format::Json,
    );
    if let (Some(path), Some(gs)) = (&args.configurations, &exact) {
        // near-pure outputs are compared through their dominant eigenvector
        let (weight, psi) = point.rho.dominant_eigenvector();
        let sector = problem.sector();
        let vqe = configuration_table(&psi, &sector);
        let fci = configuration_table(&gs.state, &sector);
        let mut t = Table::new(&["index", "bitstring", "vqe_coefficient", "fci_coefficient", "deviation"]);
        let indices: BTreeSet<usize> = vqe.entries.iter().chain(&fci.entries).map(|e| e.index).collect();
        let width = problem.n_qubits();
        for i in indices {
            let (v, f) = (vqe.coefficient(i), fci.coefficient(i));
            t.push(vec![i.to_string(), format!("{i:0width$b}"), num(v), num(f), num((v - f).abs())]);
        }
        result["configurations"] = json!({
            "path": path.display().to_string(),
            "dominant_weight": weight,
            "max_deviation": vqe.max_deviation(&fci),
            "sector_dim": gs.sector_dim,
        });
        report.attachments.push((path.clone(), t));
    }
    report.result = result;
    Ok(report)
}
