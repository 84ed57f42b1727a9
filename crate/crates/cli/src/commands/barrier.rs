use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;

use crate::args::{AnsatzArgs, OptimizerArgs};
use crate::failure::Failure;
use crate::manifest::HARTREE_TO_KCAL_PER_MOL;
use crate::output::{num, opt_num, Format, Report, Table};
use crate::problem::{solve, Point, Problem};

#[derive(Args, Debug, Serialize)]
pub struct BarrierArgs {
    #[arg(long, env = "HAA_REACTANT")]
    pub reactant: PathBuf,
    #[arg(long, env = "HAA_TRANSITION")]
    pub transition: PathBuf,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

fn point(path: &PathBuf, args: &BarrierArgs) -> Result<(Problem, Point), Failure> {
    let problem = Problem::load(path)?;
    let exact = problem.exact()?;
    let spec = args.ansatz.spec(problem.n_qubits(), Some(problem.n_electrons()))?;
    let p = solve(&problem, exact.as_ref(), &spec, &args.optimizer)?;
    Ok((problem, p))
}

/// Reactant and transition-state energies and the activation energy in kcal/mol.
pub fn run(args: &BarrierArgs) -> Result<Report, Failure> {
    let (pr, r) = point(&args.reactant, args)?;
    let (pt, t) = point(&args.transition, args)?;
    let barrier = (t.vqe.best_energy - r.vqe.best_energy) * HARTREE_TO_KCAL_PER_MOL;
    let exact_barrier = match (r.fci_energy, t.fci_energy) {
        (Some(a), Some(b)) => Some((b - a) * HARTREE_TO_KCAL_PER_MOL),
        _ => None,
    };
    let mut table = Table::new(&["state", "vqe_energy", "fci_energy", "abs_error", "purity"]);
    for (name, p) in [("reactant", &r), ("transition", &t)] {
        table.push(vec![name.into(), num(p.vqe.best_energy), opt_num(p.fci_energy), opt_num(p.error()), num(p.purity)]);
    }
    table.push(vec!["barrier_kcal_per_mol".into(), num(barrier), opt_num(exact_barrier), opt_num(exact_barrier.map(|e| (barrier - e).abs())), String::new()]);
    let result = json!({
        "reactant": r.summary(),
        "transition": t.summary(),
        "barrier_hartree": t.vqe.best_energy - r.vqe.best_energy,
        "barrier_kcal_per_mol": barrier,
        "fci_barrier_kcal_per_mol": exact_barrier,
    });
    Ok(Report::new(json!({ "command": args }), vec![pr.digest.clone(), pt.digest.clone()], result, table, Format::Json))
}
