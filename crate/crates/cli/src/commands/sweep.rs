use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{parse_range, AnsatzArgs, OptimizerArgs};
use crate::failure::Failure;
use crate::output::{num, opt_num, Format, Report, Table};
use crate::problem::{solve, Problem};

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(short = 'f', long, env = "HAA_FCIDUMP")]
    pub fcidump: PathBuf,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
    /// Ancilla counts as `min:max`.
    #[arg(long, env = "HAA_ANCILLA_RANGE", value_parser = parse_range, default_value = "1:4")]
    pub ancilla_range: RangeInclusive<usize>,
    /// Layer counts as `min:max`.
    #[arg(long, env = "HAA_LAYER_RANGE", value_parser = parse_range, default_value = "1:6")]
    pub layer_range: RangeInclusive<usize>,
}

pub const HEADER: [&str; 10] =
    ["n_ancilla", "layers", "n_params", "best_energy", "fci_energy", "abs_error", "purity", "fci_fidelity", "restarts_run", "status"];

pub fn run(args: &SweepArgs) -> Result<Report, Failure> {
    let problem = Problem::load(&args.fcidump)?;
    let exact = problem.exact()?;
    args.optimizer.vqe_config()?;
    let cells: Vec<(usize, usize)> =
        args.ancilla_range.clone().flat_map(|n| args.layer_range.clone().map(move |l| (n, l))).collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(n, l)| {
            let spec = args.ansatz.spec_with(problem.n_qubits(), n, l, Some(problem.n_electrons()))?;
            solve(&problem, exact.as_ref(), &spec, &args.optimizer)
        })
        .collect();

    let mut table = Table::new(&HEADER);
    let mut rows = Vec::new();
    for (&(n, l), res) in cells.iter().zip(results) {
        match res {
            Ok(p) => {
                table.push(vec![
                    n.to_string(),
                    l.to_string(),
                    p.n_params.to_string(),
                    num(p.vqe.best_energy),
                    opt_num(p.fci_energy),
                    opt_num(p.error()),
                    num(p.purity),
                    opt_num(p.fci_fidelity),
                    p.vqe.restarts.len().to_string(),
                    "ok".into(),
                ]);
                let mut s = p.summary();
                s["n_ancilla"] = json!(n);
                s["layers"] = json!(l);
                rows.push(s);
            }
            Err(e) => {
                let status = format!("error: {e}");
                let mut row = vec![n.to_string(), l.to_string()];
                row.extend(std::iter::repeat_n(String::new(), 7));
                row.push(status.clone());
                table.push(row);
                rows.push(json!({ "n_ancilla": n, "layers": l, "status": status }));
            }
        }
    }
    Ok(Report::new(json!({ "command": args }), vec![problem.digest.clone()], json!({ "cells": rows }), table, Format::Csv))
}
