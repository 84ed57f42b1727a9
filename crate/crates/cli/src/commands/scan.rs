use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::args::{AnsatzArgs, OptimizerArgs};
use crate::failure::Failure;
use crate::output::{num, opt_num, Format, Report, Table};
use crate::problem::{solve, Point, Problem};

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Directory of `*.fcidump` files named by a sortable geometry key, e.g. `r0.70.fcidump`.
    #[arg(long, env = "HAA_DIR")]
    pub dir: PathBuf,
    #[command(flatten)]
    pub ansatz: AnsatzArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

pub const HEADER: [&str; 8] = ["key", "vqe_energy", "fci_energy", "abs_error", "purity", "status", "file", "n_params"];

/// Numeric value of a key like `r0.70`, if there is one.
fn numeric_key(key: &str) -> Option<f64> {
    key.trim_start_matches(|c: char| !c.is_ascii_digit() && c != '.' && c != '-').parse().ok()
}

/// `*.fcidump` files ordered by numeric key, then by name.
pub fn list_inputs(dir: &Path) -> Result<Vec<(String, PathBuf)>, Failure> {
    let entries = std::fs::read_dir(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<(String, PathBuf)> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("fcidump")))
        .filter_map(|p| Some((p.file_stem()?.to_string_lossy().into_owned(), p)))
        .collect();
    files.sort_by(|a, b| match (numeric_key(&a.0), numeric_key(&b.0)) {
        (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.0.cmp(&b.0)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.0.cmp(&b.0),
    });
    Ok(files)
}

fn point(path: &Path, args: &ScanArgs) -> Result<(Problem, Point), Failure> {
    let problem = Problem::load(path)?;
    let exact = problem.exact()?;
    let spec = args.ansatz.spec(problem.n_qubits(), Some(problem.n_electrons()))?;
    let p = solve(&problem, exact.as_ref(), &spec, &args.optimizer)?;
    Ok((problem, p))
}

pub fn run(args: &ScanArgs) -> Result<Report, Failure> {
    // flag errors should stop the scan rather than fill it with error rows
    args.optimizer.vqe_config()?;
    let files = list_inputs(&args.dir)?;
    let results: Vec<_> = files.par_iter().map(|(_, path)| point(path, args)).collect();

    let mut table = Table::new(&HEADER);
    let mut inputs = Vec::new();
    let mut rows = Vec::new();
    for ((key, path), res) in files.iter().zip(results) {
        let file = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        match res {
            Ok((problem, p)) => {
                inputs.push(problem.digest.clone());
                table.push(vec![
                    key.clone(),
                    num(p.vqe.best_energy),
                    opt_num(p.fci_energy),
                    opt_num(p.error()),
                    num(p.purity),
                    "ok".into(),
                    file.clone(),
                    p.n_params.to_string(),
                ]);
                let mut s = p.summary();
                s["key"] = json!(key);
                s["status"] = json!("ok");
                rows.push(s);
            }
            Err(e) => {
                if let Ok(bytes) = std::fs::read(path) {
                    inputs.push(crate::manifest::InputDigest::new(path, &bytes));
                }
                let status = format!("error: {e}");
                table.push(vec![key.clone(), String::new(), String::new(), String::new(), String::new(), status.clone(), file, String::new()]);
                rows.push(json!({ "key": key, "status": status }));
            }
        }
    }
    Ok(Report::new(json!({ "command": args }), inputs, json!({ "points": rows }), table, Format::Csv))
}
