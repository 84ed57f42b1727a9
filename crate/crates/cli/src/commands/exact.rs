use std::path::PathBuf;

use clap::{Args, ValueEnum};
use haa_core::exact::{configuration_table, ground_state, SectorConstraint};
use serde::Serialize;
use serde_json::json;

use crate::failure::Failure;
use crate::output::{num, Format, Report, Table};
use crate::problem::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorChoice {
    /// Whole Fock space.
    Full,
    /// Fixed electron number.
    Electrons,
    /// Fixed electron number and S_z = MS2/2.
    Spin,
}

#[derive(Args, Debug, Serialize)]
pub struct ExactArgs {
    #[arg(short = 'f', long, env = "HAA_FCIDUMP")]
    pub fcidump: PathBuf,
    #[arg(long, env = "HAA_SECTOR", value_enum, default_value = "spin")]
    pub sector: SectorChoice,
}

pub fn run(args: &ExactArgs) -> Result<Report, Failure> {
    let problem = Problem::load(&args.fcidump)?;
    let sector = match args.sector {
        SectorChoice::Full => SectorConstraint::none(),
        SectorChoice::Electrons => SectorConstraint::electrons(problem.n_electrons()),
        SectorChoice::Spin => problem.sector(),
    };
    let gs = ground_state(&problem.hamiltonian.qubit_op, problem.n_qubits(), &sector)?;
    let configs = configuration_table(&gs.state, &sector);
    let mut table = Table::new(&["index", "bitstring", "coefficient"]);
    for e in &configs.entries {
        table.push(vec![e.index.to_string(), e.bitstring.clone(), num(e.coefficient)]);
    }
    let result = json!({
        "energy": gs.energy,
        "residual": gs.residual,
        "sector_dim": gs.sector_dim,
        "n_qubits": problem.n_qubits(),
        "n_electrons": problem.n_electrons(),
        "configurations": configs.entries,
    });
    Ok(Report::new(json!({ "command": args }), vec![problem.digest.clone()], result, table, Format::Json))
}
