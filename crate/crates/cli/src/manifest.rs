use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Chemical accuracy in Hartree (1 kcal/mol rounded up).
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;
pub const HARTREE_TO_KCAL_PER_MOL: f64 = 627.509_474_063_1;
/// Bumped whenever a CSV header changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(path: &Path, bytes: &[u8]) -> Self {
        Self { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub wall_seconds: f64,
}

/// Provenance record written with every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub inputs: Vec<InputDigest>,
    pub chemical_accuracy_hartree: f64,
    pub timings: Timings,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, inputs: Vec<InputDigest>, started: Instant) -> Self {
        Self {
            tool: "haa",
            version: env!("CARGO_PKG_VERSION"),
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            inputs,
            chemical_accuracy_hartree: CHEMICAL_ACCURACY,
            timings: Timings { wall_seconds: started.elapsed().as_secs_f64() },
        }
    }
}
