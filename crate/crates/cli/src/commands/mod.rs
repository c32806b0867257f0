pub mod bounds;
pub mod lattice;
pub mod search;
pub mod sumset;
pub mod verify;

use addbasis_core::{ElementMultiset, Error, GroupSpec};
use serde_json::Value;

use crate::error::CliError;

/// What a command hands back to the runner.
pub struct Outcome {
    pub input_digest: String,
    pub outputs: Value,
    /// Exit status to use after the report is written (0 unless a
    /// verification failed).
    pub exit: u8,
    /// Optional CSV rows, header first.
    pub csv: Option<Vec<Vec<String>>>,
}

impl Outcome {
    pub fn ok(input_digest: String, outputs: Value) -> Self {
        Outcome {
            input_digest,
            outputs,
            exit: 0,
            csv: None,
        }
    }
}

pub fn multisets(g: &GroupSpec, sets: &[Vec<Vec<i64>>]) -> Result<Vec<ElementMultiset>, CliError> {
    sets.iter()
        .map(|s| ElementMultiset::from_coords(g, s).map_err(CliError::from))
        .collect()
}

pub fn residues_i64(rows: &[Vec<u64>]) -> Vec<Vec<i64>> {
    rows.iter().map(|v| v.iter().map(|&x| x as i64).collect()).collect()
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::from(Error::InvalidArgument(msg.into()))
}
