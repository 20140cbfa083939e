use serde::{Deserialize, Serialize};

use super::local_preparation;
use crate::boxes::{apply_box, BrunBoxConfig, NonlinearBox};
use crate::error::{Error, Result};
use crate::quantum::{born_probabilities, Povm};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub input: String,
    /// Expected two-bit output, e.g. `"01"`.
    pub target: String,
    /// Probabilities of `00, 01, 10, 11`.
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<VerificationRow>,
    pub tolerance: f64,
    pub identified: bool,
}

/// Feeds the four domain states to `b` as local deterministic preparations
/// and checks each lands on its target with probability `>= 1 - tol`.
/// Boxes without a Brun map are checked against the BB84 targets.
pub fn run_verification(b: &NonlinearBox, tol: f64) -> Result<VerificationReport> {
    let config = b.brun_config().cloned().unwrap_or_else(BrunBoxConfig::bb84);
    if b.input_dim() != 2 || b.output_dims().iter().product::<usize>() != 4 {
        return Err(Error::Shape("verification needs a qubit-to-two-qubit box".into()));
    }
    let measurement = Povm::computational(4)?;
    let mut rows = Vec::with_capacity(4);
    let mut identified = true;
    for (which, ket) in config.domain() {
        let prep = local_preparation(b, which.name(), ket)?;
        let probabilities = born_probabilities(&apply_box(b, &prep)?, &measurement)?;
        let (basis_bit, index_bit) = which.output_bits();
        identified &= probabilities[which.output_index()] >= 1.0 - tol;
        rows.push(VerificationRow {
            input: which.name().to_string(),
            target: format!("{basis_bit}{index_bit}"),
            probabilities,
        });
    }
    Ok(VerificationReport {
        rows,
        tolerance: tol,
        identified,
    })
}
