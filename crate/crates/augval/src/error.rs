use thiserror::Error;

use crate::chain::ValidationReport;

/// Errors shared across the crate.
///
/// Validation *reports* (chain violations, probe counterexamples, failed
/// transport verdicts) are data, not errors; an `Error` means an operation
/// could not produce its result at all.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-contract input.
    #[error("invalid input: {0}")]
    Input(String),

    /// An operation required a structurally valid chain and got this instead.
    #[error("invalid chain: {0}")]
    InvalidChain(ValidationReport),

    /// A continuous or admissible family violated one of its invariants.
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// A value failed to stabilize within the presented horizon. Raising the
    /// family's horizon may resolve it; the result is inconclusive, not wrong.
    #[error("no stabilization within horizon {horizon} (window {window}): {context}")]
    Horizon {
        horizon: usize,
        window: usize,
        context: String,
    },

    /// The requested computation is not defined on this input.
    #[error("domain error: {0}")]
    Domain(String),

    /// A transported chain failed validation. For valid inputs this cannot
    /// happen; it signals either corrupted input or an implementation bug.
    #[error("transported chain failed validation: {0}")]
    TheoremViolation(ValidationReport),
}
