//! Error type shared across the crate.

use thiserror::Error;

/// Errors reported by operations with rejectable inputs. Internal algebraic
/// inconsistencies (a bracket producing a negative second index with nonzero
/// coefficient, say) are bugs and panic instead.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The module parameter `lambda` must be nonzero.
    #[error("lambda must be nonzero")]
    ZeroLambda,

    /// A probe was started from the zero vector.
    #[error("probe start vector must be nonzero")]
    ZeroStart,

    /// A sequence check requires `beta_0 = 1`.
    #[error("sequence must start with beta_0 = 1, got {0}")]
    BadSequenceStart(String),

    /// Classification systems are built for ansatz degree >= 2 only; lower
    /// degrees have their solution spaces written down directly.
    #[error("ansatz degree {0} is below the supported minimum of {1}")]
    DegreeTooSmall(u32, u32),

    /// Parameter extraction was handed an action outside the module family.
    #[error("oracle outside the rank-one family: {0}")]
    OracleOutsideFamily(String),

    /// Malformed polynomial or rational text.
    #[error("parse error: {0}")]
    Parse(String),
}
