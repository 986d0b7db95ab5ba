use thiserror::Error;

/// Errors surfaced by the solvers, enumerators and simulators.
///
/// The variants map onto the CLI exit-code classes: validation and
/// infeasibility problems are caller errors, guard violations mean the
/// requested computation is too large for exact desk-scale evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("feasibility (A4): rate {rate} does not exceed R_alpha = {r_alpha}")]
    RateInfeasible { rate: f64, r_alpha: f64 },

    #[error("guard exceeded: {what} needs {size} objects (limit {limit}); {advice}")]
    Guard {
        what: String,
        size: u128,
        limit: u128,
        advice: String,
    },

    #[error("empty feasible set: {0}")]
    EmptyFeasibleSet(String),

    #[error(
        "covering event persisted through {retries} regenerations \
         (epsilon too small for this blocklength)"
    )]
    PersistentCoveringFailure {
        retries: u32,
        books: Box<crate::types_lab::KeyedCodebooks>,
    },
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
