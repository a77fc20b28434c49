use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The analytic block solution has a removable singularity here and the
    /// caller must switch to the integrator.
    #[error("degenerate closed form at n={n}, R={ratio}: {reason}")]
    Degenerate {
        n: usize,
        ratio: f64,
        reason: &'static str,
    },

    #[error(
        "Fock cutoff {cutoff} too small for nbar={nbar}: Poisson tail {tail:e} exceeds {limit:e}"
    )]
    CutoffTooSmall {
        cutoff: usize,
        nbar: f64,
        tail: f64,
        limit: f64,
    },

    #[error(
        "RK4 step rejected for block n={n}: Richardson disagreement {disagreement:e} > {limit:e}"
    )]
    StepRejected {
        n: usize,
        disagreement: f64,
        limit: f64,
    },
}

impl Error {
    /// True for errors caused by the numerical configuration (as opposed to
    /// malformed input).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidParameter(_))
    }
}
