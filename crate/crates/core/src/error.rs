use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cutoff exhausted: tail mass {tail:.3e} still above tolerance at cutoff {cutoff}")]
    CutoffExhausted { cutoff: usize, tail: f64 },

    #[error("zero-norm state")]
    ZeroNorm,

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("non-finite term in {0}")]
    NonFiniteTerm(&'static str),

    #[error("imaginary residue {residue:.3e} exceeds threshold; cutoff too small")]
    ImaginaryResidue { residue: f64 },

    #[error("overlap {value:.3e} outside [0, 1]; cutoff too small")]
    OverlapOutOfRange { value: f64 },

    #[error("degenerate normalization: origin value {0:.3e}")]
    DegenerateNormalization(f64),

    #[error("no half-maximum crossing within scan bound {bound}")]
    NoCrossing { bound: f64 },

    #[error("grid mismatch")]
    GridMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("at grid point ({ix}, {ip}): {source}")]
    AtGridPoint {
        ix: usize,
        ip: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
