use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("truncation configs differ: {0}")]
    Config(String),
    #[error("parity mismatch: {0}")]
    Parity(String),
    #[error("near resonance at angle {angle:?} (det = {det:e})")]
    NearResonance { angle: [i8; 4], det: f64 },
    #[error("eta ring error: {0}")]
    Ring(String),
    #[error("inconsistent series: {0}")]
    Consistency(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("bifurcation constraint violated: |Delta| = {residual:e}")]
    Constraint { residual: f64 },
    #[error("imaginary residue {residue:e} in {what}")]
    ImaginaryResidue { what: String, residue: f64 },
    #[error("no bifurcation: {0}")]
    NoBifurcation(String),
    #[error("classification error: {0}")]
    Classification(String),
    #[error("singularity: {0}")]
    Singularity(String),
    #[error("step size underflow at f = {f}")]
    StepUnderflow { f: f64 },
}

impl Error {
    /// True for errors caused by the physical or numerical inputs rather than by a bug.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Internal(_) | Error::Config(_) | Error::Parity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
