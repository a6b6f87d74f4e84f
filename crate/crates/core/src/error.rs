use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("invalid sigma law: {0}")]
    InvalidSigmaLaw(String),

    #[error("invalid model summary: {0}")]
    InvalidSummary(String),

    #[error(
        "weak limit needs zero conditional drift almost surely \
         (p_neg = {p_neg}, p_pos = {p_pos}); use general_limit instead"
    )]
    NonzeroDrift { p_neg: f64, p_pos: f64 },

    #[error("invalid component law: {0}")]
    InvalidLaw(String),

    #[error("invalid directing measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error(
        "cannot allocate {replications} samples \
         (n·replications = {n}·{replications} = {work})"
    )]
    ResourceExhausted {
        n: u64,
        replications: u64,
        work: u128,
    },

    #[error("empirical CDF has no samples")]
    EmptyCdf,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("every component of the measure has zero variance; nothing to standardize")]
    AllDegenerate,
}

pub(crate) fn ensure_finite(what: &'static str, value: f64) -> Result<(), Error> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { what, value })
    }
}
