use thiserror::Error;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("necessary condition violated: {0}")]
    NecessaryConditionViolated(String),
    #[error("search exhausted after {0} nodes")]
    SearchExhausted(u64),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),
    #[error("internal contradiction: {0}")]
    InternalContradiction(String),
    #[error("invalid spec: {0}")]
    SpecInvalid(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("condition fails: {0}")]
    IffConditionFails(String),
    #[error("parity obstruction: {0}")]
    ParityObstruction(String),
    #[error("no valid Z: {0}")]
    NoValidZ(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

/// Whether theorem hypotheses are checked up front or skipped, in which case
/// only the postconditions of the construction are verified.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Preconditions {
    #[default]
    Validate,
    Assume,
}
