use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("duplicate term at inputs {inputs:?}, outputs {outputs:?}")]
    DuplicateTerm {
        inputs: Vec<usize>,
        outputs: Vec<usize>,
    },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid coefficient `{0}`")]
    InvalidCoefficient(String),

    #[error("invalid quantum model: {0}")]
    InvalidModel(String),

    #[error("invalid lifting: {0}")]
    InvalidLifting(String),

    #[error("party lifting needs a zero local bound, found {0}")]
    NonzeroLocalBound(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("conditioning marginal {marginal:e} is below tolerance {tol:e}")]
    VanishingMarginal { marginal: f64, tol: f64 },

    #[error("{count} deterministic strategies exceed the enumeration cap {cap}")]
    StrategyCapExceeded { count: String, cap: usize },

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("malformed problem: {0}")]
    MalformedProblem(String),

    #[error("semidefinite program is infeasible: {0}")]
    SdpInfeasible(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("unknown relaxation level `{0}`")]
    UnknownLevel(String),

    #[error("moment {0} is not present in the moment matrix")]
    MissingMoment(String),

    #[error("functional has complex coefficients that a real moment matrix cannot represent (residue {0:e})")]
    ComplexFunctional(f64),

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of a numerical solver, as opposed to bad input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::LpInfeasible
                | Error::LpUnbounded
                | Error::IterationLimit(_)
                | Error::SdpInfeasible(_)
                | Error::NumericalFailure(_)
        )
    }
}
