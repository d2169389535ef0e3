use thiserror::Error;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("jets of `{found}` are not permitted here (expected jets of `{expected}`)")]
    ForeignJet { expected: String, found: String },

    #[error("division by an expression that normalizes to zero")]
    DivisionByZero,

    #[error("exponential arguments must normalize to exponential-free polynomials")]
    BadExponentialArgument,

    #[error("binding for `{0}` refers to itself")]
    SelfReferentialBinding(String),

    #[error("expression is not polynomial in the selector atom `{0}`")]
    NotPolynomialInSelectors(String),

    #[error("invalid evolution equation: {0}")]
    InvalidEquation(String),

    #[error("invalid manifold: {0}")]
    InvalidManifold(String),

    #[error("v-jet elimination exceeded depth {limit}")]
    ReductionDepthExceeded { limit: u32 },

    #[error("residual is not linear homogeneous in the v-jets (offending monomial: {monomial})")]
    NonlinearResidual { monomial: String },

    #[error("no binding supplied for coefficient `{0}`")]
    IncompleteAssignment(String),

    #[error("order {p} exceeds the bound {bound} = 2n+1 for coefficients of jet order at most n")]
    OrderBoundExceeded { p: u32, bound: u32 },

    #[error("order {p} is too low here (need at least {min})")]
    OrderTooLow { p: u32, min: u32 },

    #[error("case analysis exceeded the budget of {budget} branches")]
    CaseBudgetExceeded { budget: u32 },

    #[error("could not find a non-degenerate sample point after {attempts} attempts")]
    DegeneratePoint { attempts: u32 },

    #[error("unknown corpus entry `{0}`")]
    UnknownCorpusEntry(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
