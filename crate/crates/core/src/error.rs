use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} is outside its allowed range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("no root of the weight parametrization for target {target} on the principal interval")]
    NoRoot { target: f64 },
    #[error("parametrization for target {target} has {count} roots on the principal interval")]
    MultipleRoots { target: f64, count: usize },
    #[error("principal branch unavailable: sin^2 argument {s} is outside [0, 1]")]
    PrincipalBranch { s: f64 },
    #[error("strand count {0} must be even and positive")]
    OddStrands(usize),
    #[error("generator index {index} out of range for {strands} strands")]
    GeneratorIndex { index: usize, strands: usize },
    #[error("cannot parse generator label {0:?}")]
    BadLabel(String),
    #[error("operands live on {0} and {1} strands")]
    StrandMismatch(usize, usize),
    #[error("operands carry different loop weights")]
    WeightMismatch,
    #[error("non-contractible loop touching both rims encountered")]
    DoubleFlaggedNonContractible,
    #[error("brute-force size cap exceeded: {faces} faces > {cap}")]
    SizeCap { faces: usize, cap: usize },
    #[error("amplitude pole: sin(u chi) vanishes")]
    Pole,
    #[error("truncation order {0} is negative")]
    Truncation(f64),
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("transfer matrix has negative entries; power iteration needs nonnegative weights")]
    NegativeEntries,
    #[error("fit needs at least {need} sizes, got {got}")]
    TooFewSizes { need: usize, got: usize },
    #[error("ill-conditioned least-squares design matrix")]
    IllConditioned,
    #[error("spin representation fails relation {relation}: residual {residual:e}")]
    RelationViolated {
        relation: &'static str,
        residual: f64,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
}
