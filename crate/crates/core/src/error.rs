use core::fmt;

use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyInput,
    NegativeEntry { index: usize, value: f64 },
    NotNormalized { sum: f64 },
    NonFinite,
    DimensionMismatch { expected: usize, found: usize },
    LambdaOutOfRange(f64),
    OutOfRange { what: &'static str, value: f64 },
    /// `(+inf) + (-inf)` and friends.
    IndeterminateForm,
    UnsupportedAlpha(&'static str),
    NotMajorized,
    NotThermomajorized,
    SolverBudgetExceeded { iterations: usize, residual: f64 },
    InfeasibleAtUpperBound { upper: f64 },
    EqualUpToPermutation,
    BothRankDeficient,
    RankDeficient,
    DeltaOutOfRange { delta: f64, bound: f64 },
    TooLargeToMaterialize { size: u128, cap: u128 },
    EntropyConditionViolated { h_p: f64, h_q: f64 },
    RankCondition { h0_p: f64, h0_q: f64 },
    BudgetExceeded(&'static str),
    CapExceeded { cap: u64 },
    FreeEnergyViolation { f_p: f64, f_q: f64 },
    SinkTooSmall { log_ratio: f64, required: f64 },
    BadShape(String),
    NotStochastic,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty probability vector"),
            Error::NegativeEntry { index, value } => {
                write!(f, "entry {index} is negative ({value})")
            }
            Error::NotNormalized { sum } => write!(f, "entries sum to {sum}, not 1"),
            Error::NonFinite => write!(f, "non-finite entry"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::LambdaOutOfRange(l) => write!(f, "mixing weight {l} outside [0, 1]"),
            Error::OutOfRange { what, value } => write!(f, "{what} out of range: {value}"),
            Error::IndeterminateForm => write!(f, "indeterminate form (+inf) + (-inf)"),
            Error::UnsupportedAlpha(why) => write!(f, "unsupported alpha: {why}"),
            Error::NotMajorized => write!(f, "first distribution does not majorize the second"),
            Error::NotThermomajorized => {
                write!(f, "first distribution does not thermomajorize the second")
            }
            Error::SolverBudgetExceeded {
                iterations,
                residual,
            } => write!(
                f,
                "feasibility solver gave up after {iterations} iterations (residual {residual:e})"
            ),
            Error::InfeasibleAtUpperBound { upper } => {
                write!(f, "transition infeasible even at work gap {upper}")
            }
            Error::EqualUpToPermutation => {
                write!(f, "distributions are equal up to permutation")
            }
            Error::BothRankDeficient => write!(f, "both distributions contain zeros"),
            Error::RankDeficient => write!(f, "distribution must have full rank"),
            Error::DeltaOutOfRange { delta, bound } => {
                write!(f, "delta {delta} must lie in (0, {bound})")
            }
            Error::TooLargeToMaterialize { size, cap } => {
                write!(f, "object of size {size} exceeds materialization cap {cap}")
            }
            Error::EntropyConditionViolated { h_p, h_q } => {
                write!(f, "Shannon condition violated: H(p) = {h_p} >= H(q) = {h_q}")
            }
            Error::RankCondition { h0_p, h0_q } => {
                write!(f, "rank condition violated: H0(p) = {h0_p} > H0(q) = {h0_q}")
            }
            Error::BudgetExceeded(what) => write!(f, "search budget exhausted: {what}"),
            Error::CapExceeded { cap } => {
                write!(f, "no common denominator <= {cap} meets the tolerance")
            }
            Error::FreeEnergyViolation { f_p, f_q } => {
                write!(f, "free-energy condition violated: F(p) = {f_p}, F(q) = {f_q}")
            }
            Error::SinkTooSmall {
                log_ratio,
                required,
            } => write!(f, "sink too small: log(n/m) = {log_ratio} <= {required}"),
            Error::BadShape(msg) => write!(f, "bad shape: {msg}"),
            Error::NotStochastic => write!(f, "matrix is not column-stochastic"),
        }
    }
}

impl core::error::Error for Error {}
