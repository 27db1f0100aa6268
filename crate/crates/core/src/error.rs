use thiserror::Error;

/// Crate-wide error type. Display strings start with a stable short name so
/// callers (and the CLI) can match on it; the CLI maps validation errors to
/// exit code 2 and computation errors to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("NotSquare: transition matrix is {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("NonBinaryEntry: transition[{row}][{col}] must be 0 or 1")]
    NonBinaryEntry { row: usize, col: usize },

    #[error("ZeroRowOrColumn: {kind} {index} of the transition matrix is all zeros")]
    ZeroRowOrColumn { kind: &'static str, index: usize },

    #[error("NotMixing: no power of the transition matrix up to {cap} is entrywise positive")]
    NotMixing { cap: usize },

    #[error("NoPrimitiveLevels: every requested truncation level was rejected")]
    NoPrimitiveLevels,

    #[error("AlphabetMismatch: shift has {shift} symbols, potential covers {potential}")]
    AlphabetMismatch { shift: usize, potential: usize },

    #[error("ZeroMatrix: cocycle matrix {index} is identically zero")]
    ZeroMatrix { index: usize },

    #[error("SingularMatrix: cocycle matrix {index} is singular but positivity was claimed")]
    SingularMatrix { index: usize },

    #[error("DimensionMismatch: expected {expected}x{expected} matrices, found {found}x{found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("UnsupportedDimension: operation requires 2x2 matrices, found {dim}x{dim}")]
    UnsupportedDimension { dim: usize },

    #[error("DivergentTail: geometric tail ratio {ratio} is not < 1")]
    DivergentTail { ratio: f64 },

    #[error("NegativeTemperature: t = {t} (temperatures must be >= 0)")]
    NegativeTemperature { t: f64 },

    #[error("DepthTooShallow: measure depth {depth} < required {needed}")]
    DepthTooShallow { depth: usize, needed: usize },

    #[error("DepthMismatch: expected depth {expected}, measure has depth {found}")]
    DepthMismatch { expected: usize, found: usize },

    #[error("InsufficientCurve: need at least 3 temperatures, got {len}")]
    InsufficientCurve { len: usize },

    #[error("BadModel: {reason}")]
    BadModel { reason: String },

    #[error("BudgetExceeded: {words} words at the requested depth exceed the {budget} budget")]
    BudgetExceeded { words: u128, budget: u128 },

    #[error("NoPositivityRatio: countable route requires strictly positive matrices")]
    NoPositivityRatio,

    #[error("NotInClassR: summability report fails the class-R conditions")]
    NotInClassR,

    #[error("NotExpanding: branch {branch} has smallest singular value {sv} <= 1")]
    NotExpanding { branch: usize, sv: f64 },

    #[error("EmptyPeriodicSet: no period-{n} point starts with symbol {anchor}")]
    EmptyPeriodicSet { n: usize, anchor: u16 },

    #[error("NonPositiveNorm: every product norm underflowed to zero")]
    NonPositiveNorm,

    #[error("AlmostAdditivityViolated: empirical defect {observed} exceeds claimed constant {claimed}")]
    AlmostAdditivityViolated { claimed: f64, observed: f64 },

    #[error("NotAlmostAdditive: {reason}")]
    NotAlmostAdditive { reason: String },

    #[error("BracketTooWide: pressure points at t +/- h cannot resolve the difference; retry with n_max >= {required_n_max}")]
    BracketTooWide { required_n_max: usize },

    #[error("InconsistentBracket: lower bound {lower} exceeds upper bound {upper}")]
    InconsistentBracket { lower: f64, upper: f64 },

    #[error("NormalizationDrift: weights drifted by {drift} from total mass 1")]
    NormalizationDrift { drift: f64 },

    #[error("Io: {0}")]
    Io(#[from] std::io::Error),

    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Classify for the CLI exit-code contract: validation (bad inputs) vs
    /// computation (mathematically degenerate or unresolvable runs).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::EmptyPeriodicSet { .. }
                | Error::NonPositiveNorm
                | Error::AlmostAdditivityViolated { .. }
                | Error::NotAlmostAdditive { .. }
                | Error::BracketTooWide { .. }
                | Error::InconsistentBracket { .. }
                | Error::NormalizationDrift { .. }
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
