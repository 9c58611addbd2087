use crate::expr::{ExprError, ParseError, C64};

/// Errors raised by curve construction, analysis and export.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0} is constant")]
    ConstantInput(&'static str),
    #[error("g is a Moebius transform of G: the curve is constant")]
    GIsMoebiusOfG,
    #[error("all quotient branches are degenerate (0/0)")]
    AllBranchesDegenerate,
    #[error("alpha = F^-1 dF is degenerate: the secondary Gauss map is constant")]
    DegenerateAlpha,
    #[error("G is identically equal to G*")]
    GIdenticallyGstar,
    #[error("the canonical form omega vanishes identically")]
    ZeroOmega,
    #[error("base point {z} is not admissible: {reason}")]
    InvalidBasepoint { z: C64, reason: String },
    #[error("no branch of the canonical form extraction is defined")]
    AllBranchesUndefined,
    #[error("operation needs symbolic entries, but xi has no elementary primitive here")]
    NonElementary,
    #[error("indeterminate quotient 0/0 at z = {z}")]
    IndeterminateQuotient { z: C64 },
    #[error("omega and theta both vanish at z = {z} (branch point)")]
    BranchPointOfFront { z: C64 },
    #[error("grid vertex z = {z} hits a singularity")]
    GridHitsPole { z: C64 },
    #[error("continuation failed: {0}")]
    ContinuationFailed(String),
    #[error("d(F1 - i F2) vanishes identically")]
    DegenerateOmega,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("unknown gallery entry '{0}'")]
    UnknownGallery(String),
    #[error("invalid curve spec: {0}")]
    Spec(String),
    #[error("invalid grid: {0}")]
    Grid(String),
}

impl Error {
    /// True for errors caused by the input data rather than by numerics.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::ConstantInput(_)
                | Error::GIdenticallyGstar
                | Error::ZeroOmega
                | Error::InvalidBasepoint { .. }
                | Error::InvalidParameter { .. }
                | Error::UnknownGallery(_)
                | Error::Spec(_)
                | Error::Grid(_)
                | Error::Expr(ExprError::InvalidPath(_))
        )
    }

    /// Short machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Expr(ExprError::Pole { .. }) => "pole-at-point",
            Error::Expr(ExprError::BranchPoint { .. }) => "branch-point-at-point",
            Error::Expr(ExprError::PathTooClose { .. }) => "path-too-close-to-singularity",
            Error::Expr(ExprError::QuadratureFailed { .. }) => "quadrature-failed",
            Error::Expr(ExprError::NotRational) => "not-rational",
            Error::Expr(ExprError::InvalidPath(_)) => "invalid-path",
            Error::Parse(_) => "parse-error",
            Error::ConstantInput(_) => "constant-input",
            Error::GIsMoebiusOfG => "g-is-moebius-of-G",
            Error::AllBranchesDegenerate => "all-branches-degenerate",
            Error::DegenerateAlpha => "degenerate-alpha",
            Error::GIdenticallyGstar => "G-identically-Gstar",
            Error::ZeroOmega => "zero-omega",
            Error::InvalidBasepoint { .. } => "invalid-basepoint",
            Error::AllBranchesUndefined => "all-branches-undefined",
            Error::NonElementary => "non-elementary",
            Error::IndeterminateQuotient { .. } => "indeterminate-quotient",
            Error::BranchPointOfFront { .. } => "both-zero",
            Error::GridHitsPole { .. } => "grid-hits-pole",
            Error::ContinuationFailed(_) => "continuation-failed",
            Error::DegenerateOmega => "degenerate-omega",
            Error::VerificationFailed(_) => "verification-failed",
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::UnknownGallery(_) => "unknown-gallery",
            Error::Spec(_) => "invalid-spec",
            Error::Grid(_) => "invalid-grid",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
