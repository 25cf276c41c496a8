use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum HyperLieError {
    /// |Phi| is below the cubic dead-band, so the point lies outside the
    /// open set where the bivectors and the tensor A are defined.
    #[error("degenerate configuration: |Phi| = {phi_abs:.3e} below dead-band {eps:.3e}")]
    DegenerateConfiguration { phi_abs: f64, eps: f64 },

    #[error("invalid chart: {0}")]
    InvalidChart(String),

    #[error("point is not in a canonical leaf: {0}")]
    NotInCanonicalLeaf(String),

    #[error("wrong sign region: Phi = {phi:.6e}")]
    WrongRegion { phi: f64 },

    #[error("Gram eigendecomposition failed to converge")]
    DegenerateGram,

    #[error("leafwise restriction of the bivector is numerically singular")]
    SingularRestriction,

    #[error("matrix is not orthogonal: deviation {0:.3e}")]
    NotOrthogonal(f64),

    #[error("boundary metric is undefined at a = 0")]
    ZeroBoundaryPoint,

    #[error("section plane is degenerate: denominator {0:.3e}")]
    DegeneratePlane(f64),

    #[error("curvature constructions disagree: relative deviation {0:.3e}")]
    SymmetryViolation(f64),

    #[error("trajectory blow-up: |state| = {norm:.3e} exceeds {limit:.3e}")]
    BlowUp { norm: f64, limit: f64 },

    #[error("no acceptable decay fit for trajectory tail (residual {0:.3e})")]
    NoDecayFit(f64),

    #[error("pole at t0 = {0} lies inside the integration domain (need t0 > 0)")]
    PoleInDomain(f64),

    #[error("tail of moduli metric integrand is not under control: {0}")]
    TailUnbounded(String),

    #[error("moduli frame pushforward does not match leaf frame: deviation {0:.3e}")]
    FrameMismatch(f64),

    #[error("flow reached max_time with neither dichotomy detector firing")]
    Inconclusive,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, HyperLieError>;
