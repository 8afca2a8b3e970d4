use thiserror::Error;

/// Errors raised across the finite and analytic layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("enumeration bound exceeded: p = {p} > {bound}")]
    BoundExceeded { p: u64, bound: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),

    #[error("discriminant {0} is not fundamental")]
    NonFundamental(i64),

    #[error("discriminant {0} has extra units (only dK < -4 is supported)")]
    ExtraUnits(i64),

    #[error("invalid discriminant {0}: must be negative and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),

    #[error("p = {p} is not inert in Q(sqrt({dk}))")]
    NotInert { p: u64, dk: i64 },

    #[error("p = {p} divides the conductor or level {value}")]
    DividesConductor { p: u64, value: i64 },

    #[error("pair ({0}, {1}) is zero modulo p")]
    ZeroPair(i64, i64),

    #[error("no Heegner point: B^2 = {disc} mod {modulus} has no primitive solution")]
    NoHeegnerPoint { disc: i64, modulus: i64 },

    #[error("no N-divisible representative found in class {0:?}")]
    RepresentativeNotFound((i64, i64, i64)),

    #[error("singular curve (zero discriminant)")]
    SingularCurve,

    #[error("curve model is not minimal at {0}")]
    NonMinimal(i64),

    #[error("conductor {conductor} is not of the form p^2 M with p = {p} and p not dividing M")]
    BadLevel { conductor: i64, p: u64 },

    #[error("coefficient bound {0} exceeds the limit {1}")]
    CoefficientBound(usize, usize),

    #[error("precision not achieved: {0}")]
    PrecisionNotAchieved(String),

    #[error("imaginary part too small: series needs {required} terms (limit {limit})")]
    SeriesBudget { required: usize, limit: usize },

    #[error("inconsistent Atkin-Lehner sign across sample points")]
    InconsistentSign,

    #[error("no integer relation found")]
    NoRelationFound,

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
