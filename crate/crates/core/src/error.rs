use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integer overflow while converting an exact result to i64")]
    Overflow,

    #[error("invalid monoid: {0}")]
    InvalidMonoid(String),

    #[error("monoid contains a line; split off its units first")]
    ContainsLine,

    #[error("monoid is not saturated")]
    NotSaturated,

    #[error("monoid is not sharp")]
    NotSharp,

    #[error("not a prime ideal: {0}")]
    NotPrime(String),

    #[error("map is not a monoid homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("cone is not strictly convex")]
    NotStrictlyConvex,

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("polyhedral fan is not face-closed: {0}")]
    NotFaceClosed(String),

    #[error("invalid gluing between charts {a} and {b}: {reason}")]
    InvalidGluing { a: usize, b: usize, reason: String },

    #[error("fan is not fine and saturated: {0}")]
    NotFineSaturated(String),

    #[error("unknown built-in fan {0:?}")]
    UnknownFan(String),

    #[error("unknown point {0:?}")]
    UnknownPoint(String),

    #[error("invalid fan morphism: {0}")]
    InvalidMorphism(String),

    #[error("values do not extend to an additive homomorphism: {0}")]
    NotAdditive(String),

    #[error("quotient closure did not stabilize after {0} alternations")]
    NotStabilized(usize),

    #[error("order of vanishing is indeterminate at truncation order {0}")]
    IndeterminateOrder(u32),

    #[error("invalid series assignment: {0}")]
    InvalidSeries(String),

    #[error("exponent {0:?} does not lie in the chart monoid")]
    ExponentOutsideChart(Vec<i64>),

    #[error("polynomial does not vanish at the series point: {0}")]
    NotOnHypersurface(String),

    #[error("{0}")]
    InvalidPolynomial(String),

    #[error("inconsistent dual complex input: {0}")]
    InconsistentAttachment(String),

    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::Overflow => "overflow",
            Error::InvalidMonoid(_) => "invalid_monoid",
            Error::ContainsLine => "contains_line",
            Error::NotSaturated => "not_saturated",
            Error::NotSharp => "not_sharp",
            Error::NotPrime(_) => "not_prime",
            Error::NotHomomorphism(_) => "not_homomorphism",
            Error::NotStrictlyConvex => "not_strictly_convex",
            Error::InvalidCone(_) => "invalid_cone",
            Error::NotFaceClosed(_) => "not_face_closed",
            Error::InvalidGluing { .. } => "invalid_gluing",
            Error::NotFineSaturated(_) => "not_fine_saturated",
            Error::UnknownFan(_) => "unknown_fan",
            Error::UnknownPoint(_) => "unknown_point",
            Error::InvalidMorphism(_) => "invalid_morphism",
            Error::NotAdditive(_) => "not_additive",
            Error::NotStabilized(_) => "not_stabilized",
            Error::IndeterminateOrder(_) => "indeterminate_order",
            Error::InvalidSeries(_) => "invalid_series",
            Error::ExponentOutsideChart(_) => "exponent_outside_chart",
            Error::NotOnHypersurface(_) => "not_on_hypersurface",
            Error::InvalidPolynomial(_) => "invalid_polynomial",
            Error::InconsistentAttachment(_) => "inconsistent_attachment",
            Error::Schema(_) => "schema",
        }
    }
}
