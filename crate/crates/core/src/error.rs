use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count mismatch: expected {expected}, got {got}")]
    VariableMismatch { expected: usize, got: usize },

    #[error("letter index {letter} out of range 1..={g}")]
    LetterOutOfRange { letter: u8, g: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("singular matrix")]
    SingularMatrix,

    #[error("matrix not positive definite (min eigenvalue {min_eig})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("input is not homogeneous linear")]
    NotLinear,

    #[error("basis is linearly dependent (sigma_min ratio {ratio})")]
    DependentBasis { ratio: f64 },

    #[error("products escape the span: not a module (residual {residual})")]
    NotAModule { residual: f64 },

    #[error("tuple is not convexotonic (residual {residual})")]
    NotConvexotonic { residual: f64 },

    #[error("matrix is not unitary (residual {residual})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not an isometry (residual {residual})")]
    NotIsometry { residual: f64 },

    #[error("ray never exits the spectrahedron within t <= {t_max}: unbounded direction")]
    UnboundedDirection { t_max: f64 },

    #[error("point outside the map's domain of regularity (singular resolvent)")]
    OutsideDomain,

    #[error("unknown catalog id `{0}`")]
    UnknownCatalogId(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigenvalue-1 margin violated: min |1 - lambda(C)| = {margin}")]
    MarginViolated { margin: f64 },

    #[error("degree bound violated: {0}")]
    DegreeBound(String),

    #[error("convexotonic extraction failed: {0}")]
    NotExtractable(String),

    #[error("json: {0}")]
    Json(String),
}
