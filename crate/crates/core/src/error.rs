use thiserror::Error;

/// Errors raised by the geometry, meshing and solver pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector has no projective class")]
    ZeroVector,
    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("expected trace 1, got {0}")]
    TraceNotOne(f64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("point is not on the curve (|F| = {0:.3e})")]
    NotOnCurve(f64),
    #[error("singular curve sample: |grad F| = {0:.3e}")]
    SingularPoint(f64),
    #[error("projection center lies on the curve (|F| = {0:.3e})")]
    CenterOnCurve(f64),
    #[error("discriminant vanishes identically for this pencil")]
    DegenerateDiscriminant,
    #[error("no admissible projection center after {0} candidates")]
    NoAdmissibleCenter(usize),
    #[error("refinement level {0} exceeds the maximum of 9")]
    LevelTooLarge(u32),
    #[error("root tracking ambiguous along base edge ({0}, {1})")]
    RootTrackingAmbiguity(usize, usize),
    #[error("monodromy around base triangle {0} is not the identity")]
    Monodromy(usize),
    #[error("mesh is not a closed oriented manifold: {0}")]
    NonManifold(String),
    #[error("Euler characteristic mismatch: mesh has {found}, genus formula gives {expected}")]
    EulerMismatch { expected: i64, found: i64 },
    #[error("degenerate triangle {index} (area {area:.3e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("triangle {0} violates the triangle inequality")]
    TriangleInequality(usize),
    #[error("eigensolver did not converge (Ritz residual {0:.3e})")]
    EigenNoConvergence(f64),
    #[error("linear solver did not converge (relative residual {0:.3e})")]
    LinearSolve(f64),
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("total measure is zero")]
    ZeroMeasure,
    #[error("balancing failed after all starts (best residual {0:.3e})")]
    BalanceNoConvergence(f64),
    #[error("mesh is not balanced (residual {0:.3e})")]
    NotBalanced(f64),
    #[error("target curvature {target} is incompatible with genus {genus} (Gauss-Bonnet)")]
    GaussBonnet { target: f64, genus: i64 },
    #[error("Newton stagnated; residual history {0:?}")]
    NewtonStagnation(Vec<f64>),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
