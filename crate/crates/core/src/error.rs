use thiserror::Error;

/// Failures reported by the library.
///
/// Every variant is a precondition or numerical-breakdown condition of a
/// specific operation; none of them indicate a bug.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("quaternion lies on the real axis")]
    RealAxis,
    #[error("vector is not a unit imaginary quaternion (|v|^2 = {0})")]
    NotUnit(f64),
    #[error("the two imaginary units coincide")]
    DegenerateUnits,
    #[error("point {re}+{im}i lies outside the function domain")]
    OutOfDomain { re: f64, im: f64 },
    #[error("functions are defined on different domains")]
    DomainMismatch,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("operation needs a bounded domain")]
    UnboundedDomain,
    #[error("point is too close to the domain boundary for quadrature")]
    NearBoundary,
    #[error("Cauchy quadrature did not converge (change {0:e} when doubling nodes)")]
    QuadratureNotConverged(f64),
    #[error("vector part has vanishing symmetrization")]
    VanishingVectorPart,
    #[error("zero of the vector symmetrization is not isolated")]
    NonIsolatedZero,
    #[error("point lies on V_inf (n(z) = 0)")]
    OnVinf,
    #[error("point lies on W (w0^2 + w1^2 = 0)")]
    OnW,
    #[error("start point is not on the fiber over the first path sample")]
    BadStart,
    #[error("adaptive refinement limit exceeded while continuing along a path")]
    PathTooWild,
    #[error("path is not a loop or its monodromy is not integral (drift {0:e})")]
    NotALoop(f64),
    #[error("translation ({a}, {b}) is not a deck transformation (parities differ)")]
    NotDeck { a: i64, b: i64 },
    #[error("root order must be at least 2")]
    BadOrder,
    #[error("stem value hits V_-1 or V_inf at {re}+{im}i")]
    HitsVLocus { re: f64, im: f64 },
    #[error("the function J is not defined on domains meeting the real axis")]
    JNotDefined,
    #[error("branch ({h1}, {h2}) is not admissible on a domain meeting the real axis")]
    InadmissibleBranch { h1: i64, h2: i64 },
    #[error("square root branch cannot be continued (zero crossing)")]
    BranchObstruction,
    #[error("input does not satisfy the counterexample hypotheses: {0}")]
    BadExampleInput(String),
    #[error("vector symmetrization hits the lattice {{h^2 pi^2}}")]
    LatticeValue,
    #[error("sin(theta) vanishes while recovering the product exponent")]
    DegenerateAngle,
    #[error("product of exponentials is not an exponential (min |condition| = {0:e})")]
    NotExponential(f64),
}

pub type Result<T> = core::result::Result<T, Error>;
