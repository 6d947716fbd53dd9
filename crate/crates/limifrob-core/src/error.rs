//! Error type shared by every stage of the pipeline.

use thiserror::Error;

/// All failure modes of the library.  Variants carry enough context to
/// attribute a failure to a pipeline stage and, where meaningful, to the
/// offending object.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Operands of a linear-algebra operation have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A square matrix was required.
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },

    /// The linear system has no solution.
    #[error("linear system has no solution")]
    NoSolution,

    /// A characteristic polynomial did not split over ℚ.
    #[error("matrix spectrum is not rational; unfactored part {remainder}")]
    NotRationalSpectrum { remainder: String },

    /// Teichmüller lift of zero requested.
    #[error("Teichmüller lift requires a nonzero residue")]
    ZeroInput,

    /// p-adic working precision was used up before the requested output
    /// precision was reached, or an input was not p-adically liftable.
    #[error("p-adic precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// The Griffiths–Dwork reduction system at some pole level was not
    /// solvable: the family is not in general position.
    #[error("reduction system unsolvable at pole order {level}: family not in general position")]
    NotGeneralPosition { level: usize },

    /// No cyclic vector was found among the deterministic candidates.
    #[error("no cyclic vector found; connection cannot be put in companion form")]
    NoCyclicVectorFound,

    /// The connection's pole order could not be reduced to one; the input is
    /// not a Gauss–Manin matrix.
    #[error("connection is not regular singular at the origin (pole order {pole_order})")]
    NotRegular { pole_order: i64 },

    /// Laurent factorization received a singular matrix.
    #[error("matrix over ℚ(s) is singular")]
    Singular,

    /// A rational coefficient cannot be reduced modulo p because p divides
    /// its denominator.
    #[error("coefficient {0} has p in its denominator and cannot be reduced mod p")]
    BadReduction(String),

    /// The pencil data violates a structural requirement (homogeneity,
    /// degree, diagonality, or a p-compatibility condition).
    #[error("invalid family: {0}")]
    InvalidFamily(String),

    /// Shearing encountered a non-integer residue eigenvalue after pullback.
    #[error("residue eigenvalue {value} is not an integer after pullback")]
    NonIntegerEigenvalue { value: String },

    /// The diagonal-fiber Frobenius requires d | p−1.
    #[error("degree {d} does not divide p−1 = {pm1}")]
    DegreeNotDividing { d: u64, pm1: u64 },

    /// Rational reconstruction of the Frobenius matrix failed after all
    /// escalation rounds.
    #[error("rational reconstruction of the Frobenius matrix failed after {rounds} escalation rounds")]
    ReconstructionFailed { rounds: u32 },

    /// The reconstructed Frobenius does not satisfy the functional equation
    /// to the required precision.
    #[error("functional-equation residual has valuation {achieved}, required {required}")]
    ResidualCheckFailed { achieved: i64, required: i64 },

    /// A negative Laurent coefficient of the specialized Frobenius did not
    /// vanish to working precision.
    #[error("Laurent coefficient at s^{index} is nonzero (valuation {valuation}) but must vanish")]
    NegativeCoefficientNonzero { index: i64, valuation: i64 },

    /// The residue matrix is not nilpotent.
    #[error("residue matrix is not nilpotent")]
    NotNilpotent,

    /// Integer recognition was requested with a bound too large for the
    /// available precision (2·bound ≥ p^N).
    #[error("recognition bound for coefficient {index} exceeds precision capacity")]
    BoundTooLargeForPrecision { index: usize },

    /// A p-adic coefficient was not within its bound of any integer.
    #[error("coefficient {index} of {piece} is not recognizable within its weight bound")]
    Unrecognized { piece: String, index: usize },

    /// Point-count budget exceeded.
    #[error("point count over F_q requires ~{required} evaluations, budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    /// Too few counts to determine a curve's zeta numerator.
    #[error("need counts over k = 1..={needed}, got {got}")]
    InsufficientCounts { needed: usize, got: usize },

    /// Counts contradict the functional equation of the claimed numerator.
    #[error("counts over F_p^{k} contradict the zeta functional equation")]
    SymmetryViolation { k: usize },
}
