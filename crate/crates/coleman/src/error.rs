//! Error type shared by every module in the crate.

use thiserror::Error;

/// Errors surfaced by p-adic arithmetic, series manipulation, decomposition,
/// and the solvers.  Precision-related failures are reported with enough
/// context to diagnose which budget was exhausted.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// A modulus that must be an odd prime (or a prime) was not.
    #[error("{0} is not a valid prime for this operation")]
    NotPrime(u64),

    /// A precision parameter outside the supported range.
    #[error("invalid precision: {0}")]
    InvalidPrecision(String),

    /// Division by a value indistinguishable from zero.
    #[error("division by zero at precision O(p^{abs})")]
    DivisionByZero {
        /// Absolute precision to which the divisor is known to vanish.
        abs: i64,
    },

    /// Teichmüller lift requested for a non-unit.
    #[error("Teichmüller lift requires a unit (valuation 0), got valuation {val:?}")]
    NotAUnit {
        /// Valuation of the offending input (`None` for zero).
        val: Option<i64>,
    },

    /// Logarithm of zero.
    #[error("p-adic logarithm of a value indistinguishable from zero")]
    LogOfZero,

    /// Dilogarithm (or a related integral) at a singular point.
    #[error("dilogarithm singular at {0}")]
    DilogSingular(String),

    /// A power-series operation whose precondition failed.
    #[error("power series: {0}")]
    Series(String),

    /// Evaluation point outside a series' disk of convergence.
    #[error("evaluation point has valuation {val:?}, outside the {disk} disk")]
    OutsideDisk {
        /// Valuation of the point (`None` for zero to working precision).
        val: Option<i64>,
        /// Human-readable disk description.
        disk: String,
    },

    /// An argument where a singular value (0 or 1) is excluded.
    #[error("argument {0} is excluded here")]
    ExcludedValue(String),

    /// Factorization hit a cofactor beyond the trial-division bound.
    #[error("cannot factor {0} with primes below {1}")]
    FactorBound(String, u64),

    /// An input that must be an S-unit (or supported on S) was not.
    #[error("{0} is not supported on the prime set {1:?}")]
    NotSUnit(String, Vec<u64>),

    /// Structural misuse of the cochain calculus.
    #[error("cochain: {0}")]
    Cochain(String),

    /// The evaluation of a decomposition would divide by the working prime.
    #[error("decomposition coefficient {coeff} has denominator divisible by p = {p}")]
    PrecisionUnsafe {
        /// Offending coefficient, rendered as `num/den`.
        coeff: String,
        /// Working prime.
        p: u64,
    },

    /// A coefficient or equation query that is undefined at the working prime.
    #[error("{0}")]
    BadQuery(String),

    /// Two objects built over different primes or prime sets were mixed.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// The zero search could not resolve a disk within its budgets.
    #[error("zero search: {0}")]
    ZeroSearch(String),

    /// Malformed input text (rationals, config files, ...).
    #[error("parse error: {0}")]
    Parse(String),
}
