//! Depth-two p-adic polylogarithm toolkit for unit and exponential equations.
//!
//! The crate computes with truncated p-adic numbers and power series, the
//! p-adic logarithm and dilogarithm (Coleman integrals on the projective line
//! minus three points), exact Steinberg decompositions of tensors of S-units,
//! the bilinear coefficient tables built from them, and p-adic analytic
//! solvers that locate and recognize the zeros of the resulting Coleman
//! functions.  Together these pieces evaluate the depth-two obstruction map
//! whose vanishing locus cuts out integral points: solutions of the S-unit
//! equation `z(1 - z) ∈ (S-units)` and of two-variable exponential equations
//! `a·b^x + c·d^y = 1`.
//!
//! Layering, bottom to top:
//!
//! * [`padic`] — truncated p-adic arithmetic with explicit precision.
//! * [`series`] — truncated power series over the p-adics, with tail bounds.
//! * [`polylog`] — `plog`, the Frobenius-fixed dilogarithm series, `dilog`.
//! * [`heisenberg`] — the unipotent 3×3 Heisenberg group, its Lie algebra,
//!   and exact group-cohomology cochain operations.
//! * [`symbols`] — exact tensor decomposition into symmetric and Steinberg
//!   relators.
//! * [`kim`] — the bilinear coefficient table and the depth-two maps.
//! * [`solver`] — Coleman functions, residue-disk zero finding, algebraic
//!   recognition and verification, equation solvers.
//! * [`selftest`] — seeded invariant batteries used by the CLI.
//!
//! All precision bookkeeping is honest: an operation never reports more
//! digits than its inputs guarantee, and the solvers mint extra working
//! digits up front so that published results meet their target precision.

pub mod error;
pub mod heisenberg;
pub mod kim;
pub mod padic;
pub mod polylog;
pub mod selftest;
pub mod series;
pub mod solver;
pub mod symbols;

pub use error::Error;
pub use padic::PadicNumber;
pub use series::PowerSeries;

/// Convenience alias used throughout: exact rational scalars.
pub type Rational = num_rational::BigRational;

/// Result alias for fallible operations in this crate.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) mod util {
    //! Small numeric helpers shared across modules.

    /// Deterministic primality test for 64-bit integers (trial division;
    /// inputs in this crate are desk-scale).
    pub fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for q in [2u64, 3, 5, 7] {
            if n.is_multiple_of(q) {
                return n == q;
            }
        }
        let mut d = 11u64;
        while d.saturating_mul(d) <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 2;
        }
        true
    }

    /// Floor of log base `p` of `n` (0 for `n < p`).  Requires `n ≥ 1`.
    pub fn ilog_p(p: u64, n: u64) -> u32 {
        assert!(n >= 1, "ilog_p requires n >= 1");
        let mut k = 0u32;
        let mut m = n;
        while m >= p {
            m /= p;
            k += 1;
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::util::{ilog_p, is_prime};

    #[test]
    fn primality_small_values() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001)); // 101 · 9901
    }

    #[test]
    fn integer_log_base_p() {
        assert_eq!(ilog_p(5, 1), 0);
        assert_eq!(ilog_p(5, 4), 0);
        assert_eq!(ilog_p(5, 5), 1);
        assert_eq!(ilog_p(5, 124), 2);
        assert_eq!(ilog_p(5, 125), 3);
        assert_eq!(ilog_p(2, 1 << 20), 20);
    }
}
