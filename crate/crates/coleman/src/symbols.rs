//! Exact decomposition of prime tensors into symmetric terms and
//! Steinberg relators.
//!
//! The ambient space is the rational vector space spanned by symbols
//! `q ⊗ q′` for primes `q, q′`.  Two families of elements are
//! distinguished:
//!
//! * **symmetric** tensors `u⊗v + v⊗u`, and
//! * **Steinberg relators** `t ⊗ (1−t)` for rationals `t ∉ {0, 1}`,
//!   expanded bilinearly through the prime factorizations of `t` and
//!   `1−t`.
//!
//! [`decompose`] writes any `q ⊗ q′` as an exact rational combination of
//! the two families.  The engine is [`base_reduction`]: for `1 < q < P`
//! coprime to the prime `P`, iterate `q·z_{i−1} = z_i + P·r_i` from
//! `z₀ = q` until `z` reaches 1 (one full multiplicative order `α` of `q`
//! mod `P`).  Each step with `r_i ≠ 0` contributes the relator at
//! `t_i = z_i/(q·z_{i−1})`, whose complement `1 − t_i = P·r_i/(q·z_{i−1})`
//! carries `P` exactly once; telescoping the sum gives
//!
//! ```text
//!   q ⊗ P  =  −(1/α) Σᵢ tᵢ⊗(1−tᵢ)  +  (1/α) Σᵢ tᵢ ⊗ (rᵢ/(q·z_{i−1})),
//! ```
//!
//! where the residual on the right involves only primes smaller than `P`.
//! A sweep from the largest prime downward therefore terminates, peeling
//! diagonal terms into symmetric ones, flipping upper terms across the
//! diagonal, and reducing lower terms with the identity above.
//! Everything is exact rational arithmetic; [`reconstruct`] verifies a
//! decomposition by expanding it back into the prime basis.

use std::collections::BTreeMap;

use num_traits::{Signed, ToPrimitive, Zero as _};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::padic::parse_rational;
use crate::util::is_prime;
use crate::{Rational, Result};

/// Default trial-division bound for prime factorizations.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

fn rational_to_string(x: &Rational) -> String {
    if x.denom() == &num_bigint::BigInt::from(1) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A finite Q-linear combination of primes (a vector in the prime basis).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolVector {
    terms: BTreeMap<u64, Rational>,
}

impl SymbolVector {
    /// The zero vector.
    pub fn new() -> Self {
        SymbolVector::default()
    }

    /// Adds `c·[p]`, merging and dropping zeros.
    pub fn add_term(&mut self, p: u64, c: &Rational) {
        let entry = self.terms.entry(p).or_insert_with(Rational::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }

    /// Coefficient of `[p]` (zero when absent).
    pub fn coefficient(&self, p: u64) -> Rational {
        self.terms.get(&p).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterates over `(prime, coefficient)` pairs in increasing prime order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(&p, c)| (p, c))
    }

    /// `true` when no terms remain.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (p, c) in other.iter() {
            out.add_term(p, c);
        }
        out
    }

    /// Scales every coefficient.
    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return SymbolVector::new();
        }
        SymbolVector {
            terms: self.terms.iter().map(|(&p, c)| (p, c * s)).collect(),
        }
    }

    /// The bilinear tensor product with another vector.
    pub fn tensor(&self, other: &Self) -> SymbolTensor {
        let mut out = SymbolTensor::new();
        for (p, a) in self.iter() {
            for (q, b) in other.iter() {
                out.add_term(p, q, &(a * b));
            }
        }
        out
    }
}

impl Serialize for SymbolVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(u64, String)> = self
            .terms
            .iter()
            .map(|(&p, c)| (p, rational_to_string(c)))
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<(u64, String)>::deserialize(d)?;
        let mut out = SymbolVector::new();
        for (p, c) in entries {
            let c = parse_rational(&c).map_err(serde::de::Error::custom)?;
            out.add_term(p, &c);
        }
        Ok(out)
    }
}

/// A finite Q-linear combination of prime tensors `q ⊗ q′`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SymbolTensor {
    terms: BTreeMap<(u64, u64), Rational>,
}

impl SymbolTensor {
    /// The zero tensor.
    pub fn new() -> Self {
        SymbolTensor::default()
    }

    /// Adds `c·(u ⊗ v)`, merging and dropping zeros.
    pub fn add_term(&mut self, u: u64, v: u64, c: &Rational) {
        let entry = self.terms.entry((u, v)).or_insert_with(Rational::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            self.terms.remove(&(u, v));
        }
    }

    /// Coefficient of `u ⊗ v` (zero when absent).
    pub fn coefficient(&self, u: u64, v: u64) -> Rational {
        self.terms
            .get(&(u, v))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Iterates over `((u, v), coefficient)` in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = ((u64, u64), &Rational)> {
        self.terms.iter().map(|(&k, c)| (k, c))
    }

    /// `true` when no terms remain.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((u, v), c) in other.iter() {
            out.add_term(u, v, c);
        }
        out
    }

    /// Scales every coefficient.
    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return SymbolTensor::new();
        }
        SymbolTensor {
            terms: self.terms.iter().map(|(&k, c)| (k, c * s)).collect(),
        }
    }

    /// The largest prime appearing in either slot, if any.
    pub fn max_prime(&self) -> Option<u64> {
        self.terms.keys().map(|&(u, v)| u.max(v)).max()
    }
}

impl Serialize for SymbolTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(u64, u64, String)> = self
            .terms
            .iter()
            .map(|(&(u, v), c)| (u, v, rational_to_string(c)))
            .collect();
        entries.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<(u64, u64, String)>::deserialize(d)?;
        let mut out = SymbolTensor::new();
        for (u, v, c) in entries {
            let c = parse_rational(&c).map_err(serde::de::Error::custom)?;
            out.add_term(u, v, &c);
        }
        Ok(out)
    }
}

/// Factors a nonzero rational over primes up to `bound`, returning the
/// exponent vector (sign is discarded).  Errors: a zero input, or a
/// leftover cofactor with no prime factor within the bound.
pub fn factor_symbol(x: &Rational, bound: u64) -> Result<SymbolVector> {
    if x.is_zero() {
        return Err(Error::ExcludedValue("0 has no prime factorization".into()));
    }
    let mut out = SymbolVector::new();
    for (big, sign) in [(x.numer().abs(), 1i64), (x.denom().abs(), -1i64)] {
        let n = big
            .to_u128()
            .ok_or_else(|| Error::FactorBound(rational_to_string(x), bound))?;
        for (p, e) in
            factor_u128(n, bound).ok_or_else(|| Error::FactorBound(rational_to_string(x), bound))?
        {
            out.add_term(p, &Rational::from_integer((sign * e as i64).into()));
        }
    }
    Ok(out)
}

/// Trial division of `n ≥ 1` by primes up to `bound`; `None` when a
/// cofactor beyond the bound survives.
fn factor_u128(mut n: u128, bound: u64) -> Option<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            out.push((p, e));
        }
    };
    let mut e2 = 0;
    while n.is_multiple_of(2) {
        n /= 2;
        e2 += 1;
    }
    push(2, e2);
    let mut d: u128 = 3;
    while d * d <= n && d <= bound as u128 {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        push(d as u64, e);
        d += 2;
    }
    if n > 1 {
        if n <= bound as u128 {
            push(n as u64, 1);
        } else {
            return None;
        }
    }
    Some(out)
}

/// The orbit data produced by one base reduction: the chain
/// `z₀ = q, z_i = q·z_{i−1} mod P` down to 1, the carried quotients `r_i`,
/// and the multiplicative order `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    /// The reduced base.
    pub q: u64,
    /// The prime modulus.
    pub modulus: u64,
    /// The orbit `z₀, …, z_{α−1}` with `z_{α−1} = 1`.
    pub z: Vec<u64>,
    /// The quotients `r₁, …, r_{α−1}` with `q·z_{i−1} = z_i + P·r_i`.
    pub r: Vec<u64>,
    /// The multiplicative order of `q` modulo `P`.
    pub order: usize,
}

/// A base reduction: trace, Steinberg relators with coefficients, and the
/// residual tensor supported on primes smaller than the modulus, tied by
///
/// ```text
///   q ⊗ P = Σ d·(t ⊗ (1−t)) + residual.
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseReduction {
    /// The orbit bookkeeping.
    pub trace: ReductionTrace,
    /// Steinberg terms `(t, d)`, merged over equal `t` and sorted.
    pub steinberg: Vec<(Rational, Rational)>,
    /// The leftover tensor on primes `< modulus`.
    pub residual: SymbolTensor,
}

/// Reduces `q ⊗ P` for `1 < q < P` against the prime `P`.  All Steinberg
/// parameters satisfy `0 < t < 1` and the residual avoids `P`.
pub fn base_reduction(q: u64, modulus: u64) -> Result<BaseReduction> {
    if !is_prime(modulus) {
        return Err(Error::NotPrime(modulus));
    }
    if q <= 1 || q >= modulus {
        return Err(Error::BadQuery(format!(
            "base reduction needs 1 < q < P, got q = {q}, P = {modulus}"
        )));
    }
    let mut z = vec![q];
    let mut r = Vec::new();
    loop {
        let prod = (q as u128) * (*z.last().expect("nonempty") as u128);
        let zi = (prod % modulus as u128) as u64;
        let ri = (prod / modulus as u128) as u64;
        z.push(zi);
        r.push(ri);
        if zi == 1 {
            break;
        }
        assert!(z.len() <= modulus as usize, "orbit failed to close");
    }
    let order = z.len();
    let alpha = Rational::from_integer((order as i64).into());
    let inv_alpha = Rational::from_integer(1.into()) / &alpha;

    let mut steinberg: BTreeMap<Rational, Rational> = BTreeMap::new();
    let mut residual = SymbolTensor::new();
    for i in 1..order {
        let ri = r[i - 1];
        if ri == 0 {
            continue;
        }
        let den = (q as i64) * (z[i - 1] as i64);
        let t = Rational::new((z[i] as i64).into(), den.into());
        let entry = steinberg.entry(t.clone()).or_insert_with(Rational::zero);
        *entry = &*entry - &inv_alpha;
        if entry.is_zero() {
            steinberg.remove(&t);
        }
        // Residual term (1/α)·vec(t) ⊗ vec(r_i/(q·z_{i−1})); every factor
        // is smaller than the modulus, so the trial bound P always works.
        let left = factor_symbol(&t, modulus)?;
        let right = factor_symbol(&Rational::new((ri as i64).into(), den.into()), modulus)?;
        residual = residual.add(&left.tensor(&right).scale(&inv_alpha));
    }
    Ok(BaseReduction {
        trace: ReductionTrace {
            q,
            modulus,
            z,
            r,
            order,
        },
        steinberg: steinberg.into_iter().collect(),
        residual,
    })
}

/// An exact decomposition of a tensor into symmetric terms and Steinberg
/// relators:
///
/// ```text
///   T = Σ s·(u⊗v + v⊗u) + Σ d·(t ⊗ (1−t)).
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "DecompositionRepr", try_from = "DecompositionRepr")]
pub struct Decomposition {
    /// The originating prime pair, when the input was a single `q ⊗ q′`.
    pub pair: Option<(u64, u64)>,
    /// Symmetric terms `(u, v, s)` with `u ≤ v`, sorted.
    pub symmetric: Vec<(u64, u64, Rational)>,
    /// Steinberg terms `(t, d)`, merged over equal `t` and sorted.
    pub steinberg: Vec<(Rational, Rational)>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionRepr {
    pair: Option<(u64, u64)>,
    symmetric: Vec<(u64, u64, String)>,
    steinberg: Vec<(String, String)>,
}

impl From<Decomposition> for DecompositionRepr {
    fn from(d: Decomposition) -> Self {
        DecompositionRepr {
            pair: d.pair,
            symmetric: d
                .symmetric
                .iter()
                .map(|(u, v, s)| (*u, *v, rational_to_string(s)))
                .collect(),
            steinberg: d
                .steinberg
                .iter()
                .map(|(t, c)| (rational_to_string(t), rational_to_string(c)))
                .collect(),
        }
    }
}

impl TryFrom<DecompositionRepr> for Decomposition {
    type Error = Error;

    fn try_from(r: DecompositionRepr) -> Result<Self> {
        let mut symmetric = Vec::with_capacity(r.symmetric.len());
        for (u, v, s) in r.symmetric {
            symmetric.push((u, v, parse_rational(&s)?));
        }
        let mut steinberg = Vec::with_capacity(r.steinberg.len());
        for (t, c) in r.steinberg {
            steinberg.push((parse_rational(&t)?, parse_rational(&c)?));
        }
        Ok(Decomposition {
            pair: r.pair,
            symmetric,
            steinberg,
        })
    }
}

/// Decomposes an arbitrary tensor by sweeping from the largest prime
/// downward: diagonal terms become symmetric with halved coefficient,
/// upper terms flip across the diagonal at the cost of one symmetric term,
/// and lower terms reduce through [`base_reduction`].
pub fn decompose_tensor(tensor: &SymbolTensor) -> Result<Decomposition> {
    fn accumulate(map: &mut BTreeMap<(u64, u64), Rational>, key: (u64, u64), c: &Rational) {
        let entry = map.entry(key).or_insert_with(Rational::zero);
        *entry = &*entry + c;
        if entry.is_zero() {
            map.remove(&key);
        }
    }
    let mut work = tensor.clone();
    let mut symmetric: BTreeMap<(u64, u64), Rational> = BTreeMap::new();
    let mut steinberg: BTreeMap<Rational, Rational> = BTreeMap::new();
    while let Some(p) = work.max_prime() {
        let touching: Vec<((u64, u64), Rational)> = work
            .iter()
            .filter(|&((u, v), _)| u == p || v == p)
            .map(|(k, c)| (k, c.clone()))
            .collect();
        // Lower-triangular load a ⊗ p accumulated for this prime: original
        // lower terms plus the reflections of the upper ones.
        let mut lower: BTreeMap<u64, Rational> = BTreeMap::new();
        for ((u, v), c) in touching {
            work.add_term(u, v, &-&c);
            if u == p && v == p {
                accumulate(
                    &mut symmetric,
                    (p, p),
                    &(&c / &Rational::from_integer(2.into())),
                );
            } else if u == p {
                accumulate(&mut symmetric, (v, p), &c);
                let entry = lower.entry(v).or_insert_with(Rational::zero);
                *entry = &*entry - &c;
            } else {
                let entry = lower.entry(u).or_insert_with(Rational::zero);
                *entry = &*entry + &c;
            }
        }
        for (a, c) in lower {
            if c.is_zero() {
                continue;
            }
            let red = base_reduction(a, p)?;
            for (t, d) in &red.steinberg {
                let entry = steinberg.entry(t.clone()).or_insert_with(Rational::zero);
                *entry = &*entry + &(d * &c);
                if entry.is_zero() {
                    steinberg.remove(t);
                }
            }
            work = work.add(&red.residual.scale(&c));
        }
    }
    Ok(Decomposition {
        pair: None,
        symmetric: symmetric.into_iter().map(|((u, v), s)| (u, v, s)).collect(),
        steinberg: steinberg.into_iter().collect(),
    })
}

/// Decomposes a single prime tensor `q ⊗ q′`.  Errors: a non-prime input.
pub fn decompose(q: u64, q_prime: u64) -> Result<Decomposition> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if !is_prime(q_prime) {
        return Err(Error::NotPrime(q_prime));
    }
    let mut tensor = SymbolTensor::new();
    tensor.add_term(q, q_prime, &Rational::from_integer(1.into()));
    let mut d = decompose_tensor(&tensor)?;
    d.pair = Some((q, q_prime));
    Ok(d)
}

/// Expands a decomposition back into the prime basis.  Errors: a Steinberg
/// parameter in `{0, 1}`, or a factorization escaping the bound.
pub fn reconstruct(d: &Decomposition, bound: u64) -> Result<SymbolTensor> {
    let mut out = SymbolTensor::new();
    for (u, v, s) in &d.symmetric {
        out.add_term(*u, *v, s);
        out.add_term(*v, *u, s);
    }
    let one = Rational::from_integer(1.into());
    for (t, c) in &d.steinberg {
        if t.is_zero() || t == &one {
            return Err(Error::ExcludedValue(format!(
                "Steinberg parameter {} is singular",
                rational_to_string(t)
            )));
        }
        let left = factor_symbol(t, bound)?;
        let right = factor_symbol(&(&one - t), bound)?;
        out = out.add(&left.tensor(&right).scale(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn unit_tensor(u: u64, v: u64) -> SymbolTensor {
        let mut t = SymbolTensor::new();
        t.add_term(u, v, &q("1"));
        t
    }

    #[test]
    fn factoring_pinned_values() {
        let f = factor_symbol(&q("12"), DEFAULT_FACTOR_BOUND).unwrap();
        assert_eq!(f.coefficient(2), q("2"));
        assert_eq!(f.coefficient(3), q("1"));
        let g = factor_symbol(&q("-8/9"), DEFAULT_FACTOR_BOUND).unwrap();
        assert_eq!(g.coefficient(2), q("3"));
        assert_eq!(g.coefficient(3), q("-2"));
        assert!(matches!(
            factor_symbol(&q("0"), DEFAULT_FACTOR_BOUND),
            Err(Error::ExcludedValue(_))
        ));
        // 1000003 is prime and beyond a bound of 1000.
        assert!(matches!(
            factor_symbol(&q("1000003"), 1000),
            Err(Error::FactorBound(_, 1000))
        ));
    }

    #[test]
    fn base_reduction_two_mod_three() {
        let red = base_reduction(2, 3).unwrap();
        assert_eq!(red.trace.z, vec![2, 1]);
        assert_eq!(red.trace.r, vec![1]);
        assert_eq!(red.trace.order, 2);
        assert_eq!(red.steinberg, vec![(q("1/4"), q("-1/2"))]);
        assert_eq!(red.residual.coefficient(2, 2), q("2"));
        assert_eq!(red.residual.iter().count(), 1);
    }

    #[test]
    fn base_reduction_two_mod_seven() {
        let red = base_reduction(2, 7).unwrap();
        assert_eq!(red.trace.z, vec![2, 4, 1]);
        assert_eq!(red.trace.r, vec![0, 1]);
        assert_eq!(red.trace.order, 3);
        assert_eq!(red.steinberg, vec![(q("1/8"), q("-1/3"))]);
        assert_eq!(red.residual.coefficient(2, 2), q("3"));
        assert_eq!(red.residual.iter().count(), 1);
    }

    #[test]
    fn base_reduction_three_mod_seven() {
        let red = base_reduction(3, 7).unwrap();
        assert_eq!(red.trace.z, vec![3, 2, 6, 4, 5, 1]);
        assert_eq!(red.trace.r, vec![1, 0, 2, 1, 2]);
        assert_eq!(red.trace.order, 6);
        // t = 2/9 occurs twice and merges; all parameters lie in (0, 1).
        assert_eq!(
            red.steinberg,
            vec![
                (q("1/15"), q("-1/6")),
                (q("2/9"), q("-1/3")),
                (q("5/12"), q("-1/6")),
            ]
        );
        for (t, _) in &red.steinberg {
            assert!(t > &q("0") && t < &q("1"));
        }
    }

    #[test]
    fn base_reduction_identity_holds() {
        // q ⊗ P = Σ d·t⊗(1−t) + residual, expanded in the prime basis.
        for (a, p) in [(2u64, 3u64), (2, 7), (3, 7), (5, 11), (6, 13)] {
            let red = base_reduction(a, p).unwrap();
            let d = Decomposition {
                pair: None,
                symmetric: Vec::new(),
                steinberg: red.steinberg.clone(),
            };
            let relators = reconstruct(&d, DEFAULT_FACTOR_BOUND).unwrap();
            let total = relators.add(&red.residual);
            let mut expect = SymbolTensor::new();
            for (prime, e) in factor_symbol(&Rational::from_integer((a as i64).into()), p)
                .unwrap()
                .iter()
            {
                expect.add_term(prime, p, e);
            }
            assert_eq!(total, expect, "identity fails for ({a}, {p})");
            assert!(red.residual.max_prime().is_none_or(|m| m < p));
        }
    }

    #[test]
    fn decompose_pinned_small_pairs() {
        let d = decompose(2, 3).unwrap();
        assert_eq!(d.pair, Some((2, 3)));
        assert_eq!(d.symmetric, vec![(2, 2, q("1"))]);
        assert_eq!(d.steinberg, vec![(q("1/4"), q("-1/2"))]);

        let d = decompose(2, 2).unwrap();
        assert_eq!(d.symmetric, vec![(2, 2, q("1/2"))]);
        assert!(d.steinberg.is_empty());

        let d = decompose(2, 7).unwrap();
        assert_eq!(d.symmetric, vec![(2, 2, q("3/2"))]);
        assert_eq!(d.steinberg, vec![(q("1/8"), q("-1/3"))]);

        let d = decompose(7, 2).unwrap();
        assert_eq!(d.symmetric, vec![(2, 2, q("-3/2")), (2, 7, q("1"))]);
        assert_eq!(d.steinberg, vec![(q("1/8"), q("1/3"))]);
    }

    #[test]
    fn decompose_three_seven_steinberg_parameters() {
        let d = decompose(3, 7).unwrap();
        let params: Vec<&Rational> = d.steinberg.iter().map(|(t, _)| t).collect();
        assert!(params.contains(&&q("2/9")));
        assert!(params.contains(&&q("5/12")));
        assert!(params.contains(&&q("1/15")));
        let merged = d
            .steinberg
            .iter()
            .find(|(t, _)| t == &q("2/9"))
            .map(|(_, c)| c.clone())
            .unwrap();
        assert_eq!(merged, q("-1/3"));
    }

    #[test]
    fn decompose_rejects_composite_inputs() {
        assert!(matches!(decompose(4, 3), Err(Error::NotPrime(4))));
        assert!(matches!(decompose(3, 9), Err(Error::NotPrime(9))));
    }

    #[test]
    fn reconstruct_inverts_decompose() {
        let primes = [2u64, 3, 5, 7, 11, 13];
        for &a in &primes {
            for &b in &primes {
                let d = decompose(a, b).unwrap();
                let back = reconstruct(&d, DEFAULT_FACTOR_BOUND).unwrap();
                assert_eq!(back, unit_tensor(a, b), "round trip fails for ({a}, {b})");
                let bound = a.max(b);
                for (u, v, _) in &d.symmetric {
                    assert!(*u <= bound && *v <= bound, "relator prime escapes");
                }
                for (t, _) in &d.steinberg {
                    let one = q("1");
                    for side in [t.clone(), &one - t] {
                        let f = factor_symbol(&side, DEFAULT_FACTOR_BOUND).unwrap();
                        assert!(f.iter().all(|(p, _)| p <= bound), "Steinberg prime escapes");
                    }
                }
            }
        }
    }

    #[test]
    fn ad_hoc_relator_tables_reconstruct() {
        // t = −7: 1−t = 8, so (1/3)·(−7)⊗8 = 7⊗2.
        let d = Decomposition {
            pair: None,
            symmetric: Vec::new(),
            steinberg: vec![(q("-7"), q("1/3"))],
        };
        assert_eq!(
            reconstruct(&d, DEFAULT_FACTOR_BOUND).unwrap(),
            unit_tensor(7, 2)
        );
        // t = 7 paired with t = −7: 7⊗(−6) − (1/3)(−7)⊗8 = 7⊗2 + 7⊗3 − 7⊗2.
        let d = Decomposition {
            pair: None,
            symmetric: Vec::new(),
            steinberg: vec![(q("7"), q("1")), (q("-7"), q("-1/3"))],
        };
        assert_eq!(
            reconstruct(&d, DEFAULT_FACTOR_BOUND).unwrap(),
            unit_tensor(7, 3)
        );
    }

    #[test]
    fn reconstruct_rejects_singular_parameters() {
        for bad in ["0", "1"] {
            let d = Decomposition {
                pair: None,
                symmetric: Vec::new(),
                steinberg: vec![(q(bad), q("1"))],
            };
            assert!(matches!(
                reconstruct(&d, DEFAULT_FACTOR_BOUND),
                Err(Error::ExcludedValue(_))
            ));
        }
    }

    #[test]
    fn decomposition_serde_round_trip() {
        let d = decompose(7, 2).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"pair":[7,2],"symmetric":[[2,2,"-3/2"],[2,7,"1"]],"steinberg":[["1/8","1/3"]]}"#
        );
        let back: Decomposition = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn symbol_serde_round_trips() {
        let v = factor_symbol(&q("-8/9"), DEFAULT_FACTOR_BOUND).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        let back: SymbolVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        let t = v.tensor(&v);
        let json = serde_json::to_string(&t).unwrap();
        let back: SymbolTensor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
