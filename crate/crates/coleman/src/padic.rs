//! Truncated p-adic numbers with explicit, honest precision.
//!
//! A nonzero element is stored as `u * p^val` with the unit `u` known modulo
//! `p^rel` (`rel ≥ 1` is the *relative* precision; `val + rel` is the
//! *absolute* precision).  Zero is a sentinel "known to vanish to absolute
//! precision `abs`": the difference of two values that agree to `abs` digits.
//! Arithmetic never reports more digits than its inputs guarantee, and
//! comparisons can only assert indistinguishability at a precision, never
//! true equality.

use std::cmp::min;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::util::is_prime;
use crate::{Rational, Result};

/// Absolute precision assigned to zeros produced from exact inputs.  Large
/// enough to dominate every realistic precision budget, small enough that
/// sums of two sentinels cannot overflow an `i64`.
pub const EXACT_ZERO_ABS: i64 = i64::MAX / 4;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Form {
    /// Indistinguishable from zero modulo `p^abs`.
    Zero { abs: i64 },
    /// `unit * p^val` with `unit` reduced modulo `p^rel` and coprime to `p`.
    Unit { val: i64, unit: BigUint, rel: u32 },
}

/// A truncated p-adic number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicNumber {
    p: u64,
    form: Form,
}

fn p_pow(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Splits `x ≠ 0` as `(v, u)` with `x = u * p^v` and `p ∤ u`.
fn split_valuation(p: u64, x: &BigUint) -> (u32, BigUint) {
    debug_assert!(!x.is_zero());
    let bp = BigUint::from(p);
    let mut v = 0u32;
    let mut u = x.clone();
    loop {
        let (q, r) = u.div_rem(&bp);
        if r.is_zero() {
            u = q;
            v += 1;
        } else {
            return (v, u);
        }
    }
}

/// Inverse of `u` modulo `m` (requires `gcd(u, m) = 1`).
fn inv_mod(u: &BigUint, m: &BigUint) -> BigUint {
    let a = BigInt::from(u.clone());
    let md = BigInt::from(m.clone());
    let eg = a.extended_gcd(&md);
    assert!(eg.gcd.is_one(), "inv_mod requires coprime inputs");
    let mut x = eg.x % &md;
    if x.is_negative() {
        x += &md;
    }
    x.to_biguint().expect("reduced residue is nonnegative")
}

impl PadicNumber {
    fn mk_zero(p: u64, abs: i64) -> Self {
        PadicNumber {
            p,
            form: Form::Zero {
                abs: abs.min(EXACT_ZERO_ABS),
            },
        }
    }

    fn mk_unit(p: u64, val: i64, unit: BigUint, rel: u32) -> Self {
        debug_assert!(rel >= 1);
        debug_assert!(unit < p_pow(p, rel));
        debug_assert!(!(&unit % p).is_zero());
        PadicNumber {
            p,
            form: Form::Unit { val, unit, rel },
        }
    }

    /// Zero known to vanish modulo `p^abs`.
    pub fn zero(p: u64, abs: i64) -> Self {
        Self::mk_zero(p, abs)
    }

    /// Zero arising from an exactly-zero input.
    pub fn exact_zero(p: u64) -> Self {
        Self::mk_zero(p, EXACT_ZERO_ABS)
    }

    /// The unit 1 at relative precision `rel`.
    pub fn one(p: u64, rel: u32) -> Self {
        assert!(rel >= 1, "relative precision must be at least 1");
        Self::mk_unit(p, 0, BigUint::one(), rel)
    }

    /// Embeds the rational `r` at relative precision `n` (absolute precision
    /// `n` when `r = 0`).  Errors: `p` not prime; `n < 1`.
    pub fn from_rational(r: &Rational, p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n < 1 {
            return Err(Error::InvalidPrecision(
                "relative precision must be at least 1".into(),
            ));
        }
        if r.is_zero() {
            return Ok(Self::mk_zero(p, n as i64));
        }
        let (vn, un) = split_valuation(p, r.numer().magnitude());
        let (vd, ud) = split_valuation(p, r.denom().magnitude());
        let val = vn as i64 - vd as i64;
        let m = p_pow(p, n);
        let mut unit = (un % &m) * inv_mod(&(ud % &m), &m) % &m;
        if r.is_negative() {
            unit = &m - unit;
        }
        Ok(Self::mk_unit(p, val, unit, n))
    }

    /// Embeds the integer `k` at relative precision `n`.
    pub fn from_integer(k: i64, p: u64, n: u32) -> Result<Self> {
        Self::from_rational(&Rational::from_integer(BigInt::from(k)), p, n)
    }

    /// The prime this number lives over.
    pub fn prime(&self) -> u64 {
        self.p
    }

    /// `true` when the value is indistinguishable from zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.form, Form::Zero { .. })
    }

    /// Valuation, or `None` for a value indistinguishable from zero.
    pub fn valuation(&self) -> Option<i64> {
        match &self.form {
            Form::Zero { .. } => None,
            Form::Unit { val, .. } => Some(*val),
        }
    }

    /// Guaranteed lower bound on the valuation: the valuation itself for a
    /// distinguishable value, the vanishing precision for a zero.
    pub fn val_lower_bound(&self) -> i64 {
        match &self.form {
            Form::Zero { abs } => *abs,
            Form::Unit { val, .. } => *val,
        }
    }

    /// Unit residue (reduced modulo `p^rel`), or `None` for zero.
    pub fn unit_residue(&self) -> Option<&BigUint> {
        match &self.form {
            Form::Zero { .. } => None,
            Form::Unit { unit, .. } => Some(unit),
        }
    }

    /// Relative precision, or `None` for zero.
    pub fn rel_precision(&self) -> Option<u32> {
        match &self.form {
            Form::Zero { .. } => None,
            Form::Unit { rel, .. } => Some(*rel),
        }
    }

    /// Absolute precision: `val + rel` for a unit form, the vanishing
    /// precision for a zero.
    pub fn abs_precision(&self) -> i64 {
        match &self.form {
            Form::Zero { abs } => *abs,
            Form::Unit { val, rel, .. } => val + *rel as i64,
        }
    }

    /// The residue of `self` modulo `p^k`, for `0 ≤ k ≤` absolute precision.
    /// Requires valuation ≥ 0.
    pub fn residue_mod(&self, k: u32) -> BigUint {
        assert!(
            k as i64 <= self.abs_precision(),
            "residue request beyond absolute precision"
        );
        match &self.form {
            Form::Zero { .. } => BigUint::zero(),
            Form::Unit { val, unit, .. } => {
                assert!(*val >= 0, "residue_mod requires a p-integral value");
                if *val >= k as i64 {
                    BigUint::zero()
                } else {
                    unit * p_pow(self.p, *val as u32) % p_pow(self.p, k)
                }
            }
        }
    }

    /// Caps the absolute precision at `abs`, discarding digits beyond it.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        match &self.form {
            Form::Zero { abs: a } => Self::mk_zero(self.p, min(*a, abs)),
            Form::Unit { val, unit, rel } => {
                if *val >= abs {
                    Self::mk_zero(self.p, abs)
                } else {
                    let new_rel = min(*rel as i64, abs - val) as u32;
                    if new_rel == *rel {
                        self.clone()
                    } else {
                        Self::mk_unit(self.p, *val, unit % p_pow(self.p, new_rel), new_rel)
                    }
                }
            }
        }
    }

    /// Largest `A` for which the inputs are known to agree modulo `p^A`.
    /// When they genuinely differ this is the valuation of the difference.
    pub fn agreement_abs(&self, other: &Self) -> i64 {
        (self - other).val_lower_bound()
    }

    /// `true` when `self - other` is indistinguishable from zero.
    pub fn indistinguishable(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// Multiplies by an exact rational scalar (no precision loss beyond the
    /// scalar's own p-valuation shift).
    pub fn mul_rational(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::exact_zero(self.p);
        }
        match &self.form {
            Form::Zero { abs } => {
                let (vn, _) = split_valuation(self.p, r.numer().magnitude());
                let (vd, _) = split_valuation(self.p, r.denom().magnitude());
                Self::mk_zero(self.p, abs + vn as i64 - vd as i64)
            }
            Form::Unit { rel, .. } => {
                let s = Self::from_rational(r, self.p, *rel)
                    .expect("prime and precision are valid by construction");
                self * &s
            }
        }
    }

    /// The unit cofactor `u` of `self = u·p^val`, at the same relative
    /// precision.  Errors: the value is indistinguishable from zero.
    pub fn unit_part(&self) -> Result<Self> {
        match &self.form {
            Form::Zero { .. } => Err(Error::NotAUnit { val: None }),
            Form::Unit { unit, rel, .. } => Ok(Self::mk_unit(self.p, 0, unit.clone(), *rel)),
        }
    }

    /// Multiplicative inverse.  Errors: the value is indistinguishable from
    /// zero.
    pub fn inv(&self) -> Result<Self> {
        match &self.form {
            Form::Zero { abs } => Err(Error::DivisionByZero { abs: *abs }),
            Form::Unit { val, unit, rel } => {
                let m = p_pow(self.p, *rel);
                Ok(Self::mk_unit(self.p, -val, inv_mod(unit, &m), *rel))
            }
        }
    }

    /// Division.  Errors: divisor indistinguishable from zero.
    pub fn div(&self, rhs: &Self) -> Result<Self> {
        assert_eq!(self.p, rhs.p, "mixed primes in p-adic division");
        Ok(self * &rhs.inv()?)
    }

    /// Integer power.  Errors: negative exponent of a value
    /// indistinguishable from zero.
    pub fn pow(&self, e: i64) -> Result<Self> {
        match &self.form {
            Form::Zero { abs } => {
                if e <= 0 {
                    Err(Error::DivisionByZero { abs: *abs })
                } else {
                    Ok(Self::mk_zero(self.p, abs.saturating_mul(e)))
                }
            }
            Form::Unit { val, unit, rel } => {
                if e == 0 {
                    return Ok(Self::one(self.p, *rel));
                }
                let m = p_pow(self.p, *rel);
                let powered = unit.modpow(&BigUint::from(e.unsigned_abs()), &m);
                let u = if e < 0 {
                    inv_mod(&powered, &m)
                } else {
                    powered
                };
                let new_val = val.checked_mul(e).expect("valuation overflow in pow");
                Ok(Self::mk_unit(self.p, new_val, u, *rel))
            }
        }
    }

    /// Teichmüller lift: the unique `(p-1)`-th root of unity congruent to
    /// `self` modulo `p`, computed at `self`'s relative precision.  Errors:
    /// the value is not a unit (valuation ≠ 0 or indistinguishable from
    /// zero).
    pub fn teichmuller(&self) -> Result<Self> {
        match &self.form {
            Form::Zero { .. } => Err(Error::NotAUnit { val: None }),
            Form::Unit { val, unit, rel } => {
                if *val != 0 {
                    return Err(Error::NotAUnit { val: Some(*val) });
                }
                let m = p_pow(self.p, *rel);
                let bp = BigUint::from(self.p);
                let mut x = unit.clone();
                // x ↦ x^p gains one digit of agreement with the fixed point
                // per step; rel + 1 steps reach it, the extra pass confirms.
                for _ in 0..=(*rel + 1) {
                    let next = x.modpow(&bp, &m);
                    if next == x {
                        break;
                    }
                    x = next;
                }
                debug_assert_eq!(x.modpow(&bp, &m), x);
                Ok(Self::mk_unit(self.p, 0, x, *rel))
            }
        }
    }
}

impl std::ops::Neg for &PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        match &self.form {
            Form::Zero { abs } => PadicNumber::mk_zero(self.p, *abs),
            Form::Unit { val, unit, rel } => {
                let m = p_pow(self.p, *rel);
                PadicNumber::mk_unit(self.p, *val, &m - unit, *rel)
            }
        }
    }
}

impl std::ops::Add for &PadicNumber {
    type Output = PadicNumber;
    fn add(self, rhs: &PadicNumber) -> PadicNumber {
        assert_eq!(self.p, rhs.p, "mixed primes in p-adic addition");
        let p = self.p;
        match (&self.form, &rhs.form) {
            (Form::Zero { abs: a }, Form::Zero { abs: b }) => PadicNumber::mk_zero(p, min(*a, *b)),
            (Form::Zero { abs }, Form::Unit { .. }) => rhs.truncate_abs(*abs),
            (Form::Unit { .. }, Form::Zero { abs }) => self.truncate_abs(*abs),
            (
                Form::Unit {
                    val: v1,
                    unit: u1,
                    rel: r1,
                },
                Form::Unit {
                    val: v2,
                    unit: u2,
                    rel: r2,
                },
            ) => {
                let abs = min(v1 + *r1 as i64, v2 + *r2 as i64);
                let base = min(*v1, *v2);
                // Both absolute precisions strictly exceed their valuations,
                // hence abs > base and the residue window is nonempty.
                let digits = (abs - base) as u32;
                let m = p_pow(p, digits);
                let t1 = u1 * p_pow(p, (v1 - base) as u32) % &m;
                let t2 = u2 * p_pow(p, (v2 - base) as u32) % &m;
                let r = (t1 + t2) % &m;
                if r.is_zero() {
                    PadicNumber::mk_zero(p, abs)
                } else {
                    let (w, u) = split_valuation(p, &r);
                    PadicNumber::mk_unit(p, base + w as i64, u, digits - w)
                }
            }
        }
    }
}

impl std::ops::Sub for &PadicNumber {
    type Output = PadicNumber;
    fn sub(self, rhs: &PadicNumber) -> PadicNumber {
        self + &(-rhs)
    }
}

impl std::ops::Mul for &PadicNumber {
    type Output = PadicNumber;
    fn mul(self, rhs: &PadicNumber) -> PadicNumber {
        assert_eq!(self.p, rhs.p, "mixed primes in p-adic multiplication");
        let p = self.p;
        match (&self.form, &rhs.form) {
            (Form::Zero { abs: a }, Form::Zero { abs: b }) => {
                PadicNumber::mk_zero(p, a.saturating_add(*b))
            }
            (Form::Zero { abs }, Form::Unit { val, .. })
            | (Form::Unit { val, .. }, Form::Zero { abs }) => {
                PadicNumber::mk_zero(p, abs.saturating_add(*val))
            }
            (
                Form::Unit {
                    val: v1,
                    unit: u1,
                    rel: r1,
                },
                Form::Unit {
                    val: v2,
                    unit: u2,
                    rel: r2,
                },
            ) => {
                let rel = min(*r1, *r2);
                let m = p_pow(p, rel);
                PadicNumber::mk_unit(p, v1 + v2, u1 * u2 % &m, rel)
            }
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait for PadicNumber {
            type Output = PadicNumber;
            fn $method(self, rhs: PadicNumber) -> PadicNumber {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    };
}
forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl std::ops::Neg for PadicNumber {
    type Output = PadicNumber;
    fn neg(self) -> PadicNumber {
        -&self
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            Form::Zero { abs } => {
                if *abs >= EXACT_ZERO_ABS {
                    write!(f, "0")
                } else {
                    write!(f, "O({}^{})", self.p, abs)
                }
            }
            Form::Unit { val, unit, rel } => {
                let abs = val + *rel as i64;
                if *val == 0 {
                    write!(f, "{} + O({}^{})", unit, self.p, abs)
                } else {
                    write!(f, "{}*{}^{} + O({}^{})", unit, self.p, val, self.p, abs)
                }
            }
        }
    }
}

/// Wire format: `{"p": 5, "val": 1, "unit": "2", "prec": 3}` with `val`
/// null and `prec` the vanishing precision for zero.
#[derive(Serialize, Deserialize)]
struct PadicRepr {
    p: u64,
    val: Option<i64>,
    unit: String,
    prec: i64,
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match &self.form {
            Form::Zero { abs } => PadicRepr {
                p: self.p,
                val: None,
                unit: "0".into(),
                prec: *abs,
            },
            Form::Unit { val, unit, rel } => PadicRepr {
                p: self.p,
                val: Some(*val),
                unit: unit.to_string(),
                prec: *rel as i64,
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PadicNumber {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = PadicRepr::deserialize(d)?;
        if !is_prime(repr.p) {
            return Err(D::Error::custom(format!("{} is not prime", repr.p)));
        }
        match repr.val {
            None => Ok(PadicNumber::mk_zero(repr.p, repr.prec)),
            Some(val) => {
                let rel = u32::try_from(repr.prec)
                    .ok()
                    .filter(|r| *r >= 1)
                    .ok_or_else(|| D::Error::custom("relative precision must be >= 1"))?;
                let unit: BigUint = repr
                    .unit
                    .parse()
                    .map_err(|e| D::Error::custom(format!("bad unit residue: {e}")))?;
                if unit >= p_pow(repr.p, rel) {
                    return Err(D::Error::custom("unit residue out of range"));
                }
                if (&unit % repr.p).is_zero() {
                    return Err(D::Error::custom("unit residue divisible by p"));
                }
                Ok(PadicNumber::mk_unit(repr.p, val, unit, rel))
            }
        }
    }
}

/// Parses a rational from `a`, `-a`, or `a/b` text.
pub fn parse_rational(text: &str) -> Result<Rational> {
    text.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("{text:?} is not a rational: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn pad(s: &str, p: u64, n: u32) -> PadicNumber {
        PadicNumber::from_rational(&q(s), p, n).unwrap()
    }

    #[test]
    fn from_rational_extracts_valuation() {
        let x = pad("10", 5, 3);
        assert_eq!(x.valuation(), Some(1));
        assert_eq!(x.unit_residue().unwrap(), &BigUint::from(2u32));
        assert_eq!(x.rel_precision(), Some(3));
        assert_eq!(x.abs_precision(), 4);
    }

    #[test]
    fn from_rational_inverts_denominators() {
        let x = pad("1/3", 5, 2);
        assert_eq!(x.valuation(), Some(0));
        // 3 · 17 = 51 ≡ 1 (mod 25).
        assert_eq!(x.unit_residue().unwrap(), &BigUint::from(17u32));
    }

    #[test]
    fn from_rational_zero_is_sentinel() {
        let x = pad("0", 5, 3);
        assert!(x.is_zero());
        assert_eq!(x.valuation(), None);
        assert_eq!(x.abs_precision(), 3);
    }

    #[test]
    fn from_rational_rejects_bad_parameters() {
        assert!(matches!(
            PadicNumber::from_rational(&q("1"), 6, 3),
            Err(Error::NotPrime(6))
        ));
        assert!(matches!(
            PadicNumber::from_rational(&q("1"), 5, 0),
            Err(Error::InvalidPrecision(_))
        ));
    }

    #[test]
    fn addition_tracks_cancellation() {
        // 2 + 3 = 5: valuation rises, relative precision drops to 2.
        let s = &pad("2", 5, 3) + &pad("3", 5, 3);
        assert_eq!(s.valuation(), Some(1));
        assert_eq!(s.unit_residue().unwrap(), &BigUint::one());
        assert_eq!(s.rel_precision(), Some(2));
        assert_eq!(s.abs_precision(), 3);
    }

    #[test]
    fn full_cancellation_yields_zero_sentinel() {
        let x = pad("7/3", 5, 4);
        let d = &x - &x;
        assert!(d.is_zero());
        assert_eq!(d.abs_precision(), 4);
    }

    #[test]
    fn multiplication_adds_valuations() {
        let prod = &pad("1/5", 5, 3) * &pad("5", 5, 3);
        assert_eq!(prod.valuation(), Some(0));
        assert_eq!(prod.unit_residue().unwrap(), &BigUint::one());
        let one = PadicNumber::one(5, 3);
        assert!(prod.indistinguishable(&one));
    }

    #[test]
    fn negative_valuations_are_supported() {
        let x = pad("7/25", 5, 3);
        assert_eq!(x.valuation(), Some(-2));
        assert_eq!(x.abs_precision(), 1);
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let x = pad("2", 5, 3);
        let z = pad("0", 5, 3);
        match x.div(&z) {
            Err(Error::DivisionByZero { abs }) => assert_eq!(abs, 3),
            other => panic!("expected division-by-zero error, got {other:?}"),
        }
    }

    #[test]
    fn division_reduces_precision_budget_honestly() {
        // (val 0, rel 4) / (val 2, rel 2): result keeps rel = 2 only.
        let a = pad("7", 5, 4);
        let b = pad("50", 5, 2);
        let c = a.div(&b).unwrap();
        assert_eq!(c.valuation(), Some(-2));
        assert_eq!(c.rel_precision(), Some(2));
    }

    #[test]
    fn add_sub_round_trip_at_common_precision() {
        let cases = [
            ("7/3", "10", 5, 6),
            ("-8/9", "2/7", 7, 5),
            ("1/2", "9", 11, 4),
        ];
        for (a, b, p, n) in cases {
            let x = pad(a, p, n);
            let y = pad(b, p, n);
            let back = &(&x + &y) - &y;
            assert!(
                back.indistinguishable(&x),
                "({a} + {b}) - {b} ≠ {a} at p = {p}"
            );
        }
    }

    #[test]
    fn teichmuller_of_two_mod_25() {
        let w = pad("2", 5, 2).teichmuller().unwrap();
        // 7^4 = 2401 ≡ 1 (mod 25) and 7 ≡ 2 (mod 5).
        assert_eq!(w.unit_residue().unwrap(), &BigUint::from(7u32));
        let fourth = w.pow(4).unwrap();
        assert!(fourth.indistinguishable(&PadicNumber::one(5, 2)));
    }

    #[test]
    fn teichmuller_fixed_points_and_errors() {
        let one = pad("1", 5, 6).teichmuller().unwrap();
        assert_eq!(one.unit_residue().unwrap(), &BigUint::one());
        assert!(matches!(
            pad("5", 5, 3).teichmuller(),
            Err(Error::NotAUnit { val: Some(1) })
        ));
        assert!(matches!(
            pad("0", 5, 3).teichmuller(),
            Err(Error::NotAUnit { val: None })
        ));
    }

    #[test]
    fn teichmuller_is_multiplicative_and_congruent() {
        let p = 11u64;
        for a in 1..p {
            let x = PadicNumber::from_integer(a as i64, p, 8).unwrap();
            let w = x.teichmuller().unwrap();
            let pw = w.pow(p as i64 - 1).unwrap();
            assert!(pw.indistinguishable(&PadicNumber::one(p, 8)));
            assert_eq!(w.residue_mod(1), BigUint::from(a));
        }
    }

    #[test]
    fn from_rational_is_multiplicative() {
        let pairs = [("7/3", "10"), ("-4/9", "27/2"), ("6", "-1/6")];
        for (a, b) in pairs {
            let x = pad(a, 5, 8);
            let y = pad(b, 5, 8);
            let prod = PadicNumber::from_rational(&(q(a) * q(b)), 5, 8).unwrap();
            let got = &x * &y;
            assert!(
                got.agreement_abs(&prod) >= got.abs_precision(),
                "embedding not multiplicative on ({a}, {b})"
            );
        }
    }

    #[test]
    fn truncate_caps_absolute_precision() {
        let x = pad("10", 5, 6); // val 1, abs 7
        let t = x.truncate_abs(3);
        assert_eq!(t.abs_precision(), 3);
        assert_eq!(t.rel_precision(), Some(2));
        let z = x.truncate_abs(1);
        assert!(z.is_zero());
        assert_eq!(z.abs_precision(), 1);
    }

    #[test]
    fn display_formats() {
        assert_eq!(pad("17/1", 5, 2).to_string(), "17 + O(5^2)");
        assert_eq!(pad("10", 5, 3).to_string(), "2*5^1 + O(5^4)");
        assert_eq!(pad("0", 5, 3).to_string(), "O(5^3)");
        assert_eq!(PadicNumber::exact_zero(5).to_string(), "0");
    }

    #[test]
    fn serde_round_trip() {
        for s in ["10", "1/3", "0", "-7/25"] {
            let x = pad(s, 5, 4);
            let json = serde_json::to_string(&x).unwrap();
            let back: PadicNumber = serde_json::from_str(&json).unwrap();
            assert_eq!(x, back, "round trip failed for {s}: {json}");
        }
        let x = pad("10", 5, 3);
        let json = serde_json::to_value(&x).unwrap();
        assert_eq!(json["p"], 5);
        assert_eq!(json["val"], 1);
        assert_eq!(json["unit"], "2");
        assert_eq!(json["prec"], 3);
    }

    #[test]
    fn mul_rational_is_exact_scaling() {
        let x = pad("7", 5, 4);
        let y = x.mul_rational(&q("3/2"));
        let expect = pad("21/2", 5, 4);
        assert!(y.indistinguishable(&expect));
        // Scaling by p shifts the valuation without losing digits.
        let z = x.mul_rational(&q("5"));
        assert_eq!(z.valuation(), Some(1));
        assert_eq!(z.rel_precision(), Some(4));
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let x = pad("2", 5, 4);
        let y = x.pow(-3).unwrap();
        let expect = pad("1/8", 5, 4);
        assert!(y.indistinguishable(&expect));
        assert!(x.pow(0).unwrap().indistinguishable(&PadicNumber::one(5, 4)));
        assert!(pad("0", 5, 3).pow(-1).is_err());
    }
}
