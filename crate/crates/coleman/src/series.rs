//! Truncated power series over the p-adics, with disk-aware error bounds.
//!
//! A `PowerSeries` stores coefficients `c_0 .. c_{L-1}` of a function
//! analytic on a fixed disk, together with two optional annotations:
//!
//! * a **tail bound** `t`: for every `n ≥ L` and every admissible point `x`
//!   of the disk, `v_p(c_n x^n) ≥ t` (a bound on everything the truncation
//!   discarded);
//! * an **error bound** `e`: the represented function differs from the true
//!   target function by a function whose value at any admissible point has
//!   valuation `≥ e`.
//!
//! Stored coefficients are combined by exact p-adic arithmetic, so they are
//! honest by construction.  Annotations are propagated where a sound rule
//! exists (addition, multiplication, scaling, affine composition,
//! evaluation).  Termwise calculus — integration, differentiation,
//! quotients — has no sound termwise transfer rule for annotations, so
//! those operations drop them: the result describes the termwise-transformed
//! stored polynomial only, and pipelines attach analytically derived bounds
//! to the finished object before evaluating it.  Evaluation caps its result
//! at every applicable bound, so a value never claims more digits than the
//! series guarantees.

use std::cmp::min;

use num_traits::Zero as _;

use crate::error::Error;
use crate::padic::{PadicNumber, EXACT_ZERO_ABS};
use crate::{Rational, Result};

/// Disk of convergence: which evaluation points are admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disk {
    /// Closed unit disk: points with valuation ≥ 0.
    Closed,
    /// Open unit disk (radius 1/p in the truncated setting): valuation ≥ 1.
    Open,
}

impl Disk {
    /// Minimum valuation of an admissible point.
    pub fn min_val(self) -> i64 {
        match self {
            Disk::Closed => 0,
            Disk::Open => 1,
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Disk::Closed => "closed unit",
            Disk::Open => "open unit",
        }
    }
}

/// A truncated power series.  See the module docs for the exact semantics
/// of the two bound annotations.
#[derive(Debug, Clone)]
pub struct PowerSeries {
    p: u64,
    var: String,
    disk: Disk,
    coeffs: Vec<PadicNumber>,
    tail: Option<i64>,
    err: Option<i64>,
}

fn omin(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(a), Some(b)) => Some(min(a, b)),
    }
}

impl PowerSeries {
    /// Builds a series from explicit coefficients, padding with exact zeros
    /// up to `order`.  Requires `order ≥ 1`, `coeffs.len() ≤ order`, and all
    /// coefficients over the prime `p`.
    pub fn new(p: u64, var: &str, disk: Disk, mut coeffs: Vec<PadicNumber>, order: usize) -> Self {
        assert!(order >= 1, "series order must be at least 1");
        assert!(
            coeffs.len() <= order,
            "coefficient list longer than the truncation order"
        );
        for c in &coeffs {
            assert_eq!(c.prime(), p, "coefficient over the wrong prime");
        }
        while coeffs.len() < order {
            coeffs.push(PadicNumber::exact_zero(p));
        }
        PowerSeries {
            p,
            var: var.to_string(),
            disk,
            coeffs,
            tail: None,
            err: None,
        }
    }

    /// The zero series of the given order.
    pub fn zero(p: u64, var: &str, disk: Disk, order: usize) -> Self {
        Self::new(p, var, disk, Vec::new(), order)
    }

    /// A constant series.
    pub fn constant(c: PadicNumber, var: &str, disk: Disk, order: usize) -> Self {
        Self::new(c.prime(), var, disk, vec![c], order)
    }

    /// Attaches (min-merges) a tail bound annotation.
    pub fn with_tail_bound(mut self, offset: i64) -> Self {
        self.tail = omin(self.tail, Some(offset));
        self
    }

    /// Attaches (min-merges) a function-level error bound annotation.
    pub fn with_err_bound(mut self, bound: i64) -> Self {
        self.err = omin(self.err, Some(bound));
        self
    }

    /// The prime.
    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The variable tag.
    pub fn var(&self) -> &str {
        &self.var
    }

    /// The disk of convergence.
    pub fn disk(&self) -> Disk {
        self.disk
    }

    /// Truncation order (= number of stored coefficients).
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// The stored coefficients.
    pub fn coeffs(&self) -> &[PadicNumber] {
        &self.coeffs
    }

    /// Coefficient of `var^n` (panics if `n` is at or beyond the order).
    pub fn coeff(&self, n: usize) -> &PadicNumber {
        &self.coeffs[n]
    }

    /// Current tail bound annotation.
    pub fn tail_bound(&self) -> Option<i64> {
        self.tail
    }

    /// Current function-level error bound annotation.
    pub fn err_bound(&self) -> Option<i64> {
        self.err
    }

    /// Lower bound on `v_p(c_n x^n)` over admissible `x`, for stored `n`.
    fn stored_val_x(&self, n: usize) -> i64 {
        self.coeffs[n]
            .val_lower_bound()
            .saturating_add(self.disk.min_val().saturating_mul(n as i64))
    }

    /// Suffix minima of `stored_val_x`; entry `len` is `i64::MAX`.
    fn suffix_min_val_x(&self) -> Vec<i64> {
        let len = self.coeffs.len();
        let mut out = vec![i64::MAX; len + 1];
        for n in (0..len).rev() {
            out[n] = min(out[n + 1], self.stored_val_x(n));
        }
        out
    }

    /// Lower bound on the valuation of any value of the true target
    /// function on the disk.
    fn value_bound(&self) -> i64 {
        let mut b = i64::MAX;
        for n in 0..self.coeffs.len() {
            b = min(b, self.stored_val_x(n));
        }
        if let Some(t) = self.tail {
            b = min(b, t);
        }
        if let Some(e) = self.err {
            b = min(b, e);
        }
        b
    }

    fn assert_compatible(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixed primes in series arithmetic");
        assert_eq!(self.var, other.var, "mixed variables in series arithmetic");
        assert_eq!(self.disk, other.disk, "mixed disks in series arithmetic");
    }

    /// Truncates to a shorter order, folding the discarded coefficients
    /// into the tail bound.
    pub fn truncate_order(&self, order: usize) -> Self {
        assert!(order >= 1, "series order must be at least 1");
        if order >= self.coeffs.len() {
            return self.clone();
        }
        let mut dropped = i64::MAX;
        for n in order..self.coeffs.len() {
            dropped = min(dropped, self.stored_val_x(n));
        }
        let mut out = self.clone();
        out.coeffs.truncate(order);
        out.tail = omin(self.tail, Some(dropped));
        out
    }

    /// Negation (annotations preserved).
    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c = -&*c;
        }
        out
    }

    /// Addition.  The result is truncated to the shorter order, with
    /// discarded coefficients folded into the tail bound.
    pub fn add(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let order = min(self.order(), other.order());
        let a = self.truncate_order(order);
        let b = other.truncate_order(order);
        let coeffs = (0..order).map(|n| &a.coeffs[n] + &b.coeffs[n]).collect();
        PowerSeries {
            p: self.p,
            var: self.var.clone(),
            disk: self.disk,
            coeffs,
            tail: omin(a.tail, b.tail),
            err: omin(a.err, b.err),
        }
    }

    /// Subtraction.
    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplication by a constant.  Annotations shift by the constant's
    /// valuation lower bound.
    pub fn scale(&self, c: &PadicNumber) -> Self {
        assert_eq!(c.prime(), self.p, "scalar over the wrong prime");
        let vc = c.val_lower_bound();
        let mut out = self.clone();
        for x in &mut out.coeffs {
            *x = &*x * c;
        }
        out.tail = self.tail.map(|t| t.saturating_add(vc));
        out.err = self.err.map(|e| e.saturating_add(vc));
        out
    }

    /// Multiplication by an exact rational constant.
    pub fn scale_rational(&self, r: &Rational) -> Self {
        let mut out = self.clone();
        for x in &mut out.coeffs {
            *x = x.mul_rational(r);
        }
        if r.is_zero() {
            out.tail = None;
            out.err = None;
            return out;
        }
        // Exact scalar: annotations shift by its p-valuation.
        let probe =
            PadicNumber::from_rational(r, self.p, 1).expect("prime is valid by construction");
        let vr = probe.valuation().expect("nonzero rational");
        out.tail = self.tail.map(|t| t.saturating_add(vr));
        out.err = self.err.map(|e| e.saturating_add(vr));
        out
    }

    /// Product, truncated to the shorter order.  The discarded stored×stored
    /// terms fold into the tail bound; annotation cross terms fold into the
    /// tail and error bounds.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_compatible(other);
        let order = min(self.order(), other.order());
        let la = self.order();
        let lb = other.order();
        let mut coeffs = vec![PadicNumber::exact_zero(self.p); order];
        for a in 0..min(la, order) {
            if self.coeffs[a].is_zero() && self.coeffs[a].abs_precision() >= EXACT_ZERO_ABS {
                continue; // exact zero contributes nothing
            }
            for b in 0..min(lb, order - a) {
                let term = &self.coeffs[a] * &other.coeffs[b];
                coeffs[a + b] = &coeffs[a + b] + &term;
            }
        }
        // Tail: stored×stored terms of degree ≥ order.
        let smin_b = other.suffix_min_val_x();
        let mut tail = i64::MAX;
        for a in 0..la {
            let from = order.saturating_sub(a).min(lb);
            let piece = smin_b[from];
            if piece < i64::MAX {
                tail = min(tail, self.stored_val_x(a).saturating_add(piece));
            }
        }
        let mut tail = if tail < i64::MAX { Some(tail) } else { None };
        // Annotation cross terms.
        let vb_a = self.value_bound();
        let vb_b = other.value_bound();
        if let Some(t) = self.tail {
            tail = omin(tail, Some(t.saturating_add(vb_b)));
        }
        if let Some(t) = other.tail {
            tail = omin(tail, Some(t.saturating_add(vb_a)));
        }
        let mut err = None;
        if let Some(e) = self.err {
            err = omin(err, Some(e.saturating_add(vb_b)));
        }
        if let Some(e) = other.err {
            err = omin(err, Some(e.saturating_add(vb_a)));
        }
        PowerSeries {
            p: self.p,
            var: self.var.clone(),
            disk: self.disk,
            coeffs,
            tail,
            err,
        }
    }

    /// Termwise antiderivative with zero constant term: `c_n ↦ c_n/(n+1)`
    /// shifted up one degree.  The order grows by one.  Annotations are
    /// dropped (termwise division by `n+1` has no sound transfer rule for
    /// them); attach analytic bounds to the result before evaluating.
    pub fn integrate(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.order() + 1);
        coeffs.push(PadicNumber::exact_zero(self.p));
        for (n, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.mul_rational(&Rational::new(1.into(), (n as i64 + 1).into())));
        }
        PowerSeries {
            p: self.p,
            var: self.var.clone(),
            disk: self.disk,
            coeffs,
            tail: None,
            err: None,
        }
    }

    /// Termwise derivative: `c_n ↦ n·c_n` shifted down one degree.
    /// Annotations are dropped; requires order ≥ 2.
    pub fn derivative(&self) -> Self {
        assert!(self.order() >= 2, "derivative needs order at least 2");
        let coeffs = (1..self.order())
            .map(|n| self.coeffs[n].mul_rational(&Rational::from_integer((n as i64).into())))
            .collect();
        PowerSeries {
            p: self.p,
            var: self.var.clone(),
            disk: self.disk,
            coeffs,
            tail: None,
            err: None,
        }
    }

    /// Division by the series variable.  Errors: the constant term is
    /// distinguishable from zero.  Incoming annotations are dropped; the
    /// constant term's vanishing precision becomes a function-level error
    /// bound (trivial when it is an exact zero, the only case library
    /// pipelines produce).
    pub fn shift_divide(&self) -> Result<Self> {
        assert!(self.order() >= 2, "shift_divide needs order at least 2");
        let c0 = &self.coeffs[0];
        if !c0.is_zero() {
            return Err(Error::Series(format!(
                "shift_divide: constant term {c0} is distinguishable from zero"
            )));
        }
        let dropped = c0.abs_precision();
        let err = if dropped >= EXACT_ZERO_ABS / 2 {
            None
        } else {
            Some(dropped)
        };
        Ok(PowerSeries {
            p: self.p,
            var: self.var.clone(),
            disk: self.disk,
            coeffs: self.coeffs[1..].to_vec(),
            tail: None,
            err,
        })
    }

    /// Quotient `self / rhs`, truncated to the shorter order.  Annotations
    /// are dropped.  Requires a divisor whose constant term is a unit
    /// (valuation 0), so the quotient is analytic on the whole disk.
    pub fn divide(&self, rhs: &Self) -> Result<Self> {
        self.assert_compatible(rhs);
        let d0 = &rhs.coeffs[0];
        if d0.valuation() != Some(0) {
            return Err(Error::Series(
                "divide: divisor constant term must be a unit".into(),
            ));
        }
        let d0_inv = d0.inv().expect("unit constant term");
        let order = min(self.order(), rhs.order());
        let mut q: Vec<PadicNumber> = Vec::with_capacity(order);
        for n in 0..order {
            let mut acc = self.coeffs[n].clone();
            for (j, qj) in q.iter().enumerate() {
                acc = &acc - &(qj * &rhs.coeffs[n - j]);
            }
            q.push(&acc * &d0_inv);
        }
        Ok(PowerSeries {
            p: self.p,
            var: self.var.clone(),
            disk: self.disk,
            coeffs: q,
            tail: None,
            err: None,
        })
    }

    /// Evaluation at an admissible point, by Horner's rule.  The result's
    /// absolute precision is capped at the tail and error bounds, so it
    /// never overstates what the truncation guarantees.  Errors: the point
    /// lies outside the disk of convergence.
    pub fn evaluate(&self, x: &PadicNumber) -> Result<PadicNumber> {
        assert_eq!(x.prime(), self.p, "evaluation point over the wrong prime");
        if x.val_lower_bound() < self.disk.min_val() {
            return Err(Error::OutsideDisk {
                val: x.valuation(),
                disk: self.disk.describe().into(),
            });
        }
        let mut acc = self.coeffs[self.order() - 1].clone();
        for n in (0..self.order() - 1).rev() {
            acc = &(&acc * x) + &self.coeffs[n];
        }
        match omin(self.tail, self.err) {
            Some(cap) => Ok(acc.truncate_abs(cap)),
            None => Ok(acc),
        }
    }

    /// Composition with an affine map: the series for `g(a + b·x)` in the
    /// new variable `x`, computed by exact polynomial Horner.  Requires the
    /// image of the disk to stay inside the domain disk (`v(a) ≥ s` and
    /// `v(b) + s' ≥ s`).  The input's annotations fold into a function-level
    /// error bound on the result.
    pub fn compose_affine(&self, a: &PadicNumber, b: &PadicNumber, new_var: &str) -> Result<Self> {
        assert_eq!(a.prime(), self.p, "shift over the wrong prime");
        assert_eq!(b.prime(), self.p, "scale over the wrong prime");
        let s = self.disk.min_val();
        if a.val_lower_bound() < s || b.val_lower_bound().saturating_add(s) < s {
            return Err(Error::OutsideDisk {
                val: a.valuation(),
                disk: self.disk.describe().into(),
            });
        }
        let order = self.order();
        // Horner: acc ← acc·(a + b·x) + c_n, as truncated polynomials.
        let mut acc = vec![PadicNumber::exact_zero(self.p); order];
        for n in (0..order).rev() {
            let mut next = vec![PadicNumber::exact_zero(self.p); order];
            for (k, v) in acc.iter().enumerate() {
                if v.is_zero() && v.abs_precision() >= EXACT_ZERO_ABS {
                    continue;
                }
                next[k] = &next[k] + &(v * a);
                if k + 1 < order {
                    next[k + 1] = &next[k + 1] + &(v * b);
                }
            }
            next[0] = &next[0] + &self.coeffs[n];
            acc = next;
        }
        let folded = omin(self.tail, self.err);
        Ok(PowerSeries {
            p: self.p,
            var: new_var.to_string(),
            disk: self.disk,
            coeffs: acc,
            tail: None,
            err: folded,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pad(s: &str, p: u64, n: u32) -> PadicNumber {
        PadicNumber::from_rational(&crate::padic::parse_rational(s).unwrap(), p, n).unwrap()
    }

    fn series(p: u64, coeffs: &[&str], order: usize, rel: u32) -> PowerSeries {
        let cs = coeffs.iter().map(|s| pad(s, p, rel)).collect();
        PowerSeries::new(p, "w", Disk::Closed, cs, order)
    }

    #[test]
    fn integrate_divides_by_the_new_exponent() {
        // ∫(1 + w) = w + w²/2.
        let f = series(5, &["1", "1"], 2, 6);
        let g = f.integrate();
        assert_eq!(g.order(), 3);
        assert!(g.coeff(0).is_zero());
        assert!(g.coeff(1).indistinguishable(&pad("1", 5, 6)));
        assert!(g.coeff(2).indistinguishable(&pad("1/2", 5, 6)));
    }

    #[test]
    fn shift_divide_strips_one_power() {
        // (w + w²)/w = 1 + w.
        let f = series(5, &["0", "1", "1"], 3, 6);
        let g = f.shift_divide().unwrap();
        assert!(g.coeff(0).indistinguishable(&pad("1", 5, 6)));
        assert!(g.coeff(1).indistinguishable(&pad("1", 5, 6)));
        assert_eq!(g.order(), 2);
    }

    #[test]
    fn shift_divide_rejects_visible_constant_terms() {
        let f = series(5, &["1", "1"], 2, 6);
        assert!(matches!(f.shift_divide(), Err(Error::Series(_))));
    }

    #[test]
    fn geometric_series_evaluates_to_minus_quarter() {
        // Σ_k 5^k w^k at w = 1 agrees with -1/4 = 1/(1-5) to exactly the
        // truncation order, and the attached tail bound enforces that cap.
        let order = 6;
        let coeffs: Vec<PadicNumber> = (0..order)
            .map(|k| {
                pad("1", 5, 10).mul_rational(&Rational::from_integer(5i64.pow(k as u32).into()))
            })
            .collect();
        let f = PowerSeries::new(5, "w", Disk::Closed, coeffs, order).with_tail_bound(order as i64);
        let v = f.evaluate(&pad("1", 5, 10)).unwrap();
        let target = pad("-1/4", 5, 10);
        assert_eq!(v.agreement_abs(&target), order as i64);
        assert_eq!(v.abs_precision(), order as i64);
    }

    #[test]
    fn derivative_then_integrate_recovers_the_series() {
        let f = series(7, &["0", "3/2", "-1/3", "7", "2/5"], 5, 8);
        let g = f.derivative().integrate();
        for n in 0..f.order() {
            assert!(
                g.coeff(n).indistinguishable(f.coeff(n)),
                "coefficient {n} disagrees"
            );
        }
    }

    #[test]
    fn product_of_conjugates_telescopes() {
        let a = series(5, &["1", "1", "0", "0"], 4, 8);
        let b = series(5, &["1", "-1", "0", "0"], 4, 8);
        let c = a.mul(&b);
        assert!(c.coeff(0).indistinguishable(&pad("1", 5, 8)));
        assert!(c.coeff(1).is_zero());
        assert!(c.coeff(2).indistinguishable(&pad("-1", 5, 8)));
        assert!(c.coeff(3).is_zero());
    }

    #[test]
    fn truncating_products_records_a_tail_bound() {
        // (1 + 5w)·(1 + 5w) truncated to order 2 discards 25w²: the tail
        // bound must remember its valuation.
        let a = series(5, &["1", "5"], 2, 8);
        let c = a.mul(&a);
        assert_eq!(c.order(), 2);
        let t = c.tail_bound().expect("truncation must leave a tail bound");
        assert_eq!(t, 2);
        // Evaluation caps at the tail bound.
        let v = c.evaluate(&pad("1", 5, 8)).unwrap();
        assert_eq!(v.abs_precision(), 2);
    }

    #[test]
    fn divide_inverts_multiplication() {
        // (1 - w²)/(1 - w) = 1 + w.
        let num = series(5, &["1", "0", "-1", "0"], 4, 8);
        let den = series(5, &["1", "-1", "0", "0"], 4, 8);
        let q = num.divide(&den).unwrap();
        assert!(q.coeff(0).indistinguishable(&pad("1", 5, 8)));
        assert!(q.coeff(1).indistinguishable(&pad("1", 5, 8)));
        assert!(q.coeff(2).is_zero());
        assert!(q.coeff(3).is_zero());
    }

    #[test]
    fn divide_requires_a_unit_constant_term() {
        let num = series(5, &["1", "1"], 2, 8);
        let den = series(5, &["5", "1"], 2, 8);
        assert!(matches!(num.divide(&den), Err(Error::Series(_))));
    }

    #[test]
    fn open_disk_rejects_unit_points() {
        let f = PowerSeries::new(5, "h", Disk::Open, vec![pad("1", 5, 6)], 1);
        match f.evaluate(&pad("2", 5, 6)) {
            Err(Error::OutsideDisk { val: Some(0), .. }) => {}
            other => panic!("expected out-of-disk error, got {other:?}"),
        }
        assert!(f.evaluate(&pad("10", 5, 6)).is_ok());
    }

    #[test]
    fn compose_affine_expands_binomials() {
        // g(w) = w² composed with w = 1 + 1·u gives 1 + 2u + u².
        let g = series(5, &["0", "0", "1"], 3, 8);
        let c = g
            .compose_affine(&pad("1", 5, 8), &pad("1", 5, 8), "u")
            .unwrap();
        assert_eq!(c.var(), "u");
        assert!(c.coeff(0).indistinguishable(&pad("1", 5, 8)));
        assert!(c.coeff(1).indistinguishable(&pad("2", 5, 8)));
        assert!(c.coeff(2).indistinguishable(&pad("1", 5, 8)));
    }

    #[test]
    fn compose_affine_folds_annotations_into_err() {
        let g = series(5, &["0", "0", "1"], 3, 8).with_tail_bound(4);
        let c = g
            .compose_affine(&pad("2", 5, 8), &pad("5", 5, 8), "u")
            .unwrap();
        assert_eq!(c.err_bound(), Some(4));
        assert_eq!(c.tail_bound(), None);
    }

    #[test]
    fn evaluation_respects_the_error_bound() {
        let f = series(5, &["1", "1"], 2, 12).with_err_bound(3);
        let v = f.evaluate(&pad("1", 5, 12)).unwrap();
        assert_eq!(v.abs_precision(), 3);
    }

    #[test]
    fn addition_folds_dropped_coefficients_into_the_tail() {
        let long = series(5, &["1", "0", "0", "125"], 4, 8);
        let short = series(5, &["1", "1"], 2, 8);
        let sum = long.add(&short);
        assert_eq!(sum.order(), 2);
        assert_eq!(sum.tail_bound(), Some(3));
    }
}
