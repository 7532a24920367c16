//! The p-adic logarithm and dilogarithm on the Iwasawa branch.
//!
//! `plog` is the unique extension of `log(1 + t) = Σ (-1)^{k+1} t^k / k`
//! to all nonzero p-adic numbers that is additive and kills both `p` and
//! the roots of unity (so `plog(p) = 0` and `plog(-1) = 0`).
//!
//! `dilog` is the p-adic dilogarithm `Li₂(z) = Σ z^k / k²`, continued to
//! the whole projective line minus `{0, 1, ∞}` by Coleman integration.
//! Away from the region of naive convergence it is computed through the
//! Frobenius-fixed power series Φ: writing `ζ` for the Teichmüller point
//! of a unit `z`,
//!
//! ```text
//!   Li₂(ζ) = p²/(p²−1) · Φ(1/(ζ−1)),        Li₂(z) = Li₂(ζ) + ∫_ζ^z −log(1−t) dt/t,
//! ```
//!
//! with the residual integral evaluated by a local Taylor expansion.  Φ is
//! built once per `(p, N, M)` and cached.  The inversion and reflection
//! identities used for the remaining regions have vanishing constants on
//! this branch:
//!
//! ```text
//!   Li₂(z) + Li₂(1/z)  = −½·plog(z)²,
//!   Li₂(z) + Li₂(1−z)  = −plog(z)·plog(1−z).
//! ```

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One as _;

use crate::error::Error;
use crate::padic::PadicNumber;
use crate::series::{Disk, PowerSeries};
use crate::util::{ilog_p, is_prime};
use crate::{Rational, Result};

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The p-adic logarithm on the Iwasawa branch (`plog(p) = 0`).  Fully
/// additive: `plog(xy) = plog(x) + plog(y)`.  Errors: the input is
/// indistinguishable from zero.
pub fn plog(x: &PadicNumber) -> Result<PadicNumber> {
    if x.is_zero() {
        return Err(Error::LogOfZero);
    }
    let p = x.prime();
    let rel = x.rel_precision().expect("nonzero value has a unit part");
    // plog(u·p^v) = log(u) = (1/(p−1))·log(u^{p−1}), and u^{p−1} ≡ 1 (mod p)
    // puts the series argument inside the region of convergence.
    let u = x.unit_part()?;
    let y = u.pow(p as i64 - 1)?;
    let one = PadicNumber::one(p, rel);
    let t = &y - &one;
    let scale = Rational::new(BigInt::one(), BigInt::from(p) - 1);
    if t.is_zero() {
        // u is a root of unity to working precision (e.g. a Teichmüller
        // representative, or ±1): the logarithm vanishes.
        return Ok(PadicNumber::zero(p, t.abs_precision()));
    }
    let v1 = t.valuation().expect("distinguishable from zero").max(1);
    let target = t.abs_precision();
    let guard = ilog_p(p, target.max(1) as u64 + 8) as i64 + 1;
    let mut acc = PadicNumber::exact_zero(p);
    let mut pw = t.clone();
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        acc = &acc + &pw.mul_rational(&rat(sign, k));
        k += 1;
        if k * v1 - guard >= target {
            break;
        }
        pw = &pw * &t;
    }
    // The first omitted term bounds the truncation error.
    let cap = k * v1 - ilog_p(p, k as u64) as i64;
    Ok(acc.truncate_abs(cap).mul_rational(&scale))
}

/// The Frobenius-fixed dilogarithm series Φ for a prime `p`, minted at
/// relative precision `n` and truncated at order `m`, together with its
/// analytic tail bound.  Φ satisfies `Φ(0) = 0` and the antisymmetry
/// `Φ(w) + Φ(−1−w) = 0`.
#[derive(Debug, Clone)]
pub struct FrobeniusDilogSeries {
    p: u64,
    n: u32,
    m: usize,
    series: PowerSeries,
}

impl FrobeniusDilogSeries {
    /// The prime.
    pub fn prime(&self) -> u64 {
        self.p
    }

    /// The relative precision the coefficients were minted at.
    pub fn precision(&self) -> u32 {
        self.n
    }

    /// The truncation order.
    pub fn order(&self) -> usize {
        self.m
    }

    /// The underlying power series on the closed unit disk.
    pub fn series(&self) -> &PowerSeries {
        &self.series
    }

    /// Evaluates Φ at a point of the closed unit disk.
    pub fn evaluate(&self, w: &PadicNumber) -> Result<PadicNumber> {
        self.series.evaluate(w)
    }
}

/// Builds Φ at order `m` with coefficients minted at relative precision `n`.
fn build_phi(p: u64, n: u32, m: usize) -> PowerSeries {
    let w_rel = n + 2 * ilog_p(p, m as u64 + 1) + 6;
    // P(w) = Σ_{k=1}^{p} C(p,k) w^{p−k} is the degree-(p−1) polynomial with
    // P(0) = 1 obtained by expanding (1 − z^p)/(1 − z)^p in w = 1/(z − 1);
    // every non-constant coefficient C(p,k), k < p, is divisible by p.
    let pu = p as usize;
    let mut binom = vec![BigInt::one()];
    for k in 0..pu {
        let last = binom.last().expect("nonempty").clone();
        binom.push(last * BigInt::from(p - k as u64) / BigInt::from(k as u64 + 1));
    }
    let coeffs: Vec<PadicNumber> = (0..pu)
        .map(|j| {
            // Coefficient of w^j is C(p, p−j).
            let c = Rational::from_integer(binom[pu - j].clone());
            PadicNumber::from_rational(&c, p, w_rel).expect("valid prime and precision")
        })
        .collect();
    let pw = PowerSeries::new(p, "w", Disk::Closed, coeffs, m);
    // L₁ = (1/p)·log P, built through the logarithmic derivative to stay
    // within exact series operations: log P = ∫ P′/P.
    let u = pw
        .derivative()
        .divide(&pw)
        .expect("P has unit constant term 1");
    let log_p_series = u.integrate();
    let l1 = log_p_series.scale_rational(&rat(1, p as i64));
    // Φ′ = L₁·(1/(1+w) − 1/w).  Both divisions are exact: L₁(0) = 0 kills
    // the pole at w = 0 and L₁(−1) = (1/p)·log P(−1) = (1/p)·log 1 = 0
    // (odd p gives P(−1) = Σ C(p,k)(−1)^{p−k} = 1) kills the pole at −1.
    let shifted = l1.shift_divide().expect("L1 has zero constant term");
    let geom_alt = PowerSeries::new(
        p,
        "w",
        Disk::Closed,
        (0..m.saturating_sub(1))
            .map(|j| {
                let s = if j % 2 == 0 { 1 } else { -1 };
                PadicNumber::from_rational(&rat(s, 1), p, w_rel).expect("valid")
            })
            .collect(),
        m.saturating_sub(1),
    );
    let integrand = l1.mul(&geom_alt).sub(&shifted);
    let phi = integrand.integrate().truncate_order(m);
    // Tail bound.  With P = 1 + pR (R integral, deg p−1, R(0) = 0):
    //   log P = Σ_{j≥1} (−1)^{j+1} p^j R^j / j,
    // so the w^n coefficient only sees j ≥ ⌈n/(p−1)⌉, each term of
    // valuation ≥ j − v_p(j); as j ↦ j − log_p(j) is increasing,
    //   v((log P)_n) ≥ q(n) − ilog_p(q(n)) − 1,   q(n) = ⌈n/(p−1)⌉,
    // and v((L₁)_n) is one less.  The shift L₁/w has n-th coefficient
    // (L₁)_{n+1}.  For L₁/(1+w) the n-th coefficient is the alternating
    // partial sum of (L₁)_k up to k = n, which equals minus the tail sum
    // over k > n because L₁(−1) = 0 — so it obeys the same bound.
    // Integration divides by n.  Altogether, for every n,
    //   v(Φ_n) ≥ q(n) − ilog_p(q(n)) − ilog_p(n) − 3.
    // The right side grows on n ≥ m (the linear term dominates the
    // logarithms once n > 2(p−1)/ln p, far below accepted orders) with
    // integer jitter at most one digit, absorbed by a final safety digit.
    let q = (m as i64 + p as i64 - 2) / (p as i64 - 1);
    let offset = q - ilog_p(p, q.max(1) as u64) as i64 - ilog_p(p, m as u64) as i64 - 4;
    phi.with_tail_bound(offset)
}

type PhiCache = Mutex<HashMap<(u64, u32, usize), Arc<FrobeniusDilogSeries>>>;

static PHI_CACHE: OnceLock<PhiCache> = OnceLock::new();

/// Returns the cached Φ for `(p, n, m)`, building it on first use.
/// Requirements: `p` an odd prime, `n ≥ 1`, `m ≥ (n + 4)(p − 1)`.
pub fn frobenius_dilog_series(p: u64, n: u32, m: usize) -> Result<Arc<FrobeniusDilogSeries>> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    if n < 1 {
        return Err(Error::InvalidPrecision(
            "series precision must be at least 1".into(),
        ));
    }
    if m < (n as usize + 4) * (p as usize - 1) {
        return Err(Error::InvalidPrecision(format!(
            "order {m} is below the minimum (N+4)(p-1) = {}",
            (n as usize + 4) * (p as usize - 1)
        )));
    }
    let cache = PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("Φ cache poisoned");
    let entry = guard.entry((p, n, m)).or_insert_with(|| {
        Arc::new(FrobeniusDilogSeries {
            p,
            n,
            m,
            series: build_phi(p, n, m),
        })
    });
    Ok(Arc::clone(entry))
}

/// Smallest order whose tail bound guarantees `n` digits of Φ evaluations.
pub fn suggested_order(p: u64, n: u32) -> usize {
    let mut q: i64 = n as i64 + 6;
    for _ in 0..4 {
        let m = q * (p as i64 - 1);
        q = n as i64 + 5 + ilog_p(p, (q + 1) as u64) as i64 + ilog_p(p, (m + 1) as u64) as i64;
    }
    (q * (p as i64 - 1)) as usize
}

/// Rounds a target absolute precision up to a small ladder of standard
/// precisions, keeping the Φ cache compact.
fn ladder(abs: i64) -> u32 {
    let a = abs.clamp(8, 256);
    ((a + 15) / 16 * 16) as u32
}

/// Naive dilogarithm sum, valid for `v(z) ≥ 1`.
fn naive_dilog(z: &PadicNumber) -> Result<PadicNumber> {
    let p = z.prime();
    if z.is_zero() {
        return Ok(PadicNumber::zero(p, z.abs_precision()));
    }
    let v = z.valuation().expect("distinguishable from zero");
    assert!(v >= 1, "naive dilogarithm needs v(z) >= 1");
    let target = z.abs_precision();
    let guard = 2 * (ilog_p(p, target.max(1) as u64 + 16) as i64 + 1);
    let mut acc = PadicNumber::exact_zero(p);
    let mut pw = z.clone();
    let mut k: i64 = 1;
    loop {
        acc = &acc + &pw.mul_rational(&rat(1, k * k));
        k += 1;
        if k * v - guard >= target {
            break;
        }
        pw = &pw * z;
    }
    let cap = k * v - 2 * ilog_p(p, k as u64) as i64;
    Ok(acc.truncate_abs(cap))
}

/// The p-adic dilogarithm `Li₂`, with the Frobenius series order chosen
/// automatically from the input's precision.  Errors: `z` is 1 to working
/// precision (the dilogarithm is singular there); `p = 2` on the Frobenius
/// route.
pub fn dilog(z: &PadicNumber) -> Result<PadicNumber> {
    dilog_impl(z, None)
}

/// `dilog` with an explicit Frobenius series order `m` (only consulted on
/// the Frobenius route; must satisfy the order constraints of
/// [`frobenius_dilog_series`]).
pub fn dilog_to_order(z: &PadicNumber, m: usize) -> Result<PadicNumber> {
    dilog_impl(z, Some(m))
}

fn dilog_impl(z: &PadicNumber, m_opt: Option<usize>) -> Result<PadicNumber> {
    let p = z.prime();
    if z.is_zero() || z.valuation().expect("nonzero") >= 1 {
        return naive_dilog(z);
    }
    let v = z.valuation().expect("nonzero");
    let rel = z.rel_precision().expect("nonzero");
    if v < 0 {
        // Inversion: Li₂(z) = −Li₂(1/z) − ½·plog(z)².
        let inv = z.inv()?;
        let li = naive_dilog(&inv)?;
        let lg = plog(z)?;
        let sq = (&lg * &lg).mul_rational(&rat(1, 2));
        return Ok(&(-&li) - &sq);
    }
    let one = PadicNumber::one(p, rel);
    if z.residue_mod(1).is_one() {
        // Reflection: Li₂(z) = −Li₂(1−z) − plog(z)·plog(1−z).
        let om = &one - z;
        if om.is_zero() {
            return Err(Error::DilogSingular(
                "z = 1 (z − 1 indistinguishable from zero)".into(),
            ));
        }
        let li = naive_dilog(&om)?;
        let cross = &plog(z)? * &plog(&om)?;
        return Ok(&(-&li) - &cross);
    }
    // Frobenius route: z is a unit with ζ = ω(z) ≠ 1.
    let abs_target = z.abs_precision();
    let n_ladder = ladder(abs_target + 2);
    let (n_eff, m) = match m_opt {
        Some(m) => {
            let cap = (m / (p as usize - 1)).saturating_sub(4);
            let n_eff = (n_ladder as usize).min(cap) as u32;
            if n_eff < 1 {
                return Err(Error::InvalidPrecision(format!(
                    "order {m} is too small for a Frobenius evaluation at p = {p}"
                )));
            }
            (n_eff, m)
        }
        None => (n_ladder, suggested_order(p, n_ladder)),
    };
    let phi = frobenius_dilog_series(p, n_eff, m)?;
    let zeta = z.teichmuller()?;
    let w0 = (&zeta - &one).inv()?;
    let phi_val = phi.evaluate(&w0)?;
    let p2 = BigInt::from(p) * BigInt::from(p);
    let li_zeta = phi_val.mul_rational(&Rational::new(p2.clone(), p2 - BigInt::one()));
    let h0 = z - &zeta;
    if h0.is_zero() {
        // |Li₂(z) − Li₂(ζ)| ≤ |z − ζ|·sup|log(1−t)/t| on the disk.
        return Ok(li_zeta.truncate_abs(h0.abs_precision()));
    }
    // Residual Coleman integral ∫_ζ^z −log(1−t)/t dt as a Taylor series in
    // h = t − ζ on the open disk: log(1 − ζ − h) expands through L, and
    // 1/(ζ + h) through the geometric series I.
    let k_terms = (abs_target + 2 * (ilog_p(p, abs_target.max(1) as u64 + 16) as i64 + 1) + 3)
        .max(8) as usize;
    let inv1z = (&one - &zeta).inv()?;
    let zinv = zeta.inv()?;
    let mut l_coeffs = Vec::with_capacity(k_terms);
    l_coeffs.push(plog(&(&one - &zeta))?);
    let mut pw = inv1z.clone();
    for k in 1..k_terms as i64 {
        l_coeffs.push(pw.mul_rational(&rat(-1, k)));
        pw = &pw * &inv1z;
    }
    let mut i_coeffs = Vec::with_capacity(k_terms);
    let mut pz = zinv.clone();
    for j in 0..k_terms as i64 {
        let sign = if j % 2 == 0 { 1 } else { -1 };
        i_coeffs.push(pz.mul_rational(&rat(sign, 1)));
        pz = &pz * &zinv;
    }
    let l_series = PowerSeries::new(p, "h", Disk::Open, l_coeffs, k_terms);
    let i_series = PowerSeries::new(p, "h", Disk::Open, i_coeffs, k_terms);
    let g = l_series.mul(&i_series).neg().integrate();
    // Tail of the integrated local series: for n ≥ K+1 and v(h) ≥ 1 the
    // n-th term has valuation ≥ n − 2·log_p(n+1) (one log from the 1/k in
    // L, one from the integration), increasing in n for n ≥ 8.
    let kk = g.order() as i64;
    let tail = kk - 2 * (ilog_p(p, kk as u64 + 2) as i64 + 1);
    let corr = g.with_tail_bound(tail).evaluate(&h0)?;
    Ok(&li_zeta + &corr)
}

/// The Coleman function `D(z) = 2·Li₂(z) + plog(z)·plog(1−z)`, the
/// depth-two obstruction attached to the unit equation.  Errors: `z`
/// indistinguishable from 0 or 1.
pub fn coleman_d(z: &PadicNumber) -> Result<PadicNumber> {
    if z.is_zero() {
        return Err(Error::ExcludedValue("0".into()));
    }
    let rel = z.rel_precision().expect("nonzero");
    let one = PadicNumber::one(z.prime(), rel);
    let om = &one - z;
    if om.is_zero() {
        return Err(Error::ExcludedValue("1".into()));
    }
    let li = dilog(z)?;
    let cross = &plog(z)? * &plog(&om)?;
    Ok(&li.mul_rational(&rat(2, 1)) + &cross)
}
