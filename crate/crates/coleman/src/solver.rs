//! Coleman functions, residue-disk zero finding, and the unit and
//! exponential equation solvers.
//!
//! A [`ColemanFunction`] is a fixed linear combination
//!
//! ```text
//!   F(z) = c_li·Li₂(z) + c_ll·log z·log(1−z) + c_l1·log z + c_l2·log(1−z) + c₀,
//! ```
//!
//! the shape cut out by the depth-two pairing.  Solutions of the S-unit
//! equation `z + (1−z) = 1` lie on `F = 2·Li₂ + log·log(1−·)` and
//! solutions of `a·bˣ + c·dʸ = 1` on the function produced by
//! [`build_exp_equation_function`], which eliminates `(x, y)` through the
//! logarithms of the bases.
//!
//! Zero finding works one residue disk at a time: [`disk_expand`] rewrites
//! `F(c + p·u)` as a power series in `u` convergent on the closed unit
//! disk, [`find_zeros`] normalizes away the content, reads the number of
//! zeros off the Weierstrass degree of the mod-p reduction, lifts simple
//! roots by Newton iteration, and recurses into sub-disks `u = r + p·v`
//! for repeated roots (bounded depth).  Zeros whose reduction is not an
//! F_p-point are certified irrational; depth-exhausted clusters are
//! reported unresolved.  [`recognize`] matches lifted roots against small
//! rationals (by rational reconstruction) and small quadratic integers,
//! and [`verify_candidate`] checks recognized values against a solution
//! ring.  [`solve_exp_equation`] glues everything into exact certified
//! solutions plus an honest upper bound on how many can exist.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero as _};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::kim::{selmer_coords, CoefficientTable};
use crate::padic::PadicNumber;
use crate::polylog::{dilog, plog};
use crate::series::{Disk, PowerSeries};
use crate::util::ilog_p;
use crate::{Rational, Result};

/// Digits a recognized candidate must clear beyond its witnessing
/// congruence before it is believed: the candidate's height box has to be
/// this many digits smaller than the modulus, so that agreement is forced
/// rather than accidental.
const RECOGNITION_MARGIN: u32 = 4;

/// Tunable search bounds.  The defaults match the command-line defaults.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Height bound for rational recognition (numerator and denominator).
    pub rational_height: u64,
    /// Coefficient bound for quadratic recognition.
    pub quad_bound: i64,
    /// Exponent bound for discrete-logarithm matching.
    pub exp_bound: i64,
    /// Maximum sub-disk recursion depth for repeated roots.
    pub max_depth: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rational_height: 1_000_000,
            quad_bound: 100,
            exp_bound: 64,
            max_depth: 3,
        }
    }
}

/// A p-adic Coleman function in the depth-two span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColemanFunction {
    /// The base prime.
    pub p: u64,
    /// The stated working precision.
    pub n: u32,
    /// Coefficient of `Li₂(z)`.
    pub c_li: PadicNumber,
    /// Coefficient of `log z · log(1−z)`.
    pub c_ll: PadicNumber,
    /// Coefficient of `log z`.
    pub c_l1: PadicNumber,
    /// Coefficient of `log(1−z)`.
    pub c_l2: PadicNumber,
    /// Constant term.
    pub c_0: PadicNumber,
}

impl ColemanFunction {
    /// Direct evaluation at a point `z ∉ {0, 1}`.
    pub fn evaluate(&self, z: &PadicNumber) -> Result<PadicNumber> {
        assert_eq!(z.prime(), self.p, "point over the wrong prime");
        if z.is_zero() {
            return Err(Error::ExcludedValue("0".into()));
        }
        let rel = z.rel_precision().expect("nonzero");
        let om = &PadicNumber::one(self.p, rel) - z;
        if om.is_zero() {
            return Err(Error::ExcludedValue("1".into()));
        }
        let li = dilog(z)?;
        let lz = plog(z)?;
        let lo = plog(&om)?;
        let mut acc = &self.c_li * &li;
        acc = &acc + &(&self.c_ll * &(&lz * &lo));
        acc = &acc + &(&self.c_l1 * &lz);
        acc = &acc + &(&self.c_l2 * &lo);
        Ok(&acc + &self.c_0)
    }
}

fn working_rel(n: u32) -> u32 {
    n + 6
}

/// The unit equation function `F(z) = 2·Li₂(z) + log z·log(1−z)`, which
/// vanishes on every point with `z` and `1−z` both S-units.
pub fn build_unit_equation_function(p: u64, n: u32) -> Result<ColemanFunction> {
    if !crate::util::is_prime(p) || p == 2 {
        return Err(Error::NotPrime(p));
    }
    let rel = working_rel(n);
    Ok(ColemanFunction {
        p,
        n,
        c_li: PadicNumber::from_integer(2, p, rel)?,
        c_ll: PadicNumber::one(p, rel),
        c_l1: PadicNumber::exact_zero(p),
        c_l2: PadicNumber::exact_zero(p),
        c_0: PadicNumber::exact_zero(p),
    })
}

/// The Coleman function cutting out solutions of `a·bˣ + c·dʸ = 1`: with
/// `α = h13(b,d)`, `β = h13(b,c)`, `γ = h13(a,d)`, `δ = h13(a,c)` and
/// `z = a·bˣ`, eliminating `x` and `y` through `log z` and `log(1−z)`
/// gives
///
/// ```text
///   F(z) = Lb·Ld·Li₂(z) + α·log z·log(1−z)
///        + (β·Ld − α·Lc)·log z + (γ·Lb − α·La)·log(1−z)
///        + (δ·Lb·Ld − β·La·Ld − γ·Lc·Lb + α·La·Lc).
/// ```
///
/// Errors: a base with trivial logarithm (`b` or `d` a root of unity), or
/// an argument that is not an S-unit for the table's prime set.
pub fn build_exp_equation_function(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    table: &CoefficientTable,
) -> Result<ColemanFunction> {
    let s = table.primes();
    let av = selmer_coords(a, s)?;
    let bv = selmer_coords(b, s)?;
    let cv = selmer_coords(c, s)?;
    let dv = selmer_coords(d, s)?;
    let lb = table.h1(&bv)?;
    let ld = table.h1(&dv)?;
    if lb.is_zero() {
        return Err(Error::ExcludedValue(format!(
            "base b = {b} has trivial logarithm"
        )));
    }
    if ld.is_zero() {
        return Err(Error::ExcludedValue(format!(
            "base d = {d} has trivial logarithm"
        )));
    }
    let la = table.h1(&av)?;
    let lc = table.h1(&cv)?;
    let alpha = table.h13(&bv, &dv)?;
    let beta = table.h13(&bv, &cv)?;
    let gamma = table.h13(&av, &dv)?;
    let delta = table.h13(&av, &cv)?;
    let c_0 = &(&(&delta * &lb) * &ld) - &(&(&beta * &la) * &ld);
    let c_0 = &c_0 - &(&(&gamma * &lc) * &lb);
    let c_0 = &c_0 + &(&(&alpha * &la) * &lc);
    Ok(ColemanFunction {
        p: table.p(),
        n: table.precision(),
        c_li: &lb * &ld,
        c_ll: alpha.clone(),
        c_l1: &(&beta * &ld) - &(&alpha * &lc),
        c_l2: &(&gamma * &lb) - &(&alpha * &la),
        c_0,
    })
}

/// Truncation order for disk expansions: the smallest `K` whose worst
/// dilogarithm tail `K − 2·ilog_p(K) − 2` still clears the working
/// precision.
fn expansion_order(p: u64, rel: u32) -> usize {
    let mut k = rel as usize + 4;
    while (k as i64) - 2 * ilog_p(p, k as u64) as i64 - 2 < rel as i64 {
        k += 1;
    }
    k
}

/// Expands `F(c + p·u)` as a power series in `u` on the closed unit disk.
/// Coefficient `k` carries the factor `p^k`, so the series converges with
/// linearly growing coefficient valuations.  Errors: `c` outside
/// `{2, …, p−1}`.
pub fn disk_expand(f: &ColemanFunction, c: u64) -> Result<PowerSeries> {
    let p = f.p;
    if c < 2 || c >= p {
        return Err(Error::BadQuery(format!(
            "disk center must lie in 2..{}, got {c}",
            p - 1
        )));
    }
    let rel = working_rel(f.n);
    let order = expansion_order(p, rel);
    let tail_log = order as i64 - ilog_p(p, order as u64) as i64;
    let p_big = BigInt::from(p);
    let c_big = BigInt::from(c);
    let omc_big = BigInt::from(1i64 - c as i64);
    let center = PadicNumber::from_integer(c as i64, p, rel)?;
    let one_minus = PadicNumber::from_integer(1 - c as i64, p, rel)?;

    // log z = log c + Σ_{k≥1} (−1)^{k+1} (p/c)^k u^k / k; beyond the stored
    // order the coefficient valuation n − ilog_p(n) never dips below its
    // value at the order itself.
    let mut log_z = vec![plog(&center)?];
    for k in 1..order {
        let mut numer = p_big.pow(k as u32);
        if k % 2 == 0 {
            numer = -numer;
        }
        let denom = c_big.pow(k as u32) * BigInt::from(k);
        log_z.push(PadicNumber::from_rational(
            &Rational::new(numer, denom),
            p,
            rel,
        )?);
    }
    let log_z = PowerSeries::new(p, "u", Disk::Closed, log_z, order).with_tail_bound(tail_log);

    // log(1−z) = log(1−c) − Σ_{k≥1} (p/(1−c))^k u^k / k.
    let mut log_oz = vec![plog(&one_minus)?];
    for k in 1..order {
        let numer = -p_big.pow(k as u32);
        let denom = omc_big.pow(k as u32) * BigInt::from(k);
        log_oz.push(PadicNumber::from_rational(
            &Rational::new(numer, denom),
            p,
            rel,
        )?);
    }
    let log_oz = PowerSeries::new(p, "u", Disk::Closed, log_oz, order).with_tail_bound(tail_log);

    // Li₂(c + pu) = Li₂(c) + ∫ −log(1−z)·(p/z) du, with
    // p/z = Σ_j (−1)^j p^{j+1}/c^{j+1} u^j.
    let mut geom = Vec::with_capacity(order);
    for j in 0..order {
        let mut numer = p_big.pow(j as u32 + 1);
        if j % 2 == 1 {
            numer = -numer;
        }
        let denom = c_big.pow(j as u32 + 1);
        geom.push(PadicNumber::from_rational(
            &Rational::new(numer, denom),
            p,
            rel,
        )?);
    }
    let geom = PowerSeries::new(p, "u", Disk::Closed, geom, order).with_tail_bound(order as i64);
    let integrand = log_oz.mul(&geom).neg();
    // The integral drops annotations; the analytic bound comes back by
    // hand: the true coefficient of u^n is G_{n−1}/n with
    // v(G_{n−1}) ≥ n − ilog_p(n), so v ≥ n − 2·ilog_p(n), and minimizing
    // over n ≥ order (the dip at the next prime power) costs at most two
    // more digits.
    let tail_li = order as i64 - 2 * ilog_p(p, order as u64) as i64 - 2;
    let li_head = dilog(&center)?;
    let mut li = integrand.integrate().truncate_order(order);
    li = li.add(&PowerSeries::constant(li_head, "u", Disk::Closed, order));
    let li = li.with_tail_bound(tail_li);

    let mut total = li.scale(&f.c_li);
    total = total.add(&log_z.mul(&log_oz).scale(&f.c_ll));
    total = total.add(&log_z.scale(&f.c_l1));
    total = total.add(&log_oz.scale(&f.c_l2));
    total = total.add(&PowerSeries::constant(
        f.c_0.clone(),
        "u",
        Disk::Closed,
        order,
    ));
    Ok(total)
}

/// What a lifted root was recognized as.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecognizedKind {
    /// A rational number `a/b`.
    Rational,
    /// A quadratic integer.
    Quadratic,
}

/// A recognized algebraic value, as the coefficients `[A, B, C]` of
/// `A·z² + B·z + C = 0` (a rational `a/b` is stored as `[0, b, −a]`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recognized {
    /// Rational or quadratic.
    pub kind: RecognizedKind,
    /// The vanishing polynomial `[A, B, C]`.
    pub poly: [i64; 3],
}

impl Recognized {
    /// The rational value, when the kind is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.kind {
            RecognizedKind::Rational => {
                Some(Rational::new((-self.poly[2]).into(), self.poly[1].into()))
            }
            RecognizedKind::Quadratic => None,
        }
    }
}

/// The ring a candidate solution is verified against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyRing {
    /// `Z[1/q : q ∈ S]`: both `z` and `1−z` must be S-units.
    SUnits(Vec<u64>),
    /// The maximal order of a real quadratic field: `z` and `1−z` must be
    /// units there.
    RealQuadratic,
}

/// Outcome of verifying a recognized value against a ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    /// Human-readable ring description.
    pub ring: String,
    /// Whether `z` and `1−z` are both units there.
    pub ok: bool,
}

/// One lifted zero of a Coleman function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroReport {
    /// The residue disk `z ≡ disk (mod p)` the zero lives in.
    pub disk: u64,
    /// The zero itself, as a p-adic number.
    pub root: PadicNumber,
    /// Whether the zero is simple.
    pub simple: bool,
    /// Algebraic recognition, when one matched.
    pub recognized: Option<Recognized>,
    /// Ring verification, when one was performed.
    pub verified: Option<Verification>,
}

/// The full result of a zero search across all residue disks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroFinding {
    /// Lifted Q_p zeros, disks in increasing order.
    pub reports: Vec<ZeroReport>,
    /// Total number of zeros counted with multiplicity (Weierstrass
    /// degrees summed over all disks).
    pub total_zeros: usize,
    /// Zeros certified to lie outside Q_p.
    pub irrational: usize,
    /// Zeros in repeated clusters that exhausted the recursion depth.
    pub unresolved: usize,
}

/// Zeros found inside a single disk expansion, in the disk coordinate.
struct DiskZeros {
    degree: usize,
    roots: Vec<(PadicNumber, bool)>,
    irrational: usize,
    unresolved: usize,
}

/// Content (minimum coefficient valuation) and Weierstrass degree (the
/// largest index attaining it).  Errors when the stored precision or the
/// truncation bounds cannot certify either quantity.
fn content_and_degree(g: &PowerSeries) -> Result<(i64, usize)> {
    let mut content = i64::MAX;
    for c in g.coeffs() {
        if !c.is_zero() {
            content = content.min(c.valuation().expect("nonzero"));
        }
    }
    if content == i64::MAX {
        return Err(Error::ZeroSearch(
            "series is indistinguishable from zero at working precision".into(),
        ));
    }
    for (k, c) in g.coeffs().iter().enumerate() {
        if c.is_zero() && c.abs_precision() <= content {
            return Err(Error::ZeroSearch(format!(
                "coefficient {k} is known only modulo p^{}, below the content {content}",
                c.abs_precision()
            )));
        }
    }
    let tail_ok = g.tail_bound().is_none_or(|t| t > content);
    let err_ok = g.err_bound().is_none_or(|e| e > content);
    if !tail_ok || !err_ok {
        return Err(Error::ZeroSearch(format!(
            "truncation bounds do not clear the content {content}"
        )));
    }
    let mut degree = 0;
    for (k, c) in g.coeffs().iter().enumerate() {
        if !c.is_zero() && c.valuation() == Some(content) {
            degree = k;
        }
    }
    Ok((content, degree))
}

/// Newton iteration from an approximate simple root `r` of the normalized
/// series.  The residual must vanish to `target` digits at convergence.
fn newton_lift(g: &PowerSeries, g_prime: &PowerSeries, r: u64, target: i64) -> Result<PadicNumber> {
    let p = g.prime();
    let rel = target.max(1) as u32 + 12;
    let mut v = PadicNumber::from_integer(r as i64, p, rel)?;
    for _ in 0..64 {
        let fv = g.evaluate(&v)?;
        if fv.is_zero() {
            break;
        }
        let dv = g_prime.evaluate(&v)?;
        if dv.is_zero() {
            return Err(Error::ZeroSearch(
                "derivative vanishes at a Newton iterate".into(),
            ));
        }
        let step = fv.div(&dv)?;
        if step.is_zero() {
            break;
        }
        v = &v - &step;
    }
    let residual = g.evaluate(&v)?;
    if !residual.is_zero() || residual.abs_precision() < target {
        return Err(Error::ZeroSearch(format!(
            "Newton iteration stalled: residual {residual} above the p^-{target} target"
        )));
    }
    Ok(v)
}

fn poly_eval_mod(poly: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in poly.iter().rev() {
        acc = (acc * x + c) % p;
    }
    acc
}

/// Synthetic division of `poly` by `(u − r)` over F_p; `poly` must vanish
/// at `r`.
fn poly_deflate(poly: &[u64], r: u64, p: u64) -> Vec<u64> {
    let mut out = vec![0u64; poly.len() - 1];
    let mut carry = 0u64;
    for k in (0..poly.len()).rev() {
        let value = (poly[k] + carry * r) % p;
        if k == 0 {
            debug_assert_eq!(value, 0, "deflating a non-root");
        } else {
            out[k - 1] = value;
            carry = value;
        }
    }
    out
}

fn disk_zeros(g: &PowerSeries, depth: u32, opts: &SolverOptions, target: i64) -> Result<DiskZeros> {
    let p = g.prime();
    let (content, degree) = content_and_degree(g)?;
    let shift_exp = u32::try_from(content)
        .map_err(|_| Error::ZeroSearch(format!("negative content {content}")))?;
    let normalized = g.scale_rational(&Rational::new(1.into(), BigInt::from(p).pow(shift_exp)));
    if degree == 0 {
        return Ok(DiskZeros {
            degree: 0,
            roots: Vec::new(),
            irrational: 0,
            unresolved: 0,
        });
    }
    // The existence of the counted zeros comes from the Weierstrass degree
    // and Hensel's lemma; the Newton residual check below is a stall
    // detector, so its target is capped by what the evaluation can
    // certify: the annotation bounds and the coefficients' own absolute
    // precision.  Dropping below the floor means the working precision is
    // genuinely exhausted.
    let mut achievable = normalized
        .tail_bound()
        .unwrap_or(i64::MAX)
        .min(normalized.err_bound().unwrap_or(i64::MAX));
    for c in normalized.coeffs() {
        achievable = achievable.min(c.abs_precision());
    }
    if achievable < 4 {
        return Err(Error::ZeroSearch(format!(
            "working precision exhausted: at most {achievable} certified digits \
             left after removing content {content} at depth {depth}"
        )));
    }
    let target = target.min(achievable);
    let mut poly: Vec<u64> = Vec::with_capacity(degree + 1);
    for c in normalized.coeffs().iter().take(degree + 1) {
        let residue = if c.is_zero() {
            BigUint::zero()
        } else {
            c.residue_mod(1)
        };
        poly.push(residue.to_u64().expect("single digit"));
    }
    // Termwise differentiation keeps both bounds on the closed unit disk:
    // v(n·c_n) ≥ v(c_n) for the tail, and a value-level error bound is a
    // coefficient bound (Gauss norm), which differentiates termwise.
    let g_prime = {
        let mut d = normalized.derivative();
        if let Some(t) = normalized.tail_bound() {
            d = d.with_tail_bound(t);
        }
        if let Some(e) = normalized.err_bound() {
            d = d.with_err_bound(e);
        }
        d
    };

    let mut roots = Vec::new();
    let mut irrational = 0usize;
    let mut unresolved = 0usize;
    let mut work = poly;
    for r in 0..p {
        let mut mult = 0usize;
        while work.len() > 1 && poly_eval_mod(&work, r, p) == 0 {
            work = poly_deflate(&work, r, p);
            mult += 1;
        }
        if mult == 0 {
            continue;
        }
        if mult == 1 {
            roots.push((newton_lift(&normalized, &g_prime, r, target)?, true));
        } else if depth >= opts.max_depth {
            unresolved += mult;
        } else {
            let rel = working_rel(target.max(1) as u32);
            let shift = PadicNumber::from_integer(r as i64, p, rel)?;
            let scale = PadicNumber::from_integer(p as i64, p, rel)?;
            let sub = normalized.compose_affine(&shift, &scale, "v")?;
            let inner = disk_zeros(&sub, depth + 1, opts, target)?;
            assert!(
                inner.degree <= mult,
                "sub-disk zero count exceeds the cluster multiplicity"
            );
            // Zeros of the cluster that did not reappear in the sub-disk
            // live in the ramified annulus 1/p < |u − r| < 1: not in Z_p.
            irrational += mult - inner.degree + inner.irrational;
            unresolved += inner.unresolved;
            for (v, simple) in inner.roots {
                let u = &shift + &v.mul_rational(&Rational::from_integer(p.into()));
                roots.push((u, simple));
            }
        }
    }
    // Whatever survives deflation has no F_p roots: those zeros reduce to
    // genuine extension residues, so they cannot lie in Q_p.
    irrational += work.len() - 1;
    Ok(DiskZeros {
        degree,
        roots,
        irrational,
        unresolved,
    })
}

/// Finds all zeros of `f` across the residue disks `z ≡ 2, …, p−1 (mod p)`
/// (an S-unit solution cannot reduce to 0 or 1).  Simple roots are lifted
/// by Newton iteration to the full certified precision of the disk
/// expansion, and recognition is attempted on each; the `verified` field
/// is left empty for the caller, who knows the intended solution ring.
pub fn find_zeros(f: &ColemanFunction, opts: &SolverOptions) -> Result<ZeroFinding> {
    let p = f.p;
    let target = f.n as i64 - 2;
    let mut reports = Vec::new();
    let mut total = 0usize;
    let mut irrational = 0usize;
    let mut unresolved = 0usize;
    for disk in 2..p {
        let series = disk_expand(f, disk)?;
        let found = disk_zeros(&series, 0, opts, target)?;
        total += found.degree;
        irrational += found.irrational;
        unresolved += found.unresolved;
        let mut disk_reports = Vec::new();
        for (u, simple) in found.roots {
            let center_rel = u.abs_precision().clamp(1, 4096) as u32 + 4;
            let z = &PadicNumber::from_integer(disk as i64, p, center_rel)?
                + &u.mul_rational(&Rational::from_integer(p.into()));
            let recognized = recognize(&z, opts);
            disk_reports.push(ZeroReport {
                disk,
                root: z,
                simple,
                recognized,
                verified: None,
            });
        }
        disk_reports.sort_by_key(|r| {
            let digits = r.root.abs_precision().clamp(1, 8) as u32;
            r.root.residue_mod(digits)
        });
        reports.extend(disk_reports);
    }
    Ok(ZeroFinding {
        reports,
        total_zeros: total,
        irrational,
        unresolved,
    })
}

/// Rational reconstruction: a fraction `a/b ≡ r (mod m)` with
/// `|a|, b ≤ bound`, by the extended Euclidean algorithm.
fn rational_reconstruct(r: &BigUint, m: &BigUint, bound: &BigUint) -> Option<(BigInt, BigInt)> {
    let mut r0 = BigInt::from(m.clone());
    let mut r1 = BigInt::from(r.clone());
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1.magnitude() > bound {
        if r1.is_zero() {
            return None;
        }
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.magnitude() > bound {
        return None;
    }
    if t1.is_negative() {
        r1 = -r1;
        t1 = -t1;
    }
    Some((r1, t1))
}

/// Attempts to recognize a p-adic integer as a small rational or a small
/// quadratic integer.  Rational recognition uses rational reconstruction
/// within the provable uniqueness range (`2·bound² < p^k`) and re-verifies
/// the embedding to full precision; quadratic recognition scans
/// `A·z² + B·z + C ≡ 0 (mod p^k)` for primitive coefficient triples,
/// lowest height first.  Needs `z` integral with at least 12 certified
/// digits.
pub fn recognize(z: &PadicNumber, opts: &SolverOptions) -> Option<Recognized> {
    if z.is_zero() {
        return None;
    }
    if z.valuation().unwrap_or(0) < 0 || z.abs_precision() < 12 {
        return None;
    }
    let p = z.prime();
    let k = u32::try_from(z.abs_precision()).ok()?;
    let modulus = BigUint::from(p).pow(k);
    let residue = z.residue_mod(k);

    let unique = num_integer::Roots::sqrt(&(&modulus / 2u32));
    let bound = BigUint::from(opts.rational_height).min(unique);
    if let Some((a, b)) = rational_reconstruct(&residue, &modulus, &bound) {
        // A genuine small rational clears the modulus by a wide margin; an
        // accidental reconstruction trades numerator against denominator
        // and lands within a digit or two of it.  Demand the margin, or an
        // unrecognizable zero would masquerade as a certified rational.
        let product = a.magnitude() * b.magnitude();
        let forced = product * BigUint::from(p).pow(RECOGNITION_MARGIN) <= modulus;
        if forced {
            let value = Rational::new(a, b);
            if let Ok(embedded) = PadicNumber::from_rational(&value, p, k + 4) {
                if embedded.agreement_abs(z) >= z.abs_precision() {
                    let numer = value.numer().to_i64()?;
                    let denom = value.denom().to_i64()?;
                    return Some(Recognized {
                        kind: RecognizedKind::Rational,
                        poly: [0, denom, -numer],
                    });
                }
            }
        }
    }

    // Quadratic scan at the joint precision of z and z².
    let z2 = z * z;
    let kq = u32::try_from(z.abs_precision().min(z2.abs_precision())).ok()?;
    if kq < 12 {
        return None;
    }
    let m = BigInt::from(BigUint::from(p).pow(kq));
    let half = &m / 2;
    let r1 = BigInt::from(z.residue_mod(kq));
    let r2 = BigInt::from(z2.residue_mod(kq));
    let mut best: Option<(i64, [i64; 3])> = None;
    for a in 1..=opts.quad_bound {
        let ar2 = BigInt::from(a) * &r2;
        for b in -opts.quad_bound..=opts.quad_bound {
            let t = (&ar2 + BigInt::from(b) * &r1).mod_floor(&m);
            let c_res = (&m - &t).mod_floor(&m);
            let c_lift = if c_res <= half { c_res } else { &c_res - &m };
            let Some(c0) = c_lift.to_i64() else { continue };
            if c0.abs() > opts.quad_bound {
                continue;
            }
            if gcd3(a, b, c0) != 1 {
                continue;
            }
            let height = a.max(b.abs()).max(c0.abs());
            if best.as_ref().is_none_or(|(h, _)| height < *h) {
                best = Some((height, [a, b, c0]));
            }
        }
    }
    best.and_then(|(height, poly)| {
        // Volume heuristic: a congruence `A·z² + B·z + C ≡ 0 (mod p^kq)`
        // carries evidence only when the coefficient box is much smaller
        // than the modulus; demand the cube of the box side to clear it by
        // the recognition margin.
        let side = BigUint::from(2 * height.unsigned_abs() + 1);
        let forced =
            side.pow(3) * BigUint::from(p).pow(RECOGNITION_MARGIN) <= BigUint::from(p).pow(kq);
        forced.then_some(Recognized {
            kind: RecognizedKind::Quadratic,
            poly,
        })
    })
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    let g = a.unsigned_abs().gcd(&b.unsigned_abs());
    g.gcd(&c.unsigned_abs()) as i64
}

fn ring_name(ring: &VerifyRing, poly: &[i64; 3]) -> String {
    match ring {
        VerifyRing::SUnits(s) => {
            let parts: Vec<String> = s.iter().map(|q| format!("1/{q}")).collect();
            format!("Z[{}]", parts.join(","))
        }
        VerifyRing::RealQuadratic => {
            let disc = poly[1] * poly[1] - 4 * poly[0] * poly[2];
            if disc <= 0 {
                return "no real quadratic field".into();
            }
            format!("O_Q(sqrt {})", squarefree_part(disc as u64))
        }
    }
}

fn squarefree_part(mut n: u64) -> u64 {
    let mut out = 1u64;
    let mut d = 2u64;
    while d * d <= n {
        let mut e = 0;
        while n.is_multiple_of(d) {
            n /= d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= d;
        }
        d += 1;
    }
    out * n
}

/// Checks a recognized value against a solution ring: both `z` and `1−z`
/// must be units.  A rational checks S-unit-ness in `Z[1/S]`; a quadratic
/// checks integrality (`|A| = 1`), a real nonsquare discriminant, and that
/// the norms `C/A` of `z` and `(A+B+C)/A` of `1−z` are `±1`.
pub fn verify_candidate(rec: &Recognized, ring: &VerifyRing) -> Verification {
    let name = ring_name(ring, &rec.poly);
    let ok = match (rec.kind, ring) {
        (RecognizedKind::Rational, VerifyRing::SUnits(s)) => match rec.as_rational() {
            Some(z) => {
                let one = Rational::from_integer(1.into());
                !z.is_zero()
                    && z != one
                    && selmer_coords(&z, s).is_ok()
                    && selmer_coords(&(&one - &z), s).is_ok()
            }
            None => false,
        },
        (RecognizedKind::Quadratic, VerifyRing::RealQuadratic) => {
            let [a, b, c] = rec.poly;
            let disc = b * b - 4 * a * c;
            let root = num_integer::Roots::sqrt(&disc.max(0));
            a.abs() == 1
                && disc > 0
                && root * root != disc
                && c.abs() == a.abs()
                && (a + b + c).abs() == a.abs()
        }
        // A kind paired with the wrong ring never verifies.
        _ => false,
    };
    Verification { ring: name, ok }
}

/// The p-adic valuation of a nonzero rational at `q`.
fn val_at(x: &Rational, q: u64) -> i64 {
    let q_big = BigInt::from(q);
    let mut v = 0i64;
    let mut numer = x.numer().clone();
    while (&numer % &q_big).is_zero() {
        numer /= &q_big;
        v += 1;
    }
    let mut denom = x.denom().clone();
    while (&denom % &q_big).is_zero() {
        denom /= &q_big;
        v -= 1;
    }
    v
}

fn power(base: &Rational, e: i64) -> Rational {
    base.pow(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

/// Exact discrete logarithm: the integer `x` with `baseˣ = value`, when
/// one exists with `|x| ≤ bound`.  The only possible exponent is read off
/// a prime valuation of the base and certified by exact rational
/// exponentiation, so `None` is a proof that no such exponent exists.
pub fn dlog_exact(value: &Rational, base: &Rational, bound: i64) -> Option<i64> {
    if value.is_zero() || base.is_zero() {
        return None;
    }
    let numer = base.numer().magnitude().clone();
    let denom = base.denom().magnitude().clone();
    let mut pivot = None;
    let mut d = 2u64;
    while d < 1 << 20 {
        if (&numer % d).is_zero() || (&denom % d).is_zero() {
            pivot = Some(d);
            break;
        }
        if BigUint::from(d) * d > numer && BigUint::from(d) * d > denom {
            break;
        }
        d += 1;
    }
    let pivot = pivot.or_else(|| {
        if numer > BigUint::one() {
            numer.to_u64()
        } else if denom > BigUint::one() {
            denom.to_u64()
        } else {
            None
        }
    })?;
    let e = val_at(base, pivot);
    if e == 0 {
        return None;
    }
    let vv = val_at(value, pivot);
    if vv % e != 0 {
        return None;
    }
    let x = vv / e;
    if x.abs() > bound {
        return None;
    }
    (power(base, x) == *value).then_some(x)
}

/// The result of solving one exponential equation `a·bˣ + c·dʸ = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSolveReport {
    /// Certified solutions `(x, y)`, re-verified by exact arithmetic.
    pub solutions: Vec<(i64, i64)>,
    /// Total zeros of the Coleman function, with multiplicity.
    pub zero_count: usize,
    /// Zeros certified not to be solutions (irrational, or recognized as
    /// an exact value that is provably not of the form `a·bˣ`).
    pub certified_non_solutions: usize,
    /// Upper bound on the number of solutions:
    /// `zero_count − certified_non_solutions`.
    pub bound: usize,
    /// Per-zero reports.
    pub reports: Vec<ZeroReport>,
}

/// Solves `a·bˣ + c·dʸ = 1` over the table's S-units: builds the Coleman
/// function, finds its zeros, matches recognized rational zeros against
/// exact powers, and reports certified solutions with an upper bound.
pub fn solve_exp_equation(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
    table: &CoefficientTable,
    opts: &SolverOptions,
) -> Result<ExpSolveReport> {
    let f = build_exp_equation_function(a, b, c, d, table)?;
    let finding = find_zeros(&f, opts)?;
    let one = Rational::from_integer(1.into());
    let mut solutions = Vec::new();
    let mut certified = finding.irrational;
    for report in &finding.reports {
        if let Some(rec) = &report.recognized {
            match rec.as_rational() {
                Some(z) => {
                    let x = dlog_exact(&(&z / a), b, opts.exp_bound);
                    let y = dlog_exact(&(&(&one - &z) / c), d, opts.exp_bound);
                    match (x, y) {
                        (Some(x), Some(y)) => {
                            let check = a * &power(b, x) + c * &power(d, y);
                            if check == one {
                                solutions.push((x, y));
                            } else {
                                certified += 1;
                            }
                        }
                        // The valuation pins the only possible exponent,
                        // so a failed match is a proof of non-solution.
                        _ => certified += 1,
                    }
                }
                None => certified += 1,
            }
        }
    }
    solutions.sort_unstable();
    Ok(ExpSolveReport {
        solutions,
        zero_count: finding.total_zeros,
        certified_non_solutions: certified,
        bound: finding.total_zeros.saturating_sub(certified),
        reports: finding.reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kim::CoefficientTable;
    use crate::padic::parse_rational;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn unit_function_vanishes_on_known_points() {
        let f = build_unit_equation_function(5, 14).unwrap();
        for z in ["2", "1/2", "-1"] {
            let z = PadicNumber::from_rational(&q(z), 5, 20).unwrap();
            let v = f.evaluate(&z).unwrap();
            assert!(v.val_lower_bound() >= 12, "F({z}) = {v} is not small");
        }
    }

    #[test]
    fn disk_series_matches_direct_evaluation() {
        let f = build_unit_equation_function(5, 12).unwrap();
        let g = disk_expand(&f, 3).unwrap();
        for u in [0i64, 1, 2, -1] {
            let u_point = PadicNumber::from_integer(u, 5, 24).unwrap();
            let series_value = g.evaluate(&u_point).unwrap();
            let z = PadicNumber::from_integer(3 + 5 * u, 5, 24).unwrap();
            let direct = f.evaluate(&z).unwrap();
            assert!(
                series_value.agreement_abs(&direct) >= 11,
                "disk mismatch at u = {u}: {series_value} vs {direct}"
            );
        }
    }

    #[test]
    fn disk_expand_rejects_bad_centers() {
        let f = build_unit_equation_function(5, 10).unwrap();
        assert!(matches!(disk_expand(&f, 0), Err(Error::BadQuery(_))));
        assert!(matches!(disk_expand(&f, 1), Err(Error::BadQuery(_))));
        assert!(matches!(disk_expand(&f, 5), Err(Error::BadQuery(_))));
    }

    #[test]
    fn unit_equation_zeros_at_eleven() {
        // One simple zero per residue disk; the rational ones recognize to
        // −1, 2, 1/2 and the rest to conjugates of the golden ratio.
        let f = build_unit_equation_function(11, 12).unwrap();
        let opts = SolverOptions::default();
        let finding = find_zeros(&f, &opts).unwrap();
        assert_eq!(finding.total_zeros, 9);
        assert_eq!(finding.reports.len(), 9);
        assert_eq!(finding.irrational, 0);
        assert_eq!(finding.unresolved, 0);
        assert!(finding.reports.iter().all(|r| r.simple));
        let mut rationals = Vec::new();
        let mut quadratics = 0usize;
        for r in &finding.reports {
            match r.recognized.as_ref().expect("every root recognizes") {
                rec if rec.kind == RecognizedKind::Rational => {
                    rationals.push(rec.as_rational().unwrap());
                }
                rec => {
                    assert_eq!(rec.poly[0], 1, "golden ratio conjugates are monic");
                    quadratics += 1;
                }
            }
        }
        rationals.sort();
        assert_eq!(rationals, vec![q("-1"), q("1/2"), q("2")]);
        assert_eq!(quadratics, 6);
    }

    #[test]
    fn recognition_finds_small_rationals() {
        let z = PadicNumber::from_rational(&q("22/7"), 11, 20).unwrap();
        let rec = recognize(&z, &SolverOptions::default()).unwrap();
        assert_eq!(rec.kind, RecognizedKind::Rational);
        assert_eq!(rec.poly, [0, 7, -22]);
        assert_eq!(rec.as_rational().unwrap(), q("22/7"));
    }

    #[test]
    fn recognition_finds_the_golden_ratio() {
        // φ ∈ Z_11 via Newton on z² − z − 1 from the seed 8 (8² ≡ 8 + 1).
        let p = 11u64;
        let one = PadicNumber::one(p, 24);
        let mut phi = PadicNumber::from_integer(8, p, 24).unwrap();
        for _ in 0..8 {
            let num = &(&phi * &phi) - &(&phi + &one);
            let den = &phi.mul_rational(&q("2")) - &one;
            phi = &phi - &num.div(&den).unwrap();
        }
        let rec = recognize(&phi, &SolverOptions::default()).unwrap();
        assert_eq!(rec.kind, RecognizedKind::Quadratic);
        assert_eq!(rec.poly, [1, -1, -1]);
    }

    #[test]
    fn verification_pinned_cases() {
        // z = 2 in Z[1/2]: both 2 and −1 are units.
        let two = Recognized {
            kind: RecognizedKind::Rational,
            poly: [0, 1, -2],
        };
        let v = verify_candidate(&two, &VerifyRing::SUnits(vec![2]));
        assert_eq!(v.ring, "Z[1/2]");
        assert!(v.ok);
        // z = 3 in Z[1/2]: 3 is not a unit.
        let three = Recognized {
            kind: RecognizedKind::Rational,
            poly: [0, 1, -3],
        };
        assert!(!verify_candidate(&three, &VerifyRing::SUnits(vec![2])).ok);
        // The golden ratio is a unit with unit co-unit in O_{Q(√5)}.
        let phi = Recognized {
            kind: RecognizedKind::Quadratic,
            poly: [1, -1, -1],
        };
        let v = verify_candidate(&phi, &VerifyRing::RealQuadratic);
        assert_eq!(v.ring, "O_Q(sqrt 5)");
        assert!(v.ok);
        // z² − 4z + 1 has unit norm but 1−z of norm −2: not a unit pair.
        let bad = Recognized {
            kind: RecognizedKind::Quadratic,
            poly: [1, -4, 1],
        };
        assert!(!verify_candidate(&bad, &VerifyRing::RealQuadratic).ok);
    }

    #[test]
    fn discrete_logarithm_pinned() {
        assert_eq!(dlog_exact(&q("49"), &q("7"), 64), Some(2));
        assert_eq!(dlog_exact(&q("8/27"), &q("2/3"), 64), Some(3));
        assert_eq!(dlog_exact(&q("1/16"), &q("2"), 64), Some(-4));
        assert_eq!(dlog_exact(&q("-8"), &q("2"), 64), None);
        assert_eq!(dlog_exact(&q("49"), &q("7"), 1), None);
        assert_eq!(dlog_exact(&q("1"), &q("7"), 64), Some(0));
    }

    #[test]
    fn exp_equation_coefficients_for_the_pinned_instance() {
        // a·bˣ + c·dʸ = 1 with (a, b, c, d) = (1, 7, −3, 2), S = {2, 3, 7}.
        let table = CoefficientTable::new(&[2, 3, 7], 5, 16).unwrap();
        let f = build_exp_equation_function(&q("1"), &q("7"), &q("-3"), &q("2"), &table).unwrap();
        // γ = δ = 0 (a = 1), so c_l2 and c_0 vanish.
        assert!(f.c_l2.val_lower_bound() >= 14, "c_l2 = {} not zero", f.c_l2);
        assert!(f.c_0.val_lower_bound() >= 14, "c_0 = {} not zero", f.c_0);
        // c_ll = h(7⊗2) and c_l1 = h(7⊗3)·log 2 − h(7⊗2)·log 3.
        let i2 = table.index_of(2).unwrap();
        let i3 = table.index_of(3).unwrap();
        let i7 = table.index_of(7).unwrap();
        let c72 = table.entry(i7, i2);
        let c73 = table.entry(i7, i3);
        assert!(f.c_ll.agreement_abs(c72) >= 14);
        let expected = &(c73 * table.log_of_prime(i2)) - &(c72 * table.log_of_prime(i3));
        assert!(f.c_l1.agreement_abs(&expected) >= 14);
        let log_expected = table.log_of_prime(i7) * table.log_of_prime(i2);
        assert!(f.c_li.agreement_abs(&log_expected) >= 14);
    }

    #[test]
    fn exp_equation_degenerate_bases_are_rejected() {
        let table = CoefficientTable::new(&[2, 3], 5, 12).unwrap();
        assert!(matches!(
            build_exp_equation_function(&q("1"), &q("-1"), &q("-1"), &q("2"), &table),
            Err(Error::ExcludedValue(_))
        ));
        assert!(matches!(
            build_exp_equation_function(&q("1"), &q("5"), &q("-1"), &q("2"), &table),
            Err(Error::NotSUnit(_, _))
        ));
    }

    #[test]
    fn exp_equation_golden_instance() {
        // 7ˣ − 3·2ʸ = 1: solutions (1, 1) and (2, 4); six zeros total, the
        // repeated disk-4 cluster splits one level down into 49 and −1.
        let table = CoefficientTable::new(&[2, 3, 7], 5, 16).unwrap();
        let opts = SolverOptions::default();
        let report =
            solve_exp_equation(&q("1"), &q("7"), &q("-3"), &q("2"), &table, &opts).unwrap();
        assert_eq!(report.zero_count, 6);
        assert_eq!(report.solutions, vec![(1, 1), (2, 4)]);
        // Exactly one zero is certified away (−1, which is no power of 7);
        // the three unidentified zeros must stay uncertified, so the
        // solution bound is five.
        assert_eq!(report.certified_non_solutions, 1);
        assert_eq!(report.bound, 5);
        let minus_one = report
            .reports
            .iter()
            .find(|r| {
                r.recognized
                    .as_ref()
                    .and_then(|rec| rec.as_rational())
                    .is_some_and(|v| v == q("-1"))
            })
            .expect("z = −1 is recognized");
        assert_eq!(minus_one.disk, 4);
    }

    #[test]
    fn zero_search_reports_exhausted_precision() {
        let p = 5;
        let f = ColemanFunction {
            p,
            n: 10,
            c_li: PadicNumber::exact_zero(p),
            c_ll: PadicNumber::exact_zero(p),
            c_l1: PadicNumber::exact_zero(p),
            c_l2: PadicNumber::exact_zero(p),
            c_0: PadicNumber::exact_zero(p),
        };
        assert!(matches!(
            find_zeros(&f, &SolverOptions::default()),
            Err(Error::ZeroSearch(_))
        ));
    }

    #[test]
    fn zero_report_serde_round_trip() {
        let f = build_unit_equation_function(5, 12).unwrap();
        let opts = SolverOptions::default();
        let finding = find_zeros(&f, &opts).unwrap();
        let json = serde_json::to_string(&finding).unwrap();
        let back: ZeroFinding = serde_json::from_str(&json).unwrap();
        assert_eq!(back, finding);
    }
}
