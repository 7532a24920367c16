//! Bilinear coefficient tables and the depth-two pairing on Selmer
//! coordinates.
//!
//! A decomposition of `q ⊗ q′` into symmetric terms and Steinberg relators
//! turns into a p-adic number by the rule
//!
//! ```text
//!   h(q⊗q′) = Σ s·plog(u)·plog(v) − Σ d·Li₂(t),
//! ```
//!
//! i.e. symmetric terms evaluate through products of logarithms and each
//! Steinberg relator contributes the dilogarithm at its parameter.  The
//! [`CoefficientTable`] stores `h(q_i ⊗ q_j)` for all pairs from a set `S`
//! of primes (never containing `p` itself), and is checked at construction
//! against the twisted antisymmetry
//!
//! ```text
//!   h(q⊗q′) + h(q′⊗q) = plog(q)·plog(q′),
//! ```
//!
//! which is what makes the bilinear extension [`CoefficientTable::h13`]
//! well defined on Selmer coordinates.  The remaining maps package the
//! same data in equation-solving form: [`selmer_coords`] and [`kummer`]
//! send S-units to exponent vectors, [`CoefficientTable::h2`] assembles
//! the Heisenberg-valued cocycle `(h1(x), h1(y), h13(x,y))`, and
//! [`restriction_map`] records the local shadow `(v_p(t), plog t)`.
//!
//! Precision policy: inputs are minted with a few guard digits above the
//! requested precision and results are capped back at `N` absolute
//! digits, so stored tables are honest truncations.

use num_traits::{ToPrimitive, Zero as _};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::heisenberg::Heisenberg;
use crate::padic::PadicNumber;
use crate::polylog::{dilog, plog};
use crate::symbols::{decompose, factor_symbol, Decomposition, DEFAULT_FACTOR_BOUND};
use crate::util::is_prime;
use crate::{Rational, Result};

/// Guard digits carried above the requested precision while evaluating.
pub const DEFAULT_SLACK: u32 = 4;

fn working_rel(n: u32) -> u32 {
    n + DEFAULT_SLACK + 2
}

/// Checks that a rational coefficient can safely scale a p-adic value:
/// a denominator divisible by `p` would silently spend precision.
fn check_coefficient(c: &Rational, p: u64) -> Result<()> {
    use num_integer::Integer;
    let p_big = num_bigint::BigInt::from(p);
    if c.denom().is_multiple_of(&p_big) {
        return Err(Error::PrecisionUnsafe {
            coeff: c.to_string(),
            p,
        });
    }
    Ok(())
}

/// Evaluates a decomposition as a p-adic number at `n` absolute digits:
/// `Σ s·plog(u)plog(v) − Σ d·Li₂(t)`.  Errors: a coefficient with
/// denominator divisible by `p`, or a Steinberg parameter in `{0, 1}`.
pub fn evaluate_decomposition(d: &Decomposition, p: u64, n: u32) -> Result<PadicNumber> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n < 1 {
        return Err(Error::InvalidPrecision("need n >= 1".into()));
    }
    let rel = working_rel(n);
    let mut acc = PadicNumber::exact_zero(p);
    for (u, v, s) in &d.symmetric {
        check_coefficient(s, p)?;
        let lu = plog(&PadicNumber::from_integer(*u as i64, p, rel)?)?;
        let lv = plog(&PadicNumber::from_integer(*v as i64, p, rel)?)?;
        acc = &acc + &(&lu * &lv).mul_rational(s);
    }
    let one = Rational::from_integer(1.into());
    for (t, c) in &d.steinberg {
        check_coefficient(c, p)?;
        if t.is_zero() || t == &one {
            return Err(Error::ExcludedValue(format!(
                "Steinberg parameter {t} is singular"
            )));
        }
        let z = PadicNumber::from_rational(t, p, rel)?;
        acc = &acc - &dilog(&z)?.mul_rational(c);
    }
    Ok(acc.truncate_abs(n as i64))
}

/// The bilinear coefficient `h(q ⊗ q′)` at `n` digits.  Errors: `q` or
/// `q′` equal to `p` (the set `S` never contains `p`), or non-primes.
pub fn coefficient(q: u64, q_prime: u64, p: u64, n: u32) -> Result<PadicNumber> {
    if q == p || q_prime == p {
        return Err(Error::BadQuery(format!(
            "coefficient at ({q}, {q_prime}) needs both primes different from p = {p}"
        )));
    }
    let d = decompose(q, q_prime)?;
    evaluate_decomposition(&d, p, n)
}

/// Validates a prime set `S`: distinct primes, sorted ascending, none
/// equal to `p`.
fn validate_s(s: &[u64], p: u64) -> Result<Vec<u64>> {
    if s.is_empty() {
        return Err(Error::BadQuery("S must be nonempty".into()));
    }
    let mut out = s.to_vec();
    out.sort_unstable();
    out.dedup();
    if out.len() != s.len() {
        return Err(Error::BadQuery("S has repeated entries".into()));
    }
    for &q in &out {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        if q == p {
            return Err(Error::BadQuery(format!("S must not contain p = {p}")));
        }
    }
    Ok(out)
}

/// The table of bilinear coefficients `h(q_i ⊗ q_j)` over a prime set,
/// together with the logarithms of the primes, checked at construction
/// for twisted antisymmetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "TableRepr", try_from = "TableRepr")]
pub struct CoefficientTable {
    s: Vec<u64>,
    p: u64,
    n: u32,
    entries: Vec<Vec<PadicNumber>>,
    logs: Vec<PadicNumber>,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    #[serde(rename = "S")]
    s: Vec<u64>,
    p: u64,
    #[serde(rename = "N")]
    n: u32,
    entries: Vec<Vec<PadicNumber>>,
}

impl From<CoefficientTable> for TableRepr {
    fn from(t: CoefficientTable) -> Self {
        TableRepr {
            s: t.s,
            p: t.p,
            n: t.n,
            entries: t.entries,
        }
    }
}

impl TryFrom<TableRepr> for CoefficientTable {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        let s = validate_s(&r.s, r.p)?;
        if s != r.s {
            return Err(Error::BadQuery("S must be sorted and distinct".into()));
        }
        if r.entries.len() != s.len() || r.entries.iter().any(|row| row.len() != s.len()) {
            return Err(Error::BadQuery("entry grid does not match S".into()));
        }
        for row in &r.entries {
            for e in row {
                if e.prime() != r.p {
                    return Err(Error::BadQuery("entry prime differs from table p".into()));
                }
            }
        }
        let logs = CoefficientTable::compute_logs(&s, r.p, r.n)?;
        Ok(CoefficientTable {
            s,
            p: r.p,
            n: r.n,
            entries: r.entries,
            logs,
        })
    }
}

impl CoefficientTable {
    fn compute_logs(s: &[u64], p: u64, n: u32) -> Result<Vec<PadicNumber>> {
        s.iter()
            .map(|&q| plog(&PadicNumber::from_integer(q as i64, p, working_rel(n))?))
            .collect()
    }

    /// Builds the full `|S| × |S|` table at `n` digits and verifies
    /// twisted antisymmetry on every pair to `n −` [`DEFAULT_SLACK`]
    /// digits.  Errors: invalid `S`, `p` not an odd prime, or a failed
    /// antisymmetry check.
    pub fn new(s: &[u64], p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p == 2 {
            return Err(Error::BadQuery("p must be odd".into()));
        }
        if n < 8 {
            return Err(Error::InvalidPrecision("tables need n >= 8".into()));
        }
        let s = validate_s(s, p)?;
        let size = s.len();
        let mut entries = Vec::with_capacity(size);
        for &qi in &s {
            let mut row = Vec::with_capacity(size);
            for &qj in &s {
                row.push(coefficient(qi, qj, p, n)?);
            }
            entries.push(row);
        }
        let logs = Self::compute_logs(&s, p, n)?;
        let table = CoefficientTable {
            s,
            p,
            n,
            entries,
            logs,
        };
        table.check_antisymmetry()?;
        Ok(table)
    }

    fn check_antisymmetry(&self) -> Result<()> {
        let want = self.n as i64 - DEFAULT_SLACK as i64;
        for i in 0..self.s.len() {
            for j in 0..self.s.len() {
                let sum = &self.entries[i][j] + &self.entries[j][i];
                let product = &self.logs[i] * &self.logs[j];
                if sum.agreement_abs(&product) < want {
                    return Err(Error::Mismatch(format!(
                        "twisted antisymmetry fails at ({}, {}): {} + {} vs {}",
                        self.s[i], self.s[j], self.entries[i][j], self.entries[j][i], product
                    )));
                }
            }
        }
        Ok(())
    }

    /// The prime set `S` (sorted).
    pub fn primes(&self) -> &[u64] {
        &self.s
    }

    /// The base prime `p`.
    pub fn p(&self) -> u64 {
        self.p
    }

    /// The stated absolute precision `N`.
    pub fn precision(&self) -> u32 {
        self.n
    }

    /// The entry `h(q_i ⊗ q_j)`.
    pub fn entry(&self, i: usize, j: usize) -> &PadicNumber {
        &self.entries[i][j]
    }

    /// The index of a prime in `S`, if present.
    pub fn index_of(&self, q: u64) -> Option<usize> {
        self.s.iter().position(|&x| x == q)
    }

    /// The logarithm `plog(q_i)` at working precision.
    pub fn log_of_prime(&self, i: usize) -> &PadicNumber {
        &self.logs[i]
    }

    fn check_len(&self, x: &[i64], who: &str) -> Result<()> {
        if x.len() != self.s.len() {
            return Err(Error::BadQuery(format!(
                "{who} has length {}, table has |S| = {}",
                x.len(),
                self.s.len()
            )));
        }
        Ok(())
    }

    /// The linear form `h1(x) = Σ x_i·plog(q_i)`.
    pub fn h1(&self, x: &[i64]) -> Result<PadicNumber> {
        self.check_len(x, "coordinate vector")?;
        let mut acc = PadicNumber::exact_zero(self.p);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0 {
                acc = &acc + &self.logs[i].mul_rational(&Rational::from_integer(xi.into()));
            }
        }
        Ok(acc)
    }

    /// The bilinear form `h13(x, y) = Σ h(q_i ⊗ q_j)·x_i·y_j`.
    pub fn h13(&self, x: &[i64], y: &[i64]) -> Result<PadicNumber> {
        self.check_len(x, "left coordinate vector")?;
        self.check_len(y, "right coordinate vector")?;
        let mut acc = PadicNumber::exact_zero(self.p);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c = Rational::from_integer((xi as i128 * yj as i128).into());
                acc = &acc + &self.entries[i][j].mul_rational(&c);
            }
        }
        Ok(acc)
    }

    /// The Heisenberg-valued depth-two cocycle
    /// `h2(x, y) = (h1(x), h1(y), h13(x, y))`.
    pub fn h2(&self, x: &[i64], y: &[i64]) -> Result<Heisenberg<PadicNumber>> {
        Ok(Heisenberg::new(self.h1(x)?, self.h1(y)?, self.h13(x, y)?))
    }

    /// The de Rham period pair `ρ(x, y) = (h1(x)·h1(y), h13(x, y))`.
    pub fn rho_dr2(&self, x: &[i64], y: &[i64]) -> Result<(PadicNumber, PadicNumber)> {
        Ok((&self.h1(x)? * &self.h1(y)?, self.h13(x, y)?))
    }
}

/// Exponent coordinates of an S-unit: `t = ± Π q_i^{x_i}`.  Errors: `t`
/// is zero or involves a prime outside `S`.
pub fn selmer_coords(t: &Rational, s: &[u64]) -> Result<Vec<i64>> {
    let factors = factor_symbol(t, DEFAULT_FACTOR_BOUND)?;
    let mut coords = vec![0i64; s.len()];
    let mut stray = Vec::new();
    for (prime, e) in factors.iter() {
        match s.iter().position(|&q| q == prime) {
            Some(i) => {
                coords[i] = e
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| Error::BadQuery("exponent overflow".into()))?;
            }
            None => stray.push(prime),
        }
    }
    if !stray.is_empty() {
        return Err(Error::NotSUnit(t.to_string(), stray));
    }
    Ok(coords)
}

/// The Kummer coordinates of a parameter `t`: the pair
/// `(coords(t), coords(1−t))`.  Errors: `t ∈ {0, 1}`, or either side
/// fails to be an S-unit.
pub fn kummer(t: &Rational, s: &[u64]) -> Result<(Vec<i64>, Vec<i64>)> {
    let one = Rational::from_integer(1.into());
    if t.is_zero() || t == &one {
        return Err(Error::ExcludedValue(format!(
            "kummer needs t outside {{0, 1}}, got {t}"
        )));
    }
    Ok((selmer_coords(t, s)?, selmer_coords(&(&one - t), s)?))
}

/// The local restriction of a rational supported on `S ∪ {p}`: the pair
/// `(v_p(t), plog t)`.  Errors: a prime outside `S ∪ {p}` divides `t`.
pub fn restriction_map(t: &Rational, table: &CoefficientTable) -> Result<(i64, PadicNumber)> {
    let factors = factor_symbol(t, DEFAULT_FACTOR_BOUND)?;
    let mut coords = vec![0i64; table.s.len()];
    let mut at_p = 0i64;
    let mut stray = Vec::new();
    for (prime, e) in factors.iter() {
        let e = e
            .to_integer()
            .to_i64()
            .ok_or_else(|| Error::BadQuery("exponent overflow".into()))?;
        if prime == table.p {
            at_p = e;
        } else if let Some(i) = table.index_of(prime) {
            coords[i] = e;
        } else {
            stray.push(prime);
        }
    }
    if !stray.is_empty() {
        return Err(Error::NotSUnit(t.to_string(), stray));
    }
    Ok((at_p, table.h1(&coords)?))
}
