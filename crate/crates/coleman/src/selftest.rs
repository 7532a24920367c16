//! Seeded self-test batteries.
//!
//! [`run_selftest`] draws deterministic pseudo-random samples from a seed
//! and checks the library's structural invariants on them: p-adic ring
//! axioms and serialization, Teichmüller lifts, logarithm additivity, the
//! dilogarithm functional equations (reflection, inversion, duplication),
//! tensor decomposition round trips, twisted antisymmetry of coefficient
//! tables, Heisenberg group laws, and the series calculus.  Every check
//! reports a name and verdict, so a failing installation can be diagnosed
//! from the report alone.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::heisenberg::Heisenberg;
use crate::kim::CoefficientTable;
use crate::padic::PadicNumber;
use crate::polylog::{dilog, plog};
use crate::series::{Disk, PowerSeries};
use crate::symbols::{decompose, factor_symbol, reconstruct, SymbolTensor, DEFAULT_FACTOR_BOUND};
use crate::Rational;

/// One named invariant check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    /// Stable check identifier.
    pub name: String,
    /// Whether every sampled instance satisfied the invariant.
    pub ok: bool,
    /// A witness description when the check failed.
    pub detail: Option<String>,
}

/// The outcome of a full self-test run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    /// The seed the samples were drawn from.
    pub seed: u64,
    /// Per-check results, in a fixed order.
    pub checks: Vec<CheckResult>,
}

impl SelftestReport {
    /// True when every check passed.
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

fn check(name: &str, outcome: std::result::Result<(), String>) -> CheckResult {
    match outcome {
        Ok(()) => CheckResult {
            name: name.to_string(),
            ok: true,
            detail: None,
        },
        Err(detail) => CheckResult {
            name: name.to_string(),
            ok: false,
            detail: Some(detail),
        },
    }
}

/// A random p-adic unit at relative precision `rel`, with a mantissa of a
/// few digits and a random sign.
fn random_unit(rng: &mut ChaCha8Rng, p: u64, rel: u32) -> PadicNumber {
    let span = p.pow(5.min(40 / p.max(2).ilog2().max(1)));
    loop {
        let mantissa = rng.gen_range(1..span) as i64;
        if (mantissa as u64).is_multiple_of(p) {
            continue;
        }
        let signed = if rng.gen_bool(0.5) {
            mantissa
        } else {
            -mantissa
        };
        return PadicNumber::from_integer(signed, p, rel).expect("valid prime");
    }
}

/// A random unit whose residue avoids the listed classes mod p.
fn random_unit_avoiding(rng: &mut ChaCha8Rng, p: u64, rel: u32, avoid: &[u64]) -> PadicNumber {
    loop {
        let z = random_unit(rng, p, rel);
        let r = z
            .residue_mod(1)
            .to_u64_digits()
            .first()
            .copied()
            .unwrap_or(0);
        if !avoid.contains(&r) {
            return z;
        }
    }
}

/// A random nonzero p-adic number with valuation in `−2..=2`.
fn random_padic(rng: &mut ChaCha8Rng, p: u64, rel: u32) -> PadicNumber {
    let unit = random_unit(rng, p, rel);
    let val = rng.gen_range(-2i64..=2);
    let shift = Rational::new(
        num_bigint::BigInt::from(p).pow(val.unsigned_abs() as u32),
        1.into(),
    );
    if val >= 0 {
        unit.mul_rational(&shift)
    } else {
        unit.mul_rational(&Rational::new(1.into(), shift.numer().clone()))
    }
}

fn small(x: &PadicNumber, digits: i64) -> bool {
    x.val_lower_bound() >= digits
}

fn agree(x: &PadicNumber, y: &PadicNumber, digits: i64) -> bool {
    x.agreement_abs(y) >= digits
}

fn padic_ring_axioms(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for p in [5u64, 11] {
        for _ in 0..8 {
            let x = random_padic(rng, p, 16);
            let y = random_padic(rng, p, 16);
            let z = random_padic(rng, p, 16);
            let assoc_l = &(&x + &y) + &z;
            let assoc_r = &x + &(&y + &z);
            if !assoc_l.indistinguishable(&assoc_r) {
                return Err(format!("addition not associative at {x}, {y}, {z}"));
            }
            let dist_l = &x * &(&y + &z);
            let dist_r = &(&x * &y) + &(&x * &z);
            if !dist_l.indistinguishable(&dist_r) {
                return Err(format!("multiplication not distributive at {x}, {y}, {z}"));
            }
            if !(&x + &(-&x)).is_zero() {
                return Err(format!("x + (−x) ≠ 0 at {x}"));
            }
            let u = random_unit(rng, p, 16);
            let back = (&x * &u).div(&u).expect("unit divisor");
            if !back.indistinguishable(&x) {
                return Err(format!("x·u/u ≠ x at {x}, u = {u}"));
            }
        }
    }
    Ok(())
}

fn padic_serde_roundtrip(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for p in [3u64, 7, 13] {
        for _ in 0..6 {
            let x = random_padic(rng, p, 14);
            let json = serde_json::to_string(&x).map_err(|e| e.to_string())?;
            let back: PadicNumber = serde_json::from_str(&json).map_err(|e| e.to_string())?;
            if back != x {
                return Err(format!("round trip changed {x} into {back}"));
            }
        }
    }
    Ok(())
}

fn teichmuller_lift(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for p in [5u64, 7] {
        for _ in 0..6 {
            let x = random_unit(rng, p, 14);
            let w = x.teichmuller().map_err(|e| e.to_string())?;
            let mut pw = w.clone();
            for _ in 1..(p - 1) {
                pw = &pw * &w;
            }
            let one = PadicNumber::one(p, 14);
            if !agree(&pw, &one, 12) {
                return Err(format!("ω(x)^{} ≠ 1 at x = {x}", p - 1));
            }
            if w.residue_mod(1) != x.residue_mod(1) {
                return Err(format!("ω(x) ≢ x (mod p) at x = {x}"));
            }
        }
    }
    Ok(())
}

fn plog_additivity(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for p in [5u64, 11] {
        for _ in 0..8 {
            let x = random_unit(rng, p, 16);
            let y = random_unit(rng, p, 16);
            let lhs = plog(&(&x * &y)).map_err(|e| e.to_string())?;
            let rhs =
                &plog(&x).map_err(|e| e.to_string())? + &plog(&y).map_err(|e| e.to_string())?;
            if !agree(&lhs, &rhs, 12) {
                return Err(format!("log(xy) ≠ log x + log y at x = {x}, y = {y}"));
            }
        }
    }
    Ok(())
}

fn plog_kills_teichmuller(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let p = 7u64;
    for _ in 0..6 {
        let x = random_unit(rng, p, 14);
        let w = x.teichmuller().map_err(|e| e.to_string())?;
        let lw = plog(&w).map_err(|e| e.to_string())?;
        if !small(&lw, 11) {
            return Err(format!("log ω(x) ≠ 0 at x = {x}: {lw}"));
        }
    }
    Ok(())
}

fn dilog_reflection(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let p = 7u64;
    for _ in 0..5 {
        let z = random_unit_avoiding(rng, p, 14, &[1]);
        let om = &PadicNumber::one(p, 14) - &z;
        let lhs =
            &dilog(&z).map_err(|e| e.to_string())? + &dilog(&om).map_err(|e| e.to_string())?;
        let rhs = (&plog(&z).map_err(|e| e.to_string())?
            * &plog(&om).map_err(|e| e.to_string())?)
            .mul_rational(&Rational::new((-1).into(), 1.into()));
        if !agree(&lhs, &rhs, 10) {
            return Err(format!("reflection fails at z = {z}: {lhs} vs {rhs}"));
        }
    }
    Ok(())
}

fn dilog_inversion(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let p = 5u64;
    for _ in 0..5 {
        let z = random_unit_avoiding(rng, p, 14, &[1]);
        let zi = z.inv().map_err(|e| e.to_string())?;
        let lhs =
            &dilog(&z).map_err(|e| e.to_string())? + &dilog(&zi).map_err(|e| e.to_string())?;
        let lg = plog(&z).map_err(|e| e.to_string())?;
        let rhs = (&lg * &lg).mul_rational(&Rational::new((-1).into(), 2.into()));
        if !agree(&lhs, &rhs, 10) {
            return Err(format!("inversion fails at z = {z}: {lhs} vs {rhs}"));
        }
    }
    Ok(())
}

fn dilog_duplication(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let p = 5u64;
    for _ in 0..5 {
        let z = random_unit_avoiding(rng, p, 14, &[1, p - 1]);
        let z2 = &z * &z;
        let mz = -&z;
        let lhs = dilog(&z2).map_err(|e| e.to_string())?;
        let rhs = (&dilog(&z).map_err(|e| e.to_string())?
            + &dilog(&mz).map_err(|e| e.to_string())?)
            .mul_rational(&Rational::new(2.into(), 1.into()));
        if !agree(&lhs, &rhs, 10) {
            return Err(format!("duplication fails at z = {z}: {lhs} vs {rhs}"));
        }
    }
    Ok(())
}

fn symbols_roundtrip(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let primes = [2u64, 3, 5, 7, 11, 13];
    for _ in 0..6 {
        let q1 = primes[rng.gen_range(0..primes.len())];
        let q2 = primes[rng.gen_range(0..primes.len())];
        let d = decompose(q1, q2).map_err(|e| e.to_string())?;
        let back = reconstruct(&d, DEFAULT_FACTOR_BOUND).map_err(|e| e.to_string())?;
        let mut expected = SymbolTensor::new();
        expected.add_term(q1, q2, &Rational::new(1.into(), 1.into()));
        if back != expected {
            return Err(format!("decompose({q1}, {q2}) does not reconstruct"));
        }
        let bound = q1.max(q2);
        for (u, v, _) in d.symmetric.iter() {
            if *u > bound || *v > bound {
                return Err(format!(
                    "decompose({q1}, {q2}) uses a relator prime beyond {bound}"
                ));
            }
        }
        let one = Rational::new(1.into(), 1.into());
        for (t, _) in d.steinberg.iter() {
            for side in [t.clone(), &one - t] {
                let f = factor_symbol(&side, DEFAULT_FACTOR_BOUND).map_err(|e| e.to_string())?;
                if f.iter().any(|(q, _)| q > bound) {
                    return Err(format!(
                        "decompose({q1}, {q2}) has a Steinberg parameter beyond {bound}"
                    ));
                }
            }
        }
    }
    Ok(())
}

fn table_antisymmetry(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let table = CoefficientTable::new(&[2, 3], 5, 10).map_err(|e| e.to_string())?;
    for _ in 0..6 {
        let u: Vec<i64> = (0..2).map(|_| rng.gen_range(-3i64..=3)).collect();
        let v: Vec<i64> = (0..2).map(|_| rng.gen_range(-3i64..=3)).collect();
        let lhs = &table.h13(&u, &v).map_err(|e| e.to_string())?
            + &table.h13(&v, &u).map_err(|e| e.to_string())?;
        let rhs =
            &table.h1(&u).map_err(|e| e.to_string())? * &table.h1(&v).map_err(|e| e.to_string())?;
        if !agree(&lhs, &rhs, 6) {
            return Err(format!(
                "h(u⊗v) + h(v⊗u) ≠ log(u)·log(v) at u = {u:?}, v = {v:?}"
            ));
        }
    }
    Ok(())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(
        rng.gen_range(-20i64..=20).into(),
        rng.gen_range(1i64..=8).into(),
    )
}

fn random_heisenberg(rng: &mut ChaCha8Rng) -> Heisenberg<Rational> {
    Heisenberg::new(
        random_rational(rng),
        random_rational(rng),
        random_rational(rng),
    )
}

fn heisenberg_axioms(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    for _ in 0..8 {
        let g = random_heisenberg(rng);
        let h = random_heisenberg(rng);
        let k = random_heisenberg(rng);
        let assoc_l = g.hmul(&h).hmul(&k);
        let assoc_r = g.hmul(&h.hmul(&k));
        if assoc_l != assoc_r {
            return Err("group law not associative".to_string());
        }
        let e = g.identity_like();
        if g.hmul(&g.hinv()) != e || g.hinv().hmul(&g) != e {
            return Err("inverse law fails".to_string());
        }
        // exp(BCH(x, y)) = exp(x)·exp(y) holds exactly at nilpotency two.
        let x = random_heisenberg(rng);
        let y = random_heisenberg(rng);
        let lhs = x.bch(&y).hexp();
        let rhs = x.hexp().hmul(&y.hexp());
        if lhs != rhs {
            return Err("exp ∘ BCH ≠ exp · exp".to_string());
        }
    }
    Ok(())
}

fn series_calculus(rng: &mut ChaCha8Rng) -> std::result::Result<(), String> {
    let p = 5u64;
    for _ in 0..6 {
        let coeffs: Vec<PadicNumber> = (0..8).map(|_| random_padic(rng, p, 14)).collect();
        let f = PowerSeries::new(p, "w", Disk::Closed, coeffs, 8);
        let g = f.integrate().derivative();
        for n in 0..8 {
            if !g.coeff(n).indistinguishable(f.coeff(n)) {
                return Err(format!(
                    "d/dw ∫ f ≠ f at coefficient {n}: {} vs {}",
                    g.coeff(n),
                    f.coeff(n)
                ));
            }
        }
        let h = f.add(&f.neg());
        for n in 0..8 {
            if !h.coeff(n).is_zero() {
                return Err(format!("f − f ≠ 0 at coefficient {n}"));
            }
        }
    }
    Ok(())
}

/// Runs every battery from the given seed and collects the verdicts.
pub fn run_selftest(seed: u64) -> SelftestReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = vec![
        check("padic-ring-axioms", padic_ring_axioms(&mut rng)),
        check("padic-serde-roundtrip", padic_serde_roundtrip(&mut rng)),
        check("teichmuller-lift", teichmuller_lift(&mut rng)),
        check("plog-additivity", plog_additivity(&mut rng)),
        check("plog-kills-teichmuller", plog_kills_teichmuller(&mut rng)),
        check("dilog-reflection", dilog_reflection(&mut rng)),
        check("dilog-inversion", dilog_inversion(&mut rng)),
        check("dilog-duplication", dilog_duplication(&mut rng)),
        check("symbols-roundtrip", symbols_roundtrip(&mut rng)),
        check("table-antisymmetry", table_antisymmetry(&mut rng)),
        check("heisenberg-axioms", heisenberg_axioms(&mut rng)),
        check("series-calculus", series_calculus(&mut rng)),
    ];
    SelftestReport { seed, checks }
}
