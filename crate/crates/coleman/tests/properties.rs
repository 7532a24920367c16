//! Property-based invariants across the tower: ring laws and serialization
//! for truncated p-adics, series calculus, logarithm functional equations,
//! exact tensor decomposition, coefficient-table bilinearity, algebraic
//! recognition, and stability of the zero search under added precision.

use coleman::heisenberg::Heisenberg;
use coleman::kim::CoefficientTable;
use coleman::padic::PadicNumber;
use coleman::polylog::{dilog, plog};
use coleman::series::{Disk, PowerSeries};
use coleman::solver::{
    build_unit_equation_function, dlog_exact, find_zeros, recognize, RecognizedKind, SolverOptions,
};
use coleman::symbols::{
    decompose_tensor, factor_symbol, reconstruct, SymbolTensor, DEFAULT_FACTOR_BOUND,
};
use coleman::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use std::sync::OnceLock;

/// Relative precision used for embeddings throughout the suite.
const REL: u32 = 18;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn embed(r: &Rational, p: u64) -> PadicNumber {
    PadicNumber::from_rational(r, p, REL).unwrap()
}

fn primes() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 11, 13])
}

fn rationals() -> impl Strategy<Value = Rational> {
    (-1_000_000i64..=1_000_000, 1i64..=10_000).prop_map(|(n, d)| q(n, d))
}

/// Signed p-adic unit from a mantissa and a sign bit; assumes p ∤ m.
fn unit(m: i64, neg: bool, p: u64) -> PadicNumber {
    let m = if neg { -m } else { m };
    PadicNumber::from_integer(m, p, REL).unwrap()
}

/// Table on S = {2, 3} at p = 5, built once and shared across cases.
fn table() -> &'static CoefficientTable {
    static TABLE: OnceLock<CoefficientTable> = OnceLock::new();
    TABLE.get_or_init(|| CoefficientTable::new(&[2, 3], 5, 12).unwrap())
}

proptest! {
    /// Embedding Q into Q_p respects sums and products at stated precision.
    #[test]
    fn embedding_is_a_ring_homomorphism(
        a in rationals(),
        b in rationals(),
        p in primes(),
    ) {
        let x = embed(&a, p);
        let y = embed(&b, p);
        prop_assert!((&x + &y).indistinguishable(&embed(&(&a + &b), p)));
        prop_assert!((&x * &y).indistinguishable(&embed(&(&a * &b), p)));
        prop_assert!((&x - &y).indistinguishable(&embed(&(&a - &b), p)));
    }

    /// Associativity, distributivity, and additive inverses hold to the
    /// digits the operands guarantee.
    #[test]
    fn ring_axioms_hold_at_stated_precision(
        a in rationals(),
        b in rationals(),
        c in rationals(),
        p in primes(),
    ) {
        let x = embed(&a, p);
        let y = embed(&b, p);
        let z = embed(&c, p);
        prop_assert!((&(&x + &y) + &z).indistinguishable(&(&x + &(&y + &z))));
        prop_assert!((&(&x * &y) * &z).indistinguishable(&(&x * &(&y * &z))));
        prop_assert!((&x * &(&y + &z)).indistinguishable(&(&(&x * &y) + &(&x * &z))));
        prop_assert!((&x + &(-&x)).is_zero());
    }

    /// Serialization is lossless, including negative-valuation inputs.
    #[test]
    fn serde_roundtrip_is_exact(
        a in rationals(),
        p in primes(),
        shift in -3i64..=3,
    ) {
        let scale = if shift >= 0 {
            Rational::new(BigInt::from(p).pow(shift as u32), 1.into())
        } else {
            Rational::new(1.into(), BigInt::from(p).pow(shift.unsigned_abs() as u32))
        };
        let x = embed(&a, p).mul_rational(&scale);
        let json = serde_json::to_string(&x).unwrap();
        let back: PadicNumber = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    /// Multiplicative inverses cancel back to one.
    #[test]
    fn inverses_cancel(a in rationals(), p in primes()) {
        prop_assume!(!a.is_zero());
        let x = embed(&a, p);
        let product = &x.inv().unwrap() * &x;
        prop_assert!(product.indistinguishable(&PadicNumber::one(p, REL)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// The branch logarithm turns products of units into sums.
    #[test]
    fn plog_is_additive_on_units(
        p in primes(),
        m1 in 2i64..=1_000_000,
        m2 in 2i64..=1_000_000,
        n1 in any::<bool>(),
        n2 in any::<bool>(),
    ) {
        prop_assume!(m1 % p as i64 != 0 && m2 % p as i64 != 0);
        let x = unit(m1, n1, p);
        let y = unit(m2, n2, p);
        let lhs = plog(&(&x * &y)).unwrap();
        let rhs = &plog(&x).unwrap() + &plog(&y).unwrap();
        prop_assert!(lhs.agreement_abs(&rhs) >= 12);
    }

    /// Teichmüller lifts are roots of unity, so their logarithm vanishes.
    #[test]
    fn plog_kills_teichmuller_lifts(
        p in primes(),
        m in 2i64..=1_000_000,
        neg in any::<bool>(),
    ) {
        prop_assume!(m % p as i64 != 0);
        let omega = unit(m, neg, p).teichmuller().unwrap();
        prop_assert!(plog(&omega).unwrap().val_lower_bound() >= 12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Li₂(z) + Li₂(1−z) = −log(z)·log(1−z) on units with unit coboundary.
    #[test]
    fn dilog_reflection(
        p in prop::sample::select(vec![3u64, 5, 7]),
        m in 2i64..=1_000_000,
        neg in any::<bool>(),
    ) {
        prop_assume!(![0, 1].contains(&(m.rem_euclid(p as i64) as u64 % p)));
        let z = unit(m, neg, p);
        let one_minus = &PadicNumber::one(p, REL) - &z;
        prop_assume!(!one_minus.is_zero() && one_minus.valuation() == Some(0));
        let lhs = &dilog(&z).unwrap() + &dilog(&one_minus).unwrap();
        let rhs = -&(&plog(&z).unwrap() * &plog(&one_minus).unwrap());
        prop_assert!(lhs.agreement_abs(&rhs) >= 8);
    }

    /// Li₂(z) + Li₂(1/z) = −½·log(z)².
    #[test]
    fn dilog_inversion(
        p in prop::sample::select(vec![3u64, 5, 7]),
        m in 2i64..=1_000_000,
        neg in any::<bool>(),
    ) {
        prop_assume!(m % p as i64 != 0);
        let z = unit(m, neg, p);
        let lhs = &dilog(&z).unwrap() + &dilog(&z.inv().unwrap()).unwrap();
        let logz = plog(&z).unwrap();
        let rhs = (&logz * &logz).mul_rational(&q(-1, 2));
        prop_assert!(lhs.agreement_abs(&rhs) >= 8);
    }

    /// Li₂(z²) = 2·(Li₂(z) + Li₂(−z)).
    #[test]
    fn dilog_duplication(
        p in prop::sample::select(vec![5u64, 7]),
        m in 2i64..=1_000_000,
        neg in any::<bool>(),
    ) {
        let r = m.rem_euclid(p as i64) as u64;
        prop_assume!(r != 0 && r != 1 && r != p - 1);
        let z = unit(m, neg, p);
        let lhs = dilog(&(&z * &z)).unwrap();
        let rhs = (&dilog(&z).unwrap() + &dilog(&(-&z)).unwrap()).mul_rational(&q(2, 1));
        prop_assert!(lhs.agreement_abs(&rhs) >= 8);
    }
}

proptest! {
    /// Decomposing a tensor of prime symbols and reconstructing it is the
    /// identity, and the relators never escape above the largest prime in
    /// the input.
    #[test]
    fn decomposition_reconstructs_the_tensor(
        terms in prop::collection::vec(
            (0usize..6, 0usize..6, -9i64..=9, 1i64..=4),
            0..=4,
        ),
    ) {
        const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
        let mut tensor = SymbolTensor::new();
        for &(i, j, n, d) in &terms {
            tensor.add_term(PRIMES[i], PRIMES[j], &q(n, d));
        }
        let d = decompose_tensor(&tensor).unwrap();
        let back = reconstruct(&d, DEFAULT_FACTOR_BOUND).unwrap();
        prop_assert_eq!(&back, &tensor);

        if let Some(top) = tensor.max_prime() {
            for &(u, v, _) in d.symmetric.iter() {
                prop_assert!(u <= top && v <= top);
            }
            let one = q(1, 1);
            for (t, _) in d.steinberg.iter() {
                for side in [t.clone(), &one - t] {
                    let f = factor_symbol(&side, DEFAULT_FACTOR_BOUND).unwrap();
                    let escape = f.iter().map(|(prime, _)| prime).find(|&prime| prime > top);
                    prop_assert!(escape.is_none());
                }
            }
        }
    }

    /// h^{1,3} is bilinear in the exponent vectors and twisted-antisymmetric
    /// against the product of the h¹ values.
    #[test]
    fn table_is_bilinear_and_twisted_antisymmetric(
        x in [-5i64..=5, -5i64..=5],
        y in [-5i64..=5, -5i64..=5],
        z in [-5i64..=5, -5i64..=5],
    ) {
        let tb = table();
        let sum = [x[0] + z[0], x[1] + z[1]];
        let lhs = tb.h13(&sum, &y).unwrap();
        let rhs = &tb.h13(&x, &y).unwrap() + &tb.h13(&z, &y).unwrap();
        prop_assert!(lhs.indistinguishable(&rhs));

        let twisted = &tb.h13(&x, &y).unwrap() + &tb.h13(&y, &x).unwrap();
        let product = &tb.h1(&x).unwrap() * &tb.h1(&y).unwrap();
        prop_assert!(twisted.agreement_abs(&product) >= 8);
    }

    /// A planted small rational is recovered exactly by recognition.
    #[test]
    fn recognition_recovers_planted_rationals(
        p in primes(),
        n in -999i64..=999,
        d in 1i64..=999,
    ) {
        prop_assume!(n != 0 && d % p as i64 != 0);
        let planted = q(n, d);
        let z = PadicNumber::from_rational(&planted, p, 20).unwrap();
        let rec = recognize(&z, &SolverOptions::default());
        prop_assert!(rec.is_some());
        let rec = rec.unwrap();
        prop_assert_eq!(rec.kind, RecognizedKind::Rational);
        prop_assert_eq!(rec.as_rational(), Some(planted));
    }

    /// Whatever recognition returns on an arbitrary residue, the claimed
    /// vanishing polynomial really does vanish at the input.
    #[test]
    fn recognition_is_sound_on_arbitrary_residues(
        p in primes(),
        k in any::<i64>(),
    ) {
        let z = PadicNumber::from_integer(k, p, 20).unwrap();
        if let Some(rec) = recognize(&z, &SolverOptions::default()) {
            let [a, b, c] = rec.poly;
            let residual = &(&(&z * &z).mul_rational(&q(a, 1)) + &z.mul_rational(&q(b, 1)))
                + &PadicNumber::from_integer(c, p, 20).unwrap();
            prop_assert!(residual.val_lower_bound() >= 12);
        }
    }

    /// Exact discrete logarithms recover a planted exponent and reject a
    /// value that is off by a fresh prime factor.
    #[test]
    fn dlog_recovers_planted_exponents(
        bn in -9i64..=9,
        bd in 1i64..=9,
        x in -30i64..=30,
    ) {
        let base = q(bn, bd);
        prop_assume!(!base.is_zero() && base.abs() != q(1, 1));

        let mut value = q(1, 1);
        for _ in 0..x.unsigned_abs() {
            value = &value * &base;
        }
        if x < 0 {
            value = value.recip();
        }
        prop_assert_eq!(dlog_exact(&value, &base, 64), Some(x));
        prop_assert_eq!(dlog_exact(&(&value * &q(17, 1)), &base, 64), None);
    }

    /// Heisenberg multiplication is associative with two-sided identity and
    /// inverses, in exact rational arithmetic.
    #[test]
    fn heisenberg_group_laws(
        a in (rationals(), rationals(), rationals()),
        b in (rationals(), rationals(), rationals()),
        c in (rationals(), rationals(), rationals()),
    ) {
        let g1 = Heisenberg::new(a.0, a.1, a.2);
        let g2 = Heisenberg::new(b.0, b.1, b.2);
        let g3 = Heisenberg::new(c.0, c.1, c.2);
        prop_assert_eq!(g1.hmul(&g2).hmul(&g3), g1.hmul(&g2.hmul(&g3)));
        let e = g1.identity_like();
        prop_assert_eq!(e.hmul(&g1), g1.clone());
        prop_assert_eq!(g1.hmul(&e), g1.clone());
        prop_assert_eq!(g1.hmul(&g1.hinv()), e.clone());
        prop_assert_eq!(g1.hinv().hmul(&g1), e);
    }

    /// Termwise integration followed by differentiation is the identity on
    /// coefficients.
    #[test]
    fn derivative_undoes_integrate(
        coeffs in prop::collection::vec(rationals(), 1..=8),
        p in primes(),
    ) {
        let cs: Vec<PadicNumber> = coeffs.iter().map(|r| embed(r, p)).collect();
        let order = cs.len();
        let f = PowerSeries::new(p, "w", Disk::Closed, cs, order);
        let g = f.integrate().derivative();
        prop_assert_eq!(g.order(), f.order());
        for (a, b) in f.coeffs().iter().zip(g.coeffs().iter()) {
            prop_assert!(a.indistinguishable(b));
        }
    }

    /// Evaluating a truncated product agrees with the product of the
    /// evaluations through the shared order, for points inside the open
    /// disk where dropped terms stay small.
    #[test]
    fn truncated_product_evaluates_through_its_order(
        fc in prop::collection::vec(-999i64..=999, 3..=6),
        gc in prop::collection::vec(-999i64..=999, 3..=6),
        p in primes(),
        m in -999i64..=999,
    ) {
        let order = fc.len().min(gc.len());
        let lift = |cs: &[i64]| -> PowerSeries {
            let coeffs = cs[..order]
                .iter()
                .map(|&k| PadicNumber::from_integer(k, p, REL).unwrap())
                .collect();
            PowerSeries::new(p, "w", Disk::Open, coeffs, order)
        };
        let f = lift(&fc);
        let g = lift(&gc);
        let x = PadicNumber::from_integer(p as i64 * m, p, REL).unwrap();
        let lhs = f.mul(&g).evaluate(&x).unwrap();
        let rhs = &f.evaluate(&x).unwrap() * &g.evaluate(&x).unwrap();
        prop_assert!(lhs.agreement_abs(&rhs) >= order as i64);
    }
}

/// Raising the working precision must not create or destroy zeros, and the
/// surviving roots must sharpen while agreeing on their common digits.
#[test]
fn unit_equation_zeros_persist_and_sharpen() {
    let opts = SolverOptions::default();
    for p in [5u64, 11] {
        let coarse = find_zeros(&build_unit_equation_function(p, 12).unwrap(), &opts).unwrap();
        let fine = find_zeros(&build_unit_equation_function(p, 16).unwrap(), &opts).unwrap();
        assert_eq!(coarse.total_zeros, fine.total_zeros, "p = {p}");
        assert_eq!(coarse.reports.len(), fine.reports.len(), "p = {p}");
        for (lo, hi) in coarse.reports.iter().zip(fine.reports.iter()) {
            assert_eq!(lo.disk, hi.disk, "p = {p}");
            assert!(
                hi.root.abs_precision() >= lo.root.abs_precision(),
                "root in disk {} lost precision at p = {p}",
                lo.disk
            );
            let overlap = lo.root.abs_precision().min(hi.root.abs_precision());
            assert!(
                lo.root.agreement_abs(&hi.root) >= overlap,
                "roots diverge in disk {} at p = {p}",
                lo.disk
            );
            if let Some(rec) = &lo.recognized {
                assert_eq!(Some(rec), hi.recognized.as_ref(), "p = {p}");
            }
        }
    }
}

/// Every reported zero, pushed back through the Coleman function, vanishes
/// to the working precision less the publication slack.
#[test]
fn reported_zeros_satisfy_the_residual_contract() {
    let n = 14u32;
    let slack = 4i64;
    for p in [5u64, 11] {
        let f = build_unit_equation_function(p, n).unwrap();
        let finding = find_zeros(&f, &SolverOptions::default()).unwrap();
        assert!(!finding.reports.is_empty());
        for rep in &finding.reports {
            let residual = f.evaluate(&rep.root).unwrap();
            let target = (n as i64 - slack).min(rep.root.abs_precision());
            assert!(
                residual.val_lower_bound() >= target,
                "disk {} residual {} below p^-{target} at p = {p}",
                rep.disk,
                residual
            );
        }
    }
}
