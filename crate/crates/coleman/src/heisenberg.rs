//! The unipotent Heisenberg group, its Lie algebra, and exact cochain
//! calculus for finite group actions.
//!
//! Elements live in coordinates `(x₁, x₂, x₃)`: the group law is that of
//! upper-triangular unipotent 3×3 matrices,
//!
//! ```text
//!   X·Y = (X₁+Y₁, X₂+Y₂, X₃+Y₃+X₁Y₂),
//! ```
//!
//! the Lie bracket is `[x, y] = (0, 0, x₁y₂ − y₁x₂)`, truncated
//! Baker–Campbell–Hausdorff is `x ⋆ y = x + y + ½[x, y]`, and the
//! exponential sends `(x₁, x₂, x₃)` to `(x₁, x₂, x₃ + ½x₁x₂)`.  The
//! depth-two period point of a parameter `z` is
//!
//! ```text
//!   albanese(z) = (plog z, plog(1−z), −Li₂(z)).
//! ```
//!
//! The cochain half of the module works over exact rationals: a finite
//! group given by its multiplication table acts on the coordinates through
//! a pair of `{±1}`-valued characters `(χ₁, χ₂, χ₁χ₂)`, and the
//! (nonabelian) coboundaries
//!
//! ```text
//!   (d⁰u)(σ)      = u · σ(u)⁻¹,
//!   (d¹c)(σ₁,σ₂)  = c(σ₁σ₂) · (σ₁·c(σ₂))⁻¹ · c(σ₁)⁻¹,
//! ```
//!
//! together with the cup product `(κ₁∪κ₂)(σ,τ) = κ₁(σ)·σκ₂(τ)` measure how
//! far a section lifting a pair of 1-cocycles is from being a cocycle
//! itself.  Everything here is exact arithmetic — no precision bookkeeping.

use num_traits::Zero as _;

use crate::error::Error;
use crate::padic::PadicNumber;
use crate::polylog::{dilog, plog};
use crate::{Rational, Result};

/// Scalars the Heisenberg coordinates can live in: exact rationals or
/// truncated p-adics.
pub trait HeisenbergScalar: Clone {
    /// Addition.
    fn add(&self, other: &Self) -> Self;
    /// Subtraction.
    fn sub(&self, other: &Self) -> Self;
    /// Multiplication.
    fn mul(&self, other: &Self) -> Self;
    /// Negation.
    fn neg(&self) -> Self;
    /// Multiplication by 1/2 (the BCH denominator at depth two).
    fn half(&self) -> Self;
}

impl HeisenbergScalar for Rational {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn half(&self) -> Self {
        self / Rational::from_integer(2.into())
    }
}

impl HeisenbergScalar for PadicNumber {
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn half(&self) -> Self {
        // Exact scaling; at p = 2 this shifts the valuation down by one.
        self.mul_rational(&Rational::new(1.into(), 2.into()))
    }
}

/// A point of the Heisenberg group (or its Lie algebra — the coordinates
/// are shared; the operations tell the two apart).
#[derive(Debug, Clone, PartialEq)]
pub struct Heisenberg<T> {
    /// First abelianized coordinate.
    pub x1: T,
    /// Second abelianized coordinate.
    pub x2: T,
    /// Central (depth-two) coordinate.
    pub x3: T,
}

impl<T: HeisenbergScalar> Heisenberg<T> {
    /// Builds an element from coordinates.
    pub fn new(x1: T, x2: T, x3: T) -> Self {
        Heisenberg { x1, x2, x3 }
    }

    /// Group multiplication.
    pub fn hmul(&self, other: &Self) -> Self {
        Heisenberg {
            x1: self.x1.add(&other.x1),
            x2: self.x2.add(&other.x2),
            x3: self.x3.add(&other.x3).add(&self.x1.mul(&other.x2)),
        }
    }

    /// Group inverse: `(−x₁, −x₂, −x₃ + x₁x₂)`.
    pub fn hinv(&self) -> Self {
        Heisenberg {
            x1: self.x1.neg(),
            x2: self.x2.neg(),
            x3: self.x3.neg().add(&self.x1.mul(&self.x2)),
        }
    }

    /// The identity, with zero scalars derived from `self`'s coordinates.
    pub fn identity_like(&self) -> Self {
        Heisenberg {
            x1: self.x1.sub(&self.x1),
            x2: self.x2.sub(&self.x2),
            x3: self.x3.sub(&self.x3),
        }
    }

    /// Lie bracket `[x, y] = (0, 0, x₁y₂ − y₁x₂)`.
    pub fn bracket(&self, other: &Self) -> Self {
        let z = self.x1.sub(&self.x1);
        Heisenberg {
            x1: z.clone(),
            x2: z,
            x3: self.x1.mul(&other.x2).sub(&other.x1.mul(&self.x2)),
        }
    }

    /// Baker–Campbell–Hausdorff product `x + y + ½[x, y]` (exact at depth
    /// two: all higher brackets vanish).
    pub fn bch(&self, other: &Self) -> Self {
        let br = self.bracket(other);
        Heisenberg {
            x1: self.x1.add(&other.x1),
            x2: self.x2.add(&other.x2),
            x3: self.x3.add(&other.x3).add(&br.x3.half()),
        }
    }

    /// Exponential from the Lie algebra to the group:
    /// `(x₁, x₂, x₃) ↦ (x₁, x₂, x₃ + ½x₁x₂)`.
    pub fn hexp(&self) -> Self {
        Heisenberg {
            x1: self.x1.clone(),
            x2: self.x2.clone(),
            x3: self.x3.add(&self.x1.mul(&self.x2).half()),
        }
    }
}

/// The depth-two period point `(plog z, plog(1−z), −Li₂(z))`.  Errors:
/// `z` indistinguishable from 0 or 1.
pub fn albanese(z: &PadicNumber) -> Result<Heisenberg<PadicNumber>> {
    if z.is_zero() {
        return Err(Error::ExcludedValue("0".into()));
    }
    let rel = z.rel_precision().expect("nonzero");
    let one = PadicNumber::one(z.prime(), rel);
    let om = &one - z;
    if om.is_zero() {
        return Err(Error::ExcludedValue("1".into()));
    }
    Ok(Heisenberg {
        x1: plog(z)?,
        x2: plog(&om)?,
        x3: -&dilog(z)?,
    })
}

/// A finite group presented by its multiplication table
/// (`table[a][b] = a∘b`), with elements `0 .. n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    id: usize,
}

impl FiniteGroup {
    /// Validates and wraps a multiplication table: closure, a two-sided
    /// identity, inverses, and associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || n > 64 {
            return Err(Error::Cochain(format!("unsupported group size {n}")));
        }
        for row in &table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::Cochain("multiplication table is not square".into()));
            }
        }
        let id = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::Cochain("no two-sided identity".into()))?;
        for (a, row) in table.iter().enumerate() {
            if !(0..n).any(|b| row[b] == id && table[b][a] == id) {
                return Err(Error::Cochain(format!("element {a} has no inverse")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Cochain(format!(
                            "associativity fails at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, id })
    }

    /// The cyclic group Z/n (element `k` is the class of `k`).
    pub fn cyclic(n: usize) -> Self {
        assert!((1..=64).contains(&n), "unsupported cyclic order {n}");
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        FiniteGroup { table, id: 0 }
    }

    /// Number of elements.
    pub fn size(&self) -> usize {
        self.table.len()
    }

    /// Group operation.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    /// The identity element.
    pub fn identity(&self) -> usize {
        self.id
    }

    /// The inverse of `a`.
    pub fn inverse(&self, a: usize) -> usize {
        (0..self.size())
            .find(|&b| self.table[a][b] == self.id)
            .expect("validated groups have inverses")
    }
}

/// A `{±1}`-valued character of a finite group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    values: Vec<Rational>,
}

impl Character {
    /// Validates multiplicativity (`χ(ab) = χ(a)χ(b)`) and wraps the values.
    pub fn new(group: &FiniteGroup, values: Vec<Rational>) -> Result<Self> {
        if values.len() != group.size() {
            return Err(Error::Cochain("character has the wrong length".into()));
        }
        if values.iter().any(|v| v.is_zero()) {
            return Err(Error::Cochain("character value zero".into()));
        }
        for a in 0..group.size() {
            for b in 0..group.size() {
                if values[group.mul(a, b)] != &values[a] * &values[b] {
                    return Err(Error::Cochain(format!(
                        "character is not multiplicative at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(Character { values })
    }

    /// The trivial character.
    pub fn trivial(group: &FiniteGroup) -> Self {
        Character {
            values: vec![Rational::from_integer(1.into()); group.size()],
        }
    }

    /// The sign character `k ↦ (−1)^k` on Z/n (requires even `n`).
    pub fn sign(group: &FiniteGroup) -> Result<Self> {
        let n = group.size();
        let values = (0..n)
            .map(|k| Rational::from_integer(if k % 2 == 0 { 1 } else { -1 }.into()))
            .collect();
        Self::new(group, values)
    }

    /// Value at a group element.
    pub fn value(&self, sigma: usize) -> &Rational {
        &self.values[sigma]
    }

    /// Pointwise product character.
    pub fn product(&self, other: &Self) -> Self {
        assert_eq!(self.values.len(), other.values.len(), "size mismatch");
        Character {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }
}

/// The coordinate action `σ·(x₁,x₂,x₃) = (χ₁(σ)x₁, χ₂(σ)x₂, χ₁χ₂(σ)x₃)`,
/// which is by group automorphisms of the Heisenberg group.
#[derive(Debug, Clone)]
pub struct HeisenbergAction {
    /// Character twisting the first coordinate.
    pub chi1: Character,
    /// Character twisting the second coordinate.
    pub chi2: Character,
}

impl HeisenbergAction {
    /// Applies `σ` to an element.
    pub fn apply(&self, sigma: usize, v: &Heisenberg<Rational>) -> Heisenberg<Rational> {
        let c1 = self.chi1.value(sigma);
        let c2 = self.chi2.value(sigma);
        Heisenberg {
            x1: &v.x1 * c1,
            x2: &v.x2 * c2,
            x3: &v.x3 * &(c1 * c2),
        }
    }
}

/// A group-valued cochain of level 0, 1, or 2 on a finite group: a map
/// from `level`-tuples of group elements to Heisenberg points over the
/// exact rationals.  Level-1 values are indexed by `σ`, level-2 values by
/// `σ·n + τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    level: u8,
    values: Vec<Heisenberg<Rational>>,
}

impl Cochain {
    /// A level-0 cochain (a single element).
    pub fn level0(value: Heisenberg<Rational>) -> Self {
        Cochain {
            level: 0,
            values: vec![value],
        }
    }

    /// A level-1 cochain from its value list (length = group size).
    pub fn level1(values: Vec<Heisenberg<Rational>>) -> Self {
        Cochain { level: 1, values }
    }

    /// A level-2 cochain from its value list (length = group size²,
    /// indexed by `σ·n + τ`).
    pub fn level2(values: Vec<Heisenberg<Rational>>) -> Self {
        Cochain { level: 2, values }
    }

    /// The level.
    pub fn level(&self) -> u8 {
        self.level
    }

    /// Value of a level-1 cochain at `σ`.
    pub fn value1(&self, sigma: usize) -> &Heisenberg<Rational> {
        assert_eq!(self.level, 1, "value1 on a level-{} cochain", self.level);
        &self.values[sigma]
    }

    /// Value of a level-2 cochain at `(σ, τ)` for a group of size `n`.
    pub fn value2(&self, n: usize, sigma: usize, tau: usize) -> &Heisenberg<Rational> {
        assert_eq!(self.level, 2, "value2 on a level-{} cochain", self.level);
        &self.values[sigma * n + tau]
    }

    fn check_shape(&self, group: &FiniteGroup) -> Result<()> {
        let n = group.size();
        let want = match self.level {
            0 => 1,
            1 => n,
            2 => n * n,
            _ => return Err(Error::Cochain("level must be 0, 1, or 2".into())),
        };
        if self.values.len() != want {
            return Err(Error::Cochain(format!(
                "level-{} cochain needs {want} values, has {}",
                self.level,
                self.values.len()
            )));
        }
        Ok(())
    }
}

/// The nonabelian coboundary: level 0 → 1 is `σ ↦ u·σ(u)⁻¹`; level 1 → 2
/// is `(σ₁,σ₂) ↦ c(σ₁σ₂)·(σ₁c(σ₂))⁻¹·c(σ₁)⁻¹`.  Errors: a level-2 input
/// (no level-3 cochains here) or a shape mismatch.
pub fn coboundary(group: &FiniteGroup, action: &HeisenbergAction, c: &Cochain) -> Result<Cochain> {
    c.check_shape(group)?;
    let n = group.size();
    match c.level {
        0 => {
            let u = &c.values[0];
            let values = (0..n).map(|s| u.hmul(&action.apply(s, u).hinv())).collect();
            Ok(Cochain::level1(values))
        }
        1 => {
            let mut values = Vec::with_capacity(n * n);
            for s1 in 0..n {
                for s2 in 0..n {
                    let lead = c.value1(group.mul(s1, s2));
                    let twisted = action.apply(s1, c.value1(s2));
                    values.push(lead.hmul(&twisted.hinv()).hmul(&c.value1(s1).hinv()));
                }
            }
            Ok(Cochain::level2(values))
        }
        _ => Err(Error::Cochain(
            "no coboundary out of a level-2 cochain".into(),
        )),
    }
}

/// A scalar (rank-one) cochain over the exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarCochain {
    level: u8,
    values: Vec<Rational>,
}

impl ScalarCochain {
    /// A level-1 scalar cochain.
    pub fn level1(values: Vec<Rational>) -> Self {
        ScalarCochain { level: 1, values }
    }

    /// A level-2 scalar cochain indexed by `σ·n + τ`.
    pub fn level2(values: Vec<Rational>) -> Self {
        ScalarCochain { level: 2, values }
    }

    /// The level.
    pub fn level(&self) -> u8 {
        self.level
    }

    /// Value at `σ` (level 1).
    pub fn value1(&self, sigma: usize) -> &Rational {
        assert_eq!(self.level, 1);
        &self.values[sigma]
    }

    /// Value at `(σ, τ)` (level 2, group size `n`).
    pub fn value2(&self, n: usize, sigma: usize, tau: usize) -> &Rational {
        assert_eq!(self.level, 2);
        &self.values[sigma * n + tau]
    }

    /// Pointwise sum (levels must match).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.level, other.level, "level mismatch");
        assert_eq!(self.values.len(), other.values.len(), "shape mismatch");
        ScalarCochain {
            level: self.level,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Pointwise negation.
    pub fn neg(&self) -> Self {
        ScalarCochain {
            level: self.level,
            values: self.values.iter().map(|a| -a).collect(),
        }
    }

    /// `true` when every value is zero.
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }
}

/// Twisted scalar coboundary of a level-1 cochain in a χ-twisted line:
/// `(dκ)(σ,τ) = κ(στ) − χ(σ)κ(τ) − κ(σ)` (the abelian shadow of the
/// nonabelian `d¹`).
pub fn scalar_d1(group: &FiniteGroup, chi: &Character, c: &ScalarCochain) -> ScalarCochain {
    assert_eq!(c.level, 1, "scalar_d1 takes a level-1 cochain");
    let n = group.size();
    assert_eq!(c.values.len(), n, "shape mismatch");
    let mut values = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            let v = &c.values[group.mul(s, t)] - &(chi.value(s) * &c.values[t]) - &c.values[s];
            values.push(v);
        }
    }
    ScalarCochain::level2(values)
}

/// `true` when `κ` is a χ-twisted 1-cocycle: `κ(στ) = κ(σ) + χ(σ)κ(τ)`.
pub fn is_scalar_cocycle(group: &FiniteGroup, chi: &Character, c: &ScalarCochain) -> bool {
    scalar_d1(group, chi, c).is_zero()
}

/// Cup product of scalar 1-cochains valued in the χ₁- and χ₂-twisted
/// lines: `(κ₁∪κ₂)(σ,τ) = κ₁(σ)·σκ₂(τ) = κ₁(σ)·χ₂(σ)·κ₂(τ)`, landing in
/// the χ₁χ₂-twisted line.
pub fn cup_product(
    group: &FiniteGroup,
    chi2: &Character,
    k1: &ScalarCochain,
    k2: &ScalarCochain,
) -> ScalarCochain {
    assert_eq!(k1.level, 1, "cup takes level-1 cochains");
    assert_eq!(k2.level, 1, "cup takes level-1 cochains");
    let n = group.size();
    let mut values = Vec::with_capacity(n * n);
    for s in 0..n {
        for t in 0..n {
            values.push(&k1.values[s] * &(chi2.value(s) * &k2.values[t]));
        }
    }
    ScalarCochain::level2(values)
}

/// The structural section over a pair of scalar 1-cochains:
/// `σ ↦ (κ₁(σ), κ₂(σ), 0)` as a group-valued level-1 cochain.
pub fn structural_lift(k1: &ScalarCochain, k2: &ScalarCochain) -> Cochain {
    assert_eq!(k1.level, 1);
    assert_eq!(k2.level, 1);
    assert_eq!(k1.values.len(), k2.values.len(), "shape mismatch");
    let zero = Rational::zero();
    let values = k1
        .values
        .iter()
        .zip(&k2.values)
        .map(|(a, b)| Heisenberg::new(a.clone(), b.clone(), zero.clone()))
        .collect();
    Cochain::level1(values)
}

/// The exponential section: `σ ↦ exp(κ₁(σ), κ₂(σ), 0) =
/// (κ₁(σ), κ₂(σ), ½κ₁(σ)κ₂(σ))`.
pub fn exp_lift(k1: &ScalarCochain, k2: &ScalarCochain) -> Cochain {
    assert_eq!(k1.level, 1);
    assert_eq!(k2.level, 1);
    assert_eq!(k1.values.len(), k2.values.len(), "shape mismatch");
    let zero = Rational::zero();
    let values = k1
        .values
        .iter()
        .zip(&k2.values)
        .map(|(a, b)| Heisenberg::new(a.clone(), b.clone(), zero.clone()).hexp())
        .collect();
    Cochain::level1(values)
}

/// Extracts the central (x₃) part of a level-2 group-valued cochain.
/// Errors: some value has a nonzero abelianized part (the cochain does not
/// land in the center, so no scalar shadow exists).
pub fn central_part(c: &Cochain) -> Result<ScalarCochain> {
    if c.level != 2 {
        return Err(Error::Cochain(
            "central_part takes a level-2 cochain".into(),
        ));
    }
    let mut values = Vec::with_capacity(c.values.len());
    for v in &c.values {
        if !v.x1.is_zero() || !v.x2.is_zero() {
            return Err(Error::Cochain(
                "cochain does not land in the center (are the inputs cocycles?)".into(),
            ));
        }
        values.push(v.x3.clone());
    }
    Ok(ScalarCochain { level: 2, values })
}
