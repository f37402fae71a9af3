//! Arithmetic in `Z[xi]/(xi^2 - 1)` and the skew-commutative monomial
//! algebra over a set of circles.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient ring of a theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Ring {
    /// `Z[xi]/(xi^2-1)`
    Unified,
    /// `xi = +1`
    Even,
    /// `xi = -1`
    Odd,
    /// `Z/2`
    Mod2,
}

impl Ring {
    pub fn name(self) -> &'static str {
        match self {
            Ring::Unified => "unified",
            Ring::Even => "even",
            Ring::Odd => "odd",
            Ring::Mod2 => "mod2",
        }
    }
}

/// Small element `m + n xi` with machine integers. Every matrix entry the
/// Khovanov functors produce is `+-xi^k`, so this is the working type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Zu {
    pub m: i64,
    pub n: i64,
}

impl Zu {
    pub const ZERO: Zu = Zu { m: 0, n: 0 };
    pub const ONE: Zu = Zu { m: 1, n: 0 };
    pub const XI: Zu = Zu { m: 0, n: 1 };

    pub fn new(m: i64, n: i64) -> Self {
        Zu { m, n }
    }

    /// `xi^k`
    pub fn xi_pow(k: u32) -> Self {
        if k % 2 == 0 {
            Zu::ONE
        } else {
            Zu::XI
        }
    }

    pub fn is_zero(self) -> bool {
        self.m == 0 && self.n == 0
    }

    /// Multiplication by `xi` swaps the two coordinates.
    pub fn times_xi(self) -> Self {
        Zu { m: self.n, n: self.m }
    }

    /// Value after setting `xi = +1`, `-1`, or reducing mod 2.
    pub fn specialize(self, ring: Ring) -> Zu {
        match ring {
            Ring::Unified => self,
            Ring::Even => Zu::new(self.m + self.n, 0),
            Ring::Odd => Zu::new(self.m - self.n, 0),
            Ring::Mod2 => Zu::new((self.m + self.n).rem_euclid(2), 0),
        }
    }

    /// Integer value after specialization (`ring` must not be unified).
    pub fn value_in(self, ring: Ring) -> i64 {
        debug_assert!(ring != Ring::Unified);
        self.specialize(ring).m
    }

    /// `Some((sign, k))` when the element is `sign * xi^k`.
    pub fn as_unit(self) -> Option<(i64, u32)> {
        match (self.m, self.n) {
            (1, 0) => Some((1, 0)),
            (-1, 0) => Some((-1, 0)),
            (0, 1) => Some((1, 1)),
            (0, -1) => Some((-1, 1)),
            _ => None,
        }
    }
}

impl Add for Zu {
    type Output = Zu;
    fn add(self, o: Zu) -> Zu {
        Zu::new(self.m + o.m, self.n + o.n)
    }
}

impl AddAssign for Zu {
    fn add_assign(&mut self, o: Zu) {
        self.m += o.m;
        self.n += o.n;
    }
}

impl Sub for Zu {
    type Output = Zu;
    fn sub(self, o: Zu) -> Zu {
        Zu::new(self.m - o.m, self.n - o.n)
    }
}

impl Neg for Zu {
    type Output = Zu;
    fn neg(self) -> Zu {
        Zu::new(-self.m, -self.n)
    }
}

impl Mul for Zu {
    type Output = Zu;
    fn mul(self, o: Zu) -> Zu {
        // (a + b xi)(c + d xi) = (ac + bd) + (ad + bc) xi
        Zu::new(self.m * o.m + self.n * o.n, self.m * o.n + self.n * o.m)
    }
}

impl fmt::Display for Zu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.m, self.n) {
            (m, 0) => write!(f, "{m}"),
            (0, n) => write!(f, "{n}xi"),
            (m, n) if n < 0 => write!(f, "{m}-{}xi", -n),
            (m, n) => write!(f, "{m}+{n}xi"),
        }
    }
}

/// Arbitrary-precision element `m + n xi` tagged with its specialization.
/// Specialized values keep `n = 0`; mod-2 values keep `m` in `{0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RingElem {
    pub m: BigInt,
    pub n: BigInt,
    pub ring: Ring,
}

impl RingElem {
    pub fn new(m: impl Into<BigInt>, n: impl Into<BigInt>, ring: Ring) -> Self {
        RingElem { m: m.into(), n: n.into(), ring }.folded()
    }

    pub fn zero(ring: Ring) -> Self {
        RingElem::new(0, 0, ring)
    }

    pub fn one(ring: Ring) -> Self {
        RingElem::new(1, 0, ring)
    }

    pub fn xi(ring: Ring) -> Self {
        RingElem::new(0, 1, ring)
    }

    fn folded(mut self) -> Self {
        match self.ring {
            Ring::Unified => {}
            Ring::Even => {
                self.m += std::mem::take(&mut self.n);
            }
            Ring::Odd => {
                self.m -= std::mem::take(&mut self.n);
            }
            Ring::Mod2 => {
                self.m += std::mem::take(&mut self.n);
                self.m = self.m.mod_floor(&BigInt::from(2));
            }
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero() && self.n.is_zero()
    }

    /// Specialize a unified element (or reduce an even/odd one mod 2).
    pub fn specialize(&self, ring: Ring) -> RingElem {
        assert!(
            self.ring == ring || self.ring == Ring::Unified || ring == Ring::Mod2,
            "cannot specialize {:?} to {:?}",
            self.ring,
            ring
        );
        RingElem { m: self.m.clone(), n: self.n.clone(), ring }.folded()
    }

    pub fn from_zu(z: Zu, ring: Ring) -> Self {
        RingElem::new(z.m, z.n, ring)
    }
}

impl Add for &RingElem {
    type Output = RingElem;
    fn add(self, o: &RingElem) -> RingElem {
        assert_eq!(self.ring, o.ring);
        RingElem { m: &self.m + &o.m, n: &self.n + &o.n, ring: self.ring }.folded()
    }
}

impl Mul for &RingElem {
    type Output = RingElem;
    fn mul(self, o: &RingElem) -> RingElem {
        assert_eq!(self.ring, o.ring);
        let m = &self.m * &o.m + &self.n * &o.n;
        let n = &self.m * &o.n + &self.n * &o.m;
        RingElem { m, n, ring: self.ring }.folded()
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n.is_zero() {
            write!(f, "{}", self.m)
        } else if self.m.is_zero() {
            if self.n.is_one() {
                write!(f, "xi")
            } else {
                write!(f, "{}xi", self.n)
            }
        } else {
            write!(f, "{}+{}xi", self.m, self.n)
        }
    }
}

/// A strictly ascending set of circle ids, stored as a bit mask.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(pub u64);

impl Monomial {
    pub const EMPTY: Monomial = Monomial(0);

    pub fn from_ids(ids: &[u32]) -> Option<Monomial> {
        let mut bits = 0u64;
        for &i in ids {
            assert!(i < 64, "circle id {i} out of range");
            if bits & (1 << i) != 0 {
                return None;
            }
            bits |= 1 << i;
        }
        Some(Monomial(bits))
    }

    pub fn contains(self, id: u32) -> bool {
        self.0 & (1u64 << id) != 0
    }

    pub fn with(self, id: u32) -> Monomial {
        Monomial(self.0 | (1u64 << id))
    }

    pub fn without(self, id: u32) -> Monomial {
        Monomial(self.0 & !(1u64 << id))
    }

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn ids(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// All monomials over `count` circles, in ascending mask order.
    pub fn all(count: u32) -> impl Iterator<Item = Monomial> {
        assert!(count < 64);
        (0..(1u64 << count)).map(Monomial)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.ids().map(|i| format!("a{i}")).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// A finite linear combination of monomials with coefficients in one ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    pub ring: Ring,
    pub terms: BTreeMap<Monomial, Zu>,
}

impl AlgebraElement {
    pub fn zero(ring: Ring) -> Self {
        AlgebraElement { ring, terms: BTreeMap::new() }
    }

    pub fn monomial(m: Monomial, coeff: Zu, ring: Ring) -> Self {
        let mut e = AlgebraElement::zero(ring);
        e.add_term(m, coeff);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, coeff: Zu) {
        let coeff = coeff.specialize(self.ring);
        let entry = self.terms.entry(m).or_insert(Zu::ZERO);
        *entry = (*entry + coeff).specialize(self.ring);
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&mut self, other: &AlgebraElement) {
        for (&m, &c) in &other.terms {
            self.add_term(m, c);
        }
    }

    pub fn scale(&self, c: Zu) -> AlgebraElement {
        let mut out = AlgebraElement::zero(self.ring);
        for (&m, &d) in &self.terms {
            out.add_term(m, c * d);
        }
        out
    }

    pub fn coeff(&self, m: Monomial) -> Zu {
        self.terms.get(&m).copied().unwrap_or(Zu::ZERO)
    }

    pub fn specialize(&self, ring: Ring) -> AlgebraElement {
        let mut out = AlgebraElement::zero(ring);
        for (&m, &c) in &self.terms {
            out.add_term(m, c);
        }
        out
    }
}

/// Number of inversions of `word` mod 2.
fn inversion_parity(word: &[u32]) -> u32 {
    let mut parity = 0;
    for i in 0..word.len() {
        for j in i + 1..word.len() {
            if word[i] > word[j] {
                parity ^= 1;
            }
        }
    }
    parity
}

/// Rewrite the word `x_1 (x) ... (x) x_k` as `coeff * xi^sign(sigma)` times the
/// sorted monomial; zero if a circle repeats.
pub fn normalize(word: &[u32], coeff: Zu, ring: Ring) -> AlgebraElement {
    match Monomial::from_ids(word) {
        None => AlgebraElement::zero(ring),
        Some(m) => {
            let c = coeff * Zu::xi_pow(inversion_parity(word));
            AlgebraElement::monomial(m, c, ring)
        }
    }
}

/// Apply the algebra map sending each source circle `i` to `relabel[i]`.
/// For a merge the two merging circles share an image.
pub fn merge(x: &AlgebraElement, relabel: &[u32]) -> AlgebraElement {
    let mut out = AlgebraElement::zero(x.ring);
    for (&m, &c) in &x.terms {
        let word: Vec<u32> = m.ids().map(|i| relabel[i as usize]).collect();
        out.add(&normalize(&word, c, x.ring));
    }
    out
}

/// Split of source circle `split_circle` into `tail` and `head` (the arc
/// points from `tail` to `head`): `x |-> (tail + xi head) (x) x`, where `x` is
/// embedded by `relabel` for the other circles and by `embed` for the split
/// circle (either `tail` or `head`; the result does not depend on it).
pub fn split(
    x: &AlgebraElement,
    split_circle: u32,
    tail: u32,
    head: u32,
    relabel: &[u32],
    embed: u32,
) -> AlgebraElement {
    let mut out = AlgebraElement::zero(x.ring);
    for (&m, &c) in &x.terms {
        let body: Vec<u32> = m
            .ids()
            .map(|i| if i == split_circle { embed } else { relabel[i as usize] })
            .collect();
        for (front, scalar) in [(tail, Zu::ONE), (head, Zu::XI)] {
            let mut word = Vec::with_capacity(body.len() + 1);
            word.push(front);
            word.extend_from_slice(&body);
            out.add(&normalize(&word, c * scalar, x.ring));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_examples() {
        let e = normalize(&[2, 1], Zu::ONE, Ring::Unified);
        assert_eq!(e.coeff(Monomial::from_ids(&[1, 2]).unwrap()), Zu::XI);
        assert!(normalize(&[1, 1], Zu::ONE, Ring::Unified).is_zero());
        let e = normalize(&[3, 1, 2], Zu::ONE, Ring::Unified);
        assert_eq!(e.coeff(Monomial::from_ids(&[1, 2, 3]).unwrap()), Zu::ONE);
    }

    #[test]
    fn merge_examples() {
        // circles a1 = 0, a2 = 1, b = 2 merge into a = 0, b = 1
        let relabel = [0, 0, 1];
        let a1 = AlgebraElement::monomial(Monomial::from_ids(&[0]).unwrap(), Zu::ONE, Ring::Unified);
        assert_eq!(merge(&a1, &relabel).terms.len(), 1);
        let a1a2 = AlgebraElement::monomial(Monomial::from_ids(&[0, 1]).unwrap(), Zu::ONE, Ring::Unified);
        assert!(merge(&a1a2, &relabel).is_zero());
        let a1b = AlgebraElement::monomial(Monomial::from_ids(&[0, 2]).unwrap(), Zu::ONE, Ring::Unified);
        let img = merge(&a1b, &relabel);
        assert_eq!(img.coeff(Monomial::from_ids(&[0, 1]).unwrap()), Zu::ONE);
    }

    #[test]
    fn split_examples() {
        // source: a = 0, b = 1; target: a1 = 0 (tail), a2 = 1 (head), b = 2
        let relabel = [u32::MAX, 2];
        let one = AlgebraElement::monomial(Monomial::EMPTY, Zu::ONE, Ring::Unified);
        let img = split(&one, 0, 0, 1, &relabel, 0);
        assert_eq!(img.coeff(Monomial::from_ids(&[0]).unwrap()), Zu::ONE);
        assert_eq!(img.coeff(Monomial::from_ids(&[1]).unwrap()), Zu::XI);

        let a = AlgebraElement::monomial(Monomial::from_ids(&[0]).unwrap(), Zu::ONE, Ring::Unified);
        for embed in [0, 1] {
            let img = split(&a, 0, 0, 1, &relabel, embed);
            assert_eq!(img.terms.len(), 1);
            assert_eq!(img.coeff(Monomial::from_ids(&[0, 1]).unwrap()), Zu::ONE);
        }

        let b = AlgebraElement::monomial(Monomial::from_ids(&[1]).unwrap(), Zu::ONE, Ring::Unified);
        let img = split(&b, 0, 0, 1, &relabel, 0);
        assert_eq!(img.coeff(Monomial::from_ids(&[0, 2]).unwrap()), Zu::ONE);
        assert_eq!(img.coeff(Monomial::from_ids(&[1, 2]).unwrap()), Zu::XI);
    }

    #[test]
    fn split_embedding_is_immaterial_exhaustive() {
        // source circles 0..3 with circle 1 splitting into target 1 (tail) and 3 (head)
        let relabel = [0, u32::MAX, 2];
        for m in Monomial::all(3) {
            let x = AlgebraElement::monomial(m, Zu::ONE, Ring::Unified);
            assert_eq!(split(&x, 1, 1, 3, &relabel, 1), split(&x, 1, 1, 3, &relabel, 3));
        }
    }

    #[test]
    fn ring_elem_specializations() {
        let x = RingElem::new(3, 2, Ring::Unified);
        assert_eq!(x.specialize(Ring::Even), RingElem::new(5, 0, Ring::Even));
        assert_eq!(x.specialize(Ring::Odd), RingElem::new(1, 0, Ring::Odd));
        assert_eq!(x.specialize(Ring::Mod2), RingElem::new(1, 0, Ring::Mod2));
        let xi = RingElem::xi(Ring::Unified);
        assert_eq!(&xi * &xi, RingElem::one(Ring::Unified));
        let one_plus_xi = &RingElem::one(Ring::Unified) + &xi;
        assert!(one_plus_xi.specialize(Ring::Odd).is_zero());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn normalize_respects_permutations(mut word in proptest::collection::vec(0u32..8, 0..6), seed in any::<u64>()) {
                let base = normalize(&word, Zu::ONE, Ring::Unified);
                // apply a pseudo-random transposition sequence, tracking parity
                let mut s = seed;
                let mut parity = 0;
                for _ in 0..word.len() {
                    if word.len() < 2 { break; }
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let i = (s >> 33) as usize % word.len();
                    let j = (s >> 13) as usize % word.len();
                    if i != j { word.swap(i, j); parity ^= 1; }
                }
                let permuted = normalize(&word, Zu::xi_pow(parity), Ring::Unified);
                prop_assert_eq!(base.clone(), permuted);
                // idempotence: normalizing a normal monomial is the identity
                for (&m, &c) in &base.terms {
                    let ids: Vec<u32> = m.ids().collect();
                    prop_assert_eq!(normalize(&ids, c, Ring::Unified), base.clone());
                }
            }

            #[test]
            fn specialization_commutes_with_merge(bits in 0u64..16) {
                let relabel = [0, 1, 1, 2];
                let x = AlgebraElement::monomial(Monomial(bits), Zu::new(2, -1), Ring::Unified);
                for ring in [Ring::Even, Ring::Odd, Ring::Mod2] {
                    prop_assert_eq!(merge(&x, &relabel).specialize(ring), merge(&x.specialize(ring), &relabel));
                }
            }
        }
    }
}
