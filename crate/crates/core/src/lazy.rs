//! Countably enumerable semigroups with a computable product and declared,
//! spot-verified structural facts.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::table::FiniteSemigroup;

/// Canonical element forms; equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Nat(u64),
    /// `num / p^exp` reduced, with `0` as `0 / p^0`.
    Fraction {
        num: u64,
        exp: u32,
    },
    /// Finite support set as a bit mask.
    Bits(u64),
    Zero,
    Atom(u64),
    Index(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fact {
    Group,
    Commutative,
    Torsion,
    Exponent(u64),
    NoIdempotents,
    /// `xy ∈ {x, y}` for all `x, y`.
    PairwiseAbsorptive,
    /// One element absorbs everything and every product equals it.
    NullOverZero,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Group => write!(f, "group"),
            Fact::Commutative => write!(f, "commutative"),
            Fact::Torsion => write!(f, "torsion"),
            Fact::Exponent(k) => write!(f, "exponent({k})"),
            Fact::NoIdempotents => write!(f, "no-idempotents"),
            Fact::PairwiseAbsorptive => write!(f, "pairwise-absorptive"),
            Fact::NullOverZero => write!(f, "null-over-zero"),
        }
    }
}

impl Serialize for Fact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cardinality {
    Finite(usize),
    Infinite,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LazyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("product is not associative on enumerated elements #{i}, #{j}, #{k}")]
    NotAssociative { i: usize, j: usize, k: usize },
    #[error("declared fact {fact} fails on the enumerated prefix: {detail}")]
    FactViolated { fact: String, detail: String },
    #[error(
        "unknown family {0:?} (expected naturals_plus, omega_min, infinite_null, quasicyclic:P or bounded_boolean)"
    )]
    UnknownFamily(String),
    #[error("bad family parameter {0:?}")]
    BadParameter(String),
}

/// The computable part of a lazy semigroup. `element` must be injective on
/// its domain, which is `0..n` for finite carriers and all of `usize`
/// otherwise.
pub trait Family: Send + Sync {
    fn name(&self) -> String;
    fn cardinality(&self) -> Cardinality;
    fn element(&self, index: usize) -> Option<Element>;
    fn product(&self, x: &Element, y: &Element) -> Element;
    fn label(&self, x: &Element) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LazyConfig {
    /// Facts are verified on this many enumerated elements.
    pub fact_depth: usize,
    /// Associativity is checked on all triples from this many elements.
    pub associativity_depth: usize,
}

impl Default for LazyConfig {
    fn default() -> Self {
        LazyConfig {
            fact_depth: 32,
            associativity_depth: 12,
        }
    }
}

pub struct LazySemigroup {
    family: Box<dyn Family>,
    facts: BTreeSet<Fact>,
}

impl fmt::Debug for LazySemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazySemigroup")
            .field("family", &self.family.name())
            .field("facts", &self.facts)
            .finish()
    }
}

const POWER_STEP_CAP: usize = 1 << 16;

impl LazySemigroup {
    pub fn new(
        family: Box<dyn Family>,
        facts: impl IntoIterator<Item = Fact>,
        config: LazyConfig,
    ) -> Result<Self, LazyError> {
        let s = LazySemigroup {
            family,
            facts: facts.into_iter().collect(),
        };
        s.check_associativity(config.associativity_depth)?;
        for &fact in &s.facts {
            s.verify_fact(fact, config.fact_depth)?;
        }
        Ok(s)
    }

    pub fn name(&self) -> String {
        self.family.name()
    }

    pub fn facts(&self) -> &BTreeSet<Fact> {
        &self.facts
    }

    pub fn has(&self, fact: Fact) -> bool {
        self.facts.contains(&fact)
    }

    pub fn exponent_fact(&self) -> Option<u64> {
        self.facts.iter().find_map(|f| match f {
            Fact::Exponent(k) => Some(*k),
            _ => None,
        })
    }

    pub fn cardinality(&self) -> Cardinality {
        self.family.cardinality()
    }

    pub fn element(&self, index: usize) -> Option<Element> {
        self.family.element(index)
    }

    /// First `n` elements (fewer if the carrier is smaller).
    pub fn prefix(&self, n: usize) -> Vec<Element> {
        (0..n).map_while(|i| self.family.element(i)).collect()
    }

    pub fn product(&self, x: &Element, y: &Element) -> Element {
        self.family.product(x, y)
    }

    pub fn label(&self, x: &Element) -> String {
        self.family.label(x)
    }

    pub fn is_idempotent(&self, x: &Element) -> bool {
        &self.product(x, x) == x
    }

    fn check_associativity(&self, depth: usize) -> Result<(), LazyError> {
        let p = self.prefix(depth);
        for (i, x) in p.iter().enumerate() {
            for (j, y) in p.iter().enumerate() {
                let xy = self.product(x, y);
                for (k, z) in p.iter().enumerate() {
                    if self.product(&xy, z) != self.product(x, &self.product(y, z)) {
                        return Err(LazyError::NotAssociative { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks `fact` on the first `depth` elements.
    pub fn verify_fact(&self, fact: Fact, depth: usize) -> Result<(), LazyError> {
        let p = self.prefix(depth);
        let violated = |detail: String| LazyError::FactViolated {
            fact: fact.to_string(),
            detail,
        };
        let label = |x: &Element| self.label(x);
        match fact {
            Fact::Commutative => {
                for x in &p {
                    for y in &p {
                        if self.product(x, y) != self.product(y, x) {
                            return Err(violated(format!("{} and {} do not commute", label(x), label(y))));
                        }
                    }
                }
            }
            Fact::Group => {
                let identity = p
                    .iter()
                    .find(|e| p.iter().all(|x| &self.product(e, x) == x && &self.product(x, e) == x));
                if identity.is_none() {
                    return Err(violated("no identity among the enumerated elements".into()));
                }
                for x in &p {
                    for y in &p {
                        for z in &p {
                            if y != z
                                && (self.product(x, y) == self.product(x, z)
                                    || self.product(y, x) == self.product(z, x))
                            {
                                return Err(violated(format!("{} is not cancellable", label(x))));
                            }
                        }
                    }
                }
            }
            Fact::Torsion => {
                for x in &p {
                    if self.idempotent_power(x, POWER_STEP_CAP).is_none() {
                        return Err(violated(format!("no idempotent power of {}", label(x))));
                    }
                }
            }
            Fact::Exponent(k) => {
                if k == 0 {
                    return Err(violated("exponent must be positive".into()));
                }
                for x in &p {
                    if !self.is_idempotent(&self.pow(x, k)) {
                        return Err(violated(format!("{}^{k} is not idempotent", label(x))));
                    }
                }
            }
            Fact::NoIdempotents => {
                if let Some(x) = p.iter().find(|x| self.is_idempotent(x)) {
                    return Err(violated(format!("{} is idempotent", label(x))));
                }
            }
            Fact::PairwiseAbsorptive => {
                for x in &p {
                    for y in &p {
                        let xy = self.product(x, y);
                        if &xy != x && &xy != y {
                            return Err(violated(format!("{}{} leaves the pair", label(x), label(y))));
                        }
                    }
                }
            }
            Fact::NullOverZero => {
                let mut products = p.iter().flat_map(|x| p.iter().map(move |y| (x, y)));
                if let Some((x0, y0)) = products.next() {
                    let zero = self.product(x0, y0);
                    if !self.is_idempotent(&zero) || products.any(|(x, y)| self.product(x, y) != zero) {
                        return Err(violated("products are not all one absorbing element".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn pow(&self, x: &Element, n: u64) -> Element {
        let mut acc = x.clone();
        for _ in 1..n {
            acc = self.product(&acc, x);
        }
        acc
    }

    /// Least `n` such that `x^n` is idempotent, searching at most `cap` powers.
    pub fn idempotent_power(&self, x: &Element, cap: usize) -> Option<usize> {
        let mut power = x.clone();
        for n in 1..=cap {
            if self.is_idempotent(&power) {
                return Some(n);
            }
            power = self.product(&power, x);
        }
        None
    }
}

struct NaturalsPlus;

impl Family for NaturalsPlus {
    fn name(&self) -> String {
        "naturals_plus".into()
    }
    fn cardinality(&self) -> Cardinality {
        Cardinality::Infinite
    }
    fn element(&self, index: usize) -> Option<Element> {
        Some(Element::Nat(index as u64 + 1))
    }
    fn product(&self, x: &Element, y: &Element) -> Element {
        match (x, y) {
            (Element::Nat(a), Element::Nat(b)) => Element::Nat(a.checked_add(*b).expect("naturals overflow")),
            _ => panic!("foreign element in naturals_plus"),
        }
    }
    fn label(&self, x: &Element) -> String {
        match x {
            Element::Nat(a) => a.to_string(),
            other => format!("{other:?}"),
        }
    }
}

/// `(ℕ, +)` from 1, enumerated in increasing order.
pub fn naturals_plus() -> LazySemigroup {
    LazySemigroup::new(
        Box::new(NaturalsPlus),
        [Fact::Commutative, Fact::NoIdempotents],
        LazyConfig::default(),
    )
    .expect("naturals_plus facts hold")
}

struct OmegaMin;

impl Family for OmegaMin {
    fn name(&self) -> String {
        "omega_min".into()
    }
    fn cardinality(&self) -> Cardinality {
        Cardinality::Infinite
    }
    fn element(&self, index: usize) -> Option<Element> {
        Some(Element::Nat(index as u64))
    }
    fn product(&self, x: &Element, y: &Element) -> Element {
        match (x, y) {
            (Element::Nat(a), Element::Nat(b)) => Element::Nat(*a.min(b)),
            _ => panic!("foreign element in omega_min"),
        }
    }
    fn label(&self, x: &Element) -> String {
        NaturalsPlus.label(x)
    }
}

/// `(ω, min)`.
pub fn omega_min() -> LazySemigroup {
    LazySemigroup::new(
        Box::new(OmegaMin),
        [Fact::Commutative, Fact::PairwiseAbsorptive, Fact::Exponent(1)],
        LazyConfig::default(),
    )
    .expect("omega_min facts hold")
}

struct InfiniteNull;

impl Family for InfiniteNull {
    fn name(&self) -> String {
        "infinite_null".into()
    }
    fn cardinality(&self) -> Cardinality {
        Cardinality::Infinite
    }
    fn element(&self, index: usize) -> Option<Element> {
        Some(if index == 0 {
            Element::Zero
        } else {
            Element::Atom(index as u64)
        })
    }
    fn product(&self, _: &Element, _: &Element) -> Element {
        Element::Zero
    }
    fn label(&self, x: &Element) -> String {
        match x {
            Element::Zero => "0".into(),
            Element::Atom(k) => format!("a{k}"),
            other => format!("{other:?}"),
        }
    }
}

/// `{0, a1, a2, ...}` with every product `0`.
pub fn infinite_null() -> LazySemigroup {
    LazySemigroup::new(
        Box::new(InfiniteNull),
        [Fact::Commutative, Fact::NullOverZero, Fact::Exponent(2)],
        LazyConfig::default(),
    )
    .expect("infinite_null facts hold")
}

struct Quasicyclic {
    p: u64,
}

impl Quasicyclic {
    fn power(&self, exp: u32) -> u128 {
        (self.p as u128).pow(exp)
    }
}

impl Family for Quasicyclic {
    fn name(&self) -> String {
        format!("quasicyclic:{}", self.p)
    }
    fn cardinality(&self) -> Cardinality {
        Cardinality::Infinite
    }
    fn element(&self, index: usize) -> Option<Element> {
        if index == 0 {
            return Some(Element::Fraction { num: 0, exp: 0 });
        }
        let index = index as u128;
        // p^(n-1) <= index < p^n
        let mut exp = 1u32;
        while self.power(exp) <= index {
            exp += 1;
        }
        let offset = index - self.power(exp - 1);
        let p = self.p as u128;
        let num = offset + offset / (p - 1) + 1;
        Some(Element::Fraction { num: num as u64, exp })
    }
    fn product(&self, x: &Element, y: &Element) -> Element {
        let (Element::Fraction { num: a, exp: ea }, Element::Fraction { num: b, exp: eb }) = (x, y) else {
            panic!("foreign element in quasicyclic");
        };
        let mut exp = (*ea).max(*eb);
        let modulus = self.power(exp);
        let mut num = (*a as u128 * self.power(exp - ea) + *b as u128 * self.power(exp - eb)) % modulus;
        let p = self.p as u128;
        while exp > 0 && num.is_multiple_of(p) {
            num /= p;
            exp -= 1;
        }
        if num == 0 {
            exp = 0;
        }
        Element::Fraction { num: num as u64, exp }
    }
    fn label(&self, x: &Element) -> String {
        match x {
            Element::Fraction { num: 0, .. } => "0".into(),
            Element::Fraction { num, exp } => format!("{num}/{}", self.power(*exp)),
            other => format!("{other:?}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d: &u64| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// The Prüfer `p`-group of fractions `k/p^n` modulo 1, enumerated by
/// increasing `n` then `k`.
pub fn quasicyclic(p: u64) -> Result<LazySemigroup, LazyError> {
    if !is_prime(p) {
        return Err(LazyError::NotPrime(p));
    }
    if p > u32::MAX as u64 {
        return Err(LazyError::BadParameter(p.to_string()));
    }
    LazySemigroup::new(
        Box::new(Quasicyclic { p }),
        [Fact::Group, Fact::Commutative, Fact::Torsion],
        LazyConfig::default(),
    )
}

struct BoundedBoolean;

impl Family for BoundedBoolean {
    fn name(&self) -> String {
        "bounded_boolean".into()
    }
    fn cardinality(&self) -> Cardinality {
        Cardinality::Infinite
    }
    fn element(&self, index: usize) -> Option<Element> {
        Some(Element::Bits(index as u64))
    }
    fn product(&self, x: &Element, y: &Element) -> Element {
        match (x, y) {
            (Element::Bits(a), Element::Bits(b)) => Element::Bits(a ^ b),
            _ => panic!("foreign element in bounded_boolean"),
        }
    }
    fn label(&self, x: &Element) -> String {
        match x {
            Element::Bits(0) => "id".into(),
            Element::Bits(b) => (0..64)
                .filter(|i| b >> i & 1 == 1)
                .map(|i| format!("e{}", i + 1))
                .collect::<Vec<_>>()
                .join("+"),
            other => format!("{other:?}"),
        }
    }
}

/// Finite-support bit vectors under xor: the direct sum of countably many
/// copies of `Z/2`. Element `i` has the support given by the bits of `i`.
pub fn bounded_boolean() -> LazySemigroup {
    LazySemigroup::new(
        Box::new(BoundedBoolean),
        [Fact::Group, Fact::Commutative, Fact::Exponent(2)],
        LazyConfig::default(),
    )
    .expect("bounded_boolean facts hold")
}

struct FiniteWrap {
    s: FiniteSemigroup,
}

impl Family for FiniteWrap {
    fn name(&self) -> String {
        format!("finite:{}", self.s.content_hash())
    }
    fn cardinality(&self) -> Cardinality {
        Cardinality::Finite(self.s.order())
    }
    fn element(&self, index: usize) -> Option<Element> {
        (index < self.s.order()).then_some(Element::Index(index))
    }
    fn product(&self, x: &Element, y: &Element) -> Element {
        match (x, y) {
            (Element::Index(a), Element::Index(b)) => Element::Index(self.s.mul(*a, *b)),
            _ => panic!("foreign element in finite wrap"),
        }
    }
    fn label(&self, x: &Element) -> String {
        match x {
            Element::Index(a) => self.s.name(*a).to_string(),
            other => format!("{other:?}"),
        }
    }
}

/// Least `n >= 1` with every `x^n` idempotent, from index/period data.
pub(crate) fn least_uniform_exponent(cycles: impl IntoIterator<Item = (usize, usize)>) -> usize {
    let (max_index, periods) = cycles.into_iter().fold((1, 1), |(m, l), (index, period)| {
        (m.max(index), crate::structure::lcm(l, period))
    });
    max_index.div_ceil(periods) * periods
}

/// Lazy view of a finite table, with its facts derived exactly.
pub fn finite_wrap(s: &FiniteSemigroup) -> LazySemigroup {
    let mut facts = vec![Fact::Torsion];
    if s.is_commutative() {
        facts.push(Fact::Commutative);
    }
    let idempotents: Vec<usize> = s.elements().filter(|&x| s.is_idempotent(x)).collect();
    if let [e] = idempotents[..] {
        let is_group = s.elements().all(|x| {
            s.mul(e, x) == x && s.mul(x, e) == x && s.elements().any(|y| s.mul(x, y) == e && s.mul(y, x) == e)
        });
        if is_group {
            facts.push(Fact::Group);
        }
    }
    facts.push(Fact::Exponent(
        least_uniform_exponent(s.elements().map(|x| s.power_cycle(x))) as u64,
    ));
    if s.elements().all(|x| {
        s.elements().all(|y| {
            let p = s.mul(x, y);
            p == x || p == y
        })
    }) {
        facts.push(Fact::PairwiseAbsorptive);
    }
    let first = s.mul(0, 0);
    if s.flat_table().iter().all(|&v| v == first) {
        facts.push(Fact::NullOverZero);
    }
    let depth = s.order();
    LazySemigroup::new(
        Box::new(FiniteWrap { s: s.clone() }),
        facts,
        LazyConfig {
            fact_depth: depth,
            associativity_depth: depth.min(LazyConfig::default().associativity_depth),
        },
    )
    .expect("facts derived from the table hold")
}

/// Parses a CLI family spec such as `quasicyclic:3` or `omega_min`.
pub fn parse_family(spec: &str) -> Result<LazySemigroup, LazyError> {
    let (name, param) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (spec, None),
    };
    let canonical = name.trim().replace('-', "_");
    match (canonical.as_str(), param) {
        ("naturals_plus" | "naturals", None) => Ok(naturals_plus()),
        ("omega_min", None) => Ok(omega_min()),
        ("infinite_null" | "null", None) => Ok(infinite_null()),
        ("bounded_boolean" | "boolean", None) => Ok(bounded_boolean()),
        ("quasicyclic", Some(p)) => {
            let p: u64 = p.trim().parse().map_err(|_| LazyError::BadParameter(p.to_string()))?;
            quasicyclic(p)
        }
        ("quasicyclic", None) => Err(LazyError::BadParameter("quasicyclic needs :P".into())),
        _ => Err(LazyError::UnknownFamily(spec.to_string())),
    }
}
