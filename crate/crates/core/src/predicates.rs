//! Finiteness and boundedness predicates: exact on finite tables, budgeted
//! and certificate-driven on lazy carriers.
//!
//! Lazy carriers are decided in three tiers. A finite carrier is
//! materialized (one product per table cell) and decided exhaustively. An
//! infinite carrier is decided from its declared facts, with any element
//! witness recomputed under the budget. The one search-based verdict is
//! order growth in torsion groups: a chain of at least
//! [`ORDER_CHAIN_MIN`] elements whose orders strictly increase by
//! divisibility is reported as unboundedness. Everything else is Unknown.

use std::collections::{HashMap, HashSet};

use crate::lazy::{least_uniform_exponent, Cardinality, Element, Fact, LazySemigroup};
use crate::structure::{clifford_part, idempotents, maximal_subgroup};
use crate::table::FiniteSemigroup;
use crate::verdict::{Budget, Status, Verdict, Witness};

/// Largest element witness reported for lazy carriers.
pub const WITNESS_SIZE: usize = 8;
/// Minimum length of an order chain reported as unbounded growth.
pub const ORDER_CHAIN_MIN: usize = 3;

const FINITE_CARRIER: &str = "finite-carrier";

#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Finite(&'a FiniteSemigroup),
    Lazy(&'a LazySemigroup),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Predicate {
    ChainFinite,
    Singular,
    Periodic,
    Bounded,
    GroupFinite,
    GroupBounded,
    CliffordPlusFinite,
}

impl Predicate {
    pub const ALL: [Predicate; 7] = [
        Predicate::ChainFinite,
        Predicate::Singular,
        Predicate::Periodic,
        Predicate::Bounded,
        Predicate::GroupFinite,
        Predicate::GroupBounded,
        Predicate::CliffordPlusFinite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::ChainFinite => "chain_finite",
            Predicate::Singular => "singular",
            Predicate::Periodic => "periodic",
            Predicate::Bounded => "bounded",
            Predicate::GroupFinite => "group_finite",
            Predicate::GroupBounded => "group_bounded",
            Predicate::CliffordPlusFinite => "clifford_plus_finite",
        }
    }

    pub fn from_name(name: &str) -> Option<Predicate> {
        let base = if name == "nonsingular" { "singular" } else { name };
        Predicate::ALL.into_iter().find(|p| p.name() == base)
    }

    pub fn evaluate(self, subject: Subject<'_>, budget: u64) -> Verdict {
        match self {
            Predicate::ChainFinite => chain_finite(subject, budget),
            Predicate::Singular => singular(subject, budget),
            Predicate::Periodic => periodic(subject, budget),
            Predicate::Bounded => bounded(subject, budget),
            Predicate::GroupFinite => group_finite(subject, budget),
            Predicate::GroupBounded => group_bounded(subject, budget),
            Predicate::CliffordPlusFinite => clifford_plus_finite(subject, budget),
        }
    }
}

pub fn chain_finite(subject: Subject<'_>, budget: u64) -> Verdict {
    evaluate(Predicate::ChainFinite, subject, budget)
}

pub fn singular(subject: Subject<'_>, budget: u64) -> Verdict {
    evaluate(Predicate::Singular, subject, budget)
}

pub fn periodic(subject: Subject<'_>, budget: u64) -> Verdict {
    evaluate(Predicate::Periodic, subject, budget)
}

pub fn bounded(subject: Subject<'_>, budget: u64) -> Verdict {
    evaluate(Predicate::Bounded, subject, budget)
}

pub fn group_finite(subject: Subject<'_>, budget: u64) -> Verdict {
    evaluate(Predicate::GroupFinite, subject, budget)
}

pub fn group_bounded(subject: Subject<'_>, budget: u64) -> Verdict {
    evaluate(Predicate::GroupBounded, subject, budget)
}

pub fn clifford_plus_finite(subject: Subject<'_>, budget: u64) -> Verdict {
    evaluate(Predicate::CliffordPlusFinite, subject, budget)
}

fn evaluate(p: Predicate, subject: Subject<'_>, budget: u64) -> Verdict {
    match subject {
        Subject::Finite(s) => finite_path(p, s),
        Subject::Lazy(l) => match l.cardinality() {
            Cardinality::Finite(n) => lazy_finite_path(p, l, n, budget),
            Cardinality::Infinite => lazy_infinite_path(p, l, budget),
        },
    }
}

// ---------------------------------------------------------------------------
// finite tables

fn finite_path(p: Predicate, s: &FiniteSemigroup) -> Verdict {
    let n = s.order();
    let name = p.name();
    match p {
        Predicate::ChainFinite => {
            Verdict::new(name, Status::Holds, Some(Witness::FullCheck { order: n }), 0).certified(FINITE_CARRIER)
        }
        Predicate::Singular => {
            Verdict::new(name, Status::Fails, Some(Witness::FiniteCarrier { order: n }), 0).certified(FINITE_CARRIER)
        }
        Predicate::Periodic => {
            let mut used = 0;
            let mut all = true;
            for x in s.elements() {
                let (index, period) = s.power_cycle(x);
                used += (index + period) as u64;
                let k = index.div_ceil(period) * period;
                all &= s.is_idempotent(s.pow(x, k));
            }
            let status = if all { Status::Holds } else { Status::Fails };
            Verdict::new(name, status, Some(Witness::FullCheck { order: n }), used)
        }
        Predicate::Bounded => {
            let cycles: Vec<(usize, usize)> = s.elements().map(|x| s.power_cycle(x)).collect();
            let used = cycles.iter().map(|(i, p)| (i + p) as u64).sum();
            let exponent = least_uniform_exponent(cycles);
            debug_assert!(s.elements().all(|x| s.is_idempotent(s.pow(x, exponent))));
            Verdict::new(
                name,
                Status::Holds,
                Some(Witness::Exponent {
                    exponent: exponent as u64,
                }),
                used,
            )
        }
        Predicate::GroupFinite => {
            let groups = idempotents(s)
                .iter()
                .filter(|&e| maximal_subgroup(s, e).is_ok())
                .count();
            let status = if groups == idempotents(s).len() {
                Status::Holds
            } else {
                Status::Unknown
            };
            Verdict::new(name, status, Some(Witness::FullCheck { order: n }), (n * n) as u64)
        }
        Predicate::GroupBounded => {
            let exponent = idempotents(s)
                .iter()
                .map(|e| maximal_subgroup(s, e).expect("idempotent").exponent(s))
                .fold(1, crate::structure::lcm);
            Verdict::new(
                name,
                Status::Holds,
                Some(Witness::Exponent {
                    exponent: exponent as u64,
                }),
                (n * n) as u64,
            )
        }
        Predicate::CliffordPlusFinite => {
            let outside = clifford_part(s).complement();
            Verdict::new(
                name,
                Status::Holds,
                Some(Witness::NonClifford {
                    count: outside.len(),
                    labels: outside.names(s),
                }),
                (n * n) as u64,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// lazy carriers with finite enumeration

/// A lazily enumerated finite carrier read into a table, one product per
/// cell.
struct Materialized {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl Materialized {
    fn read(l: &LazySemigroup, n: usize, budget: &mut Budget) -> Option<Self> {
        let elements = l.prefix(n);
        let index: HashMap<&Element, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut table = vec![vec![0; n]; n];
        for (i, x) in elements.iter().enumerate() {
            for (j, y) in elements.iter().enumerate() {
                let xy = budget.product(l, x, y)?;
                table[i][j] = *index.get(&xy).expect("finite carrier is closed");
            }
        }
        Some(Materialized {
            labels: elements.iter().map(|e| l.label(e)).collect(),
            table,
        })
    }

    fn order(&self) -> usize {
        self.table.len()
    }

    /// (index, period) by walking powers until one repeats.
    fn cycle(&self, x: usize) -> (usize, usize) {
        let mut seen = HashMap::new();
        let mut power = x;
        let mut k = 1;
        loop {
            if let Some(&m) = seen.get(&power) {
                return (m, k - m);
            }
            seen.insert(power, k);
            power = self.table[power][x];
            k += 1;
        }
    }

    fn pow(&self, x: usize, k: usize) -> usize {
        (1..k).fold(x, |acc, _| self.table[acc][x])
    }

    fn is_idempotent(&self, x: usize) -> bool {
        self.table[x][x] == x
    }
}

fn lazy_finite_path(p: Predicate, l: &LazySemigroup, n: usize, limit: u64) -> Verdict {
    let name = p.name();
    let mut budget = Budget::new(limit);
    let Some(m) = Materialized::read(l, n, &mut budget) else {
        return Verdict::unknown(name, budget.used());
    };
    let used = budget.used();
    let full = Some(Witness::FullCheck { order: m.order() });
    let cycles: Vec<(usize, usize)> = (0..m.order()).map(|x| m.cycle(x)).collect();
    match p {
        Predicate::ChainFinite => Verdict::new(name, Status::Holds, full, used).certified(FINITE_CARRIER),
        Predicate::Singular => {
            Verdict::new(name, Status::Fails, Some(Witness::FiniteCarrier { order: n }), used).certified(FINITE_CARRIER)
        }
        Predicate::Periodic => {
            let all = cycles
                .iter()
                .enumerate()
                .all(|(x, &(index, period))| (index..index + period).any(|k| m.is_idempotent(m.pow(x, k))));
            let status = if all { Status::Holds } else { Status::Fails };
            Verdict::new(name, status, full, used)
        }
        Predicate::Bounded => {
            // least n found by direct search, not from the cycle formula
            let exponent = (1..)
                .find(|&k| (0..m.order()).all(|x| m.is_idempotent(m.pow(x, k))))
                .expect("finite carriers are bounded");
            Verdict::new(
                name,
                Status::Holds,
                Some(Witness::Exponent {
                    exponent: exponent as u64,
                }),
                used,
            )
        }
        Predicate::GroupFinite => Verdict::new(name, Status::Holds, full, used),
        Predicate::GroupBounded => {
            // x lies in a subgroup iff its index is 1; its order there is the period
            let exponent = cycles
                .iter()
                .filter(|(index, _)| *index == 1)
                .map(|&(_, period)| period)
                .fold(1, crate::structure::lcm);
            Verdict::new(
                name,
                Status::Holds,
                Some(Witness::Exponent {
                    exponent: exponent as u64,
                }),
                used,
            )
        }
        Predicate::CliffordPlusFinite => {
            let outside: Vec<usize> = (0..m.order()).filter(|&x| cycles[x].0 > 1).collect();
            Verdict::new(
                name,
                Status::Holds,
                Some(Witness::NonClifford {
                    count: outside.len(),
                    labels: outside.iter().map(|&x| m.labels[x].clone()).collect(),
                }),
                used,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// lazy carriers with infinite enumeration

fn certificate(name: &str, status: Status, fact: Fact, used: u64) -> Verdict {
    Verdict::new(
        name,
        status,
        Some(Witness::Certificate { fact: fact.to_string() }),
        used,
    )
    .certified(fact.to_string())
}

fn first_fact(l: &LazySemigroup, candidates: &[Fact]) -> Option<Fact> {
    candidates.iter().copied().find(|&f| l.has(f))
}

fn isqrt(n: u64) -> usize {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r as usize
}

fn elements_witness(l: &LazySemigroup, indices: Vec<usize>) -> Witness {
    let labels = indices
        .iter()
        .map(|&i| l.label(&l.element(i).expect("infinite carrier")))
        .collect();
    Witness::Elements { indices, labels }
}

/// Indices `start..start+k` with `k` as large as the budget allows for a
/// pairwise recheck, capped at [`WITNESS_SIZE`].
fn witness_indices(start: usize, budget: &Budget) -> Option<Vec<usize>> {
    let k = isqrt(budget.remaining()).min(WITNESS_SIZE);
    (k >= 2).then(|| (start..start + k).collect())
}

/// All pairwise products over `indices`, or `None` if the budget runs out.
fn pairwise_products(
    l: &LazySemigroup,
    indices: &[usize],
    budget: &mut Budget,
) -> Option<Vec<(Element, Element, Element)>> {
    let elements: Vec<Element> = indices
        .iter()
        .map(|&i| l.element(i).expect("infinite carrier"))
        .collect();
    let mut out = Vec::new();
    for x in &elements {
        for y in &elements {
            let xy = budget.product(l, x, y)?;
            out.push((x.clone(), y.clone(), xy));
        }
    }
    Some(out)
}

/// First `k` powers of `x` are pairwise distinct and non-idempotent.
fn powers_witness(l: &LazySemigroup, index: usize, budget: &mut Budget) -> Option<Witness> {
    let x = l.element(index)?;
    let target = ((budget.remaining() / 2) as usize).min(4 * WITNESS_SIZE);
    if target == 0 {
        return None;
    }
    let mut seen = HashSet::new();
    let mut power = x.clone();
    for k in 1..=target {
        let square = budget.product(l, &power, &power)?;
        if square == power || !seen.insert(power.clone()) {
            return None;
        }
        if k < target {
            power = budget.product(l, &power, &x)?;
        }
    }
    Some(Witness::Powers {
        index,
        label: l.label(&x),
        checked: target,
    })
}

/// Order of `x` in a group: least `k` with `x^k` idempotent.
fn order_under_budget(l: &LazySemigroup, x: &Element, budget: &mut Budget) -> Option<u64> {
    let mut power = x.clone();
    let mut k = 1u64;
    loop {
        if budget.product(l, &power, &power)? == power {
            return Some(k);
        }
        power = budget.product(l, &power, x)?;
        k += 1;
    }
}

/// Sweeps the enumeration computing element orders and keeps the greedy
/// chain of strictly increasing orders, each dividing the next.
fn order_chain(l: &LazySemigroup, budget: &mut Budget) -> Option<Witness> {
    let mut chain: Vec<(usize, u64)> = Vec::new();
    let mut index = 0;
    while let Some(x) = l.element(index) {
        let Some(order) = order_under_budget(l, &x, budget) else {
            break;
        };
        let extends = match chain.last() {
            Some(&(_, last)) => order > last && order % last == 0,
            None => order > 1,
        };
        if extends {
            chain.push((index, order));
        }
        index += 1;
    }
    (chain.len() >= ORDER_CHAIN_MIN).then(|| Witness::OrderChain {
        indices: chain.iter().map(|&(i, _)| i).collect(),
        labels: chain
            .iter()
            .map(|&(i, _)| l.label(&l.element(i).expect("enumerated")))
            .collect(),
        orders: chain.iter().map(|&(_, o)| o).collect(),
    })
}

fn lazy_infinite_path(p: Predicate, l: &LazySemigroup, limit: u64) -> Verdict {
    let name = p.name();
    let mut budget = Budget::new(limit);
    match p {
        Predicate::ChainFinite => {
            if let Some(f) = first_fact(l, &[Fact::Group, Fact::NullOverZero]) {
                return certificate(name, Status::Holds, f, 0);
            }
            if l.has(Fact::PairwiseAbsorptive) {
                if let Some(indices) = witness_indices(0, &budget) {
                    if let Some(products) = pairwise_products(l, &indices, &mut budget) {
                        if products.iter().all(|(x, y, xy)| xy == x || xy == y) {
                            return Verdict::new(
                                name,
                                Status::Fails,
                                Some(elements_witness(l, indices)),
                                budget.used(),
                            )
                            .certified(Fact::PairwiseAbsorptive.to_string());
                        }
                    }
                }
            }
            Verdict::unknown(name, budget.used())
        }
        Predicate::Singular => {
            if let Some(f) = first_fact(l, &[Fact::Group, Fact::PairwiseAbsorptive]) {
                return certificate(name, Status::Fails, f, 0);
            }
            if l.has(Fact::NullOverZero) {
                if let Some(indices) = witness_indices(1, &budget) {
                    if let Some(products) = pairwise_products(l, &indices, &mut budget) {
                        let values: HashSet<&Element> = products.iter().map(|(_, _, xy)| xy).collect();
                        if values.len() == 1 {
                            return Verdict::new(
                                name,
                                Status::Holds,
                                Some(elements_witness(l, indices)),
                                budget.used(),
                            )
                            .certified(Fact::NullOverZero.to_string());
                        }
                    }
                }
            }
            Verdict::unknown(name, budget.used())
        }
        Predicate::Periodic => {
            if let Some(f) = first_fact(l, &[Fact::Torsion, Fact::PairwiseAbsorptive, Fact::NullOverZero]) {
                return certificate(name, Status::Holds, f, 0);
            }
            if let Some(k) = l.exponent_fact() {
                return certificate(name, Status::Holds, Fact::Exponent(k), 0);
            }
            if l.has(Fact::NoIdempotents) {
                if let Some(w) = powers_witness(l, 0, &mut budget) {
                    return Verdict::new(name, Status::Fails, Some(w), budget.used())
                        .certified(Fact::NoIdempotents.to_string());
                }
            }
            Verdict::unknown(name, budget.used())
        }
        Predicate::Bounded => {
            if let Some(k) = l.exponent_fact() {
                return Verdict::new(name, Status::Holds, Some(Witness::Exponent { exponent: k }), 0)
                    .certified(Fact::Exponent(k).to_string());
            }
            if l.has(Fact::PairwiseAbsorptive) {
                return Verdict::new(name, Status::Holds, Some(Witness::Exponent { exponent: 1 }), 0)
                    .certified(Fact::PairwiseAbsorptive.to_string());
            }
            if l.has(Fact::NullOverZero) {
                return Verdict::new(name, Status::Holds, Some(Witness::Exponent { exponent: 2 }), 0)
                    .certified(Fact::NullOverZero.to_string());
            }
            if l.has(Fact::NoIdempotents) {
                if let Some(w) = powers_witness(l, 0, &mut budget) {
                    return Verdict::new(name, Status::Fails, Some(w), budget.used())
                        .certified(Fact::NoIdempotents.to_string());
                }
            } else if l.has(Fact::Group) && l.has(Fact::Torsion) {
                if let Some(w) = order_chain(l, &mut budget) {
                    return Verdict::new(name, Status::Fails, Some(w), budget.used()).certified("order-growth");
                }
            }
            Verdict::unknown(name, budget.used())
        }
        Predicate::GroupFinite => {
            if let Some(f) = first_fact(l, &[Fact::NoIdempotents, Fact::NullOverZero, Fact::PairwiseAbsorptive]) {
                return certificate(name, Status::Holds, f, 0);
            }
            if l.has(Fact::Group) {
                let indices: Vec<usize> = (0..WITNESS_SIZE).collect();
                return Verdict::new(name, Status::Fails, Some(elements_witness(l, indices)), 0)
                    .certified(Fact::Group.to_string());
            }
            Verdict::unknown(name, 0)
        }
        Predicate::GroupBounded => {
            if let Some(f) = first_fact(l, &[Fact::NoIdempotents, Fact::NullOverZero, Fact::PairwiseAbsorptive]) {
                return certificate(name, Status::Holds, f, 0);
            }
            if let Some(k) = l.exponent_fact() {
                return Verdict::new(name, Status::Holds, Some(Witness::Exponent { exponent: k }), 0)
                    .certified(Fact::Exponent(k).to_string());
            }
            if l.has(Fact::Group) && l.has(Fact::Torsion) {
                if let Some(w) = order_chain(l, &mut budget) {
                    return Verdict::new(name, Status::Fails, Some(w), budget.used()).certified("order-growth");
                }
            }
            Verdict::unknown(name, budget.used())
        }
        Predicate::CliffordPlusFinite => {
            if let Some(f) = first_fact(l, &[Fact::Group, Fact::PairwiseAbsorptive]) {
                return certificate(name, Status::Holds, f, 0);
            }
            let (fact, start) = if l.has(Fact::NoIdempotents) {
                (Fact::NoIdempotents, 0)
            } else if l.has(Fact::NullOverZero) {
                (Fact::NullOverZero, 1)
            } else {
                return Verdict::unknown(name, 0);
            };
            let indices: Vec<usize> = (start..start + WITNESS_SIZE).collect();
            let all_outside = indices.iter().all(|&i| {
                let x = l.element(i).expect("infinite carrier");
                outside_clifford(l, &x, &mut budget) == Some(true)
            });
            if all_outside {
                Verdict::new(name, Status::Fails, Some(elements_witness(l, indices)), budget.used())
                    .certified(fact.to_string())
            } else {
                Verdict::unknown(name, budget.used())
            }
        }
    }
}

/// `Some(true)` when `x` lies in no subgroup: either there are no
/// idempotents at all, or `x` has an idempotent power `f` with `fx != x`.
fn outside_clifford(l: &LazySemigroup, x: &Element, budget: &mut Budget) -> Option<bool> {
    if budget.product(l, x, x)? == *x {
        return Some(false);
    }
    if l.has(Fact::NoIdempotents) {
        return Some(true);
    }
    let mut power = x.clone();
    for _ in 0..4 * WITNESS_SIZE {
        let square = budget.product(l, &power, &power)?;
        if square == power {
            return Some(budget.product(l, &power, x)? != *x);
        }
        power = budget.product(l, &power, x)?;
    }
    None
}

// ---------------------------------------------------------------------------
// rechecking evidence

/// Recomputes a verdict's witness against the subject, independently of
/// the decision path. Verdicts without a witness recheck only if Unknown.
pub fn recheck(subject: Subject<'_>, v: &Verdict) -> bool {
    let Some(predicate) = Predicate::from_name(&v.predicate) else {
        return false;
    };
    let Some(witness) = &v.witness else {
        return v.status == Status::Unknown;
    };
    match subject {
        Subject::Finite(s) => recheck_finite(predicate, s, witness),
        Subject::Lazy(l) => recheck_lazy(predicate, l, witness),
    }
}

fn recheck_finite(p: Predicate, s: &FiniteSemigroup, w: &Witness) -> bool {
    match w {
        Witness::FullCheck { order } | Witness::FiniteCarrier { order } => *order == s.order(),
        Witness::Exponent { exponent } => {
            let k = *exponent as usize;
            let members: Vec<usize> = match p {
                Predicate::GroupBounded => clifford_part(s).iter().collect(),
                _ => s.elements().collect(),
            };
            k >= 1 && members.iter().all(|&x| s.is_idempotent(s.pow(x, k)))
        }
        Witness::NonClifford { count, labels } => {
            let outside = clifford_part(s).complement();
            outside.len() == *count && &outside.names(s) == labels
        }
        _ => false,
    }
}

fn recheck_lazy(p: Predicate, l: &LazySemigroup, w: &Witness) -> bool {
    const DEPTH: usize = 32;
    let element = |i: usize| l.element(i);
    match w {
        Witness::FullCheck { order } | Witness::FiniteCarrier { order } => {
            l.cardinality() == Cardinality::Finite(*order)
        }
        Witness::Certificate { fact } => l
            .facts()
            .iter()
            .find(|f| &f.to_string() == fact)
            .is_some_and(|&f| l.verify_fact(f, DEPTH).is_ok()),
        Witness::Exponent { exponent } => match l.cardinality() {
            Cardinality::Finite(n) => {
                let members: Vec<Element> = l.prefix(n);
                members.iter().all(|x| {
                    let in_scope = p != Predicate::GroupBounded || {
                        let f = l.pow(x, *exponent);
                        l.product(&f, x) == *x
                    };
                    !in_scope || l.is_idempotent(&l.pow(x, *exponent))
                })
            }
            Cardinality::Infinite => l.prefix(DEPTH).iter().all(|x| l.is_idempotent(&l.pow(x, *exponent))),
        },
        Witness::Elements { indices, .. } => {
            let Some(elements) = indices.iter().map(|&i| element(i)).collect::<Option<Vec<_>>>() else {
                return false;
            };
            let distinct = elements.iter().collect::<HashSet<_>>().len() == elements.len();
            distinct
                && match p {
                    Predicate::ChainFinite => elements.iter().all(|x| {
                        elements.iter().all(|y| {
                            let xy = l.product(x, y);
                            &xy == x || &xy == y
                        })
                    }),
                    Predicate::Singular => {
                        let values: HashSet<Element> = elements
                            .iter()
                            .flat_map(|x| elements.iter().map(move |y| l.product(x, y)))
                            .collect();
                        values.len() == 1
                    }
                    Predicate::GroupFinite => l.has(Fact::Group) && l.verify_fact(Fact::Group, DEPTH).is_ok(),
                    Predicate::CliffordPlusFinite => {
                        let mut budget = Budget::new(u64::MAX);
                        elements
                            .iter()
                            .all(|x| outside_clifford(l, x, &mut budget) == Some(true))
                    }
                    _ => false,
                }
        }
        Witness::Powers { index, checked, .. } => {
            let Some(x) = element(*index) else { return false };
            let mut seen = HashSet::new();
            let mut power = x.clone();
            for _ in 0..*checked {
                if l.is_idempotent(&power) || !seen.insert(power.clone()) {
                    return false;
                }
                power = l.product(&power, &x);
            }
            true
        }
        Witness::OrderChain { indices, orders, .. } => {
            indices.len() == orders.len()
                && indices.len() >= ORDER_CHAIN_MIN
                && indices
                    .iter()
                    .zip(orders)
                    .all(|(&i, &o)| element(i).is_some_and(|x| l.idempotent_power(&x, o as usize) == Some(o as usize)))
                && orders.windows(2).all(|w| w[1] > w[0] && w[1] % w[0] == 0)
        }
        Witness::NonClifford { count, labels } => match l.cardinality() {
            Cardinality::Finite(n) => {
                let outside: Vec<String> = l
                    .prefix(n)
                    .iter()
                    .filter(|x| {
                        let k = l.idempotent_power(x, n + 1).expect("finite carriers are periodic");
                        let f = l.pow(x, k as u64);
                        l.product(&f, x) != **x
                    })
                    .map(|x| l.label(x))
                    .collect();
                outside.len() == *count && &outside == labels
            }
            Cardinality::Infinite => false,
        },
    }
}
