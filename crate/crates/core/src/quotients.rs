//! Ideals, congruences and the quotients they induce, with exhaustive
//! enumeration of both on small carriers.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::{ElementSet, FiniteSemigroup, TableJson};

pub const DEFAULT_IDEAL_BOUND: usize = 12;
pub const DEFAULT_CONGRUENCE_BOUND: usize = 6;

/// Label of the absorbing element a Rees quotient collapses its ideal to.
pub const REES_SINK_LABEL: &str = "∅→I";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("subset {0:?} is not an ideal")]
    NotAnIdeal(Vec<usize>),
    #[error("carrier of order {order} exceeds the enumeration bound {bound}")]
    CarrierTooLarge { order: usize, bound: usize },
    #[error("partition is not a congruence: {0}")]
    IncompatiblePartition(String),
}

/// `IS ∪ SI ⊆ I`. The empty set is an ideal.
pub fn is_ideal(s: &FiniteSemigroup, i: &ElementSet) -> bool {
    i.iter()
        .all(|x| s.elements().all(|y| i.contains(s.mul(x, y)) && i.contains(s.mul(y, x))))
}

/// `S^1 a S^1`.
fn principal_ideal(s: &FiniteSemigroup, a: usize) -> Vec<bool> {
    let mut mask = vec![false; s.order()];
    let mut mark = |x: usize| mask[x] = true;
    mark(a);
    for x in s.elements() {
        mark(s.mul(x, a));
        mark(s.mul(a, x));
        for y in s.elements() {
            mark(s.mul(s.mul(x, a), y));
        }
    }
    mask
}

pub fn enumerate_ideals(s: &FiniteSemigroup) -> Result<Vec<ElementSet>, QuotientError> {
    enumerate_ideals_bounded(s, DEFAULT_IDEAL_BOUND)
}

/// All ideals, `∅` and the carrier included, sorted by size then members.
/// Up to order 6 the powerset is filtered directly; above that ideals are
/// built as unions of principal ideals.
pub fn enumerate_ideals_bounded(s: &FiniteSemigroup, bound: usize) -> Result<Vec<ElementSet>, QuotientError> {
    let n = s.order();
    if n > bound {
        return Err(QuotientError::CarrierTooLarge { order: n, bound });
    }
    let mut found: BTreeSet<Vec<bool>> = BTreeSet::new();
    if n <= 6 {
        for bits in 0u32..(1 << n) {
            let mask: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
            if is_ideal(s, &ElementSet::from_mask(&mask)) {
                found.insert(mask);
            }
        }
    } else {
        let principals: Vec<Vec<bool>> = s.elements().map(|a| principal_ideal(s, a)).collect();
        let mut frontier = vec![vec![false; n]];
        found.insert(vec![false; n]);
        while let Some(current) = frontier.pop() {
            for p in &principals {
                let joined: Vec<bool> = current.iter().zip(p).map(|(a, b)| *a || *b).collect();
                if found.insert(joined.clone()) {
                    frontier.push(joined);
                }
            }
        }
    }
    let mut ideals: Vec<ElementSet> = found.iter().map(|m| ElementSet::from_mask(m)).collect();
    ideals.sort_by(|a, b| (a.len(), a.as_slice()).cmp(&(b.len(), b.as_slice())));
    Ok(ideals)
}

/// `S/I`: the complement of `I` in its original order followed by one
/// absorbing sink. `S/∅` is `S` itself with the identity map.
pub fn rees_quotient(s: &FiniteSemigroup, i: &ElementSet) -> Result<(FiniteSemigroup, Vec<usize>), QuotientError> {
    if !is_ideal(s, i) {
        return Err(QuotientError::NotAnIdeal(i.as_slice().to_vec()));
    }
    if i.is_empty() {
        return Ok((s.clone(), s.elements().collect()));
    }
    let survivors: Vec<usize> = s.elements().filter(|&x| !i.contains(x)).collect();
    let sink = survivors.len();
    let mut map = vec![sink; s.order()];
    for (k, &x) in survivors.iter().enumerate() {
        map[x] = k;
    }
    let mut rows = vec![vec![sink; sink + 1]; sink + 1];
    for (a, &x) in survivors.iter().enumerate() {
        for (b, &y) in survivors.iter().enumerate() {
            rows[a][b] = map[s.mul(x, y)];
        }
    }
    let mut names: Vec<String> = survivors.iter().map(|&x| s.name(x).to_string()).collect();
    let mut sink_name = REES_SINK_LABEL.to_string();
    while names.contains(&sink_name) {
        sink_name.push('\'');
    }
    names.push(sink_name);
    let q = FiniteSemigroup::from_rows_unchecked(names, rows).expect("well-formed quotient table");
    debug_assert!(q.first_associativity_violation().is_none());
    Ok((q, map))
}

/// A partition of the carrier compatible with multiplication on both
/// sides. Classes are numbered by their least member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Congruence {
    class_of: Vec<usize>,
    num_classes: usize,
}

fn normalize(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut renumber = std::collections::HashMap::new();
    let class_of: Vec<usize> = labels
        .iter()
        .map(|l| {
            let next = renumber.len();
            *renumber.entry(*l).or_insert(next)
        })
        .collect();
    (class_of, renumber.len())
}

impl Congruence {
    /// Accepts any labelling of the carrier; fails unless it is compatible.
    pub fn from_labels(s: &FiniteSemigroup, labels: &[usize]) -> Result<Self, QuotientError> {
        if labels.len() != s.order() {
            return Err(QuotientError::IncompatiblePartition(format!(
                "{} labels for a carrier of order {}",
                labels.len(),
                s.order()
            )));
        }
        let (class_of, num_classes) = normalize(labels);
        let c = Congruence { class_of, num_classes };
        if let Some((x, y, a)) = c.first_incompatibility(s) {
            return Err(QuotientError::IncompatiblePartition(format!(
                "{x} ~ {y} but translating by {a} separates them"
            )));
        }
        Ok(c)
    }

    pub fn identity(order: usize) -> Self {
        Congruence {
            class_of: (0..order).collect(),
            num_classes: order,
        }
    }

    pub fn universal(order: usize) -> Self {
        Congruence {
            class_of: vec![0; order],
            num_classes: 1,
        }
    }

    pub fn class_of(&self) -> &[usize] {
        &self.class_of
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn related(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn classes(&self) -> Vec<ElementSet> {
        (0..self.num_classes)
            .map(|c| {
                ElementSet::from_indices(
                    self.class_of.len(),
                    (0..self.class_of.len()).filter(|&x| self.class_of[x] == c),
                )
            })
            .collect()
    }

    /// Naive recheck: some `x ~ y` and `a` with `ax ≁ ay` or `xa ≁ ya`.
    pub fn first_incompatibility(&self, s: &FiniteSemigroup) -> Option<(usize, usize, usize)> {
        for x in s.elements() {
            for y in x + 1..s.order() {
                if !self.related(x, y) {
                    continue;
                }
                for a in s.elements() {
                    if !self.related(s.mul(a, x), s.mul(a, y)) || !self.related(s.mul(x, a), s.mul(y, a)) {
                        return Some((x, y, a));
                    }
                }
            }
        }
        None
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }
}

/// The least congruence containing `pairs`: alternate equivalence closure
/// (union-find) with translation closure until nothing merges.
pub fn congruence_closure(s: &FiniteSemigroup, pairs: &[(usize, usize)]) -> Congruence {
    let mut uf = UnionFind::new(s.order());
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    loop {
        let mut merged = false;
        for x in s.elements() {
            let r = uf.find(x);
            if r == x {
                continue;
            }
            for a in s.elements() {
                merged |= uf.union(s.mul(a, x), s.mul(a, r));
                merged |= uf.union(s.mul(x, a), s.mul(r, a));
            }
        }
        if !merged {
            break;
        }
    }
    let roots: Vec<usize> = s.elements().map(|x| uf.find(x)).collect();
    let (class_of, num_classes) = normalize(&roots);
    Congruence { class_of, num_classes }
}

/// Pairs generating the Rees congruence of `i`.
pub fn rees_pairs(i: &ElementSet) -> Vec<(usize, usize)> {
    match i.as_slice().split_first() {
        Some((&first, rest)) => rest.iter().map(|&x| (first, x)).collect(),
        None => Vec::new(),
    }
}

/// `S/c` with the surjective quotient map. A class of several elements is
/// named `[x|y|...]`; singleton classes keep their element's name.
pub fn quotient(s: &FiniteSemigroup, c: &Congruence) -> Result<(FiniteSemigroup, Vec<usize>), QuotientError> {
    let c = Congruence::from_labels(s, &c.class_of)?;
    let classes = c.classes();
    let reps: Vec<usize> = classes.iter().map(|k| k.as_slice()[0]).collect();
    let rows: Vec<Vec<usize>> = reps
        .iter()
        .map(|&x| reps.iter().map(|&y| c.class_of[s.mul(x, y)]).collect())
        .collect();
    let names: Vec<String> = classes
        .iter()
        .map(|k| {
            if k.len() == 1 {
                s.name(k.as_slice()[0]).to_string()
            } else {
                format!("[{}]", k.names(s).join("|"))
            }
        })
        .collect();
    let q = FiniteSemigroup::from_rows_unchecked(names, rows).expect("well-formed quotient table");
    Ok((q, c.class_of.clone()))
}

pub fn enumerate_congruences(s: &FiniteSemigroup) -> Result<Vec<Congruence>, QuotientError> {
    enumerate_congruences_bounded(s, DEFAULT_CONGRUENCE_BOUND)
}

/// Every congruence is a join of principal congruences, so the lattice is
/// the join-closure of `{identity} ∪ {θ(x, y)}`. Sorted by decreasing
/// number of classes, then by class labels.
pub fn enumerate_congruences_bounded(s: &FiniteSemigroup, bound: usize) -> Result<Vec<Congruence>, QuotientError> {
    let n = s.order();
    if n > bound {
        return Err(QuotientError::CarrierTooLarge { order: n, bound });
    }
    let generators = |c: &Congruence| -> Vec<(usize, usize)> {
        (0..n)
            .map(|x| (x, c.class_of.iter().position(|&k| k == c.class_of[x]).unwrap()))
            .filter(|(x, r)| x != r)
            .collect()
    };
    let principals: Vec<Congruence> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .map(|p| congruence_closure(s, &[p]))
        .collect();
    let mut found: BTreeSet<Congruence> = BTreeSet::new();
    let identity = Congruence::identity(n);
    found.insert(identity.clone());
    let mut frontier = vec![identity];
    while let Some(current) = frontier.pop() {
        let base = generators(&current);
        for p in &principals {
            let mut pairs = base.clone();
            pairs.extend(generators(p));
            let joined = congruence_closure(s, &pairs);
            if found.insert(joined.clone()) {
                frontier.push(joined);
            }
        }
    }
    let mut all: Vec<Congruence> = found.into_iter().collect();
    all.sort_by(|a, b| {
        b.num_classes
            .cmp(&a.num_classes)
            .then_with(|| a.class_of.cmp(&b.class_of))
    });
    Ok(all)
}

/// A quotient together with where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientArtifact {
    pub source_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[String; 2]>>,
    pub quotient: TableJson,
    /// `map[i]` is the quotient index of source element `i`.
    pub map: Vec<usize>,
}

pub fn rees_artifact(s: &FiniteSemigroup, i: &ElementSet) -> Result<QuotientArtifact, QuotientError> {
    let (q, map) = rees_quotient(s, i)?;
    Ok(QuotientArtifact {
        source_hash: s.content_hash(),
        ideal: Some(i.names(s)),
        pairs: None,
        quotient: q.to_table_json(),
        map,
    })
}

pub fn congruence_artifact(s: &FiniteSemigroup, pairs: &[(usize, usize)]) -> QuotientArtifact {
    let c = congruence_closure(s, pairs);
    let (q, map) = quotient(s, &c).expect("closure is a congruence");
    QuotientArtifact {
        source_hash: s.content_hash(),
        ideal: None,
        pairs: Some(
            pairs
                .iter()
                .map(|&(x, y)| [s.name(x).to_string(), s.name(y).to_string()])
                .collect(),
        ),
        quotient: q.to_table_json(),
        map,
    }
}
