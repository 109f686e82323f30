//! Finite semigroups given by validated Cayley tables, subsets of their
//! carriers, and the basic constructions built on top of them.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("a semigroup needs at least one element")]
    EmptyCarrier,
    #[error("table is not square: expected {expected} entries, {context} has {found}")]
    NonSquare {
        expected: usize,
        context: String,
        found: usize,
    },
    #[error("entry ({row}, {col}) = {value} is outside 0..{order}")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        value: usize,
        order: usize,
    },
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
    #[error("not associative: (x{i}*x{j})*x{k} != x{i}*(x{j}*x{k})")]
    NotAssociative { i: usize, j: usize, k: usize },
    #[error("seed set is empty")]
    EmptySeed,
    #[error("element {index} is outside a carrier of order {order}")]
    ElementOutOfRange { index: usize, order: usize },
    #[error("unknown element name {0:?}")]
    UnknownName(String),
    #[error("subset is not closed under the product")]
    NotClosed,
    #[error("malformed input: {0}")]
    Parse(String),
}

/// A sorted, duplicate-free subset of the carrier `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    universe: usize,
    members: Vec<usize>,
}

impl ElementSet {
    /// Builds a set from arbitrary indices. Panics on an index outside the
    /// universe, which is always a caller bug.
    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let members: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&max) = members.iter().next_back() {
            assert!(max < universe, "index {max} outside universe {universe}");
        }
        ElementSet {
            universe,
            members: members.into_iter().collect(),
        }
    }

    pub fn empty(universe: usize) -> Self {
        ElementSet {
            universe,
            members: Vec::new(),
        }
    }

    pub fn full(universe: usize) -> Self {
        ElementSet {
            universe,
            members: (0..universe).collect(),
        }
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        ElementSet {
            universe: mask.len(),
            members: (0..mask.len()).filter(|&i| mask[i]).collect(),
        }
    }

    pub fn to_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.universe];
        for &m in &self.members {
            mask[m] = true;
        }
        mask
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.members.iter().all(|&m| other.contains(m))
    }

    pub fn union(&self, other: &ElementSet) -> ElementSet {
        ElementSet::from_indices(self.universe, self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &ElementSet) -> ElementSet {
        ElementSet::from_indices(self.universe, self.iter().filter(|&m| other.contains(m)))
    }

    pub fn difference(&self, other: &ElementSet) -> ElementSet {
        ElementSet::from_indices(self.universe, self.iter().filter(|&m| !other.contains(m)))
    }

    pub fn complement(&self) -> ElementSet {
        ElementSet::from_indices(self.universe, (0..self.universe).filter(|&m| !self.contains(m)))
    }

    pub fn names(&self, s: &FiniteSemigroup) -> Vec<String> {
        self.members.iter().map(|&m| s.name(m).to_string()).collect()
    }
}

/// Wire form of a Cayley table: `{"names":[...],"table":[[...],...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableJson {
    pub names: Vec<String>,
    pub table: Vec<Vec<usize>>,
}

/// A finite semigroup over the indices `0..order`. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteSemigroup {
    order: usize,
    names: Vec<String>,
    table: Vec<usize>,
}

/// Checks shape, range, name uniqueness and associativity, in that order.
pub fn validate_cayley(names: Vec<String>, rows: Vec<Vec<usize>>) -> Result<FiniteSemigroup, TableError> {
    let s = FiniteSemigroup::checked_shape(names, rows)?;
    if let Some((i, j, k)) = s.first_associativity_violation() {
        return Err(TableError::NotAssociative { i, j, k });
    }
    Ok(s)
}

impl FiniteSemigroup {
    fn checked_shape(names: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self, TableError> {
        let order = names.len();
        if order == 0 {
            return Err(TableError::EmptyCarrier);
        }
        if rows.len() != order {
            return Err(TableError::NonSquare {
                expected: order,
                context: "the table".into(),
                found: rows.len(),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(TableError::NonSquare {
                    expected: order,
                    context: format!("row {r}"),
                    found: row.len(),
                });
            }
            for (c, &value) in row.iter().enumerate() {
                if value >= order {
                    return Err(TableError::IndexOutOfRange {
                        row: r,
                        col: c,
                        value,
                        order,
                    });
                }
            }
        }
        let mut seen = BTreeSet::new();
        for n in &names {
            if !seen.insert(n.as_str()) {
                return Err(TableError::DuplicateName(n.clone()));
            }
        }
        Ok(FiniteSemigroup {
            order,
            names,
            table: rows.into_iter().flatten().collect(),
        })
    }

    /// Validated table whose elements are named by their indices.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self, TableError> {
        let names = (0..rows.len()).map(|i| i.to_string()).collect();
        validate_cayley(names, rows)
    }

    /// Skips the associativity check (shape is still checked). Used to load
    /// trusted corpus files and to inject deliberately broken tables into
    /// the invariant suites.
    pub fn from_rows_unchecked(names: Vec<String>, rows: Vec<Vec<usize>>) -> Result<Self, TableError> {
        Self::checked_shape(names, rows)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Result<usize, TableError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| TableError::UnknownName(name.to_string()))
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    /// Row-major flat table.
    pub fn flat_table(&self) -> &[usize] {
        &self.table
    }

    /// The lexicographically first triple violating associativity, if any.
    pub fn first_associativity_violation(&self) -> Option<(usize, usize, usize)> {
        for i in self.elements() {
            for j in self.elements() {
                let ij = self.mul(i, j);
                for k in self.elements() {
                    if self.mul(ij, k) != self.mul(i, self.mul(j, k)) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn is_commutative(&self) -> bool {
        self.elements()
            .all(|x| (x + 1..self.order).all(|y| self.mul(x, y) == self.mul(y, x)))
    }

    pub fn is_idempotent(&self, x: usize) -> bool {
        self.mul(x, x) == x
    }

    /// `x^n` for `n >= 1`.
    pub fn pow(&self, x: usize, n: usize) -> usize {
        assert!(n >= 1, "powers start at 1");
        let mut acc = x;
        for _ in 1..n {
            acc = self.mul(acc, x);
        }
        acc
    }

    /// Index and period of the monogenic subsemigroup generated by `x`:
    /// the least `m >= 1` and `p >= 1` with `x^m = x^(m+p)`.
    pub fn power_cycle(&self, x: usize) -> (usize, usize) {
        let mut first_seen = vec![0usize; self.order];
        let mut power = x;
        let mut k = 1;
        loop {
            if first_seen[power] != 0 {
                let m = first_seen[power];
                return (m, k - m);
            }
            first_seen[power] = k;
            power = self.mul(power, x);
            k += 1;
        }
    }

    /// Subsemigroup on `subset` with inherited names, plus the embedding
    /// from its indices into this carrier.
    pub fn restrict(&self, subset: &ElementSet) -> Result<(FiniteSemigroup, Vec<usize>), TableError> {
        if subset.is_empty() {
            return Err(TableError::EmptyCarrier);
        }
        let embed: Vec<usize> = subset.iter().collect();
        let mut local = vec![usize::MAX; self.order];
        for (i, &x) in embed.iter().enumerate() {
            local[x] = i;
        }
        let mut rows = Vec::with_capacity(embed.len());
        for &x in &embed {
            let mut row = Vec::with_capacity(embed.len());
            for &y in &embed {
                let p = local[self.mul(x, y)];
                if p == usize::MAX {
                    return Err(TableError::NotClosed);
                }
                row.push(p);
            }
            rows.push(row);
        }
        let names = embed.iter().map(|&x| self.names[x].clone()).collect();
        Ok((
            FiniteSemigroup {
                order: embed.len(),
                names,
                table: rows.into_iter().flatten().collect(),
            },
            embed,
        ))
    }

    /// Relabels along the bijection `perm` (old index -> new index); names
    /// travel with their elements.
    pub fn relabel(&self, perm: &[usize]) -> FiniteSemigroup {
        let n = self.order;
        assert_eq!(perm.len(), n);
        let mut table = vec![0; n * n];
        let mut names = vec![String::new(); n];
        for x in 0..n {
            names[perm[x]] = self.names[x].clone();
            for y in 0..n {
                table[perm[x] * n + perm[y]] = perm[self.mul(x, y)];
            }
        }
        FiniteSemigroup { order: n, names, table }
    }

    /// The opposite semigroup, `x * y := y x`.
    pub fn opposite(&self) -> FiniteSemigroup {
        let n = self.order;
        let mut table = vec![0; n * n];
        for x in 0..n {
            for y in 0..n {
                table[x * n + y] = self.mul(y, x);
            }
        }
        FiniteSemigroup {
            order: n,
            names: self.names.clone(),
            table,
        }
    }

    pub fn to_table_json(&self) -> TableJson {
        TableJson {
            names: self.names.clone(),
            table: self.rows(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_table_json()).expect("table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, TableError> {
        let parsed: TableJson = serde_json::from_str(text).map_err(|e| TableError::Parse(e.to_string()))?;
        validate_cayley(parsed.names, parsed.table)
    }

    /// Plain-text form: the order on the first line, then one row per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.order);
        for row in self.table.chunks(self.order) {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| TableError::Parse("missing order line".into()))?;
        let order: usize = header
            .trim()
            .parse()
            .map_err(|_| TableError::Parse(format!("bad order line {header:?}")))?;
        let mut rows = Vec::with_capacity(order);
        for line in lines {
            let row = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| TableError::Parse(format!("bad entry {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let names = (0..order).map(|i| i.to_string()).collect();
        validate_cayley(names, rows)
    }

    /// Parses JSON when the text looks like an object, plain text otherwise.
    pub fn parse_any(text: &str) -> Result<Self, TableError> {
        if text.trim_start().starts_with('{') {
            Self::from_json(text)
        } else {
            Self::from_text(text)
        }
    }

    /// Content fingerprint of this exact labelled table (not iso-invariant).
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.names.iter().any(|n| n == &name) {
            name.push('\'');
        }
        name
    }
}

impl fmt::Display for FiniteSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.names.iter().map(|n| n.chars().count()).max().unwrap_or(1);
        write!(f, "{:>width$} |", "*")?;
        for n in &self.names {
            write!(f, " {n:>width$}")?;
        }
        writeln!(f)?;
        writeln!(f, "{}", "-".repeat((width + 1) * (self.order + 1) + 1))?;
        for x in self.elements() {
            write!(f, "{:>width$} |", self.names[x])?;
            for y in self.elements() {
                write!(f, " {:>width$}", self.names[self.mul(x, y)])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `S^0`: adjoins an absorbing element at the last index.
pub fn zero_extension(s: &FiniteSemigroup) -> FiniteSemigroup {
    let n = s.order;
    let zero = n;
    let mut names = s.names.clone();
    names.push(s.fresh_name("0"));
    let mut table = Vec::with_capacity((n + 1) * (n + 1));
    for x in 0..=n {
        for y in 0..=n {
            table.push(if x == zero || y == zero { zero } else { s.mul(x, y) });
        }
    }
    FiniteSemigroup {
        order: n + 1,
        names,
        table,
    }
}

/// `S^1`: adjoins a two-sided identity at the last index, even when `S`
/// already has one.
pub fn one_extension(s: &FiniteSemigroup) -> FiniteSemigroup {
    let n = s.order;
    let one = n;
    let mut names = s.names.clone();
    names.push(s.fresh_name("1"));
    let mut table = Vec::with_capacity((n + 1) * (n + 1));
    for x in 0..=n {
        for y in 0..=n {
            table.push(if x == one {
                y
            } else if y == one {
                x
            } else {
                s.mul(x, y)
            });
        }
    }
    FiniteSemigroup {
        order: n + 1,
        names,
        table,
    }
}

/// Smallest product-closed subset containing `seeds`.
pub fn generated_subsemigroup(s: &FiniteSemigroup, seeds: &[usize]) -> Result<ElementSet, TableError> {
    if seeds.is_empty() {
        return Err(TableError::EmptySeed);
    }
    let mut inside = vec![false; s.order];
    let mut members = Vec::new();
    for &x in seeds {
        if x >= s.order {
            return Err(TableError::ElementOutOfRange {
                index: x,
                order: s.order,
            });
        }
        if !inside[x] {
            inside[x] = true;
            members.push(x);
        }
    }
    let mut frontier = 0;
    while frontier < members.len() {
        let x = members[frontier];
        frontier += 1;
        let mut fresh = Vec::new();
        for &y in &members {
            for p in [s.mul(x, y), s.mul(y, x)] {
                if !inside[p] {
                    inside[p] = true;
                    fresh.push(p);
                }
            }
        }
        members.extend(fresh);
    }
    Ok(ElementSet::from_mask(&inside))
}

/// Whether `map` (indexed by elements of `s`) preserves products. A map of
/// the wrong length or with out-of-range images is not a homomorphism.
pub fn is_homomorphism(s: &FiniteSemigroup, t: &FiniteSemigroup, map: &[usize]) -> bool {
    if map.len() != s.order || map.iter().any(|&v| v >= t.order) {
        return false;
    }
    s.elements()
        .all(|x| s.elements().all(|y| map[s.mul(x, y)] == t.mul(map[x], map[y])))
}

/// Relabelling-invariant profile of a single element.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct ElementProfile {
    idempotent: bool,
    index: usize,
    period: usize,
    left_stabilizers: usize,
    right_stabilizers: usize,
    occurrences: usize,
    row_distinct: usize,
    col_distinct: usize,
    squares_to_idempotent: bool,
}

fn element_profiles(s: &FiniteSemigroup) -> Vec<ElementProfile> {
    let n = s.order;
    let mut occurrences = vec![0; n];
    for &v in &s.table {
        occurrences[v] += 1;
    }
    s.elements()
        .map(|x| {
            let (index, period) = s.power_cycle(x);
            let row: BTreeSet<usize> = s.elements().map(|y| s.mul(x, y)).collect();
            let col: BTreeSet<usize> = s.elements().map(|y| s.mul(y, x)).collect();
            ElementProfile {
                idempotent: s.is_idempotent(x),
                index,
                period,
                left_stabilizers: s.elements().filter(|&y| s.mul(y, x) == x).count(),
                right_stabilizers: s.elements().filter(|&y| s.mul(x, y) == x).count(),
                occurrences: occurrences[x],
                row_distinct: row.len(),
                col_distinct: col.len(),
                squares_to_idempotent: s.is_idempotent(s.mul(x, x)),
            }
        })
        .collect()
}

/// A product-preserving bijection `s -> t` (as `map[x_in_s] = y_in_t`), if
/// one exists. Candidates are restricted to elements with equal profiles;
/// the search is a deterministic depth-first backtrack.
pub fn find_isomorphism(s: &FiniteSemigroup, t: &FiniteSemigroup) -> Option<Vec<usize>> {
    if s.order != t.order {
        return None;
    }
    let ps = element_profiles(s);
    let pt = element_profiles(t);
    let mut sorted_s = ps.clone();
    let mut sorted_t = pt.clone();
    sorted_s.sort();
    sorted_t.sort();
    if sorted_s != sorted_t {
        return None;
    }
    let candidates: Vec<Vec<usize>> = ps
        .iter()
        .map(|p| t.elements().filter(|&y| &pt[y] == p).collect())
        .collect();
    // Most constrained elements first.
    let mut order: Vec<usize> = s.elements().collect();
    order.sort_by_key(|&x| (candidates[x].len(), x));

    let mut map = vec![usize::MAX; s.order];
    let mut used = vec![false; t.order];
    if extend_iso(s, t, &order, 0, &candidates, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn extend_iso(
    s: &FiniteSemigroup,
    t: &FiniteSemigroup,
    order: &[usize],
    depth: usize,
    candidates: &[Vec<usize>],
    map: &mut [usize],
    used: &mut [bool],
) -> bool {
    if depth == order.len() {
        return true;
    }
    let x = order[depth];
    for &y in &candidates[x] {
        if used[y] {
            continue;
        }
        map[x] = y;
        used[y] = true;
        if consistent(s, t, &order[..=depth], map) && extend_iso(s, t, order, depth + 1, candidates, map, used) {
            return true;
        }
        used[y] = false;
        map[x] = usize::MAX;
    }
    false
}

fn consistent(s: &FiniteSemigroup, t: &FiniteSemigroup, assigned: &[usize], map: &[usize]) -> bool {
    let newest = *assigned.last().expect("non-empty");
    assigned.iter().all(|&a| {
        [(newest, a), (a, newest)].iter().all(|&(x, y)| {
            let image = map[s.mul(x, y)];
            image == usize::MAX || image == t.mul(map[x], map[y])
        })
    }) && s.elements().all(|x| {
        // products that land on the newest element
        if map[x] == usize::MAX {
            return true;
        }
        assigned.iter().all(|&y| {
            let p = s.mul(x, y);
            p != newest || map[p] == t.mul(map[x], map[y])
        })
    })
}
