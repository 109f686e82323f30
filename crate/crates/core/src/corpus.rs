//! Exhaustive small-order semigroup enumeration up to isomorphism, and the
//! invariant suites run over such corpora.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::closedness::{
    audit_center_necessary, audit_main_theorem, b_set, decide_c_closed_commutative, decide_ideally_closed_commutative,
    root_containment_check, viable_root_set,
};
use crate::lazy::finite_wrap;
use crate::predicates::{recheck, Predicate, Subject};
use crate::quotients::{
    congruence_closure, enumerate_congruences, enumerate_ideals, is_ideal, quotient, rees_pairs, rees_quotient,
};
use crate::structure::{
    center, g_subgroup, h_class, h_classes, ideal_center, idempotents, maximal_subgroup, roots_all, viable_idempotents,
};
use crate::table::{is_homomorphism, ElementSet, FiniteSemigroup, TableJson};
use crate::verdict::{Status, Witness, DEFAULT_BUDGET};

/// Largest order enumerated without an explicit opt-in.
pub const DEFAULT_MAX_ORDER: usize = 4;
/// Largest order enumerated at all.
pub const MAX_ORDER: usize = 5;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("order {order} is out of range (allowed 1..={max})")]
    OrderTooLarge { order: usize, max: usize },
    #[error("unknown suite {0:?} (expected lemmas, quotients, closedness or all)")]
    UnknownSuite(String),
    #[error("unknown dedup policy {0:?} (expected iso or iso-anti)")]
    UnknownPolicy(String),
    #[error("corpus line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DedupPolicy {
    #[default]
    Iso,
    IsoAnti,
}

impl FromStr for DedupPolicy {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "iso" => Ok(DedupPolicy::Iso),
            "iso-anti" | "iso_anti" => Ok(DedupPolicy::IsoAnti),
            other => Err(CorpusError::UnknownPolicy(other.to_string())),
        }
    }
}

impl fmt::Display for DedupPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DedupPolicy::Iso => "iso",
            DedupPolicy::IsoAnti => "iso-anti",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub commutative: bool,
    pub band: bool,
    pub group: bool,
    pub monoid: bool,
}

impl Flags {
    pub fn of(s: &FiniteSemigroup) -> Self {
        let identity = s
            .elements()
            .find(|&e| s.elements().all(|x| s.mul(e, x) == x && s.mul(x, e) == x));
        let group = identity.is_some_and(|e| {
            s.elements()
                .all(|x| s.elements().any(|y| s.mul(x, y) == e && s.mul(y, x) == e))
        });
        Flags {
            commutative: s.is_commutative(),
            band: s.elements().all(|x| s.is_idempotent(x)),
            group,
            monoid: identity.is_some(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub semigroup: FiniteSemigroup,
    pub canonical_hash: String,
    pub flags: Flags,
}

#[derive(Serialize, Deserialize)]
struct EntryWire {
    semigroup: TableJson,
    canonical_hash: String,
    flags: Flags,
}

impl CorpusEntry {
    pub fn new(semigroup: FiniteSemigroup, policy: DedupPolicy) -> Self {
        let canonical_hash = canonical_hash(&semigroup, policy);
        let flags = Flags::of(&semigroup);
        CorpusEntry {
            semigroup,
            canonical_hash,
            flags,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&EntryWire {
            semigroup: self.semigroup.to_table_json(),
            canonical_hash: self.canonical_hash.clone(),
            flags: self.flags,
        })
        .expect("entries serialize")
    }

    /// Shape is checked but associativity is not: corpus files are trusted,
    /// and a broken table is left for the suite's associativity invariant.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let wire: EntryWire = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let semigroup = FiniteSemigroup::from_rows_unchecked(wire.semigroup.names, wire.semigroup.table)
            .map_err(|e| e.to_string())?;
        Ok(CorpusEntry {
            semigroup,
            canonical_hash: wire.canonical_hash,
            flags: wire.flags,
        })
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Relabellings considered equivalent under a policy: each is a permutation
/// `old -> new`, optionally composed with transposition.
fn symmetries(n: usize, policy: DedupPolicy) -> Vec<(Vec<usize>, bool)> {
    let perms = permutations(n);
    let mut out: Vec<(Vec<usize>, bool)> = perms.iter().cloned().map(|p| (p, false)).collect();
    if policy == DedupPolicy::IsoAnti {
        out.extend(perms.into_iter().map(|p| (p, true)));
    }
    out
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (old, &new) in perm.iter().enumerate() {
        inv[new] = old;
    }
    inv
}

/// Lexicographically least flattened table over all relabellings allowed by
/// the policy.
pub fn canonical_table(s: &FiniteSemigroup, policy: DedupPolicy) -> Vec<usize> {
    let n = s.order();
    symmetries(n, policy)
        .into_iter()
        .map(|(perm, transpose)| {
            let inv = inverse(&perm);
            (0..n * n)
                .map(|q| {
                    let (a, b) = (inv[q / n], inv[q % n]);
                    perm[if transpose { s.mul(b, a) } else { s.mul(a, b) }]
                })
                .collect::<Vec<usize>>()
        })
        .min()
        .expect("at least the identity permutation")
}

/// The canonical representative, with elements named by index.
pub fn canonical_form(s: &FiniteSemigroup, policy: DedupPolicy) -> FiniteSemigroup {
    let n = s.order();
    let flat = canonical_table(s, policy);
    FiniteSemigroup::from_rows(flat.chunks(n).map(|r| r.to_vec()).collect())
        .expect("relabelling preserves associativity")
}

/// First 16 hex digits of the SHA-256 of the canonical table.
pub fn canonical_hash(s: &FiniteSemigroup, policy: DedupPolicy) -> String {
    let flat = canonical_table(s, policy);
    let text = format!(
        "{}:{}",
        s.order(),
        flat.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
    );
    Sha256::digest(text.as_bytes())[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

const UNSET: usize = usize::MAX;

struct Search<'a> {
    n: usize,
    table: Vec<usize>,
    symmetries: &'a [(Vec<usize>, Vec<usize>, bool)],
    found: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn get(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b]
    }

    /// No fully defined triple violates associativity.
    fn associative_so_far(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let ab = self.get(a, b);
                if ab == UNSET {
                    continue;
                }
                for c in 0..n {
                    let bc = self.get(b, c);
                    if bc == UNSET {
                        continue;
                    }
                    let (left, right) = (self.get(ab, c), self.get(a, bc));
                    if left != UNSET && right != UNSET && left != right {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Some relabelling already yields a lexicographically smaller table on
    /// a fully determined prefix, so no completion can be canonical.
    fn dominated(&self) -> bool {
        let n = self.n;
        'sym: for (perm, inv, transpose) in self.symmetries {
            for q in 0..n * n {
                let mine = self.table[q];
                let (a, b) = (inv[q / n], inv[q % n]);
                let src = if *transpose { self.get(b, a) } else { self.get(a, b) };
                if mine == UNSET || src == UNSET {
                    continue 'sym;
                }
                let theirs = perm[src];
                if theirs < mine {
                    return true;
                }
                if theirs > mine {
                    continue 'sym;
                }
            }
        }
        false
    }

    fn run(&mut self, cell: usize) {
        if !self.associative_so_far() || self.dominated() {
            return;
        }
        if cell == self.n * self.n {
            self.found.push(self.table.clone());
            return;
        }
        for v in 0..self.n {
            self.table[cell] = v;
            self.run(cell + 1);
        }
        self.table[cell] = UNSET;
    }
}

fn check_order(n: usize, allow_order_5: bool) -> Result<(), CorpusError> {
    let max = if allow_order_5 { MAX_ORDER } else { DEFAULT_MAX_ORDER };
    if n == 0 || n > max {
        return Err(CorpusError::OrderTooLarge { order: n, max });
    }
    Ok(())
}

/// Every semigroup of order `n` exactly once per dedup class, as canonical
/// tables sorted by canonical hash. Work is split by first row across the
/// rayon pool; the result does not depend on the pool size.
pub fn enumerate_semigroups(
    n: usize,
    policy: DedupPolicy,
    allow_order_5: bool,
) -> Result<Vec<CorpusEntry>, CorpusError> {
    check_order(n, allow_order_5)?;
    let symmetries: Vec<(Vec<usize>, Vec<usize>, bool)> = symmetries(n, policy)
        .into_iter()
        .filter(|(p, t)| *t || p.iter().enumerate().any(|(i, &v)| i != v))
        .map(|(p, t)| {
            let inv = inverse(&p);
            (p, inv, t)
        })
        .collect();
    let first_rows: Vec<Vec<usize>> = (0..n.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let v = code % n;
                    code /= n;
                    v
                })
                .rev()
                .collect()
        })
        .collect();
    let tables: Vec<Vec<usize>> = first_rows
        .par_iter()
        .flat_map_iter(|row| {
            let mut table = vec![UNSET; n * n];
            table[..n].copy_from_slice(row);
            let mut search = Search {
                n,
                table,
                symmetries: &symmetries,
                found: Vec::new(),
            };
            search.run(n);
            search.found
        })
        .collect();
    let mut entries: Vec<CorpusEntry> = tables
        .into_par_iter()
        .map(|flat| {
            let s = FiniteSemigroup::from_rows(flat.chunks(n).map(|r| r.to_vec()).collect())
                .expect("search emits associative tables");
            CorpusEntry::new(s, policy)
        })
        .collect();
    entries.sort_by(|a, b| a.canonical_hash.cmp(&b.canonical_hash));
    Ok(entries)
}

/// Orders `1..=max_order` concatenated.
pub fn corpus_up_to(
    max_order: usize,
    policy: DedupPolicy,
    allow_order_5: bool,
) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut all = Vec::new();
    for n in 1..=max_order {
        all.extend(enumerate_semigroups(n, policy, allow_order_5)?);
    }
    Ok(all)
}

pub fn write_ndjson(entries: &[CorpusEntry], mut out: impl Write) -> std::io::Result<()> {
    for e in entries {
        writeln!(out, "{}", e.to_json())?;
    }
    Ok(())
}

pub fn read_ndjson(input: impl BufRead) -> Result<Vec<CorpusEntry>, CorpusError> {
    let mut entries = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = CorpusEntry::from_json(&line).map_err(|message| CorpusError::Parse { line: i + 1, message })?;
        entries.push(entry);
    }
    Ok(entries)
}

// ---------------------------------------------------------------------------
// invariant suites

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Lemmas,
    Quotients,
    Closedness,
    All,
}

impl FromStr for Suite {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "quotients" => Ok(Suite::Quotients),
            "closedness" => Ok(Suite::Closedness),
            "all" => Ok(Suite::All),
            other => Err(CorpusError::UnknownSuite(other.to_string())),
        }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Lemmas => "lemmas",
            Suite::Quotients => "quotients",
            Suite::Closedness => "closedness",
            Suite::All => "all",
        }
    }

    pub fn invariants(self) -> Vec<&'static str> {
        suite_checks(self).into_iter().map(|(n, _)| n).collect()
    }
}

/// One failed invariant, with the table it failed on so it can be rechecked
/// without the corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub hash: String,
    pub invariant: String,
    pub table: TableJson,
    pub data: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub total: usize,
    /// Semigroups each invariant was evaluated on.
    pub checks: BTreeMap<String, usize>,
    pub violations: Vec<Violation>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn violations_of(&self, invariant: &str) -> usize {
        self.violations.iter().filter(|v| v.invariant == invariant).count()
    }
}

type Check = fn(&FiniteSemigroup) -> Result<(), Value>;

fn ensure(ok: bool, data: impl FnOnce() -> Value) -> Result<(), Value> {
    if ok {
        Ok(())
    } else {
        Err(data())
    }
}

const LEMMAS: &[(&str, Check)] = &[
    ("associativity", inv_associativity),
    ("h_partition", inv_h_partition),
    ("maximal_subgroup_unique", inv_maximal_subgroup_unique),
    ("commuting_group_elements", inv_commuting_group_elements),
    ("roots_times_group", inv_roots_times_group),
    ("central_idempotents_viable", inv_central_idempotents_viable),
    ("viability_characterization", inv_viability_characterization),
    ("ideal_center_largest", inv_ideal_center_largest),
    ("g_subgroup_closed", inv_g_subgroup_closed),
];

const QUOTIENTS: &[(&str, Check)] = &[
    ("associativity", inv_associativity),
    ("rees_order", inv_rees_order),
    ("rees_homomorphism", inv_rees_homomorphism),
    ("rees_matches_closure", inv_rees_matches_closure),
    ("ideal_lattice", inv_ideal_lattice),
    ("congruence_quotients", inv_congruence_quotients),
];

const CLOSEDNESS: &[(&str, Check)] = &[
    ("associativity", inv_associativity),
    ("finite_predicates", inv_finite_predicates),
    ("bounded_exponent_least", inv_bounded_exponent_least),
    ("predicate_implications", inv_predicate_implications),
    ("witness_recheck", inv_witness_recheck),
    ("lazy_finite_agreement", inv_lazy_finite_agreement),
    ("main_theorem", inv_main_theorem),
    ("root_containment", inv_root_containment),
    ("commutative_deciders", inv_commutative_deciders),
    ("rees_quotient_closed", inv_rees_quotient_closed),
    ("center_necessary", inv_center_necessary),
];

fn find_check(name: &str) -> Option<Check> {
    LEMMAS
        .iter()
        .chain(QUOTIENTS)
        .chain(CLOSEDNESS)
        .find(|(n, _)| *n == name)
        .map(|(_, c)| *c)
}

fn suite_checks(suite: Suite) -> Vec<(&'static str, Check)> {
    let lists: Vec<&[(&'static str, Check)]> = match suite {
        Suite::Lemmas => vec![LEMMAS],
        Suite::Quotients => vec![QUOTIENTS],
        Suite::Closedness => vec![CLOSEDNESS],
        Suite::All => vec![LEMMAS, QUOTIENTS, CLOSEDNESS],
    };
    let mut out: Vec<(&'static str, Check)> = Vec::new();
    for list in lists {
        for &(name, check) in list {
            if !out.iter().any(|(n, _)| *n == name) {
                out.push((name, check));
            }
        }
    }
    out
}

/// Runs a suite over the given tables in order. A table that fails the
/// associativity check is not examined further.
pub fn run_invariant_suite(corpus: &[FiniteSemigroup], suite: Suite) -> SuiteReport {
    let checks = suite_checks(suite);
    let per_table: Vec<(Vec<&'static str>, Vec<Violation>)> = corpus
        .par_iter()
        .map(|s| {
            let mut ran = Vec::new();
            let mut violations = Vec::new();
            for &(name, check) in &checks {
                ran.push(name);
                if let Err(data) = check(s) {
                    violations.push(Violation {
                        hash: s.content_hash(),
                        invariant: name.to_string(),
                        table: s.to_table_json(),
                        data,
                    });
                    if name == "associativity" {
                        break;
                    }
                }
            }
            (ran, violations)
        })
        .collect();
    let mut counts: BTreeMap<String, usize> = checks.iter().map(|(n, _)| (n.to_string(), 0)).collect();
    let mut violations = Vec::new();
    for (ran, v) in per_table {
        for name in ran {
            *counts.get_mut(name).expect("registered") += 1;
        }
        violations.extend(v);
    }
    SuiteReport {
        suite: suite.name().to_string(),
        total: corpus.len(),
        checks: counts,
        violations,
    }
}

pub fn run_suite_by_name(corpus: &[FiniteSemigroup], suite: &str) -> Result<SuiteReport, CorpusError> {
    Ok(run_invariant_suite(corpus, suite.parse()?))
}

/// Re-runs the violated invariant on the serialized table alone. True when
/// the violation reproduces.
pub fn recheck_violation(v: &Violation) -> bool {
    let Some(check) = find_check(&v.invariant) else {
        return false;
    };
    let Ok(s) = FiniteSemigroup::from_rows_unchecked(v.table.names.clone(), v.table.table.clone()) else {
        return false;
    };
    if v.invariant != "associativity" && s.first_associativity_violation().is_some() {
        return false;
    }
    check(&s).is_err()
}

// --- lemmas ---------------------------------------------------------------

fn inv_associativity(s: &FiniteSemigroup) -> Result<(), Value> {
    match s.first_associativity_violation() {
        None => Ok(()),
        Some((i, j, k)) => Err(json!({ "triple": [i, j, k] })),
    }
}

fn inv_h_partition(s: &FiniteSemigroup) -> Result<(), Value> {
    let d = h_classes(s);
    let mut seen = vec![0usize; s.order()];
    for class in &d.classes {
        for x in class.iter() {
            seen[x] += 1;
        }
    }
    ensure(seen.iter().all(|&c| c == 1), || json!({ "coverage": seen }))?;
    for class in &d.classes {
        let count = class.iter().filter(|&x| s.is_idempotent(x)).count();
        ensure(
            count <= 1,
            || json!({ "class": class.as_slice(), "idempotents": count }),
        )?;
    }
    Ok(())
}

/// Brute force over subsets containing `e`: the groups with identity `e`
/// have a unique maximal member, equal to `maximal_subgroup`.
fn inv_maximal_subgroup_unique(s: &FiniteSemigroup) -> Result<(), Value> {
    let n = s.order();
    for e in idempotents(s).iter() {
        let groups: Vec<u32> = (0u32..1 << n)
            .filter(|&mask| mask >> e & 1 == 1)
            .filter(|&mask| {
                let members: Vec<usize> = (0..n).filter(|&x| mask >> x & 1 == 1).collect();
                members.iter().all(|&x| {
                    s.mul(e, x) == x
                        && s.mul(x, e) == x
                        && members.iter().all(|&y| mask >> s.mul(x, y) & 1 == 1)
                        && members.iter().any(|&y| s.mul(x, y) == e && s.mul(y, x) == e)
                })
            })
            .collect();
        let maximal: Vec<u32> = groups
            .iter()
            .copied()
            .filter(|&g| !groups.iter().any(|&h| h != g && h & g == g))
            .collect();
        let computed = maximal_subgroup(s, e)
            .map(|g| g.members.iter().fold(0u32, |m, x| m | 1 << x))
            .map_err(|err| json!({ "e": e, "error": err.to_string() }))?;
        ensure(
            maximal == [computed],
            || json!({ "e": e, "brute_force": maximal, "computed": computed }),
        )?;
    }
    Ok(())
}

fn inv_commuting_group_elements(s: &FiniteSemigroup) -> Result<(), Value> {
    let groups: Vec<_> = idempotents(s)
        .iter()
        .map(|e| maximal_subgroup(s, e).map_err(|err| json!({ "e": e, "error": err.to_string() })))
        .collect::<Result<_, _>>()?;
    for g in &groups {
        for h in &groups {
            let (e, f) = (g.identity, h.identity);
            for x in g.members.iter() {
                for y in h.members.iter() {
                    let xy = s.mul(x, y);
                    if xy != s.mul(y, x) {
                        continue;
                    }
                    let data = || json!({ "e": e, "f": f, "x": x, "y": y });
                    ensure(s.mul(e, f) == s.mul(f, e), data)?;
                    let ef = s.mul(e, f);
                    let hef = maximal_subgroup(s, ef).map_err(|_| data())?;
                    ensure(hef.members.contains(xy), data)?;
                    let (xi, yi) = (g.inverse(x).expect("member"), h.inverse(y).expect("member"));
                    let inv = hef.inverse(xy).expect("member");
                    ensure(inv == s.mul(xi, yi) && inv == s.mul(yi, xi), data)?;
                }
            }
        }
    }
    Ok(())
}

fn inv_roots_times_group(s: &FiniteSemigroup) -> Result<(), Value> {
    for e in idempotents(s).iter() {
        let he = h_class(s, e);
        let roots = roots_all(s, &he);
        for r in roots.iter() {
            for x in he.iter() {
                ensure(
                    he.contains(s.mul(r, x)) && he.contains(s.mul(x, r)),
                    || json!({ "e": e, "root": r, "x": x }),
                )?;
            }
        }
    }
    Ok(())
}

fn inv_central_idempotents_viable(s: &FiniteSemigroup) -> Result<(), Value> {
    let lhs = idempotents(s).intersection(&ideal_center(s));
    let ve = viable_idempotents(s);
    ensure(
        lhs.is_subset(&ve),
        || json!({ "idempotents_in_ideal_center": lhs.as_slice(), "viable": ve.as_slice() }),
    )
}

fn inv_viability_characterization(s: &FiniteSemigroup) -> Result<(), Value> {
    let all_viable = viable_idempotents(s).len() == idempotents(s).len();
    let local = s.elements().all(|x| {
        s.elements().all(|y| {
            let e = s.mul(x, y);
            !s.is_idempotent(e) || (s.mul(x, e) == s.mul(e, x) && s.mul(y, e) == s.mul(e, y))
        })
    });
    ensure(
        all_viable == local,
        || json!({ "all_viable": all_viable, "commuting_factors": local }),
    )
}

fn inv_ideal_center_largest(s: &FiniteSemigroup) -> Result<(), Value> {
    let iz = ideal_center(s);
    let z = center(s);
    ensure(
        is_ideal(s, &iz) && iz.is_subset(&z),
        || json!({ "ideal_center": iz.as_slice() }),
    )?;
    let ideals = enumerate_ideals(s).map_err(|e| json!({ "error": e.to_string() }))?;
    for i in ideals.iter().filter(|i| i.is_subset(&z)) {
        ensure(
            i.is_subset(&iz),
            || json!({ "central_ideal": i.as_slice(), "ideal_center": iz.as_slice() }),
        )?;
    }
    Ok(())
}

fn inv_g_subgroup_closed(s: &FiniteSemigroup) -> Result<(), Value> {
    for e in idempotents(s).iter() {
        for a in s.elements() {
            let Ok(g) = g_subgroup(s, e, a) else { continue };
            let data = || json!({ "e": e, "a": a, "g": g.as_slice() });
            ensure(g.contains(e), data)?;
            for x in g.iter() {
                for y in g.iter() {
                    ensure(g.contains(s.mul(x, y)), data)?;
                }
            }
        }
    }
    Ok(())
}

// --- quotients ------------------------------------------------------------

fn ideals_of(s: &FiniteSemigroup) -> Result<Vec<ElementSet>, Value> {
    enumerate_ideals(s).map_err(|e| json!({ "error": e.to_string() }))
}

fn inv_rees_order(s: &FiniteSemigroup) -> Result<(), Value> {
    for i in ideals_of(s)?.iter().filter(|i| !i.is_empty()) {
        let (q, _) = rees_quotient(s, i).map_err(|e| json!({ "ideal": i.as_slice(), "error": e.to_string() }))?;
        ensure(
            q.order() == s.order() - i.len() + 1,
            || json!({ "ideal": i.as_slice(), "quotient_order": q.order() }),
        )?;
    }
    Ok(())
}

fn inv_rees_homomorphism(s: &FiniteSemigroup) -> Result<(), Value> {
    for i in ideals_of(s)? {
        let (q, map) = rees_quotient(s, &i).map_err(|e| json!({ "ideal": i.as_slice(), "error": e.to_string() }))?;
        ensure(
            q.first_associativity_violation().is_none() && is_homomorphism(s, &q, &map),
            || json!({ "ideal": i.as_slice(), "map": map }),
        )?;
    }
    Ok(())
}

/// Two quotient maps agree up to relabelling when they induce the same
/// kernel partition.
fn same_kernel(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && (0..a.len()).all(|x| (0..a.len()).all(|y| (a[x] == a[y]) == (b[x] == b[y])))
}

fn inv_rees_matches_closure(s: &FiniteSemigroup) -> Result<(), Value> {
    for i in ideals_of(s)? {
        let (_, rees_map) = rees_quotient(s, &i).map_err(|e| json!({ "error": e.to_string() }))?;
        let c = congruence_closure(s, &rees_pairs(&i));
        let (q, map) = quotient(s, &c).map_err(|e| json!({ "ideal": i.as_slice(), "error": e.to_string() }))?;
        let expected = if i.is_empty() {
            s.order()
        } else {
            s.order() - i.len() + 1
        };
        ensure(
            same_kernel(&rees_map, &map) && q.order() == expected,
            || json!({ "ideal": i.as_slice(), "rees_map": rees_map, "closure_map": map }),
        )?;
    }
    Ok(())
}

fn inv_ideal_lattice(s: &FiniteSemigroup) -> Result<(), Value> {
    let ideals = ideals_of(s)?;
    for a in &ideals {
        for b in &ideals {
            let (u, m) = (a.union(b), a.intersection(b));
            ensure(
                ideals.contains(&u) && ideals.contains(&m),
                || json!({ "a": a.as_slice(), "b": b.as_slice() }),
            )?;
        }
    }
    Ok(())
}

fn inv_congruence_quotients(s: &FiniteSemigroup) -> Result<(), Value> {
    let congruences = enumerate_congruences(s).map_err(|e| json!({ "error": e.to_string() }))?;
    for c in &congruences {
        let labels = c.class_of();
        let compatible = s.elements().all(|x| {
            s.elements().all(|y| {
                labels[x] != labels[y]
                    || s.elements().all(|z| {
                        labels[s.mul(x, z)] == labels[s.mul(y, z)] && labels[s.mul(z, x)] == labels[s.mul(z, y)]
                    })
            })
        });
        let (q, _) = quotient(s, c).map_err(|e| json!({ "classes": labels, "error": e.to_string() }))?;
        ensure(
            compatible && q.first_associativity_violation().is_none(),
            || json!({ "classes": labels }),
        )?;
    }
    Ok(())
}

// --- closedness -----------------------------------------------------------

fn inv_finite_predicates(s: &FiniteSemigroup) -> Result<(), Value> {
    for p in Predicate::ALL {
        let v = p.evaluate(Subject::Finite(s), DEFAULT_BUDGET);
        let expected = if p == Predicate::Singular {
            Status::Fails
        } else {
            Status::Holds
        };
        ensure(
            v.status == expected,
            || json!({ "predicate": p.name(), "status": v.status }),
        )?;
    }
    Ok(())
}

fn inv_bounded_exponent_least(s: &FiniteSemigroup) -> Result<(), Value> {
    let v = Predicate::Bounded.evaluate(Subject::Finite(s), DEFAULT_BUDGET);
    let Some(Witness::Exponent { exponent }) = v.witness else {
        return Err(json!({ "witness": v.witness }));
    };
    let n = exponent as usize;
    let works = |k: usize| s.elements().all(|x| s.is_idempotent(s.pow(x, k)));
    ensure(works(n) && (n == 1 || !works(n - 1)), || json!({ "exponent": n }))
}

fn inv_predicate_implications(s: &FiniteSemigroup) -> Result<(), Value> {
    for subject in [Subject::Finite(s), Subject::Lazy(&finite_wrap(s))] {
        let status = |p: Predicate| p.evaluate(subject, DEFAULT_BUDGET).status;
        let implies = |a: Status, b: Status| !(a == Status::Holds && b == Status::Fails);
        ensure(
            implies(status(Predicate::Bounded), status(Predicate::Periodic)),
            || json!({ "implication": "bounded->periodic" }),
        )?;
        ensure(
            implies(status(Predicate::GroupFinite), status(Predicate::GroupBounded)),
            || json!({ "implication": "group_finite->group_bounded" }),
        )?;
    }
    Ok(())
}

fn inv_witness_recheck(s: &FiniteSemigroup) -> Result<(), Value> {
    let wrapped = finite_wrap(s);
    for subject in [Subject::Finite(s), Subject::Lazy(&wrapped)] {
        for p in Predicate::ALL {
            let v = p.evaluate(subject, DEFAULT_BUDGET);
            ensure(recheck(subject, &v), || json!({ "predicate": p.name(), "verdict": v }))?;
        }
    }
    Ok(())
}

fn inv_lazy_finite_agreement(s: &FiniteSemigroup) -> Result<(), Value> {
    let wrapped = finite_wrap(s);
    for p in Predicate::ALL {
        let finite = p.evaluate(Subject::Finite(s), DEFAULT_BUDGET).status;
        let lazy = p.evaluate(Subject::Lazy(&wrapped), DEFAULT_BUDGET).status;
        ensure(
            finite == lazy,
            || json!({ "predicate": p.name(), "finite": finite, "lazy": lazy }),
        )?;
    }
    Ok(())
}

fn inv_main_theorem(s: &FiniteSemigroup) -> Result<(), Value> {
    let r = audit_main_theorem(s);
    ensure(r.verdict.status == Status::Holds, || {
        let failed: Vec<&str> = r
            .components
            .iter()
            .filter(|c| c.status != Status::Holds)
            .map(|c| c.predicate.as_str())
            .collect();
        json!({ "failed_statements": failed })
    })
}

fn inv_root_containment(s: &FiniteSemigroup) -> Result<(), Value> {
    ensure(
        root_containment_check(s),
        || json!({ "viable_root_set": viable_root_set(s).as_slice(), "b_set": b_set(s).as_slice() }),
    )
}

fn inv_commutative_deciders(s: &FiniteSemigroup) -> Result<(), Value> {
    if !s.is_commutative() {
        return Ok(());
    }
    for subject in [Subject::Finite(s), Subject::Lazy(&finite_wrap(s))] {
        let c = decide_c_closed_commutative(subject, DEFAULT_BUDGET).map_err(|e| json!({ "error": e.to_string() }))?;
        let i = decide_ideally_closed_commutative(subject, DEFAULT_BUDGET)
            .map_err(|e| json!({ "error": e.to_string() }))?;
        ensure(
            c.verdict.status == Status::Holds && i.verdict.status == Status::Holds,
            || json!({ "c_closed": c.verdict.status, "ideally_closed": i.verdict.status }),
        )?;
    }
    Ok(())
}

fn inv_rees_quotient_closed(s: &FiniteSemigroup) -> Result<(), Value> {
    if !s.is_commutative() {
        return Ok(());
    }
    for i in ideals_of(s)? {
        let (q, _) = rees_quotient(s, &i).map_err(|e| json!({ "error": e.to_string() }))?;
        let c = decide_c_closed_commutative(Subject::Finite(&q), DEFAULT_BUDGET)
            .map_err(|e| json!({ "ideal": i.as_slice(), "error": e.to_string() }))?;
        let d = decide_ideally_closed_commutative(Subject::Finite(&q), DEFAULT_BUDGET)
            .map_err(|e| json!({ "ideal": i.as_slice(), "error": e.to_string() }))?;
        ensure(
            c.verdict.status == Status::Holds && d.verdict.status == Status::Holds,
            || json!({ "ideal": i.as_slice(), "c_closed": c.verdict.status, "ideally_closed": d.verdict.status }),
        )?;
    }
    Ok(())
}

fn inv_center_necessary(s: &FiniteSemigroup) -> Result<(), Value> {
    let r = audit_center_necessary(Subject::Finite(s), DEFAULT_BUDGET);
    ensure(
        r.verdict.status == Status::Holds,
        || json!({ "status": r.verdict.status }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::find_isomorphism;

    fn counts(policy: DedupPolicy) -> Vec<usize> {
        (1..=3)
            .map(|n| enumerate_semigroups(n, policy, false).unwrap().len())
            .collect()
    }

    /// All `n^(n^2)` tables, associative ones kept, deduplicated by pairwise
    /// isomorphism (and anti-isomorphism when asked).
    fn naive_count(n: usize, anti: bool) -> usize {
        let cells = n * n;
        let mut reps: Vec<FiniteSemigroup> = Vec::new();
        for code in 0..n.pow(cells as u32) {
            let mut c = code;
            let flat: Vec<usize> = (0..cells)
                .map(|_| {
                    let v = c % n;
                    c /= n;
                    v
                })
                .collect();
            let Ok(s) = FiniteSemigroup::from_rows(flat.chunks(n).map(|r| r.to_vec()).collect()) else {
                continue;
            };
            let known = reps
                .iter()
                .any(|r| find_isomorphism(r, &s).is_some() || (anti && find_isomorphism(r, &s.opposite()).is_some()));
            if !known {
                reps.push(s);
            }
        }
        reps.len()
    }

    #[test]
    fn small_counts_match_naive_oracle() {
        let naive_iso: Vec<usize> = (1..=3).map(|n| naive_count(n, false)).collect();
        let naive_anti: Vec<usize> = (1..=3).map(|n| naive_count(n, true)).collect();
        assert_eq!(counts(DedupPolicy::Iso), naive_iso);
        assert_eq!(counts(DedupPolicy::IsoAnti), naive_anti);
    }

    #[test]
    fn order_limits() {
        assert!(matches!(
            enumerate_semigroups(5, DedupPolicy::Iso, false),
            Err(CorpusError::OrderTooLarge { order: 5, max: 4 })
        ));
        assert!(matches!(
            enumerate_semigroups(6, DedupPolicy::Iso, true),
            Err(CorpusError::OrderTooLarge { order: 6, max: 5 })
        ));
        assert!(enumerate_semigroups(0, DedupPolicy::Iso, true).is_err());
    }

    #[test]
    fn entries_are_canonical_and_distinct() {
        let entries = enumerate_semigroups(3, DedupPolicy::Iso, false).unwrap();
        for e in &entries {
            assert_eq!(canonical_form(&e.semigroup, DedupPolicy::Iso), e.semigroup);
        }
        let mut hashes: Vec<&str> = entries.iter().map(|e| e.canonical_hash.as_str()).collect();
        hashes.dedup();
        assert_eq!(hashes.len(), entries.len());
    }

    #[test]
    fn canonical_hash_is_isomorphism_invariant() {
        let s = FiniteSemigroup::from_rows(vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 1, 2]]).unwrap();
        let t = s.relabel(&[2, 0, 1]);
        assert_eq!(
            canonical_hash(&s, DedupPolicy::Iso),
            canonical_hash(&t, DedupPolicy::Iso)
        );
        let l2 = FiniteSemigroup::from_rows(vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert_ne!(
            canonical_hash(&l2, DedupPolicy::Iso),
            canonical_hash(&l2.opposite(), DedupPolicy::Iso)
        );
        assert_eq!(
            canonical_hash(&l2, DedupPolicy::IsoAnti),
            canonical_hash(&l2.opposite(), DedupPolicy::IsoAnti)
        );
    }

    #[test]
    fn flags() {
        let z2 = FiniteSemigroup::from_rows(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(
            Flags::of(&z2),
            Flags {
                commutative: true,
                band: false,
                group: true,
                monoid: true
            }
        );
        let l2 = FiniteSemigroup::from_rows(vec![vec![0, 0], vec![1, 1]]).unwrap();
        assert_eq!(
            Flags::of(&l2),
            Flags {
                commutative: false,
                band: true,
                group: false,
                monoid: false
            }
        );
    }

    #[test]
    fn ndjson_round_trip() {
        let entries = enumerate_semigroups(2, DedupPolicy::Iso, false).unwrap();
        let mut buf = Vec::new();
        write_ndjson(&entries, &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), entries.len());
        assert_eq!(read_ndjson(buf.as_slice()).unwrap(), entries);
        assert!(matches!(
            read_ndjson("{}\n".as_bytes()),
            Err(CorpusError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn lemma_suite_on_order_three() {
        let corpus: Vec<FiniteSemigroup> = corpus_up_to(3, DedupPolicy::Iso, false)
            .unwrap()
            .into_iter()
            .map(|e| e.semigroup)
            .collect();
        let report = run_invariant_suite(&corpus, Suite::Lemmas);
        assert_eq!(report.total, 30);
        assert!(report.violations.is_empty(), "{:?}", report.violations);
        assert!(report.checks.values().all(|&c| c == 30));
    }

    #[test]
    fn corrupted_table_is_reported() {
        let broken =
            FiniteSemigroup::from_rows_unchecked(vec!["a".into(), "b".into()], vec![vec![1, 0], vec![0, 0]]).unwrap();
        let report = run_invariant_suite(&[broken], Suite::All);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.invariant, "associativity");
        let json = serde_json::to_string(v).unwrap();
        let back: Violation = serde_json::from_str(&json).unwrap();
        assert!(recheck_violation(&back));
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(
            run_suite_by_name(&[], "everything"),
            Err(CorpusError::UnknownSuite(_))
        ));
        assert_eq!(
            Suite::All.invariants().len(),
            LEMMAS.len() + QUOTIENTS.len() + CLOSEDNESS.len() - 2
        );
    }
}
