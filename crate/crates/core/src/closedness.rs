//! Closedness deciders for commutative semigroups, audits of necessary
//! conditions for arbitrary ones, and the root and B-set computations.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::lazy::{Cardinality, Fact, LazySemigroup};
use crate::predicates::{Predicate, Subject};
use crate::structure::{
    center, clifford_part, h_class, ideal_center, idempotents, lcm, maximal_subgroup, roots_all, viable_idempotents,
};
use crate::table::{ElementSet, FiniteSemigroup};
use crate::verdict::{Status, Verdict, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClosednessError {
    #[error("semigroup is not commutative")]
    NotCommutative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    CClosed,
    IdeallyClosed,
    ProjectivelyClosed,
    CenterNecessary,
    MainTheorem,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::CClosed => "c_closed",
            Claim::IdeallyClosed => "ideally_closed",
            Claim::ProjectivelyClosed => "projectively_closed",
            Claim::CenterNecessary => "center_necessary",
            Claim::MainTheorem => "main_theorem",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosednessReport {
    pub subject: String,
    pub claim: Claim,
    pub verdict: Verdict,
    pub interpretation: String,
    pub components: Vec<Verdict>,
    pub sets: BTreeMap<String, Vec<String>>,
    pub notes: Vec<String>,
}

impl ClosednessReport {
    fn assemble(subject: String, claim: Claim, components: Vec<Verdict>) -> Self {
        let status = Status::conjunction(components.iter().map(|c| c.status));
        let budget_used = components.iter().map(|c| c.budget_used).sum();
        let failing = components.iter().find(|c| c.status == Status::Fails);
        let mut verdict = Verdict::new(
            claim.name(),
            status,
            failing.and_then(|c| c.witness.clone()),
            budget_used,
        );
        verdict.certificate = failing.map(|c| c.predicate.clone());
        let interpretation = match (claim, status) {
            (Claim::CenterNecessary, Status::Holds) => "consistent",
            (Claim::MainTheorem, Status::Holds) => "all statements hold",
            (_, Status::Holds) => "closed",
            (_, Status::Fails) => "not closed",
            (_, Status::Unknown) => "undecided",
        };
        ClosednessReport {
            subject,
            claim,
            verdict,
            interpretation: interpretation.to_string(),
            components,
            sets: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn component(&self, name: &str) -> Option<&Verdict> {
        self.components.iter().find(|c| c.predicate == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

pub fn subject_name(subject: Subject<'_>) -> String {
    match subject {
        Subject::Finite(s) => format!("table:{}", s.content_hash()),
        Subject::Lazy(l) => format!("family:{}", l.name()),
    }
}

fn is_commutative(subject: Subject<'_>) -> bool {
    match subject {
        Subject::Finite(s) => s.is_commutative(),
        Subject::Lazy(l) => l.has(Fact::Commutative),
    }
}

fn nonsingular(subject: Subject<'_>, budget: u64) -> Verdict {
    Predicate::Singular.evaluate(subject, budget).negated("nonsingular")
}

/// Chain-finite, nonsingular, periodic and group-bounded, all evaluated.
pub fn decide_c_closed_commutative(subject: Subject<'_>, budget: u64) -> Result<ClosednessReport, ClosednessError> {
    if !is_commutative(subject) {
        return Err(ClosednessError::NotCommutative);
    }
    let components = vec![
        Predicate::ChainFinite.evaluate(subject, budget),
        nonsingular(subject, budget),
        Predicate::Periodic.evaluate(subject, budget),
        Predicate::GroupBounded.evaluate(subject, budget),
    ];
    Ok(ClosednessReport::assemble(
        subject_name(subject),
        Claim::CClosed,
        components,
    ))
}

/// Chain-finite, group-bounded and Clifford+finite, all evaluated.
pub fn decide_ideally_closed_commutative(
    subject: Subject<'_>,
    budget: u64,
) -> Result<ClosednessReport, ClosednessError> {
    if !is_commutative(subject) {
        return Err(ClosednessError::NotCommutative);
    }
    let components = vec![
        Predicate::ChainFinite.evaluate(subject, budget),
        Predicate::GroupBounded.evaluate(subject, budget),
        Predicate::CliffordPlusFinite.evaluate(subject, budget),
    ];
    let mut report = ClosednessReport::assemble(subject_name(subject), Claim::IdeallyClosed, components);
    report
        .notes
        .push("for commutative semigroups ideal and projective closedness coincide; one verdict serves both".into());
    Ok(report)
}

/// The ideal-closedness verdict relabelled as projective closedness.
pub fn decide_projectively_closed_commutative(
    subject: Subject<'_>,
    budget: u64,
) -> Result<ClosednessReport, ClosednessError> {
    let mut report = decide_ideally_closed_commutative(subject, budget)?;
    report.claim = Claim::ProjectivelyClosed;
    report.verdict.predicate = Claim::ProjectivelyClosed.name().into();
    Ok(report)
}

fn center_checks(subject: Subject<'_>, budget: u64) -> Vec<Verdict> {
    vec![
        Predicate::ChainFinite.evaluate(subject, budget),
        Predicate::Periodic.evaluate(subject, budget),
        nonsingular(subject, budget),
    ]
}

fn empty_center_checks() -> Vec<Verdict> {
    ["chain_finite", "periodic", "nonsingular"]
        .into_iter()
        .map(|p| Verdict::new(p, Status::Holds, Some(Witness::FullCheck { order: 0 }), 0).certified("empty-center"))
        .collect()
}

/// Reads a finite lazy carrier into a table.
fn materialize(l: &LazySemigroup, n: usize) -> FiniteSemigroup {
    let elements = l.prefix(n);
    let rows = elements
        .iter()
        .map(|x| {
            elements
                .iter()
                .map(|y| {
                    let xy = l.product(x, y);
                    elements
                        .iter()
                        .position(|e| *e == xy)
                        .expect("finite carrier is closed")
                })
                .collect()
        })
        .collect();
    let names = elements.iter().map(|x| l.label(x)).collect();
    crate::table::validate_cayley(names, rows).expect("lazy families are associative")
}

/// Checks that the center is chain-finite, periodic and nonsingular. A
/// Fails verdict rules closedness out; Holds is only consistent with it.
pub fn audit_center_necessary(subject: Subject<'_>, budget: u64) -> ClosednessReport {
    let name = subject_name(subject);
    let mut notes = Vec::new();
    let (components, center_names) = match subject {
        Subject::Lazy(l) if l.has(Fact::Commutative) => {
            notes.push("commutative carrier: the center is the whole carrier".into());
            (center_checks(subject, budget), None)
        }
        Subject::Lazy(l) => match l.cardinality() {
            Cardinality::Finite(n) => {
                let s = materialize(l, n);
                let mut components = finite_center_checks(&s, budget);
                for c in &mut components {
                    c.budget_used += (n * n) as u64;
                }
                (components, Some(center(&s).names(&s)))
            }
            Cardinality::Infinite => {
                notes.push("the center of a non-commutative infinite family is not enumerable".into());
                let components = ["chain_finite", "periodic", "nonsingular"]
                    .into_iter()
                    .map(|p| Verdict::unknown(p, 0))
                    .collect();
                (components, None)
            }
        },
        Subject::Finite(s) => (finite_center_checks(s, budget), Some(center(s).names(s))),
    };
    let mut report = ClosednessReport::assemble(name, Claim::CenterNecessary, components);
    if let Some(z) = center_names {
        report.sets.insert("center".into(), z);
    }
    report.notes = notes;
    report
        .notes
        .push("Holds means consistent with closedness, not a proof of it".into());
    report
}

fn finite_center_checks(s: &FiniteSemigroup, budget: u64) -> Vec<Verdict> {
    let z = center(s);
    if z.is_empty() {
        return empty_center_checks();
    }
    let (zs, _) = s.restrict(&z).expect("the center is a subsemigroup");
    center_checks(Subject::Finite(&zs), budget)
}

/// `Z ∩ roots_all(VE) \ H(S)`.
pub fn viable_root_set(s: &FiniteSemigroup) -> ElementSet {
    center(s)
        .intersection(&roots_all(s, &viable_idempotents(s)))
        .difference(&clifford_part(s))
}

fn central_roots_outside(s: &FiniteSemigroup, e: usize, z: &ElementSet) -> ElementSet {
    let he = h_class(s, e);
    roots_all(s, &he).intersection(z).difference(&he)
}

/// Viable idempotents `e` with a central root of `H_e` outside `H_e`.
pub fn b_set(s: &FiniteSemigroup) -> ElementSet {
    let z = center(s);
    ElementSet::from_indices(
        s.order(),
        viable_idempotents(s)
            .iter()
            .filter(|&e| !central_roots_outside(s, e, &z).is_empty()),
    )
}

/// The viable root set lies in the union, over `e ∈ B`, of the central
/// roots of `H_e` outside `H_e`.
pub fn root_containment_check(s: &FiniteSemigroup) -> bool {
    let z = center(s);
    let union = b_set(s).iter().fold(ElementSet::empty(s.order()), |acc, e| {
        acc.union(&central_roots_outside(s, e, &z))
    });
    viable_root_set(s).is_subset(&union)
}

/// Maximal subgroups of the subsemigroup on `subset`, each checked to be a
/// group of exponent dividing the reported lcm. Returns (total size, lcm),
/// or a description of the first failure.
fn subgroup_profile(s: &FiniteSemigroup, subset: &ElementSet) -> Result<(usize, usize), String> {
    if subset.is_empty() {
        return Ok((0, 1));
    }
    let (sub, _) = s.restrict(subset).map_err(|e| e.to_string())?;
    let mut total = 0;
    let mut exponent = 1;
    for e in idempotents(&sub).iter() {
        let g = maximal_subgroup(&sub, e).map_err(|err| err.to_string())?;
        total += g.members.len();
        exponent = lcm(exponent, g.exponent(&sub));
    }
    for e in idempotents(&sub).iter() {
        let g = maximal_subgroup(&sub, e).map_err(|err| err.to_string())?;
        let stray = g.members.iter().find(|&x| sub.pow(x, exponent) != e);
        if let Some(x) = stray {
            return Err(format!("{} does not have exponent {exponent}", sub.name(x)));
        }
    }
    Ok((total, exponent))
}

fn statement(n: usize, result: Result<Witness, String>) -> Verdict {
    let name = format!("statement_{n}");
    match result {
        Ok(w) => Verdict::new(&name, Status::Holds, Some(w), 0),
        Err(detail) => Verdict::new(&name, Status::Fails, None, 0).certified(detail),
    }
}

/// Recomputes the seven subgroup conclusions that every finite semigroup
/// must satisfy. Statements 5 and 6 also assert closedness of `H_e`, which
/// is automatic for finite groups and recorded as `trivial-finite`.
pub fn audit_main_theorem(s: &FiniteSemigroup) -> ClosednessReport {
    let z = center(s);
    let iz = ideal_center(s);
    let z_profile = subgroup_profile(s, &z);
    let iz_profile = subgroup_profile(s, &iz);
    let ve = viable_idempotents(s);

    let mut h_centers = Ok((0usize, 1usize));
    for e in ve.iter() {
        h_centers = h_centers.and_then(|(size, exp)| {
            let g = maximal_subgroup(s, e).map_err(|err| err.to_string())?;
            let zh = g.center(s);
            let (_, k) = subgroup_profile(s, &zh)?;
            Ok((size + zh.len(), lcm(exp, k)))
        });
    }

    let roots = viable_root_set(s);
    let contained = root_containment_check(s);

    let mut components = vec![
        statement(1, z_profile.clone().map(|_| Witness::FullCheck { order: z.len() })),
        statement(2, z_profile.clone().map(|_| Witness::FullCheck { order: z.len() })),
        statement(3, z_profile.map(|(_, k)| Witness::Exponent { exponent: k as u64 })),
        statement(4, iz_profile.map(|(_, k)| Witness::Exponent { exponent: k as u64 })),
        statement(
            5,
            h_centers.clone().map(|(_, k)| Witness::Exponent { exponent: k as u64 }),
        ),
        statement(6, h_centers.map(|(size, _)| Witness::FullCheck { order: size })),
        statement(
            7,
            if contained {
                Ok(Witness::Elements {
                    indices: roots.iter().collect(),
                    labels: roots.names(s),
                })
            } else {
                Err("viable root set is not covered by the B-set union".into())
            },
        ),
    ];
    for c in &mut components[4..6] {
        if c.status == Status::Holds {
            c.certificate = Some("trivial-finite".into());
        }
    }

    let mut report = ClosednessReport::assemble(subject_name(Subject::Finite(s)), Claim::MainTheorem, components);
    report.sets.insert("center".into(), z.names(s));
    report.sets.insert("ideal_center".into(), iz.names(s));
    report.sets.insert("viable_idempotents".into(), ve.names(s));
    report.sets.insert("viable_root_set".into(), roots.names(s));
    report.sets.insert("b_set".into(), b_set(s).names(s));
    report
        .notes
        .push(format!("viable root set has {} elements", roots.len()));
    report.notes.push(format!("root containment: {contained}"));
    report
}
