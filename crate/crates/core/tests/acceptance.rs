//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines always print.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::process::Command;
use std::time::Instant;

use sgx::closedness::{
    audit_main_theorem, decide_c_closed_commutative, decide_ideally_closed_commutative, root_containment_check,
    ClosednessReport,
};
use sgx::corpus::{canonical_hash, enumerate_semigroups, run_invariant_suite, DedupPolicy, Suite};
use sgx::lazy::{
    bounded_boolean, finite_wrap, infinite_null, naturals_plus, omega_min, quasicyclic, Element, LazySemigroup,
};
use sgx::predicates::{recheck, Predicate, Subject};
use sgx::quotients::{congruence_closure, enumerate_ideals, quotient, rees_pairs, rees_quotient};
use sgx::table::{ElementSet, FiniteSemigroup};
use sgx::verdict::{Status, Witness, DEFAULT_BUDGET};

use common::*;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lemma_oracle(s: &FiniteSemigroup) -> Result<(), String> {
    let e_set = idempotents(s);
    let hs: Vec<(usize, Set)> = e_set.iter().map(|&e| (e, h_class(s, e))).collect();
    for (e, he) in &hs {
        for (f, hf) in &hs {
            for &x in he {
                for &y in hf {
                    let xy = s.mul(x, y);
                    if xy != s.mul(y, x) {
                        continue;
                    }
                    let ef = s.mul(*e, *f);
                    let hef = h_class(s, ef);
                    let inv = |h: &Set, id: usize, v: usize| group_inverse(s, h, id, v);
                    let (xi, yi, xyi) = (inv(he, *e, x), inv(hf, *f, y), inv(&hef, ef, xy));
                    let ok = ef == s.mul(*f, *e)
                        && hef.contains(&xy)
                        && matches!((xi, yi, xyi), (Some(a), Some(b), Some(c)) if c == s.mul(a, b) && c == s.mul(b, a));
                    check(ok, format!("commuting group elements x={x} y={y} in {s}"))?;
                }
            }
        }
        for r in roots_all(s, he) {
            for &x in he {
                check(
                    he.contains(&s.mul(r, x)) && he.contains(&s.mul(x, r)),
                    format!("roots times H_{e} in {s}"),
                )?;
            }
        }
    }
    let v = viable(s);
    check(
        e_set.intersection(&ideal_center(s)).all(|e| v.contains(e)),
        format!("central idempotent not viable in {s}"),
    )?;
    let local = s.elements().all(|x| {
        s.elements().all(|y| {
            let e = s.mul(x, y);
            s.mul(e, e) != e || (s.mul(x, e) == s.mul(e, x) && s.mul(y, e) == s.mul(e, y))
        })
    });
    check((v == e_set) == local, format!("viability characterization in {s}"))
}

fn criterion_1(corpus: &[FiniteSemigroup]) -> Outcome {
    let start = Instant::now();
    let report = run_invariant_suite(corpus, Suite::Lemmas);
    let named = [
        "commuting_group_elements",
        "roots_times_group",
        "central_idempotents_viable",
        "viability_characterization",
    ];
    for name in named {
        check(
            report.checks.get(name) == Some(&corpus.len()),
            format!("{name} not run on every table"),
        )?;
        check(
            report.violations_of(name) == 0,
            format!("{name}: {} violations", report.violations_of(name)),
        )?;
    }
    check(
        report.violations.is_empty(),
        format!("{} suite violations", report.violations.len()),
    )?;
    for s in corpus {
        lemma_oracle(s)?;
    }
    Ok(format!(
        "{} semigroups, 4 lemma invariants, 0 violations (suite and brute-force oracle) in {:.2?}",
        corpus.len(),
        start.elapsed()
    ))
}

fn criterion_2(corpus: &[FiniteSemigroup]) -> Outcome {
    let mut nonempty = 0;
    for s in corpus {
        let r = audit_main_theorem(s);
        check(r.components.len() == 7, "audit does not report seven statements")?;
        for c in &r.components {
            check(c.status == Status::Holds, format!("{} fails on {s}", c.predicate))?;
        }
        let expected: Vec<String> = viable_root_set(s).iter().map(|&x| s.name(x).to_string()).collect();
        check(
            r.sets["viable_root_set"] == expected,
            format!("statement-7 set differs from oracle on {s}"),
        )?;
        let Some(Witness::Elements { indices, .. }) = &r.components[6].witness else {
            return Err("statement 7 has no element witness".into());
        };
        check(indices.len() == expected.len(), "statement-7 cardinality mismatch")?;
        check(root_containment_check(s), format!("root containment fails on {s}"))?;
        nonempty += usize::from(!expected.is_empty());
    }
    Ok(format!(
        "{} semigroups, all 7 statements hold, root containment true everywhere ({nonempty} with a nonempty statement-7 set)",
        corpus.len()
    ))
}

fn criterion_3() -> Outcome {
    let mut counts = Vec::new();
    for n in 1..=3 {
        for (policy, anti) in [(DedupPolicy::Iso, false), (DedupPolicy::IsoAnti, true)] {
            let generated = enumerate_semigroups(n, policy, false).map_err(|e| e.to_string())?;
            let naive = naive_classes(n, anti);
            check(
                generated.len() == naive.len(),
                format!(
                    "order {n} {policy}: generator {} vs oracle {}",
                    generated.len(),
                    naive.len()
                ),
            )?;
            let hashes: HashSet<String> = generated.iter().map(|e| e.canonical_hash.clone()).collect();
            for s in &naive {
                check(
                    hashes.contains(&canonical_hash(s, policy)),
                    format!("order {n}: oracle class missing"),
                )?;
            }
            counts.push(format!("{n}/{policy}={}", generated.len()));
        }
    }
    // order 4: every labelled semigroup is accounted for by orbit counting,
    // and a deterministic 1% sample is located among the generated classes
    let generated = enumerate_semigroups(4, DedupPolicy::Iso, false).map_err(|e| e.to_string())?;
    let labelled = labelled_semigroups(4);
    let orbit_total: usize = generated.iter().map(|e| 24 / automorphisms(&e.semigroup)).sum();
    check(
        orbit_total == labelled.len(),
        format!(
            "order 4: orbits cover {orbit_total} labelled tables, oracle found {}",
            labelled.len()
        ),
    )?;
    let hashes: HashSet<String> = generated.iter().map(|e| e.canonical_hash.clone()).collect();
    let sample: Vec<&Vec<Vec<usize>>> = labelled.iter().step_by(100).collect();
    for t in &sample {
        let s = FiniteSemigroup::from_rows((*t).clone()).map_err(|e| e.to_string())?;
        check(
            hashes.contains(&canonical_hash(&s, DedupPolicy::Iso)),
            "order 4: sampled table has no class",
        )?;
    }
    Ok(format!(
        "{}; order 4: {} classes cover all {} labelled tables, {} sampled tables matched",
        counts.join(" "),
        generated.len(),
        labelled.len(),
        sample.len()
    ))
}

fn failing(r: &ClosednessReport) -> Vec<String> {
    r.components
        .iter()
        .filter(|c| c.status == Status::Fails)
        .map(|c| c.predicate.clone())
        .collect()
}

/// Rechecks a lazy Fails witness from raw products, without the library's
/// recheck routine.
fn independent_recheck(l: &LazySemigroup, component: &str, w: &Witness) -> bool {
    match (component, w) {
        ("periodic", Witness::Powers { index, checked, .. }) => {
            let x = l.element(*index).unwrap();
            let mut seen = BTreeSet::new();
            let mut p = x.clone();
            for _ in 0..*checked {
                if l.product(&p, &p) == p || !seen.insert(p.clone()) {
                    return false;
                }
                p = l.product(&p, &x);
            }
            *checked >= 2
        }
        ("group_bounded", Witness::OrderChain { indices, orders, .. }) => {
            indices.len() >= 3
                && indices.iter().zip(orders).all(|(&i, &o)| {
                    let Element::Fraction { exp, .. } = l.element(i).unwrap() else {
                        return false;
                    };
                    2u64.pow(exp) == o
                })
                && orders.windows(2).all(|w| w[0] < w[1] && w[1] % w[0] == 0)
        }
        ("chain_finite", Witness::Elements { indices, .. }) => {
            let xs: Vec<Element> = indices.iter().map(|&i| l.element(i).unwrap()).collect();
            xs.len() >= 2
                && xs.iter().all(|x| {
                    xs.iter().all(|y| {
                        let p = l.product(x, y);
                        p == *x || p == *y
                    })
                })
        }
        // nonsingular fails because some infinite-looking A has AA a singleton
        ("nonsingular", Witness::Elements { indices, .. }) => {
            let xs: Vec<Element> = indices.iter().map(|&i| l.element(i).unwrap()).collect();
            let aa: BTreeSet<Element> = xs.iter().flat_map(|x| xs.iter().map(|y| l.product(x, y))).collect();
            xs.len() >= 2 && aa.len() == 1
        }
        ("clifford_plus_finite", Witness::Elements { indices, .. }) => indices.iter().all(|&i| {
            let x = l.element(i).unwrap();
            // x lies in no subgroup: no power of x returns to x
            let mut p = l.product(&x, &x);
            (0..64).all(|_| {
                let back = p != x;
                p = l.product(&p, &x);
                back
            })
        }),
        _ => false,
    }
}

fn expect_failure(report: &ClosednessReport, family: &LazySemigroup, component: &str) -> Result<String, String> {
    check(
        failing(report) == vec![component.to_string()],
        format!(
            "{}: failing components {:?}, expected [{component}]",
            family.name(),
            failing(report)
        ),
    )?;
    let v = report.component(component).unwrap();
    check(
        recheck(Subject::Lazy(family), v),
        format!("{}: library recheck failed", family.name()),
    )?;
    let w = v.witness.as_ref().ok_or("missing witness")?;
    check(
        independent_recheck(family, component, w),
        format!("{}: independent recheck failed", family.name()),
    )?;
    Ok(format!("{}->{component}", family.name()))
}

fn criterion_4(corpus: &[FiniteSemigroup]) -> Outcome {
    let commutative: Vec<&FiniteSemigroup> = corpus.iter().filter(|s| s.is_commutative()).collect();
    for s in &commutative {
        let r = decide_c_closed_commutative(Subject::Finite(s), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        check(
            r.verdict.status == Status::Holds,
            format!("finite commutative {s} not Holds"),
        )?;
    }
    let mut seen = Vec::new();
    for (family, component) in [
        (naturals_plus(), "periodic"),
        (quasicyclic(2).unwrap(), "group_bounded"),
        (omega_min(), "chain_finite"),
        (infinite_null(), "nonsingular"),
    ] {
        let r = decide_c_closed_commutative(Subject::Lazy(&family), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        check(
            r.verdict.status == Status::Fails,
            format!("{} not Fails", family.name()),
        )?;
        check(r.verdict.budget_used <= 4 * DEFAULT_BUDGET, "budget overrun")?;
        seen.push(expect_failure(&r, &family, component)?);
    }
    Ok(format!(
        "{} finite commutative Holds; {}",
        commutative.len(),
        seen.join(", ")
    ))
}

fn criterion_5(corpus: &[FiniteSemigroup]) -> Outcome {
    let b = bounded_boolean();
    let r = decide_ideally_closed_commutative(Subject::Lazy(&b), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    check(r.verdict.status == Status::Holds, "bounded_boolean not Holds")?;
    let nl = infinite_null();
    let r = decide_ideally_closed_commutative(Subject::Lazy(&nl), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    expect_failure(&r, &nl, "clifford_plus_finite")?;
    let mut quotients = 0;
    let commutative: Vec<&FiniteSemigroup> = corpus.iter().filter(|s| s.is_commutative()).collect();
    for s in &commutative {
        let r = decide_ideally_closed_commutative(Subject::Finite(s), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        check(
            r.verdict.status == Status::Holds,
            format!("finite commutative {s} not Holds"),
        )?;
        for i in ideals(s) {
            let set = ElementSet::from_indices(s.order(), i.iter().copied());
            let (q, _) = rees_quotient(s, &set).map_err(|e| e.to_string())?;
            for decide in [decide_c_closed_commutative, decide_ideally_closed_commutative] {
                let r = decide(Subject::Finite(&q), DEFAULT_BUDGET).map_err(|e| e.to_string())?;
                check(
                    r.verdict.status == Status::Holds,
                    format!("quotient of {s} by {i:?} not Holds"),
                )?;
            }
            quotients += 1;
        }
    }
    Ok(format!(
        "bounded_boolean Holds; infinite_null->clifford_plus_finite; {} finite commutative Holds; {quotients} Rees quotients re-decide Holds",
        commutative.len()
    ))
}

fn kernel(map: &[usize]) -> Vec<Vec<bool>> {
    map.iter().map(|a| map.iter().map(|b| a == b).collect()).collect()
}

fn criterion_6(corpus: &[FiniteSemigroup]) -> Outcome {
    let mut pairs = 0;
    for s in corpus {
        let oracle = ideals(s);
        let library: Vec<Set> = enumerate_ideals(s)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|i| i.iter().collect())
            .collect();
        let (mut a, mut b) = (oracle.clone(), library);
        a.sort();
        b.sort();
        check(a == b, format!("ideal enumeration differs from subset oracle on {s}"))?;
        for i in &oracle {
            let set = ElementSet::from_indices(s.order(), i.iter().copied());
            let (q, map) = rees_quotient(s, &set).map_err(|e| e.to_string())?;
            if !i.is_empty() {
                check(
                    q.order() == s.order() - i.len() + 1,
                    format!("Rees order wrong on {s} / {i:?}"),
                )?;
            }
            let hom = s
                .elements()
                .all(|x| s.elements().all(|y| map[s.mul(x, y)] == q.mul(map[x], map[y])));
            check(hom, format!("Rees map is not a homomorphism on {s} / {i:?}"))?;
            let c = congruence_closure(s, &rees_pairs(&set));
            let (q2, map2) = quotient(s, &c).map_err(|e| e.to_string())?;
            check(
                q2.order() == q.order() && kernel(&map) == kernel(&map2),
                format!("closure path disagrees on {s} / {i:?}"),
            )?;
            pairs += 1;
        }
    }
    Ok(format!(
        "{} semigroups, {pairs} (S, I) pairs, 0 exceptions",
        corpus.len()
    ))
}

fn criterion_7(corpus: &[FiniteSemigroup]) -> Outcome {
    let mut compared = 0;
    for s in corpus {
        let wrapped = finite_wrap(s);
        for p in Predicate::ALL {
            let finite = p.evaluate(Subject::Finite(s), DEFAULT_BUDGET).status;
            let lazy = p.evaluate(Subject::Lazy(&wrapped), DEFAULT_BUDGET).status;
            check(
                finite == lazy,
                format!("{} disagrees on {s}: {finite:?} vs {lazy:?}", p.name()),
            )?;
            compared += 1;
        }
    }
    Ok(format!("{compared} verdict pairs, 0 disagreements"))
}

fn criterion_8() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_sgx");
    let run = |threads: &str| {
        Command::new(exe)
            .args(["audit", "--order", "4", "--suite", "all"])
            .env("SGX_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())
    };
    let outputs = ["1", "4", "1", "8"].map(run);
    let mut bytes = Vec::new();
    for o in outputs {
        let o = o?;
        check(
            o.status.code() == Some(0),
            format!("audit exited with {:?}", o.status.code()),
        )?;
        bytes.push(o.stdout);
    }
    check(bytes.windows(2).all(|w| w[0] == w[1]), "reports differ between runs")?;
    Ok(format!(
        "4 runs (threads 1, 4, 1, 8), {} identical bytes each",
        bytes[0].len()
    ))
}

fn main() {
    let corpus = corpus(4);
    let criteria: Vec<Criterion> = vec![
        ("lemma suite", Box::new(|| criterion_1(&corpus))),
        ("main-theorem audit", Box::new(|| criterion_2(&corpus))),
        ("enumeration oracle agreement", Box::new(criterion_3)),
        ("c-closed decider", Box::new(|| criterion_4(&corpus))),
        ("ideally-closed decider", Box::new(|| criterion_5(&corpus))),
        ("quotient algebra", Box::new(|| criterion_6(&corpus))),
        ("lazy/finite agreement", Box::new(|| criterion_7(&corpus))),
        ("determinism", Box::new(criterion_8)),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
