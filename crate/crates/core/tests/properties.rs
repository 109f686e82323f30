mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::select;

use sgx::corpus::{canonical_hash, DedupPolicy};
use sgx::lazy::{quasicyclic, Element};
use sgx::predicates::{Predicate, Subject};
use sgx::quotients::{congruence_closure, enumerate_ideals, is_ideal, quotient, rees_quotient};
use sgx::table::{
    find_isomorphism, generated_subsemigroup, is_homomorphism, one_extension, zero_extension, FiniteSemigroup,
};
use sgx::verdict::{Status, Witness};

fn corpus() -> &'static [FiniteSemigroup] {
    static CORPUS: OnceLock<Vec<FiniteSemigroup>> = OnceLock::new();
    CORPUS.get_or_init(|| common::corpus(4))
}

fn semigroup() -> impl Strategy<Value = FiniteSemigroup> {
    select(corpus().to_vec())
}

/// A corpus member under a random relabelling.
fn relabelled() -> impl Strategy<Value = (FiniteSemigroup, FiniteSemigroup)> {
    semigroup().prop_flat_map(|s| {
        let n = s.order();
        (Just(s), Just((0..n).collect::<Vec<_>>()).prop_shuffle()).prop_map(|(s, perm)| {
            let t = s.relabel(&perm);
            (s, t)
        })
    })
}

proptest! {
    #[test]
    fn relabelling_preserves_the_class((s, t) in relabelled()) {
        prop_assert!(t.first_associativity_violation().is_none());
        prop_assert_eq!(canonical_hash(&s, DedupPolicy::Iso), canonical_hash(&t, DedupPolicy::Iso));
        let map = find_isomorphism(&s, &t);
        prop_assert!(map.is_some());
        prop_assert!(is_homomorphism(&s, &t, &map.unwrap()));
        prop_assert!(find_isomorphism(&t, &s).is_some());
    }

    #[test]
    fn isomorphism_search_is_symmetric(s in semigroup(), t in semigroup()) {
        prop_assert_eq!(find_isomorphism(&s, &t).is_some(), find_isomorphism(&t, &s).is_some());
        prop_assert_eq!(find_isomorphism(&s, &t).is_some(), s == t);
    }

    #[test]
    fn extensions_keep_the_original_table(s in semigroup()) {
        for ext in [zero_extension(&s), one_extension(&s)] {
            prop_assert!(ext.first_associativity_violation().is_none());
            prop_assert_eq!(ext.order(), s.order() + 1);
            for x in s.elements() {
                for y in s.elements() {
                    prop_assert_eq!(ext.mul(x, y), s.mul(x, y));
                }
            }
        }
    }

    #[test]
    fn generation_is_idempotent(s in semigroup(), seeds in prop::collection::vec(0usize..4, 1..4)) {
        let seeds: Vec<usize> = seeds.into_iter().map(|x| x % s.order()).collect();
        let g = generated_subsemigroup(&s, &seeds).unwrap();
        let again = generated_subsemigroup(&s, g.as_slice()).unwrap();
        prop_assert_eq!(&g, &again);
        for &x in &seeds {
            prop_assert!(g.contains(x));
        }
    }

    #[test]
    fn serialization_round_trips(s in semigroup()) {
        prop_assert_eq!(FiniteSemigroup::from_json(&s.to_json()).unwrap(), s.clone());
        prop_assert_eq!(FiniteSemigroup::from_text(&s.to_text()).unwrap().rows(), s.rows());
    }

    #[test]
    fn closures_are_congruences(s in semigroup(), pairs in prop::collection::vec((0usize..4, 0usize..4), 0..3)) {
        let n = s.order();
        let pairs: Vec<(usize, usize)> = pairs.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let c = congruence_closure(&s, &pairs);
        prop_assert!(c.first_incompatibility(&s).is_none());
        for &(a, b) in &pairs {
            prop_assert!(c.related(a, b));
        }
        let (q, map) = quotient(&s, &c).unwrap();
        prop_assert!(q.first_associativity_violation().is_none());
        prop_assert!(is_homomorphism(&s, &q, &map));
    }

    #[test]
    fn rees_quotients(s in semigroup()) {
        for i in enumerate_ideals(&s).unwrap() {
            prop_assert!(is_ideal(&s, &i));
            let (q, map) = rees_quotient(&s, &i).unwrap();
            let expected = if i.is_empty() { s.order() } else { s.order() - i.len() + 1 };
            prop_assert_eq!(q.order(), expected);
            prop_assert!(is_homomorphism(&s, &q, &map));
        }
    }

    #[test]
    fn bounded_exponent_is_least(s in semigroup()) {
        let v = Predicate::Bounded.evaluate(Subject::Finite(&s), 0);
        let Some(Witness::Exponent { exponent }) = v.witness else { panic!("no exponent") };
        let n = exponent as usize;
        let works = |k: usize| s.elements().all(|x| s.is_idempotent(s.pow(x, k)));
        prop_assert!(works(n));
        prop_assert!(n == 1 || !works(n - 1));
    }

    #[test]
    fn quasicyclic_is_associative(p in select(vec![2u64, 3, 5, 7]), i in 0usize..200, j in 0usize..200, k in 0usize..200) {
        let q = quasicyclic(p).unwrap();
        let (x, y, z) = (q.element(i).unwrap(), q.element(j).unwrap(), q.element(k).unwrap());
        prop_assert_eq!(q.product(&q.product(&x, &y), &z), q.product(&x, &q.product(&y, &z)));
        prop_assert_eq!(q.product(&x, &y), q.product(&y, &x));
    }

    #[test]
    fn quasicyclic_orders_grow(p in select(vec![2u64, 3, 5]), n in 1usize..300) {
        let q = quasicyclic(p).unwrap();
        let max_order = q
            .prefix(n)
            .iter()
            .map(|x| match x {
                Element::Fraction { exp, .. } => p.pow(*exp),
                _ => unreachable!(),
            })
            .max()
            .unwrap();
        let mut bound = 1;
        while bound * p <= n as u64 {
            bound *= p;
        }
        prop_assert!(max_order >= bound);
    }

    #[test]
    fn verdict_budgets_are_respected(budget in 0u64..400) {
        for family in ["naturals_plus", "omega_min", "infinite_null", "quasicyclic:2", "bounded_boolean"] {
            let l = sgx::lazy::parse_family(family).unwrap();
            for p in Predicate::ALL {
                let v = p.evaluate(Subject::Lazy(&l), budget);
                prop_assert!(v.budget_used <= budget, "{} {} used {}", family, p.name(), v.budget_used);
                if v.status == Status::Fails {
                    prop_assert!(v.witness.is_some());
                    prop_assert!(sgx::predicates::recheck(Subject::Lazy(&l), &v));
                }
            }
        }
    }
}
