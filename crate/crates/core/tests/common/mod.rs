//! Brute-force oracles shared by the integration tests. Nothing here calls
//! the library's structure code; only table access is reused.

#![allow(dead_code)]

use std::collections::BTreeSet;

use sgx::corpus::{corpus_up_to, DedupPolicy};
use sgx::table::{find_isomorphism, FiniteSemigroup};

pub fn corpus(max_order: usize) -> Vec<FiniteSemigroup> {
    corpus_up_to(max_order, DedupPolicy::Iso, false)
        .unwrap()
        .into_iter()
        .map(|e| e.semigroup)
        .collect()
}

pub fn from_flat(n: usize, flat: &[usize]) -> Vec<Vec<usize>> {
    flat.chunks(n).map(|r| r.to_vec()).collect()
}

/// Every `n x n` table over `0..n`, in base-`n` counting order.
pub fn all_tables(n: usize) -> impl Iterator<Item = Vec<Vec<usize>>> {
    let cells = n * n;
    (0..n.pow(cells as u32)).map(move |mut code| {
        let flat: Vec<usize> = (0..cells)
            .map(|_| {
                let v = code % n;
                code /= n;
                v
            })
            .collect();
        from_flat(n, &flat)
    })
}

pub fn is_associative(t: &[Vec<usize>]) -> bool {
    let n = t.len();
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| t[t[a][b]][c] == t[a][t[b][c]])))
}

/// Representatives of all semigroups of order `n` found by filtering every
/// table and deduplicating by pairwise isomorphism search.
pub fn naive_classes(n: usize, anti: bool) -> Vec<FiniteSemigroup> {
    let mut reps: Vec<FiniteSemigroup> = Vec::new();
    for t in all_tables(n).filter(|t| is_associative(t)) {
        let s = FiniteSemigroup::from_rows(t).unwrap();
        let known = reps
            .iter()
            .any(|r| find_isomorphism(r, &s).is_some() || (anti && find_isomorphism(r, &s.opposite()).is_some()));
        if !known {
            reps.push(s);
        }
    }
    reps
}

/// Every labelled semigroup of order `n`, built row by row and checked for
/// associativity on the rows fixed so far.
pub fn labelled_semigroups(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rows_ok(t: &[Vec<usize>]) -> bool {
        let k = t.len();
        for a in 0..k {
            for b in 0..t[0].len() {
                let ab = t[a][b];
                if ab >= k {
                    continue;
                }
                for c in 0..t[0].len() {
                    if b < k && t[ab][c] != t[a][t[b][c]] {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn extend(n: usize, t: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if t.len() == n {
            if is_associative(t) {
                out.push(t.clone());
            }
            return;
        }
        for code in 0..n.pow(n as u32) {
            let mut c = code;
            let row: Vec<usize> = (0..n)
                .map(|_| {
                    let v = c % n;
                    c /= n;
                    v
                })
                .collect();
            t.push(row);
            if rows_ok(t) {
                extend(n, t, out);
            }
            t.pop();
        }
    }
    let mut out = Vec::new();
    extend(n, &mut Vec::new(), &mut out);
    out
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn automorphisms(s: &FiniteSemigroup) -> usize {
    permutations(s.order())
        .into_iter()
        .filter(|p| {
            s.elements()
                .all(|x| s.elements().all(|y| p[s.mul(x, y)] == s.mul(p[x], p[y])))
        })
        .count()
}

pub type Set = BTreeSet<usize>;

pub fn right_ideal_1(s: &FiniteSemigroup, a: usize) -> Set {
    let mut r: Set = s.elements().map(|x| s.mul(a, x)).collect();
    r.insert(a);
    r
}

pub fn left_ideal_1(s: &FiniteSemigroup, a: usize) -> Set {
    let mut l: Set = s.elements().map(|x| s.mul(x, a)).collect();
    l.insert(a);
    l
}

pub fn h_class(s: &FiniteSemigroup, a: usize) -> Set {
    s.elements()
        .filter(|&x| right_ideal_1(s, x) == right_ideal_1(s, a) && left_ideal_1(s, x) == left_ideal_1(s, a))
        .collect()
}

pub fn idempotents(s: &FiniteSemigroup) -> Set {
    s.elements().filter(|&x| s.mul(x, x) == x).collect()
}

pub fn powers(s: &FiniteSemigroup, x: usize) -> Vec<usize> {
    let mut out = vec![x];
    for _ in 0..s.order() {
        let last = *out.last().unwrap();
        out.push(s.mul(last, x));
    }
    out
}

pub fn roots_all(s: &FiniteSemigroup, a: &Set) -> Set {
    s.elements()
        .filter(|&x| powers(s, x).iter().any(|p| a.contains(p)))
        .collect()
}

pub fn center(s: &FiniteSemigroup) -> Set {
    s.elements()
        .filter(|&z| s.elements().all(|x| s.mul(z, x) == s.mul(x, z)))
        .collect()
}

pub fn is_ideal(s: &FiniteSemigroup, i: &Set) -> bool {
    i.iter().all(|&x| {
        s.elements()
            .all(|y| i.contains(&s.mul(x, y)) && i.contains(&s.mul(y, x)))
    })
}

pub fn subsets(n: usize) -> impl Iterator<Item = Set> {
    (0u32..1 << n).map(move |m| (0..n).filter(|&x| m >> x & 1 == 1).collect())
}

pub fn ideals(s: &FiniteSemigroup) -> Vec<Set> {
    subsets(s.order()).filter(|i| is_ideal(s, i)).collect()
}

/// Union of all ideals inside the center.
pub fn ideal_center(s: &FiniteSemigroup) -> Set {
    let z = center(s);
    ideals(s).into_iter().filter(|i| i.is_subset(&z)).flatten().collect()
}

pub fn is_viable(s: &FiniteSemigroup, e: usize) -> bool {
    let he = h_class(s, e);
    let outside: Set = s
        .elements()
        .filter(|&x| !(s.mul(x, e) == s.mul(e, x) && he.contains(&s.mul(x, e))))
        .collect();
    is_ideal(s, &outside)
}

pub fn viable(s: &FiniteSemigroup) -> Set {
    idempotents(s).into_iter().filter(|&e| is_viable(s, e)).collect()
}

/// Elements lying in some subgroup: those `x` with `x = x^(k+1)` for some
/// `k >= 1`.
pub fn clifford(s: &FiniteSemigroup) -> Set {
    s.elements().filter(|&x| powers(s, x)[1..].contains(&x)).collect()
}

pub fn viable_root_set(s: &FiniteSemigroup) -> Set {
    let z = center(s);
    let r = roots_all(s, &viable(s));
    let h = clifford(s);
    s.elements()
        .filter(|x| z.contains(x) && r.contains(x) && !h.contains(x))
        .collect()
}

pub fn group_inverse(s: &FiniteSemigroup, he: &Set, e: usize, x: usize) -> Option<usize> {
    he.iter().copied().find(|&y| s.mul(x, y) == e && s.mul(y, x) == e)
}

pub fn l2() -> FiniteSemigroup {
    sgx::table::validate_cayley(vec!["a".into(), "b".into()], vec![vec![0, 0], vec![1, 1]]).unwrap()
}

pub fn chain(n: usize) -> FiniteSemigroup {
    FiniteSemigroup::from_rows((0..n).map(|i| (0..n).map(|j| i.min(j)).collect()).collect()).unwrap()
}

pub fn cyclic(n: usize) -> FiniteSemigroup {
    FiniteSemigroup::from_rows((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect()).unwrap()
}
