//! Structural subsets of a finite semigroup: idempotents and their natural
//! order, H-classes and maximal subgroups, the Clifford part, the center and
//! ideal center, root sets, and viability of idempotents.

use serde::Serialize;
use thiserror::Error;

use crate::closedness;
use crate::quotients::is_ideal;
use crate::table::{ElementSet, FiniteSemigroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("element {0} is not an idempotent")]
    NotIdempotent(usize),
    #[error("element {a} lies in the coideal of idempotent {e}")]
    NotOutsideCoideal { e: usize, a: usize },
    #[error("H-class of idempotent {e} fails the group axioms: {detail}")]
    GroupAxioms { e: usize, detail: String },
}

pub fn idempotents(s: &FiniteSemigroup) -> ElementSet {
    ElementSet::from_indices(s.order(), s.elements().filter(|&x| s.is_idempotent(x)))
}

/// The natural partial order `e <= f` iff `ef = fe = e` on `E(S)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdempotentOrder {
    pub idempotents: ElementSet,
    /// All pairs `(e, f)` with `e <= f`, reflexive pairs included.
    pub pairs: Vec<(usize, usize)>,
}

impl IdempotentOrder {
    pub fn le(&self, e: usize, f: usize) -> bool {
        self.pairs.binary_search(&(e, f)).is_ok()
    }

    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied().filter(|(e, f)| e != f)
    }

    /// `{x in E : x < e}`.
    pub fn strictly_below(&self, e: usize) -> ElementSet {
        ElementSet::from_indices(
            self.idempotents.universe(),
            self.strict_pairs().filter(|&(_, f)| f == e).map(|(x, _)| x),
        )
    }
}

pub fn natural_order(s: &FiniteSemigroup) -> IdempotentOrder {
    let e = idempotents(s);
    let mut pairs = Vec::new();
    for x in e.iter() {
        for y in e.iter() {
            if s.mul(x, y) == x && s.mul(y, x) == x {
                pairs.push((x, y));
            }
        }
    }
    pairs.sort_unstable();
    IdempotentOrder { idempotents: e, pairs }
}

/// `aS^1` as a membership mask.
fn right_principal(s: &FiniteSemigroup, a: usize) -> Vec<bool> {
    let mut mask = vec![false; s.order()];
    mask[a] = true;
    for x in s.elements() {
        mask[s.mul(a, x)] = true;
    }
    mask
}

/// `S^1a` as a membership mask.
fn left_principal(s: &FiniteSemigroup, a: usize) -> Vec<bool> {
    let mut mask = vec![false; s.order()];
    mask[a] = true;
    for x in s.elements() {
        mask[s.mul(x, a)] = true;
    }
    mask
}

pub fn h_class(s: &FiniteSemigroup, a: usize) -> ElementSet {
    let (ra, la) = (right_principal(s, a), left_principal(s, a));
    ElementSet::from_indices(
        s.order(),
        s.elements()
            .filter(|&x| right_principal(s, x) == ra && left_principal(s, x) == la),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HClassDecomposition {
    /// Classes ordered by their least member.
    pub classes: Vec<ElementSet>,
    /// Whether each class contains an idempotent (and so is a group).
    pub group_flags: Vec<bool>,
    pub class_of: Vec<usize>,
}

pub fn h_classes(s: &FiniteSemigroup) -> HClassDecomposition {
    let keys: Vec<(Vec<bool>, Vec<bool>)> = s
        .elements()
        .map(|x| (right_principal(s, x), left_principal(s, x)))
        .collect();
    let mut class_of = vec![usize::MAX; s.order()];
    let mut classes = Vec::new();
    let mut group_flags = Vec::new();
    for x in s.elements() {
        if class_of[x] != usize::MAX {
            continue;
        }
        let id = classes.len();
        let members: Vec<usize> = (x..s.order()).filter(|&y| keys[y] == keys[x]).collect();
        for &m in &members {
            class_of[m] = id;
        }
        group_flags.push(members.iter().any(|&m| s.is_idempotent(m)));
        classes.push(ElementSet::from_indices(s.order(), members));
    }
    HClassDecomposition {
        classes,
        group_flags,
        class_of,
    }
}

/// `H_e` together with its group structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalSubgroup {
    pub identity: usize,
    pub members: ElementSet,
    /// `(x, x^-1)` for every member, sorted by `x`.
    pub inverses: Vec<(usize, usize)>,
}

impl MaximalSubgroup {
    pub fn inverse(&self, x: usize) -> Option<usize> {
        self.inverses
            .binary_search_by_key(&x, |&(m, _)| m)
            .ok()
            .map(|i| self.inverses[i].1)
    }

    /// Least `n >= 1` with `x^n = e` for every member: the lcm of the
    /// element orders.
    pub fn exponent(&self, s: &FiniteSemigroup) -> usize {
        self.members
            .iter()
            .map(|x| element_order_in_group(s, x, self.identity))
            .fold(1, lcm)
    }

    pub fn center(&self, s: &FiniteSemigroup) -> ElementSet {
        ElementSet::from_indices(
            s.order(),
            self.members
                .iter()
                .filter(|&z| self.members.iter().all(|x| s.mul(z, x) == s.mul(x, z))),
        )
    }
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn element_order_in_group(s: &FiniteSemigroup, x: usize, identity: usize) -> usize {
    let mut power = x;
    let mut k = 1;
    while power != identity {
        power = s.mul(power, x);
        k += 1;
        assert!(k <= s.order() + 1, "element {x} never reaches identity {identity}");
    }
    k
}

fn require_idempotent(s: &FiniteSemigroup, e: usize) -> Result<(), StructureError> {
    if e < s.order() && s.is_idempotent(e) {
        Ok(())
    } else {
        Err(StructureError::NotIdempotent(e))
    }
}

/// `H_e` for an idempotent `e`, with the group axioms checked explicitly.
pub fn maximal_subgroup(s: &FiniteSemigroup, e: usize) -> Result<MaximalSubgroup, StructureError> {
    require_idempotent(s, e)?;
    let members = h_class(s, e);
    let fail = |detail: String| StructureError::GroupAxioms { e, detail };
    let mut inverses = Vec::with_capacity(members.len());
    for x in members.iter() {
        if s.mul(e, x) != x || s.mul(x, e) != x {
            return Err(fail(format!("{e} is not an identity for {x}")));
        }
        for y in members.iter() {
            if !members.contains(s.mul(x, y)) {
                return Err(fail(format!("{x}*{y} leaves the class")));
            }
        }
        let inv: Vec<usize> = members
            .iter()
            .filter(|&y| s.mul(x, y) == e && s.mul(y, x) == e)
            .collect();
        match inv.as_slice() {
            [y] => inverses.push((x, *y)),
            _ => return Err(fail(format!("{x} has {} inverses", inv.len()))),
        }
    }
    Ok(MaximalSubgroup {
        identity: e,
        members,
        inverses,
    })
}

/// `H(S)`: the union of the maximal subgroups.
pub fn clifford_part(s: &FiniteSemigroup) -> ElementSet {
    let decomposition = h_classes(s);
    ElementSet::from_indices(
        s.order(),
        decomposition
            .classes
            .iter()
            .zip(&decomposition.group_flags)
            .filter(|(_, &g)| g)
            .flat_map(|(c, _)| c.iter()),
    )
}

pub fn center(s: &FiniteSemigroup) -> ElementSet {
    ElementSet::from_indices(
        s.order(),
        s.elements()
            .filter(|&z| s.elements().all(|x| s.mul(z, x) == s.mul(x, z))),
    )
}

/// `{z in Z(S) : zS ⊆ Z(S)}`, the largest ideal inside the center.
pub fn ideal_center(s: &FiniteSemigroup) -> ElementSet {
    let z = center(s);
    ElementSet::from_indices(
        s.order(),
        z.iter().filter(|&c| s.elements().all(|x| z.contains(s.mul(c, x)))),
    )
}

/// `{x : x^n in A}` for `n >= 1`.
pub fn roots(s: &FiniteSemigroup, a: &ElementSet, n: usize) -> ElementSet {
    assert!(n >= 1, "root degree starts at 1");
    ElementSet::from_indices(s.order(), s.elements().filter(|&x| a.contains(s.pow(x, n))))
}

/// `{x : x^n in A for some n >= 1}`. Powers of `x` past `index + period`
/// repeat, so the scan for each element stops there.
pub fn roots_all(s: &FiniteSemigroup, a: &ElementSet) -> ElementSet {
    ElementSet::from_indices(
        s.order(),
        s.elements().filter(|&x| {
            let (index, period) = s.power_cycle(x);
            let mut power = x;
            for _ in 1..index + period {
                if a.contains(power) {
                    return true;
                }
                power = s.mul(power, x);
            }
            a.contains(power)
        }),
    )
}

/// `H_e/e = {x : xe = ex ∈ H_e}`.
pub fn coideal_of(s: &FiniteSemigroup, e: usize) -> Result<ElementSet, StructureError> {
    require_idempotent(s, e)?;
    let he = h_class(s, e);
    Ok(ElementSet::from_indices(
        s.order(),
        s.elements().filter(|&x| {
            let xe = s.mul(x, e);
            xe == s.mul(e, x) && he.contains(xe)
        }),
    ))
}

pub fn is_viable(s: &FiniteSemigroup, e: usize) -> Result<bool, StructureError> {
    let coideal = coideal_of(s, e)?;
    Ok(is_ideal(s, &coideal.complement()))
}

/// Idempotents whose coideal has an ideal (possibly empty) complement.
pub fn viable_idempotents(s: &FiniteSemigroup) -> ElementSet {
    ElementSet::from_indices(
        s.order(),
        idempotents(s)
            .iter()
            .filter(|&e| is_viable(s, e).expect("e is idempotent")),
    )
}

/// Every central idempotent is viable.
pub fn is_z_viable(s: &FiniteSemigroup) -> bool {
    let viable = viable_idempotents(s);
    idempotents(s).intersection(&center(s)).is_subset(&viable)
}

/// `G_a = {x ∈ H_e : ax = ae}` for `a` outside the coideal of `e`.
pub fn g_subgroup(s: &FiniteSemigroup, e: usize, a: usize) -> Result<ElementSet, StructureError> {
    let coideal = coideal_of(s, e)?;
    if coideal.contains(a) {
        return Err(StructureError::NotOutsideCoideal { e, a });
    }
    let ae = s.mul(a, e);
    Ok(ElementSet::from_indices(
        s.order(),
        h_class(s, e).iter().filter(|&x| s.mul(a, x) == ae),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HClassEntry {
    pub members: Vec<String>,
    pub group: bool,
}

/// Everything `analyze` reports about one semigroup. Field order is the
/// serialization order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub order: usize,
    pub idempotents: Vec<String>,
    /// Strict pairs `[e, f]` with `e < f`.
    pub natural_order: Vec<[String; 2]>,
    pub h_classes: Vec<HClassEntry>,
    pub center: Vec<String>,
    pub ideal_center: Vec<String>,
    pub viable_idempotents: Vec<String>,
    pub clifford_part: Vec<String>,
    pub z_viable: bool,
    pub viable_root_set: Vec<String>,
    pub b_set: Vec<String>,
}

impl StructureReport {
    pub fn compute(s: &FiniteSemigroup) -> Self {
        let name = |x: usize| s.name(x).to_string();
        let order = natural_order(s);
        let decomposition = h_classes(s);
        StructureReport {
            order: s.order(),
            idempotents: order.idempotents.names(s),
            natural_order: order.strict_pairs().map(|(e, f)| [name(e), name(f)]).collect(),
            h_classes: decomposition
                .classes
                .iter()
                .zip(&decomposition.group_flags)
                .map(|(c, &group)| HClassEntry {
                    members: c.names(s),
                    group,
                })
                .collect(),
            center: center(s).names(s),
            ideal_center: ideal_center(s).names(s),
            viable_idempotents: viable_idempotents(s).names(s),
            clifford_part: clifford_part(s).names(s),
            z_viable: is_z_viable(s),
            viable_root_set: closedness::viable_root_set(s).names(s),
            b_set: closedness::b_set(s).names(s),
        }
    }

    pub fn to_text(&self) -> String {
        let set = |v: &[String]| format!("{{{}}}", v.join(", "));
        let mut out = String::new();
        out.push_str(&format!("order               {}\n", self.order));
        out.push_str(&format!("idempotents         {}\n", set(&self.idempotents)));
        let pairs: Vec<String> = self.natural_order.iter().map(|[e, f]| format!("{e} < {f}")).collect();
        out.push_str(&format!("natural order       {}\n", set(&pairs)));
        let classes: Vec<String> = self
            .h_classes
            .iter()
            .map(|c| format!("{}{}", set(&c.members), if c.group { "*" } else { "" }))
            .collect();
        out.push_str(&format!("H-classes (*=group) {}\n", classes.join(" ")));
        out.push_str(&format!("center              {}\n", set(&self.center)));
        out.push_str(&format!("ideal center        {}\n", set(&self.ideal_center)));
        out.push_str(&format!("viable idempotents  {}\n", set(&self.viable_idempotents)));
        out.push_str(&format!("Clifford part       {}\n", set(&self.clifford_part)));
        out.push_str(&format!("Z-viable            {}\n", self.z_viable));
        out.push_str(&format!("viable root set     {}\n", set(&self.viable_root_set)));
        out.push_str(&format!("B set               {}\n", set(&self.b_set)));
        out
    }
}
