//! Three-valued verdicts with evidence and product-evaluation budgets.

use serde::Serialize;

use crate::lazy::{Element, LazySemigroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

impl Status {
    pub fn negate(self) -> Status {
        match self {
            Status::Holds => Status::Fails,
            Status::Fails => Status::Holds,
            Status::Unknown => Status::Unknown,
        }
    }

    /// Fails dominates, then Unknown, then Holds. The empty conjunction holds.
    pub fn conjunction(statuses: impl IntoIterator<Item = Status>) -> Status {
        statuses.into_iter().fold(Status::Holds, |acc, s| match (acc, s) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Unknown, _) | (_, Status::Unknown) => Status::Unknown,
            _ => Status::Holds,
        })
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Holds => 0,
            Status::Fails => 1,
            Status::Unknown => 2,
        }
    }
}

/// Evidence attached to a verdict. Element witnesses carry enumeration
/// indices so they can be recomputed from the carrier alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// The whole finite carrier was examined.
    FullCheck {
        order: usize,
    },
    /// A finite carrier has no infinite subsets.
    FiniteCarrier {
        order: usize,
    },
    Elements {
        indices: Vec<usize>,
        labels: Vec<String>,
    },
    Exponent {
        exponent: u64,
    },
    /// The first `checked` powers of one element are pairwise distinct and
    /// none is idempotent.
    Powers {
        index: usize,
        label: String,
        checked: usize,
    },
    /// Elements with strictly increasing orders, each dividing the next.
    OrderChain {
        indices: Vec<usize>,
        labels: Vec<String>,
        orders: Vec<u64>,
    },
    /// Elements outside the Clifford part of a finite carrier.
    NonClifford {
        count: usize,
        labels: Vec<String>,
    },
    /// A declared fact settles the predicate.
    Certificate {
        fact: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub predicate: String,
    pub status: Status,
    pub witness: Option<Witness>,
    pub budget_used: u64,
    pub certificate: Option<String>,
}

impl Verdict {
    pub fn new(predicate: &str, status: Status, witness: Option<Witness>, budget_used: u64) -> Self {
        Verdict {
            predicate: predicate.to_string(),
            status,
            witness,
            budget_used,
            certificate: None,
        }
    }

    pub fn certified(mut self, certificate: impl Into<String>) -> Self {
        self.certificate = Some(certificate.into());
        self
    }

    pub fn unknown(predicate: &str, budget_used: u64) -> Self {
        Verdict::new(predicate, Status::Unknown, None, budget_used)
    }

    /// The complementary predicate (e.g. `nonsingular` from `singular`),
    /// keeping the evidence.
    pub fn negated(&self, predicate: &str) -> Self {
        Verdict {
            predicate: predicate.to_string(),
            status: self.status.negate(),
            ..self.clone()
        }
    }
}

/// Counts product evaluations against a limit.
#[derive(Clone, Debug)]
pub struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.used
    }

    /// Evaluates `xy`, or `None` once the budget is spent.
    pub fn product(&mut self, s: &LazySemigroup, x: &Element, y: &Element) -> Option<Element> {
        if self.used >= self.limit {
            return None;
        }
        self.used += 1;
        Some(s.product(x, y))
    }

    /// Records products evaluated outside `product` (finite table lookups).
    pub fn record(&mut self, n: u64) {
        self.used += n;
    }
}

pub const DEFAULT_BUDGET: u64 = 256;
