//! Immediate-consequence operator and semi-naive fixpoint evaluation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

use super::atom::{signature, AtomPattern, GroundAtom, Rule, Term};

/// Default cap on the grounded atom universe.
pub const DEFAULT_GUARD: u128 = 1_000_000;

/// Derivation depth of an atom relative to a base; `Infinite` when the atom
/// is not in the closure of the base.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Depth {
    Finite(u32),
    Infinite,
}

impl Depth {
    pub fn finite(self) -> Option<u32> {
        match self {
            Depth::Finite(d) => Some(d),
            Depth::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Depth::Finite(_))
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(d) => write!(f, "{d}"),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Finite(d) => serializer.serialize_u32(*d),
            Depth::Infinite => serializer.serialize_str("inf"),
        }
    }
}

type Index<'a> = HashMap<&'a str, Vec<&'a GroundAtom>>;

fn index<'a>(atoms: impl IntoIterator<Item = &'a GroundAtom>) -> Index<'a> {
    let mut idx: Index<'a> = HashMap::new();
    for a in atoms {
        idx.entry(a.predicate()).or_default().push(a);
    }
    idx
}

/// Extends `binding` so that `pattern` matches `fact`. Returns the number of
/// bindings pushed, or `None` (with `binding` restored) on mismatch.
fn unify<'a>(pattern: &'a AtomPattern, fact: &'a GroundAtom, binding: &mut Vec<(&'a str, &'a str)>) -> Option<usize> {
    if pattern.terms.len() != fact.arity() {
        return None;
    }
    let mark = binding.len();
    for (t, arg) in pattern.terms.iter().zip(fact.args()) {
        let ok = match t {
            Term::Const(c) => c == arg,
            Term::Var(v) => match binding.iter().find(|(name, _)| *name == v.as_str()) {
                Some((_, bound)) => *bound == arg.as_str(),
                None => {
                    binding.push((v.as_str(), arg.as_str()));
                    true
                }
            },
        };
        if !ok {
            binding.truncate(mark);
            return None;
        }
    }
    Some(binding.len() - mark)
}

/// Variable name to constant.
type Binding<'a> = [(&'a str, &'a str)];

fn join<'a>(
    patterns: &[&'a AtomPattern],
    sources: &[&Index<'a>],
    binding: &mut Vec<(&'a str, &'a str)>,
    emit: &mut dyn FnMut(&Binding<'a>),
) {
    let Some((first, rest)) = patterns.split_first() else {
        emit(binding);
        return;
    };
    let Some(candidates) = sources[0].get(first.predicate.as_str()) else {
        return;
    };
    for fact in candidates {
        if let Some(pushed) = unify(first, fact, binding) {
            join(rest, &sources[1..], binding, emit);
            binding.truncate(binding.len() - pushed);
        }
    }
}

/// A finite set of Horn rules with a cap on the grounded universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofSystem {
    rules: Vec<Rule>,
    guard: u128,
}

impl Default for ProofSystem {
    fn default() -> Self {
        Self::new(Vec::new())
    }
}

impl ProofSystem {
    pub fn new(rules: Vec<Rule>) -> Self {
        Self {
            rules,
            guard: DEFAULT_GUARD,
        }
    }

    pub fn with_guard(mut self, guard: u128) -> Self {
        self.guard = guard;
        self
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn guard(&self) -> u128 {
        self.guard
    }

    /// Constants of `base` together with the constants named in the rules.
    pub fn domain<'a>(&'a self, base: impl IntoIterator<Item = &'a GroundAtom>) -> BTreeSet<&'a str> {
        let mut d: BTreeSet<&str> = BTreeSet::new();
        for a in base {
            d.extend(a.args().iter().map(String::as_str));
        }
        for r in &self.rules {
            d.extend(r.constants());
        }
        d
    }

    /// Size of the grounded atom universe over the signature and domain of
    /// `base` and the rules (saturating).
    pub fn herbrand_size<'a>(&'a self, base: impl IntoIterator<Item = &'a GroundAtom> + Clone) -> u128 {
        let n = self.domain(base.clone()).len() as u128;
        signature(base, &self.rules)
            .values()
            .flatten()
            .map(|&arity| (0..arity).fold(1u128, |acc, _| acc.saturating_mul(n)))
            .fold(0u128, u128::saturating_add)
    }

    pub fn check_guard<'a>(&'a self, base: impl IntoIterator<Item = &'a GroundAtom> + Clone) -> Result<u128> {
        let size = self.herbrand_size(base);
        if size > self.guard {
            Err(Error::GuardExceeded {
                size,
                guard: self.guard,
            })
        } else {
            Ok(size)
        }
    }

    fn fire<'a>(&'a self, all: &Index<'a>, delta: Option<&Index<'a>>, out: &mut BTreeSet<GroundAtom>) {
        let mut binding = Vec::new();
        for rule in &self.rules {
            let body: Vec<&AtomPattern> = rule.body().iter().collect();
            let mut emit = |b: &[(&str, &str)]| {
                out.insert(rule.head().ground(b));
            };
            match delta {
                None => {
                    let sources = vec![all; body.len()];
                    join(&body, &sources, &mut binding, &mut emit);
                }
                Some(delta) => {
                    for pivot in 0..body.len() {
                        // Pivot first so the delta restricts the search early.
                        let mut order = Vec::with_capacity(body.len());
                        let mut sources = Vec::with_capacity(body.len());
                        order.push(body[pivot]);
                        sources.push(delta);
                        for (j, p) in body.iter().enumerate() {
                            if j != pivot {
                                order.push(*p);
                                sources.push(all);
                            }
                        }
                        join(&order, &sources, &mut binding, &mut emit);
                    }
                }
            }
        }
    }

    /// One application of the immediate-consequence operator.
    pub fn tps_step(&self, gamma: &BTreeSet<GroundAtom>) -> BTreeSet<GroundAtom> {
        let all = index(gamma);
        let mut out = gamma.clone();
        self.fire(&all, None, &mut out);
        out
    }

    /// Generations of the fixpoint iteration from `base`: element 0 is the
    /// base itself, element `k` holds the atoms first produced at step `k`.
    /// The last element is never empty (except for an empty base).
    pub fn strata(&self, base: &BTreeSet<GroundAtom>) -> Vec<BTreeSet<GroundAtom>> {
        let mut all: BTreeSet<GroundAtom> = base.clone();
        let mut strata = vec![base.clone()];
        loop {
            let last = strata.last().expect("non-empty");
            if last.is_empty() {
                if strata.len() > 1 {
                    strata.pop();
                }
                break;
            }
            let mut derived = BTreeSet::new();
            {
                let all_idx = index(&all);
                let delta_idx = index(last);
                self.fire(&all_idx, Some(&delta_idx), &mut derived);
            }
            let fresh: BTreeSet<GroundAtom> = derived.into_iter().filter(|a| !all.contains(a)).collect();
            if fresh.is_empty() {
                break;
            }
            all.extend(fresh.iter().cloned());
            strata.push(fresh);
        }
        strata
    }

    /// Least fixpoint of [`tps_step`](Self::tps_step) above `gamma`.
    pub fn closure(&self, gamma: &BTreeSet<GroundAtom>) -> BTreeSet<GroundAtom> {
        self.strata(gamma).into_iter().flatten().collect()
    }

    /// Whether `s` is derivable from `gamma`.
    pub fn entails(&self, gamma: &BTreeSet<GroundAtom>, s: &GroundAtom) -> bool {
        gamma.contains(s) || self.strata(gamma).iter().any(|layer| layer.contains(s))
    }

    /// First iteration index at which `s` appears when iterating from `base`.
    pub fn derivation_depth(&self, s: &GroundAtom, base: &BTreeSet<GroundAtom>) -> Depth {
        self.strata(base)
            .iter()
            .position(|layer| layer.contains(s))
            .map_or(Depth::Infinite, |d| Depth::Finite(d as u32))
    }
}
