//! Random small Datalog instances and a brute-force fixpoint oracle.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::Config;

use semchan::kb::{parse_kb, GroundAtom, KnowledgeBase, ProofSystem};

pub mod props;

pub const CASES: u32 = 256;

pub fn config() -> Config {
    Config {
        cases: CASES,
        failure_persistence: None,
        ..Config::default()
    }
}

const CONSTS: [&str; 5] = ["a", "b", "c", "d", "e"];

/// `(predicate, variable indices)`.
type Lit = (&'static str, &'static [usize]);

/// Rule pool over Edge/2, Path/2 and Node/1. With at most five constants the
/// grounded universe has at most 2·25 + 5 = 55 atoms.
pub const RULES: [(Lit, &[Lit], &str); 6] = [
    (("Path", &[0, 1]), &[("Edge", &[0, 1])], "Path(X,Y) :- Edge(X,Y)."),
    (
        ("Path", &[0, 2]),
        &[("Edge", &[0, 1]), ("Path", &[1, 2])],
        "Path(X,Z) :- Edge(X,Y), Path(Y,Z).",
    ),
    (("Node", &[0]), &[("Edge", &[0, 1])], "Node(X) :- Edge(X,Y)."),
    (("Edge", &[1, 0]), &[("Edge", &[0, 1])], "Edge(Y,X) :- Edge(X,Y)."),
    (
        ("Node", &[1]),
        &[("Path", &[0, 1]), ("Node", &[0])],
        "Node(Y) :- Path(X,Y), Node(X).",
    ),
    (("Path", &[0, 0]), &[("Node", &[0])], "Path(X,X) :- Node(X)."),
];

pub const HERBRAND_MAX: usize = 2 * 25 + 5;

#[derive(Clone, Debug)]
pub struct Instance {
    pub rules: Vec<usize>,
    pub domain: usize,
    pub facts: BTreeSet<GroundAtom>,
    pub ps: ProofSystem,
}

impl Instance {
    pub fn kb(&self) -> KnowledgeBase {
        self.facts.clone().into()
    }
}

fn atom(pred: &str, args: &[&str]) -> GroundAtom {
    GroundAtom::new(pred, args.iter().copied()).unwrap()
}

/// Every ground atom over the first `domain` constants.
pub fn herbrand(domain: usize) -> Vec<GroundAtom> {
    let c = &CONSTS[..domain];
    let mut out = Vec::new();
    for p in ["Edge", "Path"] {
        for x in c {
            for y in c {
                out.push(atom(p, &[x, y]));
            }
        }
    }
    out.extend(c.iter().map(|x| atom("Node", &[x])));
    out
}

pub fn program_text(rules: &[usize]) -> String {
    rules.iter().map(|&r| format!("{}\n", RULES[r].2)).collect()
}

pub fn proof_system(rules: &[usize]) -> ProofSystem {
    parse_kb(&program_text(rules)).unwrap().1
}

fn rule_set() -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..RULES.len()).collect::<Vec<_>>(), 1..=RULES.len())
}

/// A rule subset, a domain of 2..=5 constants and a random fact set over it.
pub fn instance(max_facts: usize) -> impl Strategy<Value = Instance> {
    (rule_set(), 2usize..=5).prop_flat_map(move |(rules, domain)| {
        let universe = herbrand(domain);
        let n = universe.len();
        proptest::sample::subsequence(universe, 1..=max_facts.min(n)).prop_map(move |facts| Instance {
            ps: proof_system(&rules),
            rules: rules.clone(),
            domain,
            facts: facts.into_iter().collect(),
        })
    })
}

/// One naive immediate-consequence step by enumerating every variable
/// assignment over the constants of `gamma`.
pub fn naive_step(rules: &[usize], gamma: &BTreeSet<GroundAtom>) -> BTreeSet<GroundAtom> {
    let consts: Vec<String> = gamma
        .iter()
        .flat_map(|a| a.args().iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = gamma.clone();
    for &r in rules {
        let (head, body, _) = RULES[r];
        let nvars = 1 + body.iter().flat_map(|(_, v)| v.iter()).copied().max().unwrap_or(0);
        let total = consts.len().pow(nvars as u32);
        for code in 0..total {
            let mut digits = Vec::with_capacity(nvars);
            let mut c = code;
            for _ in 0..nvars {
                digits.push(c % consts.len());
                c /= consts.len();
            }
            let ground = |(p, vars): &Lit| {
                let args: Vec<&str> = vars.iter().map(|&v| consts[digits[v]].as_str()).collect();
                atom(p, &args)
            };
            if body.iter().all(|l| gamma.contains(&ground(l))) {
                out.insert(ground(&head));
            }
        }
    }
    out
}

/// Naive iteration `T⁰ = Γ, Tⁿ⁺¹ = T_PS(Tⁿ) ∪ Tⁿ` to the fixpoint; returns
/// every generation.
pub fn naive_generations(rules: &[usize], gamma: &BTreeSet<GroundAtom>) -> Vec<BTreeSet<GroundAtom>> {
    let mut gens = vec![gamma.clone()];
    loop {
        let next = naive_step(rules, gens.last().unwrap());
        if &next == gens.last().unwrap() {
            return gens;
        }
        gens.push(next);
    }
}

pub fn naive_closure(rules: &[usize], gamma: &BTreeSet<GroundAtom>) -> BTreeSet<GroundAtom> {
    naive_generations(rules, gamma).pop().unwrap()
}

pub fn naive_depth(rules: &[usize], s: &GroundAtom, gamma: &BTreeSet<GroundAtom>) -> Option<u32> {
    naive_generations(rules, gamma)
        .iter()
        .position(|g| g.contains(s))
        .map(|d| d as u32)
}

/// Random pmf over `n` points with strictly positive mass.
pub fn pmf(n: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(1u32..100, n).prop_map(|w| {
        let t: u32 = w.iter().sum();
        w.iter().map(|&x| f64::from(x) / f64::from(t)).collect()
    })
}

/// Random `n × m` row-stochastic float matrix; zeros appear with some
/// probability but every row keeps mass.
pub fn stochastic(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(0u32..6, m), n).prop_map(|rows| {
        rows.into_iter()
            .map(|mut r| {
                if r.iter().all(|&x| x == 0) {
                    r[0] = 1;
                }
                let t: u32 = r.iter().sum();
                r.iter().map(|&x| f64::from(x) / f64::from(t)).collect()
            })
            .collect()
    })
}

pub fn space(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}
