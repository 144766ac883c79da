use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::sample::{subsequence, Index};

use semchan::distortion::d_closure;
use semchan::kb::{extract_core, GroundAtom};
use semchan::Rational;

use super::super::*;
use super::{run, Check};

pub const ALL: &[(&str, Check)] = &[
    ("herbrand base at most 64", herbrand_base_stays_small),
    ("closure matches naive fixpoint", closure_matches_naive_oracle),
    ("strata match naive generations", strata_match_naive_generations),
    ("closure extensive", extensive),
    ("closure idempotent", idempotent),
    ("closure monotone", monotone),
    (
        "core closure-equivalent and irredundant",
        core_is_closure_equivalent_and_irredundant,
    ),
    ("core matches greedy oracle", core_matches_greedy_oracle),
    (
        "depth oracle and base monotonicity",
        depth_matches_oracle_and_is_base_monotone,
    ),
    (
        "redundant substitution has d_Cn = 0",
        redundant_substitution_has_zero_closure_distortion,
    ),
];

fn with_subset(max_facts: usize) -> impl Strategy<Value = (Instance, Vec<GroundAtom>)> {
    instance(max_facts).prop_flat_map(|i| {
        let facts: Vec<GroundAtom> = i.facts.iter().cloned().collect();
        let n = facts.len();
        (Just(i), subsequence(facts, 0..=n))
    })
}

pub fn herbrand_base_stays_small() -> Result<(), String> {
    run(instance(20), |inst| {
        let size = inst.ps.herbrand_size(&inst.facts);
        prop_assert!(size as usize <= HERBRAND_MAX);
        prop_assert!(herbrand(inst.domain).len() <= 64);
        Ok(())
    })
}

pub fn closure_matches_naive_oracle() -> Result<(), String> {
    run(instance(20), |inst| {
        prop_assert_eq!(inst.ps.closure(&inst.facts), naive_closure(&inst.rules, &inst.facts));
        Ok(())
    })
}

pub fn strata_match_naive_generations() -> Result<(), String> {
    run(instance(12), |inst| {
        let gens = naive_generations(&inst.rules, &inst.facts);
        let strata = inst.ps.strata(&inst.facts);
        prop_assert_eq!(strata.len(), gens.len());
        for (d, layer) in strata.iter().enumerate() {
            let fresh: BTreeSet<GroundAtom> = match d {
                0 => gens[0].clone(),
                _ => gens[d].difference(&gens[d - 1]).cloned().collect(),
            };
            prop_assert_eq!(layer, &fresh);
        }
        Ok(())
    })
}

pub fn extensive() -> Result<(), String> {
    run(instance(20), |inst| {
        prop_assert!(inst.facts.is_subset(&inst.ps.closure(&inst.facts)));
        Ok(())
    })
}

pub fn idempotent() -> Result<(), String> {
    run(instance(20), |inst| {
        let c = inst.ps.closure(&inst.facts);
        prop_assert_eq!(inst.ps.closure(&c), c);
        Ok(())
    })
}

pub fn monotone() -> Result<(), String> {
    run(with_subset(20), |(inst, keep)| {
        let sub: BTreeSet<GroundAtom> = keep.into_iter().collect();
        prop_assert!(inst.ps.closure(&sub).is_subset(&inst.ps.closure(&inst.facts)));
        Ok(())
    })
}

pub fn core_is_closure_equivalent_and_irredundant() -> Result<(), String> {
    run(instance(16), |inst| {
        let a = extract_core(&inst.kb(), &inst.ps);
        prop_assert!(a.core.is_subset(&inst.facts));
        prop_assert_eq!(
            naive_closure(&inst.rules, &a.core),
            naive_closure(&inst.rules, &inst.facts)
        );
        for s in &a.core {
            let mut rest = a.core.clone();
            rest.remove(s);
            prop_assert!(
                !naive_closure(&inst.rules, &rest).contains(s),
                "{} is derivable from the rest",
                s
            );
        }
        prop_assert_eq!(a.atomicity + a.shortcuts.len(), inst.facts.len());
        Ok(())
    })
}

pub fn core_matches_greedy_oracle() -> Result<(), String> {
    run(instance(16), |inst| {
        let mut cur = inst.facts.clone();
        for s in &inst.facts {
            cur.remove(s);
            if !naive_closure(&inst.rules, &cur).contains(s) {
                cur.insert(s.clone());
            }
        }
        prop_assert_eq!(extract_core(&inst.kb(), &inst.ps).core, cur);
        Ok(())
    })
}

pub fn depth_matches_oracle_and_is_base_monotone() -> Result<(), String> {
    run(with_subset(14), |(inst, keep)| {
        let small: BTreeSet<GroundAtom> = keep.into_iter().collect();
        for s in naive_closure(&inst.rules, &inst.facts) {
            let big = inst.ps.derivation_depth(&s, &inst.facts);
            prop_assert_eq!(big.finite(), naive_depth(&inst.rules, &s, &inst.facts));
            // Depth::Infinite orders after every finite depth.
            prop_assert!(big <= inst.ps.derivation_depth(&s, &small));
        }
        Ok(())
    })
}

pub fn redundant_substitution_has_zero_closure_distortion() -> Result<(), String> {
    run((instance(14), any::<Index>()), |(inst, pick)| {
        for s in &inst.facts {
            let mut rest = inst.facts.clone();
            rest.remove(s);
            let derivable = naive_closure(&inst.rules, &rest);
            if !derivable.contains(s) {
                continue;
            }
            let replacements: Vec<&GroundAtom> = derivable.iter().collect();
            let t = replacements[pick.index(replacements.len())];
            prop_assert_eq!(d_closure(s, t, &inst.facts, &inst.ps), Rational::from_integer(0));
        }
        Ok(())
    })
}
