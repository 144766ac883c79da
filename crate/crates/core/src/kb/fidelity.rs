//! Set-level comparisons between knowledge bases.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::scalar::{ratio_or, Rational};

use super::atom::{GroundAtom, KnowledgeBase};
use super::engine::ProofSystem;
use super::irredundant::extract_core;

/// Jaccard index of the two deductive closures (`0/0 = 1`).
pub fn closure_fidelity(s: &BTreeSet<GroundAtom>, s_hat: &BTreeSet<GroundAtom>, ps: &ProofSystem) -> Rational {
    let a = ps.closure(s);
    let b = ps.closure(s_hat);
    let inter = a.intersection(&b).count();
    let union = a.len() + b.len() - inter;
    ratio_or(inter, union, Rational::from_integer(1))
}

/// Fraction of the sender's irredundant core present in `receiver_vocab`
/// (`0/0 = 1`).
pub fn core_preservation_ratio(
    sender: &KnowledgeBase,
    receiver_vocab: &BTreeSet<GroundAtom>,
    ps: &ProofSystem,
) -> Rational {
    let core = extract_core(sender, ps).core;
    let kept = core.intersection(receiver_vocab).count();
    ratio_or(kept, core.len(), Rational::from_integer(1))
}

/// `(kb \ lost) ∪ spurious`, with `lost ⊆ kb` and `spurious ∩ kb = ∅`.
pub fn perturb(
    kb: &KnowledgeBase,
    lost: &BTreeSet<GroundAtom>,
    spurious: &BTreeSet<GroundAtom>,
) -> Result<KnowledgeBase> {
    let missing: Vec<String> = lost
        .iter()
        .filter(|a| !kb.contains(a))
        .map(ToString::to_string)
        .collect();
    if !missing.is_empty() {
        return Err(Error::Precondition(format!(
            "lost atoms not in the base: {}",
            missing.join(", ")
        )));
    }
    let clash: Vec<String> = spurious
        .iter()
        .filter(|a| kb.contains(a))
        .map(ToString::to_string)
        .collect();
    if !clash.is_empty() {
        return Err(Error::Precondition(format!(
            "spurious atoms already in the base: {}",
            clash.join(", ")
        )));
    }
    Ok(kb
        .iter()
        .filter(|a| !lost.contains(a))
        .chain(spurious.iter())
        .cloned()
        .collect())
}
