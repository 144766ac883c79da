use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::distortion::{per_input_distortion, DistortionContext, DistortionKind};
use crate::error::Result;
use crate::kb::{extract_core, GroundAtom, KnowledgeBase, ProofSystem};
use crate::kernel::SemanticChannel;

use super::entropy::binary_entropy;

/// Core preservation and spurious-output indices of a semantic channel.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoisePairIndices {
    pub phi_atom: f64,
    pub psi_plus: f64,
    /// Mass each input puts on states shared with the sender.
    pub p_cap: Vec<f64>,
    /// Mass each input puts on spurious states.
    pub p_plus: Vec<f64>,
    /// `κ(a|a)` per core element (0 when `a` is lost).
    pub pi: BTreeMap<GroundAtom, f64>,
}

pub fn noise_pair_indices(chan: &SemanticChannel, core: &BTreeSet<GroundAtom>) -> NoisePairIndices {
    let k = chan.kernel();
    let spurious: Vec<bool> = chan
        .receiver_vocab()
        .iter()
        .map(|t| chan.spurious().contains(t))
        .collect();
    let mut p_cap = Vec::with_capacity(k.n_inputs());
    let mut p_plus = Vec::with_capacity(k.n_inputs());
    for row in k.rows() {
        let plus: f64 = row.iter().zip(&spurious).filter(|(_, s)| **s).map(|(v, _)| v).sum();
        let cap: f64 = row.iter().zip(&spurious).filter(|(_, s)| !**s).map(|(v, _)| v).sum();
        p_plus.push(plus);
        p_cap.push(cap);
    }
    let pi: BTreeMap<GroundAtom, f64> = core
        .iter()
        .map(|a| (a.clone(), chan.prob(a, a).unwrap_or(0.0)))
        .collect();
    let phi_atom = if core.iter().any(|a| chan.lost().contains(a)) {
        0.0
    } else {
        pi.values().copied().fold(1.0, f64::min)
    };
    let psi_plus = p_plus.iter().copied().fold(0.0, f64::max);
    NoisePairIndices {
        phi_atom,
        psi_plus,
        p_cap,
        p_plus,
        pi,
    }
}

/// Worst-case closure fidelity and depth expansion over inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityIndices {
    pub fidelity_index: f64,
    pub depth_expansion: f64,
    pub closure_per_input: Vec<f64>,
    pub depth_per_input: Vec<f64>,
}

pub fn quality_indices(chan: &SemanticChannel, ctx: &DistortionContext) -> Result<QualityIndices> {
    let dc = ctx.matrix(chan.receiver_vocab(), DistortionKind::Closure);
    let dd = ctx.matrix(chan.receiver_vocab(), DistortionKind::Depth);
    let closure_per_input = per_input_distortion(chan, &dc)?;
    let depth_per_input = per_input_distortion(chan, &dd)?;
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(QualityIndices {
        fidelity_index: 1.0 - max(&closure_per_input),
        depth_expansion: max(&depth_per_input),
        closure_per_input,
        depth_per_input,
    })
}

/// Atomicity and depth shifts from sender to receiver vocabulary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralShifts {
    pub delta_a: i64,
    pub delta_dd: i64,
}

pub fn structural_shifts(sender: &KnowledgeBase, receiver: &KnowledgeBase, ps: &ProofSystem) -> StructuralShifts {
    let s = extract_core(sender, ps);
    let r = extract_core(receiver, ps);
    StructuralShifts {
        delta_a: r.atomicity as i64 - s.atomicity as i64,
        delta_dd: i64::from(r.max_depth) - i64::from(s.max_depth),
    }
}

/// `H − h_b(ε) − ε log2(out_size − 1)`, clamped at 0.
pub fn fano_lower_bound(h_source: f64, eps: f64, out_size: usize) -> f64 {
    let eps = eps.clamp(0.0, 1.0);
    let tail = if out_size >= 2 {
        eps * ((out_size - 1) as f64).log2()
    } else {
        0.0
    };
    (h_source - binary_entropy(eps) - tail).max(0.0)
}

/// Alphabet size to use in the Fano bound for a channel: an error can land
/// on any other sender state, or on a reconstruction outside the sender.
pub fn fano_alphabet(chan: &SemanticChannel) -> usize {
    let n = chan.sender().len();
    if chan.spurious().is_empty() {
        n
    } else {
        n + 1
    }
}
