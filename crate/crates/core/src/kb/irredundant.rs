use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::atom::{GroundAtom, KnowledgeBase};
use super::engine::ProofSystem;

/// Irredundant core of a knowledge base with its depth stratification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreAnalysis {
    pub core: BTreeSet<GroundAtom>,
    pub shortcuts: BTreeSet<GroundAtom>,
    /// Depth of every stored atom relative to the core.
    pub depth_by_atom: BTreeMap<GroundAtom, u32>,
    /// Fixpoint generations from the core; `strata[0]` is the core.
    pub strata: Vec<BTreeSet<GroundAtom>>,
    pub atomicity: usize,
    pub max_depth: u32,
}

impl CoreAnalysis {
    pub fn is_core(&self, atom: &GroundAtom) -> bool {
        self.core.contains(atom)
    }

    /// Canonical-first core element, if any.
    pub fn anchor(&self) -> Option<&GroundAtom> {
        self.core.iter().next()
    }

    /// Closure of the core (equal to the closure of the analysed KB).
    pub fn closure(&self) -> BTreeSet<GroundAtom> {
        self.strata.iter().flatten().cloned().collect()
    }
}

/// Greedy irredundantization in canonical order: an atom is dropped when the
/// remaining atoms still derive it.
pub fn extract_core(kb: &KnowledgeBase, ps: &ProofSystem) -> CoreAnalysis {
    let mut current: BTreeSet<GroundAtom> = kb.atoms().clone();
    for s in kb.iter() {
        current.remove(s);
        if !ps.entails(&current, s) {
            current.insert(s.clone());
        }
    }
    let core = current;
    let shortcuts: BTreeSet<GroundAtom> = kb.atoms().difference(&core).cloned().collect();
    let strata = ps.strata(&core);
    let mut depth_by_atom = BTreeMap::new();
    for (d, layer) in strata.iter().enumerate() {
        for a in layer.iter().filter(|a| kb.contains(a)) {
            depth_by_atom.insert(a.clone(), d as u32);
        }
    }
    debug_assert_eq!(depth_by_atom.len(), kb.len());
    let max_depth = depth_by_atom.values().copied().max().unwrap_or(0);
    CoreAnalysis {
        atomicity: core.len(),
        core,
        shortcuts,
        depth_by_atom,
        strata,
        max_depth,
    }
}
