//! Ground Datalog knowledge bases: parsing, deductive closure, irredundant
//! cores and set-level fidelity.

mod atom;
mod engine;
mod fidelity;
mod irredundant;
mod parse;

pub use atom::{AtomPattern, GroundAtom, KnowledgeBase, Rule, Term};
pub use engine::{Depth, ProofSystem, DEFAULT_GUARD};
pub use fidelity::{closure_fidelity, core_preservation_ratio, perturb};
pub use irredundant::{extract_core, CoreAnalysis};
pub use parse::{parse_kb, parse_kb_with_guard, serialize_kb};
