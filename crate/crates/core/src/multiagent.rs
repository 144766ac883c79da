//! Sender/receiver overlap, closure-fidelity feasibility, blocklength
//! estimates and broadcast bottlenecks.

use std::collections::BTreeSet;

use serde::{Serialize, Serializer};

use crate::kb::{closure_fidelity, extract_core, GroundAtom, KnowledgeBase, ProofSystem};
use crate::scalar::{rational_f64, Rational};

/// The seven-way split of a sender/receiver pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapDecomposition {
    pub common: BTreeSet<GroundAtom>,
    pub lost: BTreeSet<GroundAtom>,
    pub surplus: BTreeSet<GroundAtom>,
    pub preserved_core: BTreeSet<GroundAtom>,
    pub lost_core: BTreeSet<GroundAtom>,
    pub derivable_surplus: BTreeSet<GroundAtom>,
    pub nonderivable_surplus: BTreeSet<GroundAtom>,
}

/// Cardinalities in the order `|S∩|, |S−|, |S+|, |A∩|, |A−|, |S+,d|, |S+,n|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapCounts {
    #[serde(rename = "|S_cap|")]
    pub common: usize,
    #[serde(rename = "|S_-|")]
    pub lost: usize,
    #[serde(rename = "|S_+|")]
    pub surplus: usize,
    #[serde(rename = "|A_cap|")]
    pub preserved_core: usize,
    #[serde(rename = "|A_-|")]
    pub lost_core: usize,
    #[serde(rename = "|S_+,d|")]
    pub derivable_surplus: usize,
    #[serde(rename = "|S_+,n|")]
    pub nonderivable_surplus: usize,
}

impl OverlapCounts {
    pub const FIELDS: [&'static str; 7] = ["|S_cap|", "|S_-|", "|S_+|", "|A_cap|", "|A_-|", "|S_+,d|", "|S_+,n|"];

    pub fn as_array(&self) -> [usize; 7] {
        [
            self.common,
            self.lost,
            self.surplus,
            self.preserved_core,
            self.lost_core,
            self.derivable_surplus,
            self.nonderivable_surplus,
        ]
    }
}

impl OverlapDecomposition {
    pub fn counts(&self) -> OverlapCounts {
        OverlapCounts {
            common: self.common.len(),
            lost: self.lost.len(),
            surplus: self.surplus.len(),
            preserved_core: self.preserved_core.len(),
            lost_core: self.lost_core.len(),
            derivable_surplus: self.derivable_surplus.len(),
            nonderivable_surplus: self.nonderivable_surplus.len(),
        }
    }
}

pub fn overlap(sender: &KnowledgeBase, receiver: &KnowledgeBase, ps: &ProofSystem) -> OverlapDecomposition {
    let s = sender.atoms();
    let r = receiver.atoms();
    let core = extract_core(sender, ps).core;
    let cn = ps.closure(s);
    let surplus: BTreeSet<GroundAtom> = r.difference(s).cloned().collect();
    let (derivable_surplus, nonderivable_surplus) = surplus.iter().cloned().partition(|a| cn.contains(a));
    OverlapDecomposition {
        common: s.intersection(r).cloned().collect(),
        lost: s.difference(r).cloned().collect(),
        preserved_core: core.intersection(r).cloned().collect(),
        lost_core: core.difference(r).cloned().collect(),
        surplus,
        derivable_surplus,
        nonderivable_surplus,
    }
}

/// Closure-fidelity conditions for one pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairFeasibility {
    /// The sender core is derivable from the receiver vocabulary.
    pub f1: bool,
    /// The sender core is stored by the receiver.
    pub f1_strong: bool,
    /// Every surplus state is derivable from the sender.
    pub f2: bool,
    pub closure_fidelity_one: bool,
}

pub fn feasibility(sender: &KnowledgeBase, receiver: &KnowledgeBase, ps: &ProofSystem) -> PairFeasibility {
    let o = overlap(sender, receiver, ps);
    let core = extract_core(sender, ps).core;
    let cn_r = ps.closure(receiver.atoms());
    let f1 = core.is_subset(&cn_r);
    let f2 = o.nonderivable_surplus.is_empty();
    PairFeasibility {
        f1,
        f1_strong: o.lost_core.is_empty(),
        f2,
        closure_fidelity_one: f1 && f2,
    }
}

/// Why a blocklength has no value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Absence {
    /// Some sender state is missing from the receiver vocabulary.
    VocabularyLoss,
    /// The receiver cannot reproduce the sender's closure.
    ClosureInfeasible,
    /// One of the two blocklengths is undefined.
    Undefined,
}

impl Absence {
    pub fn code(&self) -> &'static str {
        match self {
            Absence::VocabularyLoss => "vocabulary-loss",
            Absence::ClosureInfeasible => "closure-infeasible",
            Absence::Undefined => "undefined",
        }
    }
}

/// A blocklength (in channel uses) or the reason it does not exist.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Estimate {
    Value(f64),
    Absent(Absence),
}

impl Estimate {
    pub fn value(&self) -> Option<f64> {
        match self {
            Estimate::Value(v) => Some(*v),
            Estimate::Absent(_) => None,
        }
    }

    pub fn absence(&self) -> Option<Absence> {
        match self {
            Estimate::Value(_) => None,
            Estimate::Absent(a) => Some(*a),
        }
    }
}

impl Serialize for Estimate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(1))?;
        match self {
            Estimate::Value(v) => m.serialize_entry("value", v)?,
            Estimate::Absent(a) => m.serialize_entry("absent", a)?,
        }
        m.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlocklengthEstimate {
    pub n_hamming: Estimate,
    pub n_closure: Estimate,
    pub ratio: Estimate,
    pub capacity_bits: f64,
}

/// Asymptotic blocklengths `log2|S_O| / C` and `log2|Atom| / C`.
///
/// The Hamming value needs every sender state in the receiver vocabulary;
/// the closure value needs the core stored by the receiver and no
/// non-derivable surplus. Pairs whose core is only derivable (weak
/// coverage) are reported as closure-infeasible.
pub fn blocklengths(
    sender: &KnowledgeBase,
    receiver: &KnowledgeBase,
    capacity_bits: f64,
    ps: &ProofSystem,
) -> BlocklengthEstimate {
    let o = overlap(sender, receiver, ps);
    let f = feasibility(sender, receiver, ps);
    let atomicity = extract_core(sender, ps).atomicity;
    let n_hamming = if o.lost.is_empty() {
        Estimate::Value((sender.len() as f64).log2() / capacity_bits)
    } else {
        Estimate::Absent(Absence::VocabularyLoss)
    };
    let n_closure = if f.f1_strong && f.f2 {
        Estimate::Value((atomicity as f64).log2() / capacity_bits)
    } else {
        Estimate::Absent(Absence::ClosureInfeasible)
    };
    let ratio = match (n_hamming, n_closure) {
        (Estimate::Value(h), Estimate::Value(c)) if h > 0.0 => Estimate::Value(c / h),
        _ => Estimate::Absent(Absence::Undefined),
    };
    BlocklengthEstimate {
        n_hamming,
        n_closure,
        ratio,
        capacity_bits,
    }
}

/// Smallest receiver vocabulary with closure fidelity one: the sender core.
pub fn min_vocabulary(sender: &KnowledgeBase, ps: &ProofSystem) -> KnowledgeBase {
    extract_core(sender, ps).core.into()
}

fn as_fraction<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReceiverStatus {
    pub index: usize,
    pub feasibility: PairFeasibility,
    pub bottleneck: bool,
    pub f_cn: f64,
    #[serde(serialize_with = "as_fraction")]
    pub f_cn_exact: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BroadcastReport {
    pub receivers: Vec<ReceiverStatus>,
    pub bottlenecks: Vec<usize>,
    /// `log2|Atom| / C` when every non-bottleneck receiver stores the core
    /// and has no non-derivable surplus.
    pub n_broadcast: Estimate,
    pub capacity_bits: f64,
}

/// Per-receiver feasibility for one sender broadcasting to several
/// receivers. A receiver is a bottleneck when it cannot derive the sender
/// core; the broadcast blocklength does not depend on how many compliant
/// receivers there are.
pub fn broadcast_analysis(
    sender: &KnowledgeBase,
    receivers: &[KnowledgeBase],
    capacity_bits: f64,
    ps: &ProofSystem,
) -> BroadcastReport {
    let atomicity = extract_core(sender, ps).atomicity;
    let statuses: Vec<ReceiverStatus> = receivers
        .iter()
        .enumerate()
        .map(|(index, r)| {
            let feasibility = feasibility(sender, r, ps);
            let f_cn = closure_fidelity(sender.atoms(), r.atoms(), ps);
            ReceiverStatus {
                index,
                bottleneck: !feasibility.f1,
                feasibility,
                f_cn: rational_f64(&f_cn),
                f_cn_exact: f_cn,
            }
        })
        .collect();
    let bottlenecks: Vec<usize> = statuses.iter().filter(|s| s.bottleneck).map(|s| s.index).collect();
    let compliant = statuses
        .iter()
        .filter(|s| !s.bottleneck)
        .all(|s| s.feasibility.f1_strong && s.feasibility.f2);
    let any_served = statuses.iter().any(|s| !s.bottleneck);
    let n_broadcast = if compliant && any_served {
        Estimate::Value((atomicity as f64).log2() / capacity_bits)
    } else {
        Estimate::Absent(Absence::ClosureInfeasible)
    };
    BroadcastReport {
        receivers: statuses,
        bottlenecks,
        n_broadcast,
        capacity_bits,
    }
}

/// `pair,|S_cap|,...,|S_+,n|` rows for a list of labelled pairs.
pub fn overlap_csv(rows: &[(String, OverlapCounts)]) -> String {
    let mut out = format!("pair,{}\n", OverlapCounts::FIELDS.join(","));
    for (name, c) in rows {
        let cells: Vec<String> = c.as_array().iter().map(ToString::to_string).collect();
        out.push_str(&format!("{name},{}\n", cells.join(",")));
    }
    out
}
