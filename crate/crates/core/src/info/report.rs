use std::collections::BTreeMap;

use serde::{Serialize, Serializer};

use crate::distortion::{expected_distortion, DistortionContext, DistortionKind};
use crate::error::Result;
use crate::kb::{closure_fidelity, core_preservation_ratio};
use crate::kernel::{joint, Distribution, Kernel, SemanticChannel};
use crate::scalar::{rational_f64, Rational};

use super::capacity::{semantic_capacity_for, shannon_capacity, CapacityMode};
use super::entropy::{entropy, mutual_information};
use super::indices::{fano_alphabet, fano_lower_bound, noise_pair_indices, quality_indices, structural_shifts};

fn as_fraction<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructuralFamily {
    pub atomicity: usize,
    pub max_depth: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetLevelFamily {
    pub rho_atom: f64,
    #[serde(serialize_with = "as_fraction")]
    pub rho_atom_exact: Rational,
    pub f_cn: f64,
    #[serde(serialize_with = "as_fraction")]
    pub f_cn_exact: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoisePairFamily {
    pub phi_atom: f64,
    pub psi_plus: f64,
    pub p_cap: BTreeMap<String, f64>,
    pub p_plus: BTreeMap<String, f64>,
    pub pi: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QualityFamily {
    pub fidelity_index: f64,
    pub depth_expansion: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftFamily {
    #[serde(rename = "delta_A")]
    pub delta_a: i64,
    #[serde(rename = "delta_Dd")]
    pub delta_dd: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InformationFamily {
    pub shannon_capacity: f64,
    pub semantic_capacity: f64,
    pub semantic_capacity_lower: f64,
    pub semantic_capacity_mode: CapacityMode,
    pub semantic_mi: f64,
    pub fano_lower: f64,
    pub source_entropy: f64,
    pub expected_hamming: f64,
}

/// Every invariant of one sender/receiver channel, grouped by family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantReport {
    #[serde(rename = "I")]
    pub structural: StructuralFamily,
    #[serde(rename = "II")]
    pub set_level: SetLevelFamily,
    #[serde(rename = "III")]
    pub noise_pair: NoisePairFamily,
    #[serde(rename = "IV")]
    pub quality: QualityFamily,
    #[serde(rename = "V")]
    pub shifts: ShiftFamily,
    #[serde(rename = "VI")]
    pub information: InformationFamily,
}

const CSV_FIELDS: [&str; 14] = [
    "atomicity",
    "max_depth",
    "rho_atom",
    "f_cn",
    "phi_atom",
    "psi_plus",
    "fidelity_index",
    "depth_expansion",
    "delta_A",
    "delta_Dd",
    "shannon_capacity",
    "semantic_capacity",
    "semantic_mi",
    "fano_lower",
];

impl InvariantReport {
    pub fn csv_header() -> String {
        CSV_FIELDS.join(",")
    }

    /// Scalar fields in [`Self::csv_header`] order, full precision.
    pub fn csv_row(&self) -> String {
        let v = [
            self.structural.atomicity.to_string(),
            self.structural.max_depth.to_string(),
            self.set_level.rho_atom.to_string(),
            self.set_level.f_cn.to_string(),
            self.noise_pair.phi_atom.to_string(),
            self.noise_pair.psi_plus.to_string(),
            self.quality.fidelity_index.to_string(),
            self.quality.depth_expansion.to_string(),
            self.shifts.delta_a.to_string(),
            self.shifts.delta_dd.to_string(),
            self.information.shannon_capacity.to_string(),
            self.information.semantic_capacity.to_string(),
            self.information.semantic_mi.to_string(),
            self.information.fano_lower.to_string(),
        ];
        v.join(",")
    }
}

/// Computes the full report for `chan` built over the carrier `w`, with
/// source distribution `source` over the sender states.
pub fn invariant_report(
    ctx: &DistortionContext,
    chan: &SemanticChannel,
    w: &Kernel<f64>,
    source: &Distribution<f64>,
    tol: f64,
) -> Result<InvariantReport> {
    let ps = ctx.proof_system();
    let sender = chan.sender();
    let receiver = chan.receiver_vocab();
    let analysis = ctx.analysis();

    let rho = core_preservation_ratio(sender, receiver.atoms(), ps);
    let f_cn = closure_fidelity(sender.atoms(), receiver.atoms(), ps);

    let noise = noise_pair_indices(chan, &analysis.core);
    let labels = sender.labels();
    let per_input = |v: &[f64]| labels.iter().cloned().zip(v.iter().copied()).collect();
    let quality = quality_indices(chan, ctx)?;
    let shifts = structural_shifts(sender, receiver, ps);

    let cw = shannon_capacity(w, tol)?.bits;
    let c_sem = semantic_capacity_for(chan, w, tol)?;
    let mi = mutual_information(&joint(source, chan.kernel())?);
    let h = entropy(source);
    let hamming = ctx.matrix(receiver, DistortionKind::Hamming);
    let eps = expected_distortion(chan, source, &hamming)?.total;

    Ok(InvariantReport {
        structural: StructuralFamily {
            atomicity: analysis.atomicity,
            max_depth: analysis.max_depth,
        },
        set_level: SetLevelFamily {
            rho_atom: rational_f64(&rho),
            rho_atom_exact: rho,
            f_cn: rational_f64(&f_cn),
            f_cn_exact: f_cn,
        },
        noise_pair: NoisePairFamily {
            phi_atom: noise.phi_atom,
            psi_plus: noise.psi_plus,
            p_cap: per_input(&noise.p_cap),
            p_plus: per_input(&noise.p_plus),
            pi: noise.pi.iter().map(|(a, v)| (a.to_string(), *v)).collect(),
        },
        quality: QualityFamily {
            fidelity_index: quality.fidelity_index,
            depth_expansion: quality.depth_expansion,
        },
        shifts: ShiftFamily {
            delta_a: shifts.delta_a,
            delta_dd: shifts.delta_dd,
        },
        information: InformationFamily {
            shannon_capacity: cw,
            semantic_capacity: c_sem.bits,
            semantic_capacity_lower: c_sem.lower,
            semantic_capacity_mode: c_sem.mode,
            semantic_mi: mi,
            fano_lower: fano_lower_bound(h, eps, fano_alphabet(chan)),
            source_entropy: h,
            expected_hamming: eps,
        },
    })
}
