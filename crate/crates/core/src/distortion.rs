//! Per-pair distortions between sender states and reconstructions, their
//! precomputed matrices, and expectations under a semantic channel.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kb::{extract_core, CoreAnalysis, Depth, GroundAtom, KnowledgeBase, ProofSystem};
use crate::kernel::{Distribution, SemanticChannel};
use crate::scalar::{ratio_or, rational_f64, Rational};

/// Symbol-level distortion: 1 iff the states differ.
pub fn d_hamming(s: &GroundAtom, s_hat: &GroundAtom) -> f64 {
    if s == s_hat {
        0.0
    } else {
        1.0
    }
}

fn jaccard_distance(a: &BTreeSet<GroundAtom>, b: &BTreeSet<GroundAtom>) -> Rational {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    Rational::from_integer(1) - ratio_or(inter, union, Rational::from_integer(1))
}

fn substituted(gamma: &BTreeSet<GroundAtom>, s: &GroundAtom, with: &GroundAtom) -> BTreeSet<GroundAtom> {
    let mut base = gamma.clone();
    base.remove(s);
    base.insert(with.clone());
    base
}

/// Jaccard distance between `Cn(Γ∖{s} ∪ {s})` and `Cn(Γ∖{s} ∪ {ŝ})`.
/// Two empty closures are at distance 0. When `s ∉ Γ` the substitution is
/// an addition.
pub fn d_closure(s: &GroundAtom, s_hat: &GroundAtom, gamma_base: &BTreeSet<GroundAtom>, ps: &ProofSystem) -> Rational {
    let c_s = ps.closure(&substituted(gamma_base, s, s));
    let c_hat = ps.closure(&substituted(gamma_base, s, s_hat));
    jaccard_distance(&c_s, &c_hat)
}

/// Derivation depths relative to a fixed core, computed once.
#[derive(Clone, Debug)]
pub struct DepthTable {
    depths: HashMap<GroundAtom, u32>,
    d_max: u32,
}

impl DepthTable {
    pub fn new(core: &BTreeSet<GroundAtom>, d_max: u32, ps: &ProofSystem) -> Self {
        let mut depths = HashMap::new();
        for (d, layer) in ps.strata(core).into_iter().enumerate() {
            for a in layer {
                depths.insert(a, d as u32);
            }
        }
        Self { depths, d_max }
    }

    pub fn from_analysis(analysis: &CoreAnalysis) -> Self {
        let mut depths = HashMap::new();
        for (d, layer) in analysis.strata.iter().enumerate() {
            for a in layer {
                depths.insert(a.clone(), d as u32);
            }
        }
        Self {
            depths,
            d_max: analysis.max_depth,
        }
    }

    pub fn depth(&self, a: &GroundAtom) -> Depth {
        self.depths.get(a).map_or(Depth::Infinite, |&d| Depth::Finite(d))
    }

    pub fn distortion(&self, s: &GroundAtom, s_hat: &GroundAtom) -> f64 {
        let Depth::Finite(dh) = self.depth(s_hat) else {
            return 1.0;
        };
        let Depth::Finite(ds) = self.depth(s) else {
            return 1.0;
        };
        let diff = ds.abs_diff(dh) as f64;
        (diff / self.d_max.max(1) as f64).min(1.0)
    }
}

/// Depth distortion relative to `core` with normaliser `max(d_max, 1)`;
/// 1 when `ŝ` is not derivable from the core.
pub fn d_depth(s: &GroundAtom, s_hat: &GroundAtom, core: &BTreeSet<GroundAtom>, d_max: u32, ps: &ProofSystem) -> f64 {
    DepthTable::new(core, d_max, ps).distortion(s, s_hat)
}

/// Convex weights `(α, β, γ)` for Hamming, closure and depth distortion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistortionWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DistortionWeights {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if [alpha, beta, gamma].iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::InvalidParameter(
                "distortion weights must be non-negative".into(),
            ));
        }
        if (alpha + beta + gamma - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "distortion weights sum to {}",
                alpha + beta + gamma
            )));
        }
        Ok(Self { alpha, beta, gamma })
    }

    pub const HAMMING: Self = Self {
        alpha: 1.0,
        beta: 0.0,
        gamma: 0.0,
    };
}

/// `α d_H + β d_Cn(·|Γ) + γ d_Dd`.
#[allow(clippy::too_many_arguments)]
pub fn d_composite(
    s: &GroundAtom,
    s_hat: &GroundAtom,
    w: DistortionWeights,
    gamma_base: &BTreeSet<GroundAtom>,
    core: &BTreeSet<GroundAtom>,
    d_max: u32,
    ps: &ProofSystem,
) -> f64 {
    // Skip closure work entirely for pure Hamming weights.
    let mut v = w.alpha * d_hamming(s, s_hat);
    if w.beta != 0.0 {
        v += w.beta * rational_f64(&d_closure(s, s_hat, gamma_base, ps));
    }
    if w.gamma != 0.0 {
        v += w.gamma * d_depth(s, s_hat, core, d_max, ps);
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DistortionKind {
    Hamming,
    Closure,
    Depth,
    Composite { weights: DistortionWeights },
}

impl DistortionKind {
    fn key(&self) -> (u8, [u64; 3]) {
        match self {
            DistortionKind::Hamming => (0, [0; 3]),
            DistortionKind::Closure => (1, [0; 3]),
            DistortionKind::Depth => (2, [0; 3]),
            DistortionKind::Composite { weights: w } => (3, [w.alpha.to_bits(), w.beta.to_bits(), w.gamma.to_bits()]),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistortionKind::Hamming => "hamming",
            DistortionKind::Closure => "closure",
            DistortionKind::Depth => "depth",
            DistortionKind::Composite { .. } => "composite",
        }
    }
}

/// Sender states × receiver states → distortion in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionMatrix {
    pub kind: DistortionKind,
    rows: Vec<GroundAtom>,
    cols: Vec<GroundAtom>,
    values: Vec<f64>,
}

impl DistortionMatrix {
    pub fn from_fn(
        kind: DistortionKind,
        rows: Vec<GroundAtom>,
        cols: Vec<GroundAtom>,
        f: impl Fn(&GroundAtom, &GroundAtom) -> f64 + Sync,
    ) -> Self {
        let values: Vec<f64> = rows
            .par_iter()
            .flat_map_iter(|s| cols.iter().map(|t| f(s, t)).collect::<Vec<_>>())
            .collect();
        Self {
            kind,
            rows,
            cols,
            values,
        }
    }

    pub fn rows(&self) -> &[GroundAtom] {
        &self.rows
    }

    pub fn cols(&self) -> &[GroundAtom] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let m = self.cols.len();
        &self.values[i * m..(i + 1) * m]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("state");
        for c in &self.cols {
            out.push_str(&format!(",\"{c}\""));
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&format!("\"{r}\""));
            for v in self.row(i) {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Sender-side data shared by every distortion of one sender: the proof
/// system, the sender's core and depth table, and the reference base
/// (the sender KB) for closure distortion.
#[derive(Clone, Debug)]
pub struct DistortionContext {
    sender: KnowledgeBase,
    ps: ProofSystem,
    analysis: CoreAnalysis,
    depths: DepthTable,
}

impl DistortionContext {
    pub fn new(sender: &KnowledgeBase, ps: &ProofSystem) -> Self {
        let analysis = extract_core(sender, ps);
        let depths = DepthTable::from_analysis(&analysis);
        Self {
            sender: sender.clone(),
            ps: ps.clone(),
            analysis,
            depths,
        }
    }

    pub fn sender(&self) -> &KnowledgeBase {
        &self.sender
    }

    pub fn proof_system(&self) -> &ProofSystem {
        &self.ps
    }

    pub fn analysis(&self) -> &CoreAnalysis {
        &self.analysis
    }

    pub fn depths(&self) -> &DepthTable {
        &self.depths
    }

    pub fn closure(&self, s: &GroundAtom, s_hat: &GroundAtom) -> Rational {
        d_closure(s, s_hat, self.sender.atoms(), &self.ps)
    }

    pub fn depth(&self, s: &GroundAtom, s_hat: &GroundAtom) -> f64 {
        self.depths.distortion(s, s_hat)
    }

    pub fn matrix(&self, receiver: &KnowledgeBase, kind: DistortionKind) -> DistortionMatrix {
        let rows: Vec<GroundAtom> = self.sender.iter().cloned().collect();
        let cols: Vec<GroundAtom> = receiver.iter().cloned().collect();
        match kind {
            DistortionKind::Hamming => DistortionMatrix::from_fn(kind, rows, cols, d_hamming),
            DistortionKind::Depth => DistortionMatrix::from_fn(kind, rows, cols, |s, t| self.depth(s, t)),
            DistortionKind::Closure => {
                let gamma = self.sender.atoms();
                DistortionMatrix::from_fn(kind, rows, cols, |s, t| rational_f64(&d_closure(s, t, gamma, &self.ps)))
            }
            DistortionKind::Composite { weights: w } => {
                let gamma = self.sender.atoms();
                DistortionMatrix::from_fn(kind, rows, cols, |s, t| {
                    let mut v = w.alpha * d_hamming(s, t);
                    if w.beta != 0.0 {
                        v += w.beta * rational_f64(&d_closure(s, t, gamma, &self.ps));
                    }
                    if w.gamma != 0.0 {
                        v += w.gamma * self.depth(s, t);
                    }
                    v
                })
            }
        }
    }
}

fn kb_hash(kb: &KnowledgeBase) -> u64 {
    let mut h = DefaultHasher::new();
    kb.to_canonical_string().hash(&mut h);
    h.finish()
}

type CacheKey = (u64, u64, u64, (u8, [u64; 3]));

/// Memoises distortion matrices per (sender, receiver, proof system, kind).
#[derive(Debug, Default)]
pub struct DistortionCache {
    entries: Mutex<HashMap<CacheKey, Arc<DistortionMatrix>>>,
}

impl DistortionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_compute(
        &self,
        ctx: &DistortionContext,
        receiver: &KnowledgeBase,
        kind: DistortionKind,
    ) -> Arc<DistortionMatrix> {
        let mut h = DefaultHasher::new();
        for r in ctx.ps.rules() {
            r.to_string().hash(&mut h);
        }
        let key = (kb_hash(&ctx.sender), kb_hash(receiver), h.finish(), kind.key());
        if let Some(m) = self.entries.lock().expect("cache lock").get(&key) {
            return Arc::clone(m);
        }
        let m = Arc::new(ctx.matrix(receiver, kind));
        self.entries.lock().expect("cache lock").entry(key).or_insert(m).clone()
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Expected distortion and its per-input breakdown `d̄(s | 𝔠)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedDistortion {
    pub total: f64,
    pub per_input: Vec<f64>,
}

fn check_alignment(chan: &SemanticChannel, d: &DistortionMatrix) -> Result<()> {
    let rows_ok = d.rows().iter().eq(chan.sender().iter());
    let cols_ok = d.cols().iter().eq(chan.receiver_vocab().iter());
    if rows_ok && cols_ok {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(
            "distortion matrix is not aligned with the channel".into(),
        ))
    }
}

/// Per-input expectations `Σ_ŝ κ(ŝ|s) d(s, ŝ)`.
pub fn per_input_distortion(chan: &SemanticChannel, d: &DistortionMatrix) -> Result<Vec<f64>> {
    check_alignment(chan, d)?;
    let k = chan.kernel();
    Ok((0..k.n_inputs())
        .map(|i| k.row(i).iter().zip(d.row(i)).map(|(p, v)| p * v).sum())
        .collect())
}

/// `Σ P(s) κ(ŝ|s) d(s, ŝ)`.
pub fn expected_distortion(
    chan: &SemanticChannel,
    p_source: &Distribution<f64>,
    d: &DistortionMatrix,
) -> Result<ExpectedDistortion> {
    if p_source.space() != chan.kernel().input_space() {
        return Err(Error::SpaceMismatch(
            "source distribution is not over the sender states".into(),
        ));
    }
    let per_input = per_input_distortion(chan, d)?;
    let total = per_input.iter().zip(p_source.mass()).map(|(v, p)| v * p).sum();
    Ok(ExpectedDistortion { total, per_input })
}

/// Expected Hamming distortion split into within-vocabulary confusion and
/// spurious substitution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HammingSplit {
    pub within: f64,
    pub spurious: f64,
}

pub fn hamming_split(chan: &SemanticChannel, p_source: &Distribution<f64>) -> Result<HammingSplit> {
    if p_source.space() != chan.kernel().input_space() {
        return Err(Error::SpaceMismatch(
            "source distribution is not over the sender states".into(),
        ));
    }
    let k = chan.kernel();
    let recv = chan.receiver_atoms();
    let mut within = 0.0;
    let mut spurious = 0.0;
    for (i, s) in chan.sender().iter().enumerate() {
        let p = p_source.mass()[i];
        for (j, t) in recv.iter().enumerate() {
            let mass = p * k.prob(i, j);
            if chan.spurious().contains(*t) {
                spurious += mass;
            } else if *t != s {
                within += mass;
            }
        }
    }
    Ok(HammingSplit { within, spurious })
}
