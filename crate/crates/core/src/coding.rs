//! Two-layer block codes over a memoryless carrier and their Monte Carlo
//! evaluation.
//!
//! Layer 1 is a random code over the sender core; layer 2 sends every
//! redundant message as the codeword of a fixed core anchor. The receiver
//! ML-decodes to a core element and re-derives the rest.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distortion::d_closure;
use crate::error::{Error, Result};
use crate::info::{shannon_capacity, DEFAULT_TOL};
use crate::kb::{extract_core, GroundAtom, KnowledgeBase, ProofSystem};
use crate::kernel::{Kernel, ProductKernel, SemanticChannel, DENSE_GUARD};

/// Retries per codeword before a collision is reported.
pub const COLLISION_RETRIES: usize = 100;
/// Log-likelihoods this close are ties, broken toward the canonical-first
/// core element.
pub const TIE_TOL: f64 = 1e-12;

/// A two-layer semantic block code.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockCode {
    message_set: Vec<GroundAtom>,
    receiver_vocab: KnowledgeBase,
    n: usize,
    core: Vec<GroundAtom>,
    core_codewords: Vec<Vec<usize>>,
    anchor: GroundAtom,
    /// Index into `core` of the codeword sent for each message.
    routing: Vec<usize>,
    /// Whether delivering core element `j` for message `m` is a closure error.
    closure_error: Vec<Vec<bool>>,
    input_distribution: Vec<f64>,
    alphabet: usize,
}

impl BlockCode {
    pub fn message_set(&self) -> &[GroundAtom] {
        &self.message_set
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn core(&self) -> &[GroundAtom] {
        &self.core
    }

    pub fn core_codewords(&self) -> &[Vec<usize>] {
        &self.core_codewords
    }

    pub fn anchor(&self) -> &GroundAtom {
        &self.anchor
    }

    pub fn input_distribution(&self) -> &[f64] {
        &self.input_distribution
    }

    /// `log2|𝓜| / n`.
    pub fn rate(&self) -> f64 {
        (self.message_set.len() as f64).log2() / self.n as f64
    }

    pub fn is_core_message(&self, m: usize) -> bool {
        self.core[self.routing[m]] == self.message_set[m]
    }

    /// Carrier symbols sent for message `m`.
    pub fn encode(&self, m: usize) -> &[usize] {
        &self.core_codewords[self.routing[m]]
    }

    /// ML decision among the core codewords.
    pub fn decode(&self, w: &[f64], y: &[usize]) -> usize {
        let q = self.alphabet;
        let mut best = 0;
        let mut best_ll = f64::NEG_INFINITY;
        for (j, c) in self.core_codewords.iter().enumerate() {
            let ll: f64 = c.iter().zip(y).map(|(&x, &v)| w[x * q + v].ln()).sum();
            if ll > best_ll + TIE_TOL || (best_ll == f64::NEG_INFINITY && ll > best_ll) {
                best = j;
                best_ll = ll;
            }
        }
        best
    }
}

fn check_core(core: &BTreeSet<GroundAtom>, receiver: &KnowledgeBase) -> Result<()> {
    let lost: Vec<String> = core
        .iter()
        .filter(|a| !receiver.contains(a))
        .map(ToString::to_string)
        .collect();
    if lost.is_empty() {
        Ok(())
    } else {
        Err(Error::CoreLost(lost))
    }
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Builds the two-layer code for `sender` → `receiver` over `w`.
///
/// Core codewords are drawn i.i.d. from the capacity-achieving input pmf of
/// `w`; a codeword equal to an earlier one is redrawn up to
/// [`COLLISION_RETRIES`] times.
pub fn build_two_layer_code(
    sender: &KnowledgeBase,
    receiver: &KnowledgeBase,
    w: &Kernel<f64>,
    n: usize,
    seed: u64,
    ps: &ProofSystem,
) -> Result<BlockCode> {
    if n == 0 {
        return Err(Error::InvalidParameter("blocklength must be at least 1".into()));
    }
    if w.input_space() != w.output_space() {
        return Err(Error::SpaceMismatch(
            "carrier must map symbols to the same symbols".into(),
        ));
    }
    let analysis = extract_core(sender, ps);
    check_core(&analysis.core, receiver)?;
    let input = shannon_capacity(w, DEFAULT_TOL)?.input;
    let sampler =
        WeightedIndex::new(&input).map_err(|e| Error::InvalidDistribution(format!("capacity-achieving input: {e}")))?;

    let mut rng = trial_rng(seed, 0);
    let mut codewords: Vec<Vec<usize>> = Vec::with_capacity(analysis.atomicity);
    let mut seen = BTreeSet::new();
    for a in &analysis.core {
        let mut attempts = 0;
        let word = loop {
            let word: Vec<usize> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
            if !seen.contains(&word) {
                break word;
            }
            attempts += 1;
            if attempts > COLLISION_RETRIES {
                return Err(Error::Precondition(format!(
                    "no distinct codeword for {a} after {COLLISION_RETRIES} retries"
                )));
            }
        };
        seen.insert(word.clone());
        codewords.push(word);
    }
    let mut code = BlockCode::with_codewords(sender, receiver, codewords, w.n_inputs(), ps)?;
    code.input_distribution = input;
    Ok(code)
}

impl BlockCode {
    /// Two-layer code with explicit core codewords, one per core element in
    /// canonical order, over an alphabet of `alphabet` symbols.
    pub fn with_codewords(
        sender: &KnowledgeBase,
        receiver: &KnowledgeBase,
        codewords: Vec<Vec<usize>>,
        alphabet: usize,
        ps: &ProofSystem,
    ) -> Result<Self> {
        let analysis = extract_core(sender, ps);
        check_core(&analysis.core, receiver)?;
        let core: Vec<GroundAtom> = analysis.core.iter().cloned().collect();
        let anchor = core
            .first()
            .cloned()
            .ok_or_else(|| Error::Precondition("sender has an empty core".into()))?;
        if codewords.len() != core.len() {
            return Err(Error::InvalidParameter(format!(
                "{} codewords for {} core elements",
                codewords.len(),
                core.len()
            )));
        }
        let n = codewords[0].len();
        if n == 0
            || codewords
                .iter()
                .any(|c| c.len() != n || c.iter().any(|&x| x >= alphabet))
        {
            return Err(Error::InvalidParameter(
                "codewords must share a positive length over the alphabet".into(),
            ));
        }
        let message_set: Vec<GroundAtom> = sender.iter().cloned().collect();
        let routing = message_set
            .iter()
            .map(|m| core.iter().position(|a| a == m).unwrap_or(0))
            .collect();
        let closure_error = message_set
            .iter()
            .map(|m| {
                core.iter()
                    .map(|a| d_closure(m, a, sender.atoms(), ps) > 0.into())
                    .collect()
            })
            .collect();
        Ok(BlockCode {
            message_set,
            receiver_vocab: receiver.clone(),
            n,
            core,
            core_codewords: codewords,
            anchor,
            routing,
            closure_error,
            input_distribution: vec![1.0 / alphabet as f64; alphabet],
            alphabet,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MessageStats {
    pub message: GroundAtom,
    pub core: bool,
    pub hamming_errors: u64,
    pub closure_errors: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimResult {
    pub n: usize,
    pub trials: u64,
    /// Largest Hamming error frequency over core messages. Redundant
    /// messages always decode to a core element and so always differ.
    pub p_e_hat: f64,
    /// Largest Hamming error frequency over all messages.
    pub p_e_all_hat: f64,
    /// Largest closure error frequency over all messages.
    pub p_e_cn_hat: f64,
    /// 95% normal-approximation half-width for `p_e_hat`.
    pub ci_halfwidth: f64,
    pub ci_halfwidth_cn: f64,
    pub redundant_closure_errors: u64,
    pub per_message: Vec<MessageStats>,
    pub seed: u64,
}

fn halfwidth(p: f64, trials: u64) -> f64 {
    1.96 * (p * (1.0 - p) / trials as f64).sqrt()
}

fn check_carrier(code: &BlockCode, w: &Kernel<f64>) -> Result<Vec<f64>> {
    if w.n_inputs() != code.alphabet || w.n_outputs() != code.alphabet {
        return Err(Error::SpaceMismatch("carrier alphabet differs from the code's".into()));
    }
    Ok(w.rows().flatten().copied().collect())
}

/// Sends every message once per trial through independent uses of `w`.
///
/// Trial `t` draws from its own ChaCha stream `t + 1` of `seed`, so the
/// result does not depend on how trials are scheduled.
pub fn simulate(code: &BlockCode, w: &Kernel<f64>, trials: u64, seed: u64) -> Result<SimResult> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is required".into()));
    }
    let wf = check_carrier(code, w)?;
    let rows: Vec<WeightedIndex<f64>> = w
        .rows()
        .map(|r| WeightedIndex::new(r).map_err(|e| Error::InvalidDistribution(e.to_string())))
        .collect::<Result<_>>()?;
    let m = code.message_set.len();
    let n = code.n;
    let counts = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; m], vec![0u64; m], vec![0usize; n]),
            |(mut ham, mut cn, mut y), t| {
                let mut rng = trial_rng(seed, t + 1);
                for msg in 0..m {
                    for (yi, &x) in y.iter_mut().zip(code.encode(msg)) {
                        *yi = rows[x].sample(&mut rng);
                    }
                    let out = code.decode(&wf, &y);
                    if code.core[out] != code.message_set[msg] {
                        ham[msg] += 1;
                    }
                    if code.closure_error[msg][out] {
                        cn[msg] += 1;
                    }
                }
                (ham, cn, y)
            },
        )
        .map(|(h, c, _)| (h, c))
        .reduce(
            || (vec![0u64; m], vec![0u64; m]),
            |(mut h1, mut c1), (h2, c2)| {
                h1.iter_mut().zip(h2).for_each(|(a, b)| *a += b);
                c1.iter_mut().zip(c2).for_each(|(a, b)| *a += b);
                (h1, c1)
            },
        );
    let (ham, cn) = counts;
    let freq = |c: u64| c as f64 / trials as f64;
    let per_message: Vec<MessageStats> = (0..m)
        .map(|i| MessageStats {
            message: code.message_set[i].clone(),
            core: code.is_core_message(i),
            hamming_errors: ham[i],
            closure_errors: cn[i],
        })
        .collect();
    let max_over = |it: &mut dyn Iterator<Item = u64>| it.map(freq).fold(0.0, f64::max);
    let p_e_hat = max_over(&mut per_message.iter().filter(|s| s.core).map(|s| s.hamming_errors));
    let p_e_all_hat = max_over(&mut ham.iter().copied());
    let p_e_cn_hat = max_over(&mut cn.iter().copied());
    let redundant_closure_errors = per_message.iter().filter(|s| !s.core).map(|s| s.closure_errors).sum();
    Ok(SimResult {
        n,
        trials,
        p_e_hat,
        p_e_all_hat,
        p_e_cn_hat,
        ci_halfwidth: halfwidth(p_e_hat, trials),
        ci_halfwidth_cn: halfwidth(p_e_cn_hat, trials),
        redundant_closure_errors,
        per_message,
        seed,
    })
}

impl SimResult {
    pub const CSV_HEADER: &'static str = "n,trials,p_e,p_e_cn,ci,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.n, self.trials, self.p_e_hat, self.p_e_cn_hat, self.ci_halfwidth, self.seed
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConverseCheck {
    pub holds: bool,
    /// `log2|Atom|`.
    pub lhs: f64,
    /// `(n C(W) + 1) / (1 − ε̂)`.
    pub rhs: f64,
    pub slack: f64,
}

/// Evaluates `log2|Atom| ≤ (n C(W) + 1) / (1 − ε̂)`.
pub fn converse_check(code: &BlockCode, w: &Kernel<f64>, eps_hat: f64) -> Result<ConverseCheck> {
    if !(0.0..1.0).contains(&eps_hat) {
        return Err(Error::InvalidParameter(format!(
            "error estimate {eps_hat} must lie in [0,1)"
        )));
    }
    let c = shannon_capacity(w, DEFAULT_TOL)?.bits;
    let lhs = (code.core.len() as f64).log2();
    let rhs = (code.n as f64 * c + 1.0) / (1.0 - eps_hat);
    Ok(ConverseCheck {
        holds: lhs <= rhs,
        lhs,
        rhs,
        slack: rhs - lhs,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct InducedChannel {
    pub channel: SemanticChannel,
    pub exact: bool,
    /// Largest 95% half-width over entries when estimated by sampling.
    pub ci_halfwidth: Option<f64>,
}

/// The end-to-end kernel message → decoded core element of `code`, as a
/// semantic channel onto the code's receiver vocabulary. Exact when
/// `q^n ≤ 4096`, otherwise estimated from `trials` transmissions per message.
pub fn induced_semantic_channel(code: &BlockCode, w: &Kernel<f64>, trials: u64, seed: u64) -> Result<InducedChannel> {
    let wf = check_carrier(code, w)?;
    let q = code.alphabet;
    let vocab = &code.receiver_vocab;
    let col: Vec<usize> = code
        .core
        .iter()
        .map(|a| {
            vocab
                .iter()
                .position(|t| t == a)
                .expect("core is stored by the receiver")
        })
        .collect();
    let m = code.message_set.len();
    let mut rows = vec![vec![0.0; vocab.len()]; m];
    let words = (q as f64).powi(code.n as i32);
    let (exact, ci) = if words <= DENSE_GUARD as f64 {
        let total = q.pow(code.n as u32);
        let mut decoded = Vec::with_capacity(total);
        for idx in 0..total {
            let y = ProductKernel::<f64>::digits(idx, q, code.n);
            decoded.push((code.decode(&wf, &y), y));
        }
        for (msg, row) in rows.iter_mut().enumerate() {
            let x = code.encode(msg);
            for (out, y) in &decoded {
                let p: f64 = x.iter().zip(y).map(|(&a, &b)| wf[a * q + b]).product();
                row[col[*out]] += p;
            }
        }
        (true, None)
    } else {
        if trials == 0 {
            return Err(Error::InvalidParameter("sampling needs at least one trial".into()));
        }
        let samplers: Vec<WeightedIndex<f64>> = w
            .rows()
            .map(|r| WeightedIndex::new(r).map_err(|e| Error::InvalidDistribution(e.to_string())))
            .collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for (msg, row) in rows.iter_mut().enumerate() {
            let mut rng = trial_rng(seed, msg as u64 + 1);
            let mut counts = vec![0u64; code.core.len()];
            let mut y = vec![0; code.n];
            for _ in 0..trials {
                for (yi, &x) in y.iter_mut().zip(code.encode(msg)) {
                    *yi = samplers[x].sample(&mut rng);
                }
                counts[code.decode(&wf, &y)] += 1;
            }
            for (j, c) in counts.iter().enumerate() {
                let p = *c as f64 / trials as f64;
                row[col[j]] = p;
                worst = worst.max(halfwidth(p, trials));
            }
        }
        (false, Some(worst))
    };
    let sender: KnowledgeBase = code.message_set.iter().cloned().collect();
    let kernel = Kernel::new(sender.labels(), vocab.labels(), rows)?;
    Ok(InducedChannel {
        channel: SemanticChannel::from_kernel(sender, vocab.clone(), kernel)?,
        exact,
        ci_halfwidth: ci,
    })
}
