use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{EnablingMap, Kernel, SemanticChannel};

use super::entropy::mi_of;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 100_000;
/// Largest number of deterministic encoder/decoder pairs enumerated exactly.
pub const SEMANTIC_GUARD: f64 = 1e7;

/// Blahut–Arimoto output: the capacity lower bound `I(p*, W)`, the
/// maximising input pmf and the final duality gap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Capacity {
    pub bits: f64,
    pub input: Vec<f64>,
    pub iterations: usize,
    pub gap: f64,
}

fn divergences(p: &[f64], w: &[f64], m: usize, d: &mut [f64]) {
    let mut q = vec![0.0; m];
    for (i, pi) in p.iter().enumerate() {
        for (k, qk) in q.iter_mut().enumerate() {
            *qk += pi * w[i * m + k];
        }
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = w[i * m..(i + 1) * m]
            .iter()
            .zip(&q)
            .filter(|(x, _)| **x > 0.0)
            .map(|(x, qk)| x * (x / qk).log2())
            .sum();
    }
}

fn objective(p: &[f64], d: &[f64]) -> f64 {
    p.iter().zip(d).map(|(a, b)| a * b).sum()
}

/// `p_x ← p_x 2^{μ (D_x − max D)}`, renormalised.
fn ba_step(p: &[f64], d: &[f64], upper: f64, mu: f64, out: &mut [f64]) {
    for ((o, pi), di) in out.iter_mut().zip(p).zip(d) {
        // Clamped so an overshoot cannot zero an input in one step.
        *o = pi * (mu * (di - upper)).max(-50.0).exp2();
    }
    let scale: f64 = out.iter().sum();
    out.iter_mut().for_each(|o| *o /= scale);
}

/// Largest step multiplier tried.
const MAX_STEP: f64 = 1e6;

/// Runs BA on a row-major `n × m` matrix until the gap between
/// `max_x D(W_x‖q)` and `Σ p_x D(W_x‖q)` is at most `tol`. Never fails; the
/// caller inspects `gap`. `trace` collects the objective per iteration.
///
/// The exponent is scaled by an adaptive step `μ ≥ 1`. A step with `μ > 1`
/// is kept only if the objective does not drop; otherwise the plain `μ = 1`
/// update is taken, which never decreases it. Nearly useless channels need
/// this, since plain BA moves by amounts of the order of the capacity.
pub(crate) fn blahut_arimoto(
    w: &[f64],
    n: usize,
    m: usize,
    tol: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<f64>>,
) -> Capacity {
    let mut p = vec![1.0 / n as f64; n];
    let mut d = vec![0.0; n];
    let mut cand = vec![0.0; n];
    let mut d_cand = vec![0.0; n];
    divergences(&p, w, m, &mut d);
    let mut lower = objective(&p, &d);
    let mut mu = 1.0f64;
    let mut iterations = 0;
    loop {
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if let Some(t) = trace.as_deref_mut() {
            t.push(lower);
        }
        let gap = upper - lower;
        if gap <= tol || iterations >= max_iter {
            return Capacity {
                bits: lower.max(0.0),
                input: p,
                iterations,
                gap: gap.max(0.0),
            };
        }
        ba_step(&p, &d, upper, mu, &mut cand);
        divergences(&cand, w, m, &mut d_cand);
        let mut next = objective(&cand, &d_cand);
        if next >= lower {
            mu = (mu * 2.0).min(MAX_STEP);
        } else {
            ba_step(&p, &d, upper, 1.0, &mut cand);
            divergences(&cand, w, m, &mut d_cand);
            next = objective(&cand, &d_cand);
            mu = (mu / 4.0).max(1.0);
        }
        std::mem::swap(&mut p, &mut cand);
        std::mem::swap(&mut d, &mut d_cand);
        lower = next;
        iterations += 1;
    }
}

fn flat(w: &Kernel<f64>) -> Vec<f64> {
    w.rows().flatten().copied().collect()
}

/// `C(W) = max_P I(P, W)` by Blahut–Arimoto.
pub fn shannon_capacity(w: &Kernel<f64>, tol: f64) -> Result<Capacity> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance {tol} must be positive")));
    }
    if w.n_inputs() == 0 {
        return Err(Error::InvalidParameter("kernel has no inputs".into()));
    }
    let c = blahut_arimoto(&flat(w), w.n_inputs(), w.n_outputs(), tol, MAX_ITERATIONS, None);
    if c.gap > tol {
        return Err(Error::NoConvergence {
            iterations: c.iterations,
            gap: c.gap,
        });
    }
    Ok(c)
}

/// Objective values of every BA iteration, for monotonicity checks.
pub fn capacity_trace(w: &Kernel<f64>, tol: f64) -> Vec<f64> {
    let mut t = Vec::new();
    blahut_arimoto(&flat(w), w.n_inputs(), w.n_outputs(), tol, MAX_ITERATIONS, Some(&mut t));
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityMode {
    /// Maximum over all deterministic encoder/decoder pairs.
    Exact,
    /// `C(W)` under full enabling and the size conditions for equality.
    Shortcut,
    /// Neither applies: `bits` is the data-processing upper bound and
    /// `lower` the capacity of one achievable end-to-end kernel.
    Bounds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemanticCapacity {
    pub bits: f64,
    pub lower: f64,
    pub mode: CapacityMode,
}

fn allowed_indices(e: &EnablingMap, out: &[String]) -> Vec<Vec<usize>> {
    e.input_space()
        .iter()
        .map(|x| {
            out.iter()
                .enumerate()
                .filter(|(_, y)| e.allows(x, y))
                .map(|(j, _)| j)
                .collect()
        })
        .collect()
}

/// All choices of one element from each list, in lexicographic order.
fn assignments(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(choices.len())];
    for c in choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                c.iter().map(move |&j| {
                    let mut v = prefix.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    out
}

fn log_count(choices: &[Vec<usize>]) -> f64 {
    choices.iter().map(|c| (c.len() as f64).log10()).sum()
}

/// Semantic capacity `max I(S_O; Ŝ_O)` over source pmfs, enabling-respecting
/// encoders `S_O ⇝ S_C` and decoders `Ŝ_C ⇝ Ŝ_O` around the carrier `w`.
///
/// The objective is convex in each kernel, so deterministic pairs suffice;
/// they are enumerated when `|S_C|^|S_O| · |Ŝ_O|^|Ŝ_C|` is at most
/// [`SEMANTIC_GUARD`]. Larger instances are only accepted when both enabling
/// maps are full and `|S_O| ≥ |S_C|`, `|Ŝ_O| ≥ |Ŝ_C|`, in which case the
/// answer is `C(W)`.
pub fn semantic_capacity(
    w: &Kernel<f64>,
    enabling_enc: &EnablingMap,
    enabling_dec: &EnablingMap,
    tol: f64,
) -> Result<SemanticCapacity> {
    if enabling_enc.output_space() != w.input_space() || enabling_dec.input_space() != w.output_space() {
        return Err(Error::SpaceMismatch(
            "enabling maps do not meet the carrier spaces".into(),
        ));
    }
    let (n_o, n_c) = (enabling_enc.input_space().len(), w.n_inputs());
    let (n_hc, n_ho) = (w.n_outputs(), enabling_dec.output_space().len());
    let size = (n_c as f64).powi(n_o as i32) * (n_ho as f64).powi(n_hc as i32);
    if size <= SEMANTIC_GUARD {
        let enc_choices = allowed_indices(enabling_enc, w.input_space());
        let dec_choices = allowed_indices(enabling_dec, enabling_dec.output_space());
        debug_assert!(log_count(&enc_choices) + log_count(&dec_choices) <= SEMANTIC_GUARD.log10() + 1e-9);
        let encoders = assignments(&enc_choices);
        let decoders = assignments(&dec_choices);
        let wf = flat(w);
        let best = encoders
            .par_iter()
            .map(|enc| {
                let mut best = 0.0f64;
                let mut k = vec![0.0; n_o * n_ho];
                for dec in &decoders {
                    k.iter_mut().for_each(|v| *v = 0.0);
                    for (i, &x) in enc.iter().enumerate() {
                        for (y, &r) in dec.iter().enumerate() {
                            k[i * n_ho + r] += wf[x * n_hc + y];
                        }
                    }
                    let c = blahut_arimoto(&k, n_o, n_ho, tol, MAX_ITERATIONS, None);
                    best = best.max(c.bits);
                }
                best
            })
            .reduce(|| 0.0, f64::max);
        return Ok(SemanticCapacity {
            bits: best,
            lower: best,
            mode: CapacityMode::Exact,
        });
    }
    if enabling_enc.is_full() && enabling_dec.is_full() && n_o >= n_c && n_ho >= n_hc {
        let c = shannon_capacity(w, tol)?.bits;
        return Ok(SemanticCapacity {
            bits: c,
            lower: c,
            mode: CapacityMode::Shortcut,
        });
    }
    Err(Error::Precondition(format!(
        "{size:.3e} encoder/decoder pairs exceed the enumeration guard and the equality conditions do not hold"
    )))
}

/// Data-processing bracket for a concrete channel:
/// `C(κ_sem) ≤ C_sem ≤ min(C(W), log|S_O|, log|Ŝ_O|)`.
pub fn semantic_capacity_bounds(chan: &SemanticChannel, w: &Kernel<f64>, tol: f64) -> Result<SemanticCapacity> {
    let cw = shannon_capacity(w, tol)?.bits;
    let upper = cw
        .min((chan.sender().len() as f64).log2())
        .min((chan.receiver_vocab().len() as f64).log2());
    let lower = shannon_capacity(chan.kernel(), tol)?.bits;
    Ok(SemanticCapacity {
        bits: upper,
        lower: lower.min(upper),
        mode: CapacityMode::Bounds,
    })
}

/// Exact or shortcut capacity with full enabling when available, otherwise
/// the data-processing bracket.
pub fn semantic_capacity_for(chan: &SemanticChannel, w: &Kernel<f64>, tol: f64) -> Result<SemanticCapacity> {
    let enc = EnablingMap::full(chan.kernel().input_space().to_vec(), w.input_space().to_vec())?;
    let dec = EnablingMap::full(w.output_space().to_vec(), chan.kernel().output_space().to_vec())?;
    match semantic_capacity(w, &enc, &dec, tol) {
        Err(Error::Precondition(_)) => semantic_capacity_bounds(chan, w, tol),
        other => other,
    }
}

/// `I(P, κ)` for a float kernel and a source pmf over its inputs.
pub fn kernel_mi(p: &[f64], k: &Kernel<f64>) -> f64 {
    mi_of(p, &flat(k), k.n_outputs())
}
