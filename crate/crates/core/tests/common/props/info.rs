use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use proptest::sample::subsequence;

use semchan::distortion::{expected_distortion, hamming_split, DistortionContext, DistortionKind};
use semchan::info::{
    entropy, fano_alphabet, fano_lower_bound, mutual_information, rate_distortion, semantic_capacity, shannon_capacity,
    CapacityMode,
};
use semchan::kb::{extract_core, GroundAtom, KnowledgeBase, ProofSystem};
use semchan::kernel::{compose, deterministic_kernel, joint, Distribution, EnablingMap, Kernel, SemanticChannel};

use super::super::*;
use super::{run, Check};

pub const ALL: &[(&str, Check)] = &[
    ("data-processing chain", data_processing_chain),
    ("Fano bound below measured I_sem", fano_bound_below_measured_mi),
    ("expected Hamming decomposition", expected_hamming_decomposition),
    (
        "R(0; d_Cn) at most log2|Atom| with witness",
        zero_closure_distortion_rate_at_most_log_atomicity,
    ),
];

const TOL: f64 = 1e-9;
const SLACK: f64 = 1e-8;

type Chain = (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Source pmf, encoder, carrier and decoder for `|S_O|, |S_C|, |Ŝ_C|, |Ŝ_O| ≤ 3`.
fn chain() -> impl Strategy<Value = Chain> {
    (1usize..=3, 2usize..=3, 2usize..=3, 1usize..=3)
        .prop_flat_map(|(o, c, hc, ho)| (pmf(o), stochastic(o, c), stochastic(c, hc), stochastic(hc, ho)))
}

/// A sender KB, a receiver vocabulary over the same constants, a source
/// pmf and an end-to-end kernel between them.
fn kb_channel() -> impl Strategy<Value = (SemanticChannel, Distribution<f64>)> {
    instance(6)
        .prop_flat_map(|inst| {
            let universe = herbrand(inst.domain);
            (Just(inst.kb()), subsequence(universe, 1..=6))
        })
        .prop_flat_map(|(sender, recv)| {
            let receiver: KnowledgeBase = recv.into_iter().collect::<BTreeSet<GroundAtom>>().into();
            let (n, m) = (sender.len(), receiver.len());
            (Just(sender), Just(receiver), stochastic(n, m), pmf(n))
        })
        .prop_map(|(sender, receiver, rows, p)| {
            let k = Kernel::new(sender.labels(), receiver.labels(), rows).unwrap();
            let source = Distribution::new(sender.labels(), p).unwrap();
            (SemanticChannel::from_kernel(sender, receiver, k).unwrap(), source)
        })
}

/// `I ≤ C(κ) ≤ C_sem ≤ C(W)` and `C_sem ≤ min(log|S_O|, log|Ŝ_O|)` for one chain.
pub fn check_chain((p, enc, w, dec): Chain) -> Result<(), TestCaseError> {
    let (o, c, hc, ho) = (enc.len(), w.len(), w[0].len(), dec[0].len());
    let enc = Kernel::new(space("s", o), space("x", c), enc).unwrap();
    let w = Kernel::new(space("x", c), space("y", hc), w).unwrap();
    let dec = Kernel::new(space("y", hc), space("t", ho), dec).unwrap();
    let kappa = compose(&compose(&enc, &w).unwrap(), &dec).unwrap();
    let source = Distribution::new(space("s", o), p).unwrap();
    let i_sem = mutual_information(&joint(&source, &kappa).unwrap());

    let e_enc = EnablingMap::full(space("s", o), space("x", c)).unwrap();
    let e_dec = EnablingMap::full(space("y", hc), space("t", ho)).unwrap();
    let c_sem = semantic_capacity(&w, &e_enc, &e_dec, TOL).unwrap();
    prop_assert_eq!(c_sem.mode, CapacityMode::Exact);
    let c_kappa = shannon_capacity(&kappa, TOL).unwrap().bits;
    let c_w = shannon_capacity(&w, TOL).unwrap().bits;

    prop_assert!(i_sem <= c_kappa + SLACK, "I {} > C(kappa) {}", i_sem, c_kappa);
    prop_assert!(
        c_kappa <= c_sem.bits + SLACK,
        "C(kappa) {} > C_sem {}",
        c_kappa,
        c_sem.bits
    );
    prop_assert!(c_sem.bits <= c_w + SLACK, "C_sem {} > C(W) {}", c_sem.bits, c_w);
    prop_assert!(c_sem.bits <= (o as f64).log2().min((ho as f64).log2()) + SLACK);
    Ok(())
}

pub fn data_processing_chain() -> Result<(), String> {
    run(chain(), check_chain)
}

pub fn fano_bound_below_measured_mi() -> Result<(), String> {
    run(kb_channel(), |(chan, source)| {
        let i_sem = mutual_information(&joint(&source, chan.kernel()).unwrap());
        let ctx = DistortionContext::new(chan.sender(), &ProofSystem::default());
        let d = ctx.matrix(chan.receiver_vocab(), DistortionKind::Hamming);
        let eps = expected_distortion(&chan, &source, &d).unwrap().total;
        let bound = fano_lower_bound(entropy(&source), eps, fano_alphabet(&chan));
        prop_assert!(bound <= i_sem + 1e-9, "Fano {} > I {}", bound, i_sem);
        Ok(())
    })
}

pub fn expected_hamming_decomposition() -> Result<(), String> {
    run(kb_channel(), |(chan, source)| {
        let ctx = DistortionContext::new(chan.sender(), &ProofSystem::default());
        let d = ctx.matrix(chan.receiver_vocab(), DistortionKind::Hamming);
        let total = expected_distortion(&chan, &source, &d).unwrap().total;
        let split = hamming_split(&chan, &source).unwrap();
        prop_assert!((total - (split.within + split.spurious)).abs() <= 1e-12);

        // Kept mass on shared states plus the full mass of lost states.
        let mut by_state = 0.0;
        for (i, s) in chan.sender().iter().enumerate() {
            let stay = chan.prob(s, s).unwrap_or(0.0);
            by_state += source.mass()[i] * (1.0 - stay);
        }
        prop_assert!((total - by_state).abs() <= 1e-12);
        Ok(())
    })
}

pub fn zero_closure_distortion_rate_at_most_log_atomicity() -> Result<(), String> {
    run((instance(8), pmf(8)), |(inst, p_seed)| {
        let sender = inst.kb();
        let ctx = DistortionContext::new(&sender, &inst.ps);
        let d = ctx.matrix(&sender, DistortionKind::Closure);
        let raw = &p_seed[..sender.len()];
        let t: f64 = raw.iter().sum();
        let source = Distribution::new(sender.labels(), raw.iter().map(|x| x / t).collect()).unwrap();

        let analysis = extract_core(&sender, &inst.ps);
        let anchor = analysis.anchor().unwrap().to_string();
        let phi: BTreeMap<String, String> = sender
            .iter()
            .map(|s| {
                let img = if analysis.is_core(s) {
                    s.to_string()
                } else {
                    anchor.clone()
                };
                (s.to_string(), img)
            })
            .collect();
        let witness: Kernel<f64> = deterministic_kernel(&phi, sender.labels(), sender.labels()).unwrap();
        let chan = SemanticChannel::from_kernel(sender.clone(), sender.clone(), witness.clone()).unwrap();
        prop_assert_eq!(expected_distortion(&chan, &source, &d).unwrap().total, 0.0);

        let i_phi = mutual_information(&joint(&source, &witness).unwrap());
        prop_assert!(i_phi <= (analysis.atomicity as f64).log2() + 1e-12);

        let rd = rate_distortion(&source, &d, 0.0, 1e-9).unwrap();
        prop_assert!(rd.rate <= i_phi + 1e-6, "R(0) {} > I(phi) {}", rd.rate, i_phi);
        prop_assert!(rd.distortion <= 1e-9);
        Ok(())
    })
}
