use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::kb::{GroundAtom, KnowledgeBase};

use super::matrix::{compose, Kernel};

/// End-to-end channel from the sender's stored states to a receiver's
/// reconstruction vocabulary, with its noise pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SemanticChannel {
    sender: KnowledgeBase,
    receiver_vocab: KnowledgeBase,
    end_to_end: Kernel<f64>,
    lost: BTreeSet<GroundAtom>,
    spurious: BTreeSet<GroundAtom>,
}

impl SemanticChannel {
    /// Wraps an explicit end-to-end kernel whose spaces are the canonical
    /// labels of `sender` and `receiver_vocab`.
    pub fn from_kernel(sender: KnowledgeBase, receiver_vocab: KnowledgeBase, end_to_end: Kernel<f64>) -> Result<Self> {
        if end_to_end.input_space() != sender.labels().as_slice() {
            return Err(Error::SpaceMismatch(
                "end-to-end input space is not the sender KB in canonical order".into(),
            ));
        }
        if end_to_end.output_space() != receiver_vocab.labels().as_slice() {
            return Err(Error::SpaceMismatch(
                "end-to-end output space is not the receiver vocabulary in canonical order".into(),
            ));
        }
        let lost = sender.atoms().difference(receiver_vocab.atoms()).cloned().collect();
        let spurious = receiver_vocab.atoms().difference(sender.atoms()).cloned().collect();
        Ok(Self {
            sender,
            receiver_vocab,
            end_to_end,
            lost,
            spurious,
        })
    }

    pub fn sender(&self) -> &KnowledgeBase {
        &self.sender
    }

    pub fn receiver_vocab(&self) -> &KnowledgeBase {
        &self.receiver_vocab
    }

    pub fn kernel(&self) -> &Kernel<f64> {
        &self.end_to_end
    }

    /// Sender states absent from the receiver vocabulary.
    pub fn lost(&self) -> &BTreeSet<GroundAtom> {
        &self.lost
    }

    /// Receiver states absent from the sender.
    pub fn spurious(&self) -> &BTreeSet<GroundAtom> {
        &self.spurious
    }

    pub fn sender_atoms(&self) -> Vec<&GroundAtom> {
        self.sender.iter().collect()
    }

    pub fn receiver_atoms(&self) -> Vec<&GroundAtom> {
        self.receiver_vocab.iter().collect()
    }

    /// `κ(ŝ | s)`; zero when `ŝ` is outside the receiver vocabulary.
    pub fn prob(&self, s: &GroundAtom, s_hat: &GroundAtom) -> Option<f64> {
        self.end_to_end.prob_by_label(&s.to_string(), &s_hat.to_string())
    }
}

/// Composes `dec ∘ w ∘ enc` into a semantic channel.
pub fn build_semantic_channel(
    sender: &KnowledgeBase,
    receiver_vocab: &KnowledgeBase,
    enc: &Kernel<f64>,
    w: &Kernel<f64>,
    dec: &Kernel<f64>,
) -> Result<SemanticChannel> {
    let end_to_end = compose(&compose(enc, w)?, dec)?;
    SemanticChannel::from_kernel(sender.clone(), receiver_vocab.clone(), end_to_end)
}
