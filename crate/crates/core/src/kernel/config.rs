//! Channel configuration files and the encoder/decoder constructions they name.
//!
//! ```json
//! {"carrier": {"type": "q_symmetric", "q": 10, "p": 0.1},
//!  "encoder": "canonical_injection",
//!  "decoder": "nearest_closure",
//!  "carrier_size": 10}
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distortion::d_closure;
use crate::error::{Error, Result};
use crate::kb::{KnowledgeBase, ProofSystem};

use super::channel::{build_semantic_channel, SemanticChannel};
use super::matrix::{deterministic_kernel, q_symmetric_channel, symbol_space, Kernel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CarrierSpec {
    QSymmetric {
        q: usize,
        p: f64,
    },
    /// Explicit row-stochastic matrix over symbols `0..rows`, `0..cols`.
    Matrix {
        rows: Vec<Vec<f64>>,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    #[default]
    CanonicalInjection,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    #[default]
    NearestClosure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub carrier: CarrierSpec,
    #[serde(default)]
    pub encoder: EncoderKind,
    #[serde(default)]
    pub decoder: DecoderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier_size: Option<usize>,
}

impl ChannelConfig {
    pub fn q_symmetric(q: usize, p: f64) -> Self {
        Self {
            carrier: CarrierSpec::QSymmetric { q, p },
            encoder: EncoderKind::default(),
            decoder: DecoderKind::default(),
            carrier_size: Some(q),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.carrier()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The carrier kernel `W`.
    pub fn carrier(&self) -> Result<Kernel<f64>> {
        let w = match &self.carrier {
            CarrierSpec::QSymmetric { q, p } => q_symmetric_channel(*q, *p)?,
            CarrierSpec::Matrix { rows } => {
                let cols = rows.first().map_or(0, Vec::len);
                Kernel::new(symbol_space(rows.len()), symbol_space(cols), rows.clone())?
            }
        };
        if let Some(n) = self.carrier_size {
            if n != w.n_inputs() {
                return Err(Error::Config(format!(
                    "carrier_size {n} but the carrier has {} input symbols",
                    w.n_inputs()
                )));
            }
        }
        Ok(w)
    }

    pub fn encoder(&self, sender: &KnowledgeBase, w: &Kernel<f64>) -> Result<Kernel<f64>> {
        match self.encoder {
            EncoderKind::CanonicalInjection => canonical_injection(sender, w.input_space()),
        }
    }

    pub fn decoder(
        &self,
        sender: &KnowledgeBase,
        receiver: &KnowledgeBase,
        enc: &Kernel<f64>,
        w: &Kernel<f64>,
        ps: &ProofSystem,
    ) -> Result<Kernel<f64>> {
        match self.decoder {
            DecoderKind::NearestClosure => nearest_closure_decoder(sender, receiver, enc, w.output_space(), ps),
        }
    }

    /// Builds `D ∘ W ∘ f` for one sender/receiver pair.
    pub fn semantic_channel(
        &self,
        sender: &KnowledgeBase,
        receiver: &KnowledgeBase,
        ps: &ProofSystem,
    ) -> Result<SemanticChannel> {
        let w = self.carrier()?;
        let enc = self.encoder(sender, &w)?;
        let dec = self.decoder(sender, receiver, &enc, &w, ps)?;
        build_semantic_channel(sender, receiver, &enc, &w, &dec)
    }
}

/// Maps the i-th sender state (canonical order) to the i-th carrier symbol.
pub fn canonical_injection(sender: &KnowledgeBase, carrier: &[String]) -> Result<Kernel<f64>> {
    if sender.len() > carrier.len() {
        return Err(Error::Config(format!(
            "{} sender states do not fit into {} carrier symbols",
            sender.len(),
            carrier.len()
        )));
    }
    let f: BTreeMap<String, String> = sender.labels().into_iter().zip(carrier.iter().cloned()).collect();
    deterministic_kernel(&f, sender.labels(), carrier.to_vec())
}

/// Deterministic decoder from received symbols to the receiver vocabulary.
///
/// A symbol is first mapped back through the (deterministic) encoder; symbols
/// outside the encoder image fall back to the canonical-first sender state.
/// The recovered sender state is kept if the receiver stores it, otherwise
/// it is replaced by the receiver state of least closure distortion relative
/// to the sender KB (first in canonical order on ties).
pub fn nearest_closure_decoder(
    sender: &KnowledgeBase,
    receiver: &KnowledgeBase,
    enc: &Kernel<f64>,
    received: &[String],
    ps: &ProofSystem,
) -> Result<Kernel<f64>> {
    if !enc.is_deterministic() {
        return Err(Error::Precondition("encoder is not deterministic".into()));
    }
    if receiver.is_empty() {
        return Err(Error::Precondition("empty receiver vocabulary".into()));
    }
    let senders: Vec<_> = sender.iter().collect();
    let fallback = *senders
        .first()
        .ok_or_else(|| Error::Precondition("empty sender KB".into()))?;
    // Inverse image; the first preimage wins if the encoder is not injective.
    let mut inverse = BTreeMap::new();
    for (i, s) in senders.iter().enumerate() {
        let j = enc.support(i).next().expect("deterministic row");
        inverse.entry(enc.output_space()[j].clone()).or_insert(*s);
    }
    let mut nearest = BTreeMap::new();
    let mut f = BTreeMap::new();
    for y in received {
        let s = inverse.get(y).copied().unwrap_or(fallback);
        let out = if receiver.contains(s) {
            s
        } else {
            *nearest.entry(s).or_insert_with(|| {
                receiver
                    .iter()
                    .map(|t| (d_closure(s, t, sender.atoms(), ps), t))
                    .min_by(|a, b| a.0.cmp(&b.0))
                    .map(|(_, t)| t)
                    .expect("non-empty receiver")
            })
        };
        f.insert(y.clone(), out.to_string());
    }
    deterministic_kernel(&f, received.to_vec(), receiver.labels())
}
