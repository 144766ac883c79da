//! Finite distributions, Markov kernels, enabling constraints and the
//! composed semantic channel.

mod channel;
mod config;
mod distribution;
mod enabling;
mod matrix;
mod product;

pub use channel::{build_semantic_channel, SemanticChannel};
pub use config::{canonical_injection, nearest_closure_decoder, CarrierSpec, ChannelConfig, DecoderKind, EncoderKind};
pub use distribution::{joint, push_forward, Distribution, Joint};
pub use enabling::{validate_enabling, EnablingCheck, EnablingMap};
pub use matrix::{compose, deterministic_kernel, q_symmetric_channel, symbol_space, Kernel, STOCHASTIC_TOL};
pub use product::{product_extension, ProductKernel, DENSE_GUARD};
