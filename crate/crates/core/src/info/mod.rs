//! Entropy, mutual information, capacities, rate–distortion and the
//! structural, noise-pair and quality invariants of a semantic channel.

mod capacity;
mod entropy;
mod indices;
mod rd;
mod report;

pub use capacity::{
    capacity_trace, kernel_mi, semantic_capacity, semantic_capacity_bounds, semantic_capacity_for, shannon_capacity,
    Capacity, CapacityMode, SemanticCapacity, DEFAULT_TOL, MAX_ITERATIONS, SEMANTIC_GUARD,
};
pub use entropy::{binary_entropy, conditional_entropy, entropy, entropy_bits, mutual_information};
pub use indices::{
    fano_alphabet, fano_lower_bound, noise_pair_indices, quality_indices, structural_shifts, NoisePairIndices,
    QualityIndices, StructuralShifts,
};
pub use rd::{is_monotone_convex, rate_distortion, rd_curve, RateDistortion, RatePoint, SWEEP_POINTS};
pub use report::{invariant_report, InvariantReport};
