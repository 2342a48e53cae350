//! Multitype Galton–Watson trees with a bounded offspring kernel.

pub mod enumerate;
mod kernel;
mod measure;
mod progeny;
mod sample;
mod spectral;
mod typed;

pub use kernel::{MeanMatrix, OffspringConfig, OffspringKernel};
pub use measure::{
    log_prob_tree, log_prob_tree_conditioned, offspring_measure, shift_invariance_residual, tree_aep_entropy,
    OffspringMeasure,
};
pub use progeny::progeny_distribution;
pub use sample::{sample_tree, sample_tree_conditioned, sample_tree_window, ConditionedSample, TreeSample};
pub use spectral::{
    is_irreducible, spectral, spectral_closed_form, spectral_power, SpectralMethod, Spectrum, CRITICAL_TOL,
};
pub use typed::TypedTree;
