//! Randomly coloured random graphs: sampling, empirical measures, exact
//! log-probabilities and exponential tilting.

mod empirical;
pub mod enumerate;
mod io;
mod logprob;
mod model;
mod scaling;
mod tilt;

pub use empirical::{diagnostic_measures, empirical_colour, empirical_pair, DiagnosticMeasures};
pub use io::{read_graph, write_graph};
pub use logprob::{expected_information, log_prob_graph, normalized_information, InfoMode};
pub(crate) use model::sample_index;
pub use model::{sample_graph, ColouredGraph, GraphLaw, GraphModel};
pub use scaling::ScalingFamily;
pub use tilt::{closed_form_log_density, log_normalizer, rn_log_residual, tilt, Tilt, TiltScale, TiltSpec};
