//! Rate functions of the large-deviation principles, the AEP entropy
//! constants, and numerical checks of the variational formulas.

mod functions;
mod variational;

pub use functions::{
    euler_check, graph_aep_entropy, rate_i, rate_i1, rate_i2, rate_i3, rate_i4, rate_j, RateResult,
};
pub use variational::{
    numeric_sup_i1, numeric_sup_i2, numeric_sup_i3, objective_i1, objective_i2, objective_i3, z_limit, z_n,
    AscentParams, SymCoords, VariationalReport,
};
