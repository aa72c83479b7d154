//! L1 norms of exponential sums `S(θ) = Σ_j e^{2πi k_j θ}` on `[0,1]`.
//!
//! * [`sums`]: frequency sets and exact-phase evaluation of `S`.
//! * [`norms`]: `L^p` norms by quadrature and reproducible Monte Carlo.
//! * [`diophantine`]: additive energy, Sidon sets, Hölder lower bounds.
//! * [`clt`]: the lacunary central limit diagnostics.
//! * [`search`]: lower bounds for `Σ_n` and the lacunary convergence study.

pub mod clt;
pub mod diophantine;
pub mod error;
pub mod mc;
pub mod norms;
pub mod quadrature;
pub mod search;
pub mod sums;

pub use diophantine::{count_quadruple_solutions, holder_lower_bound, is_sidon, mian_chowla, EnergyCertificate};
pub use error::{Error, Result};
pub use mc::{Estimate, McConfig};
pub use norms::{
    fourth_moment_cos, l1_auto, l1_monte_carlo, lp_norm_quadrature, lp_power_quadrature, markov_tail_fraction,
    Method, MomentMethod, NormEstimate,
};
pub use quadrature::QuadratureConfig;
pub use search::{
    anneal_sigma, canonicalize, convergence_study, exhaustive_sigma, SearchMethod, SearchResult, StudyRow,
};
pub use sums::{
    evaluate_batch, evaluate_mu_nu, evaluate_sum, lacunary_set, make_frequency_set, FrequencySet, MuNu, SumValue,
    Theta,
};
