//! Numerical audit of the lacunary central limit argument.

pub mod alpha;
pub mod charfn;
pub mod gaussian;
pub mod ks;
pub mod remainder;
pub mod report;

pub use alpha::{alpha_at, alpha_mean, alpha_modulus_bound_at, beta_at, product_moment};
pub use charfn::{
    cartesian_grid, charfn_deviation_integral, default_grid, deviation_bound, empirical_char_fn, gaussian_char_fn,
    CharFnPoint,
};
pub use gaussian::{gaussian_abs_mean, simulate_gaussian_abs_mean, smoothing_bound, GaussianSpec, SmoothingInputs};
pub use ks::{ks_distance_normal, normal_cdf};
pub use remainder::{reconstruct_exp_ix, w_remainder};
pub use report::{
    clt_report, clt_report_with_marginals, limit_value, smoothing_variance, truncation_radius, ChainCheck, CltReport,
    FinalChainAudit, Marginals, LIMIT_VARIANCE,
};
