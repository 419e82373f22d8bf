//! Quadrature-based evaluation of the generalized hyperbolic (GH)
//! distribution.
//!
//! The GIG mixing law of a GH variate is replaced by a positive quadrature
//! rule built from the Gauss–Hermite rule through the change of variables
//! `z = sigma (sqrt(x) - 1/sqrt(x))`. The GH law then becomes a finite normal
//! mixture, so CDFs, quantiles, option prices and random variates reduce to
//! normal computations.
//!
//! ```
//! use ghquad::{gh_cdf, preset};
//!
//! let params = preset("set1").unwrap().gh_params().unwrap();
//! let f = gh_cdf(&params, 0.0, 50).unwrap();
//! assert!((f - 0.5).abs() < 1e-12);
//! ```

// NaN must fail parameter checks, so negated comparisons are deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distribution;
pub mod error;
pub mod hermite;
pub mod mapping;
pub mod mixture;
pub mod numeric;
pub mod oracle;
pub mod presets;
pub mod quadrature;
pub mod sampling;
pub mod special;

pub use distribution::{
    from_alpha_parameterization, gh_density, gh_mgf, gh_summary_stats, gig_density, gig_mgf,
    gig_moment, ig_density, GHParams, GHParamsAlpha, GhDensity, SummaryStats,
};
pub use error::{Error, Result};
pub use hermite::{hermite_rule, hermite_rule_cached, QuadratureRule, MAX_RULE_SIZE};
pub use mapping::{jacobian_weight, phi, phi_inv, Sigma};
pub use mixture::{
    build_mixture, call_price, gh_cdf, gh_expectation, gh_quantile, gh_sf, gig_mgf_quad, put_price,
    Mixture, MixtureComponent,
};
pub use oracle::{
    adaptive_integrate, cdf_by_integration, mixture_cdf_bruteforce, mixture_sf_bruteforce,
    quantile_by_integration, sf_by_integration, DensityOracle, Integral,
};
pub use presets::{preset, ParameterSetPreset, PRESETS};
pub use quadrature::{gig_rule, gig_rule_cached, ig_rule, GIGParams, IGParams};
pub use sampling::{
    ig_variate, sample_gh, sample_gig_discrete, sample_ig_exact, select_component,
    ComponentSelector, GhSampler, RngStream,
};
pub use special::{
    bessel_k, bessel_k_scaled, ln_bessel_k, ln_bessel_k_scaled, normal_cdf, normal_pdf,
    normal_quantile, normal_sf,
};
