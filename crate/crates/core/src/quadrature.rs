//! Inverse Gaussian and generalized inverse Gaussian quadratures obtained by
//! mapping a Gauss–Hermite rule through `phi_inv`.
//!
//! For `IG(gamma, delta)` with `sigma = sqrt(gamma delta)`, the Hermite node
//! `z_k` with weight `h_k` becomes the node `(delta/gamma) phi_inv(z_k)` with
//! weight `2 h_k / (1 + phi_inv(z_k))`. The rule integrates `x^r` exactly for
//! every integer `1 - n <= r <= n`. GIG weights are the IG weights tilted by
//! the density ratio `c x^{p + 1/2}`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermite::{check_size, hermite_rule_cached, QuadratureRule};
use crate::mapping::{phi_inv, Sigma};
use crate::numeric::compensated_sum;
use crate::special::ln_bessel_k_scaled;

/// Weights below this are dropped and the rule is flagged as degraded.
const WEIGHT_FLOOR: f64 = 1e-300;

/// Parameters of the inverse Gaussian law `IG(gamma, delta)`: first passage
/// time of `gamma t + B_t` to level `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IGParams {
    pub gamma: f64,
    pub delta: f64,
}

impl IGParams {
    /// `gamma >= 0`, `delta > 0`. `gamma = 0` is accepted for density
    /// evaluation only.
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        let p = IGParams { gamma, delta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!(
                "IG gamma must be finite and >= 0, got {}",
                self.gamma
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Parameter(format!(
                "IG delta must be finite and > 0, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        (self.gamma * self.delta).sqrt()
    }

    /// `delta / gamma`, the scale relating this law to `IG(sigma, sigma)`.
    pub fn scale(&self) -> f64 {
        self.delta / self.gamma
    }
}

/// Parameters of the generalized inverse Gaussian law `GIG(gamma, delta, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GIGParams {
    pub gamma: f64,
    pub delta: f64,
    pub p: f64,
}

impl GIGParams {
    pub fn new(gamma: f64, delta: f64, p: f64) -> Result<Self> {
        let params = GIGParams { gamma, delta, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!(
                "GIG gamma must be finite and > 0, got {}",
                self.gamma
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::Parameter(format!(
                "GIG delta must be finite and > 0, got {}",
                self.delta
            )));
        }
        if !self.p.is_finite() {
            return Err(Error::Parameter(format!(
                "GIG order p must be finite, got {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn sigma(&self) -> f64 {
        (self.gamma * self.delta).sqrt()
    }

    pub fn scale(&self) -> f64 {
        self.delta / self.gamma
    }

    /// The IG law sharing `gamma` and `delta`.
    pub fn ig(&self) -> IGParams {
        IGParams {
            gamma: self.gamma,
            delta: self.delta,
        }
    }
}

impl From<IGParams> for GIGParams {
    fn from(ig: IGParams) -> Self {
        GIGParams {
            gamma: ig.gamma,
            delta: ig.delta,
            p: -0.5,
        }
    }
}

/// IG quadrature of size `n` for `IG(gamma, delta)`.
pub fn ig_rule(params: &IGParams, n: usize) -> Result<QuadratureRule> {
    params.validate()?;
    if params.gamma <= 0.0 {
        return Err(Error::Parameter("IG quadrature requires gamma > 0".into()));
    }
    check_size(n)?;
    let hermite = hermite_rule_cached(n)?;
    let sigma = Sigma::new(params.sigma())?;
    let scale = params.scale();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut degraded = false;
    for (z, h) in hermite.iter() {
        let x = phi_inv(sigma, z);
        let w = 2.0 * h / (1.0 + x);
        if !(w >= WEIGHT_FLOOR) {
            degraded = true;
            continue;
        }
        nodes.push(scale * x);
        weights.push(w);
    }
    if degraded {
        normalize_weights(&mut weights)?;
    }
    Ok(QuadratureRule::from_parts_unchecked(
        nodes, weights, degraded,
    ))
}

/// `ln c(gamma, delta, p)` where `f_GIG = c x^{p + 1/2} f_IG`.
fn ln_tilt_constant(params: &GIGParams) -> Result<f64> {
    let ln_k = ln_bessel_k_scaled(params.p, params.gamma * params.delta)?;
    Ok(
        0.5 * (std::f64::consts::PI / 2.0).ln() + params.p * params.gamma.ln()
            - (params.p + 1.0) * params.delta.ln()
            - ln_k,
    )
}

/// GIG quadrature of size `n` for `GIG(gamma, delta, p)`.
///
/// Nodes coincide with [`ig_rule`]. When `renormalize` is set the weights are
/// divided by their sum, which differs from one when `p + 1/2` is not an
/// integer.
pub fn gig_rule(params: &GIGParams, n: usize, renormalize: bool) -> Result<QuadratureRule> {
    params.validate()?;
    let ig = ig_rule(&params.ig(), n)?;
    let ln_c = ln_tilt_constant(params)?;
    let alpha = params.p + 0.5;
    let mut nodes = Vec::with_capacity(ig.len());
    let mut weights = Vec::with_capacity(ig.len());
    let mut degraded = ig.is_degraded();
    for (x, w) in ig.iter() {
        let wbar = if alpha == 0.0 {
            ln_c.exp() * w
        } else {
            (ln_c + alpha * x.ln() + w.ln()).exp()
        };
        if !wbar.is_finite() {
            return Err(Error::Range(format!(
                "GIG weight overflow at node {x} (p = {})",
                params.p
            )));
        }
        if wbar < WEIGHT_FLOOR {
            degraded = true;
            continue;
        }
        nodes.push(x);
        weights.push(wbar);
    }
    if nodes.is_empty() {
        return Err(Error::Range("every GIG weight underflowed".into()));
    }
    if renormalize || degraded {
        normalize_weights(&mut weights)?;
    }
    Ok(QuadratureRule::from_parts_unchecked(
        nodes, weights, degraded,
    ))
}

fn normalize_weights(weights: &mut [f64]) -> Result<()> {
    let total = compensated_sum(weights.iter().copied());
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::Range(format!("quadrature weights sum to {total}")));
    }
    for w in weights.iter_mut() {
        *w /= total;
    }
    Ok(())
}

type RuleKey = (u64, u64, u64, usize, bool);

/// Memoized [`gig_rule`], keyed by the exact parameter bits.
pub fn gig_rule_cached(
    params: &GIGParams,
    n: usize,
    renormalize: bool,
) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<RwLock<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    const MAX_ENTRIES: usize = 4096;
    let key = (
        params.gamma.to_bits(),
        params.delta.to_bits(),
        params.p.to_bits(),
        n,
        renormalize,
    );
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(rule) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gig_rule(params, n, renormalize)?);
    let mut guard = cache.write().unwrap_or_else(|e| e.into_inner());
    if guard.len() >= MAX_ENTRIES {
        guard.clear();
    }
    Ok(Arc::clone(guard.entry(key).or_insert(rule)))
}
