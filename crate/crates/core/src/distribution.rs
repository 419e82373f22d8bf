//! Closed-form machinery of the IG, GIG and GH laws: densities, moments,
//! moment generating functions and summary statistics.
//!
//! `Y ~ GH(mu, beta, gamma, delta, p)` is the normal variance-mean mixture
//! `Y = mu + beta X + sqrt(X) Z` with `X ~ GIG(gamma, delta, p)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{GIGParams, IGParams};
use crate::special::{ln_bessel_k, ln_bessel_k_scaled};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// GH parameters in the `(mu, beta, gamma, delta, p)` form used throughout
/// the crate; `alpha = sqrt(beta^2 + gamma^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GHParams {
    pub mu: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub p: f64,
}

/// GH parameters in the conventional `(mu, alpha, beta, delta, p)` form,
/// `|beta| < alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GHParamsAlpha {
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub p: f64,
}

impl GHParams {
    pub fn new(mu: f64, beta: f64, gamma: f64, delta: f64, p: f64) -> Result<Self> {
        let params = GHParams {
            mu,
            beta,
            gamma,
            delta,
            p,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.beta.is_finite() {
            return Err(Error::Parameter(format!(
                "GH mu and beta must be finite, got mu={} beta={}",
                self.mu, self.beta
            )));
        }
        self.mixing().validate()
    }

    pub fn alpha(&self) -> f64 {
        self.beta.hypot(self.gamma)
    }

    pub fn sigma(&self) -> f64 {
        (self.gamma * self.delta).sqrt()
    }

    /// The GIG mixing law of `X`.
    pub fn mixing(&self) -> GIGParams {
        GIGParams {
            gamma: self.gamma,
            delta: self.delta,
            p: self.p,
        }
    }

    pub fn to_alpha(&self) -> GHParamsAlpha {
        GHParamsAlpha {
            mu: self.mu,
            alpha: self.alpha(),
            beta: self.beta,
            delta: self.delta,
            p: self.p,
        }
    }
}

impl GHParamsAlpha {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu, self.alpha, self.beta, self.delta, self.p]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Parameter("GH parameters must be finite".into()));
        }
        if !(self.beta.abs() < self.alpha) {
            return Err(Error::Parameter(format!(
                "GH requires |beta| < alpha, got alpha={} beta={}",
                self.alpha, self.beta
            )));
        }
        if !(self.delta > 0.0) {
            return Err(Error::Parameter(format!(
                "GH delta must be > 0, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Converts `(mu, alpha, beta, delta, p)` to `(mu, beta, gamma, delta, p)`
/// with `gamma = sqrt(alpha^2 - beta^2)`.
pub fn from_alpha_parameterization(q: &GHParamsAlpha) -> Result<GHParams> {
    q.validate()?;
    let gamma = ((q.alpha - q.beta) * (q.alpha + q.beta)).sqrt();
    GHParams::new(q.mu, q.beta, gamma, q.delta, q.p)
}

impl TryFrom<GHParamsAlpha> for GHParams {
    type Error = Error;

    fn try_from(q: GHParamsAlpha) -> Result<Self> {
        from_alpha_parameterization(&q)
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "density requires finite x > 0, got {x}"
        )))
    }
}

/// Inverse Gaussian density `delta / sqrt(2 pi x^3) exp(-(gamma x - delta)^2 / (2x))`.
pub fn ig_density(params: &IGParams, x: f64) -> Result<f64> {
    params.validate()?;
    check_positive(x)?;
    let dev = params.gamma * x.sqrt() - params.delta / x.sqrt();
    Ok(params.delta / (2.0 * PI * x * x * x).sqrt() * (-0.5 * dev * dev).exp())
}

/// Log of the GIG density with the standard kernel
/// `exp(-(gamma^2 x + delta^2 / x) / 2)`.
pub fn ln_gig_density(params: &GIGParams, x: f64) -> Result<f64> {
    params.validate()?;
    check_positive(x)?;
    let GIGParams { gamma, delta, p } = *params;
    // -(gamma^2 x + delta^2/x)/2 + gamma delta = -(gamma sqrt(x) - delta/sqrt(x))^2 / 2
    let dev = gamma * x.sqrt() - delta / x.sqrt();
    let ln_k_scaled = ln_bessel_k_scaled(p, gamma * delta)?;
    Ok(p * (gamma / delta).ln() + (p - 1.0) * x.ln()
        - std::f64::consts::LN_2
        - ln_k_scaled
        - 0.5 * dev * dev)
}

/// GIG density `(gamma/delta)^p x^{p-1} / (2 K_p(gamma delta)) exp(-(gamma^2 x + delta^2/x)/2)`.
pub fn gig_density(params: &GIGParams, x: f64) -> Result<f64> {
    Ok(ln_gig_density(params, x)?.exp())
}

/// Log of the GH density.
pub fn ln_gh_density(params: &GHParams, y: f64) -> Result<f64> {
    params.validate()?;
    let GHParams {
        mu,
        beta,
        gamma,
        delta,
        p,
    } = *params;
    let alpha = params.alpha();
    let dy = y - mu;
    let q = delta.hypot(dy);
    let ln_norm = 0.5 * alpha.ln() + p * (gamma / (alpha * delta)).ln() - LN_SQRT_2PI;
    let ln_k_den = ln_bessel_k_scaled(p, delta * gamma)?;
    let ln_k_num = ln_bessel_k_scaled(p - 0.5, alpha * q)?;
    // exponential factors of the scaled Bessel functions folded into one term
    let expo = beta * dy - alpha * q + delta * gamma;
    Ok(ln_norm - ln_k_den + ln_k_num + expo - (1.0 - 2.0 * p) / 2.0 * q.ln())
}

/// GH density.
pub fn gh_density(params: &GHParams, y: f64) -> Result<f64> {
    Ok(ln_gh_density(params, y)?.exp())
}

/// GH density with the parameter-only factors computed once, for repeated
/// evaluation inside integrators.
#[derive(Debug, Clone, Copy)]
pub struct GhDensity {
    params: GHParams,
    alpha: f64,
    ln_const: f64,
}

impl GhDensity {
    pub fn new(params: &GHParams) -> Result<Self> {
        params.validate()?;
        let GHParams {
            gamma, delta, p, ..
        } = *params;
        let alpha = params.alpha();
        let ln_const = 0.5 * alpha.ln() + p * (gamma / (alpha * delta)).ln()
            - LN_SQRT_2PI
            - ln_bessel_k_scaled(p, delta * gamma)?
            + delta * gamma;
        Ok(GhDensity {
            params: *params,
            alpha,
            ln_const,
        })
    }

    pub fn ln_pdf(&self, y: f64) -> Result<f64> {
        let GHParams {
            mu, beta, delta, p, ..
        } = self.params;
        let dy = y - mu;
        let q = delta.hypot(dy);
        let ln_k = ln_bessel_k_scaled(p - 0.5, self.alpha * q)?;
        Ok(self.ln_const + ln_k + beta * dy - self.alpha * q - (1.0 - 2.0 * p) / 2.0 * q.ln())
    }

    /// Density, with zero returned where the log density is not representable.
    pub fn pdf(&self, y: f64) -> f64 {
        match self.ln_pdf(y) {
            Ok(v) => v.exp(),
            Err(_) => 0.0,
        }
    }
}

/// `E[X^r] = (delta/gamma)^r K_{r+p}(gamma delta) / K_p(gamma delta)` for `X ~ GIG`.
pub fn gig_moment(params: &GIGParams, r: f64) -> Result<f64> {
    params.validate()?;
    if !r.is_finite() {
        return Err(Error::Domain(format!(
            "moment order must be finite, got {r}"
        )));
    }
    if r == 0.0 {
        return Ok(1.0);
    }
    let z = params.gamma * params.delta;
    let ln_m = r * params.scale().ln() + ln_bessel_k_scaled(r + params.p, z)?
        - ln_bessel_k_scaled(params.p, z)?;
    let m = ln_m.exp();
    if m.is_finite() && m > 0.0 {
        Ok(m)
    } else {
        Err(Error::Range(format!(
            "moment of order {r} not representable (ln = {ln_m})"
        )))
    }
}

/// GIG moment generating function, defined for `t < gamma^2 / 2`.
pub fn gig_mgf(params: &GIGParams, t: f64) -> Result<f64> {
    params.validate()?;
    let GIGParams { gamma, delta, p } = *params;
    let radius = 0.5 * gamma * gamma;
    if !(t < radius) {
        return Err(Error::Divergence(format!(
            "GIG MGF requires t < gamma^2/2 = {radius}, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let s = (gamma * gamma - 2.0 * t).sqrt();
    if !(s > 0.0) {
        return Err(Error::Divergence(format!(
            "GIG MGF argument {t} too close to the boundary {radius}"
        )));
    }
    // delta (gamma - s) without cancellation
    let shift = delta * 2.0 * t / (gamma + s);
    let ln_m = p * (gamma / s).ln() + ln_bessel_k_scaled(p, delta * s)?
        - ln_bessel_k_scaled(p, delta * gamma)?
        + shift;
    let m = ln_m.exp();
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Range(format!("GIG MGF at t={t} overflows")))
    }
}

/// GH moment generating function `e^{mu t} M_X(beta t + t^2/2)`.
pub fn gh_mgf(params: &GHParams, t: f64) -> Result<f64> {
    params.validate()?;
    let u = params.beta * t + 0.5 * t * t;
    let mx = gig_mgf(&params.mixing(), u).map_err(|e| match e {
        Error::Divergence(_) => Error::Divergence(format!(
            "GH MGF requires beta t + t^2/2 < gamma^2/2, got t={t} (beta t + t^2/2 = {u})"
        )),
        other => other,
    })?;
    let m = (params.mu * t).exp() * mx;
    if m.is_finite() {
        Ok(m)
    } else {
        Err(Error::Range(format!("GH MGF at t={t} overflows")))
    }
}

/// Mean, variance, skewness and excess kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub ex_kurtosis: f64,
}

/// Summary statistics of `GH` assembled from the first four GIG moments.
///
/// With `c_k` the central moments of `X` and `m_k` its raw moments:
/// `var = m_1 + beta^2 c_2`, `mu_3 = beta^3 c_3 + 3 beta c_2`,
/// `mu_4 = beta^4 c_4 + 6 beta^2 (c_3 + m_1 c_2) + 3 m_2`.
pub fn gh_summary_stats(params: &GHParams) -> Result<SummaryStats> {
    params.validate()?;
    let GHParams {
        mu,
        beta,
        gamma,
        delta,
        p,
    } = *params;
    let scale = delta / gamma;
    // moments of the unit-scale GIG(sigma, sigma, p)
    let z = gamma * delta;
    let ln_k0 = ln_bessel_k_scaled(p, z)?;
    let raw = |r: f64| -> Result<f64> { Ok((ln_bessel_k_scaled(p + r, z)? - ln_k0).exp()) };
    let (m1, m2, m3, m4) = (raw(1.0)?, raw(2.0)?, raw(3.0)?, raw(4.0)?);
    let c2 = m2 - m1 * m1;
    let c3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
    let c4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);

    let (m1, m2) = (scale * m1, scale * scale * m2);
    let (c2, c3, c4) = (scale.powi(2) * c2, scale.powi(3) * c3, scale.powi(4) * c4);

    let mean = mu + beta * m1;
    let variance = m1 + beta * beta * c2;
    let mu3 = beta.powi(3) * c3 + 3.0 * beta * c2;
    let mu4 = beta.powi(4) * c4 + 6.0 * beta * beta * (c3 + m1 * c2) + 3.0 * m2;
    let stats = SummaryStats {
        mean,
        variance,
        skewness: mu3 / variance.powf(1.5),
        ex_kurtosis: mu4 / (variance * variance) - 3.0,
    };
    if [
        stats.mean,
        stats.variance,
        stats.skewness,
        stats.ex_kurtosis,
    ]
    .iter()
    .all(|v| v.is_finite())
    {
        Ok(stats)
    } else {
        Err(Error::Range("summary statistics not representable".into()))
    }
}

/// `ln K_p(z)`, re-exported for callers that need the normalizing constant.
pub fn ln_normalizer(params: &GIGParams) -> Result<f64> {
    ln_bessel_k(params.p, params.gamma * params.delta)
}
