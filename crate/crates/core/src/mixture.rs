//! Finite normal-mixture approximation of the GH law.
//!
//! Replacing the GIG mixing law by its quadrature rule `(x_k, w_k)` turns
//! `Y = mu + beta X + sqrt(X) Z` into a mixture of `N(mu + beta x_k, x_k)`.

use serde::{Deserialize, Serialize};

use crate::distribution::GHParams;
use crate::error::{Error, Result};
use crate::hermite::{hermite_rule_cached, QuadratureRule};
use crate::numeric::{compensated_sum, NeumaierSum};
use crate::quadrature::{gig_rule_cached, GIGParams};
use crate::special::{normal_cdf, normal_pdf, normal_sf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Normal mixture built from a GIG quadrature rule.
#[derive(Debug, Clone)]
pub struct Mixture {
    params: GHParams,
    components: Vec<MixtureComponent>,
    std_devs: Vec<f64>,
    degraded: bool,
}

/// Components in ascending order of variance.
pub fn build_mixture(params: &GHParams, n: usize) -> Result<Vec<MixtureComponent>> {
    Ok(Mixture::new(params, n)?.components)
}

impl Mixture {
    /// Mixture from the renormalized `n`-point GIG rule of `params`.
    pub fn new(params: &GHParams, n: usize) -> Result<Self> {
        params.validate()?;
        let rule = gig_rule_cached(&params.mixing(), n, true)?;
        Ok(Self::from_rule(params, &rule))
    }

    /// Mixture from an arbitrary positive rule for the mixing variable.
    pub fn from_rule(params: &GHParams, rule: &QuadratureRule) -> Self {
        let components = rule
            .iter()
            .map(|(x, w)| MixtureComponent {
                weight: w,
                mean: params.mu + params.beta * x,
                variance: x,
            })
            .collect::<Vec<_>>();
        let std_devs = components.iter().map(|c| c.variance.sqrt()).collect();
        Mixture {
            params: *params,
            components,
            std_devs,
            degraded: rule.is_degraded(),
        }
    }

    pub fn params(&self) -> &GHParams {
        &self.params
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_degraded(&self) -> bool {
        self.degraded
    }

    fn standardized(&self, y: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (mu, beta) = (self.params.mu, self.params.beta);
        self.components
            .iter()
            .zip(&self.std_devs)
            .map(move |(c, &s)| (c.weight, (y - mu) / s - beta * s))
    }

    /// `sum_k w_k N((y - mu)/sqrt(x_k) - beta sqrt(x_k))`.
    pub fn cdf(&self, y: f64) -> f64 {
        compensated_sum(self.standardized(y).map(|(w, d)| w * normal_cdf(d)))
    }

    /// Upper tail `1 - cdf(y)` evaluated without cancellation.
    pub fn sf(&self, y: f64) -> f64 {
        compensated_sum(self.standardized(y).map(|(w, d)| w * normal_sf(d)))
    }

    pub fn pdf(&self, y: f64) -> f64 {
        compensated_sum(
            self.standardized(y)
                .zip(&self.std_devs)
                .map(|((w, d), s)| w * normal_pdf(d) / s),
        )
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.components.iter().map(|c| c.weight * c.mean))
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        compensated_sum(
            self.components
                .iter()
                .map(|c| c.weight * (c.variance + (c.mean - m).powi(2))),
        )
    }

    /// Solves `cdf(y) = q` by bracketing outward from the mean in steps of the
    /// standard deviation and bisecting down to adjacent floats. Upper
    /// quantiles are solved on the survival function.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!(
                "quantile level must lie in (0, 1), got {q}"
            )));
        }
        let upper = q > 0.5;
        let target = if upper { 1.0 - q } else { q };
        // `below(y)` is true while y lies left of the quantile
        let below = |y: f64| {
            if upper {
                self.sf(y) > target
            } else {
                self.cdf(y) < target
            }
        };
        let center = self.mean();
        let sd = self.variance().sqrt().max(f64::MIN_POSITIVE);
        let (mut lo, mut hi) = (center - sd, center + sd);
        let mut step = sd;
        let mut tries = 0;
        while below(hi) {
            lo = hi;
            step *= 2.0;
            hi = center + step;
            tries += 1;
            if tries > 200 || !hi.is_finite() {
                return Err(Error::Convergence {
                    message: format!("no upper bracket for q = {q}"),
                    partial: lo,
                });
            }
        }
        step = sd;
        tries = 0;
        while !below(lo) {
            hi = lo;
            step *= 2.0;
            lo = center - step;
            tries += 1;
            if tries > 200 || !lo.is_finite() {
                return Err(Error::Convergence {
                    message: format!("no lower bracket for q = {q}"),
                    partial: hi,
                });
            }
        }
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if below(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(hi)
    }

    fn check_forward(&self, strike: f64) -> Result<()> {
        if !(strike > 0.0 && strike.is_finite()) {
            return Err(Error::Domain(format!(
                "strike must be finite and positive, got {strike}"
            )));
        }
        let GHParams { beta, gamma, .. } = self.params;
        if !(beta + 0.5 < 0.5 * gamma * gamma) {
            return Err(Error::Divergence(format!(
                "E[e^Y] is infinite unless beta + 1/2 < gamma^2/2 (beta = {beta}, gamma = {gamma})"
            )));
        }
        Ok(())
    }

    fn black_scholes_terms(&self, strike: f64) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        let (mu, beta) = (self.params.mu, self.params.beta);
        let ln_k = strike.ln();
        self.components
            .iter()
            .zip(&self.std_devs)
            .map(move |(c, &s)| {
                let ln_f = mu + (beta + 0.5) * c.variance;
                let d = (ln_f - ln_k) / s - 0.5 * s;
                (c.weight, ln_f.exp(), d, s)
            })
    }

    /// Undiscounted call `E[(e^Y - K)^+]` as a weighted sum of Black–Scholes
    /// prices.
    pub fn call_price(&self, strike: f64) -> Result<f64> {
        self.check_forward(strike)?;
        let total: NeumaierSum = self
            .black_scholes_terms(strike)
            .map(|(w, f, d, s)| w * (f * normal_cdf(d + s) - strike * normal_cdf(d)))
            .collect();
        Ok(total.value().max(0.0))
    }

    /// Undiscounted put `E[(K - e^Y)^+]`.
    pub fn put_price(&self, strike: f64) -> Result<f64> {
        self.check_forward(strike)?;
        let total: NeumaierSum = self
            .black_scholes_terms(strike)
            .map(|(w, f, d, s)| w * (strike * normal_cdf(-d) - f * normal_cdf(-d - s)))
            .collect();
        Ok(total.value().max(0.0))
    }

    /// Quadrature estimate of `E[e^Y]`.
    pub fn forward(&self) -> Result<f64> {
        self.check_forward(1.0)?;
        Ok(compensated_sum(
            self.black_scholes_terms(1.0).map(|(w, f, _, _)| w * f),
        ))
    }

    /// Compound quadrature `sum_k sum_l w_k h_l g(mu + beta x_k + sqrt(x_k) z_l)`
    /// with an `m`-point Gauss–Hermite rule `(z_l, h_l)`.
    pub fn expectation<G: FnMut(f64) -> f64>(&self, mut g: G, m: usize) -> Result<f64> {
        let hermite = hermite_rule_cached(m)?;
        let mut total = NeumaierSum::new();
        for (c, &s) in self.components.iter().zip(&self.std_devs) {
            let inner = hermite.integrate(|z| g(c.mean + s * z));
            total.add(c.weight * inner);
        }
        Ok(total.value())
    }
}

/// Quadrature CDF with an `n`-point mixing rule.
pub fn gh_cdf(params: &GHParams, y: f64, n: usize) -> Result<f64> {
    Ok(Mixture::new(params, n)?.cdf(y))
}

/// Quadrature survival function with an `n`-point mixing rule.
pub fn gh_sf(params: &GHParams, y: f64, n: usize) -> Result<f64> {
    Ok(Mixture::new(params, n)?.sf(y))
}

/// Inverse of [`gh_cdf`].
pub fn gh_quantile(params: &GHParams, q: f64, n: usize) -> Result<f64> {
    Mixture::new(params, n)?.quantile(q)
}

/// Undiscounted European call on `e^Y`.
pub fn call_price(params: &GHParams, strike: f64, n: usize) -> Result<f64> {
    Mixture::new(params, n)?.call_price(strike)
}

/// Undiscounted European put on `e^Y`.
pub fn put_price(params: &GHParams, strike: f64, n: usize) -> Result<f64> {
    Mixture::new(params, n)?.put_price(strike)
}

/// `E[g(Y)]` by compound quadrature over an `n x m` grid.
pub fn gh_expectation<G: FnMut(f64) -> f64>(
    g: G,
    params: &GHParams,
    n: usize,
    m: usize,
) -> Result<f64> {
    Mixture::new(params, n)?.expectation(g, m)
}

/// `sum_k w_k e^{t x_k}` over the renormalized GIG rule.
pub fn gig_mgf_quad(params: &GIGParams, t: f64, n: usize) -> Result<f64> {
    let rule = gig_rule_cached(params, n, true)?;
    Ok(rule.integrate(|x| (t * x).exp()))
}
