//! Random variates: the quadrature-based GH sampler, a discrete GIG sampler
//! and the exact Michael–Schucany–Haas IG sampler.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::distribution::GHParams;
use crate::error::{Error, Result};
use crate::mapping::{phi_inv, Sigma};
use crate::mixture::Mixture;
use crate::quadrature::{gig_rule_cached, GIGParams, IGParams};
use crate::special::normal_quantile;

const TWO_POW_53: f64 = 9_007_199_254_740_992.0;

/// Seeded ChaCha20 stream. Substreams share the key and differ in the
/// stream id, so they can be handed to threads without overlap.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// Independent stream number `index` derived from the same seed.
    pub fn substream(&self, index: u64) -> Self {
        Self::with_stream(self.seed, index.wrapping_add(1))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    /// Uniform on the lattice `k / 2^53`, `1 <= k < 2^53`, so `0 < U < 1` and
    /// `1 - U` is exact.
    pub fn uniform(&mut self) -> f64 {
        loop {
            let k = self.rng.next_u64() >> 11;
            if k != 0 {
                return k as f64 / TWO_POW_53;
            }
        }
    }

    /// Standard normal by inversion of a uniform.
    pub fn normal(&mut self) -> f64 {
        std_normal(self.uniform())
    }
}

fn std_normal(u: f64) -> f64 {
    normal_quantile(u).expect("uniform variates lie in (0, 1)")
}

/// Inverse-CDF selection over a discrete distribution.
#[derive(Debug, Clone)]
pub struct ComponentSelector {
    cumulative: Vec<f64>,
}

impl ComponentSelector {
    /// Weights must be positive and sum to one within `1e-12`.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Parameter(
                "selection weights must be non-empty, finite and positive".into(),
            ));
        }
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut acc = 0.0;
        for w in weights {
            acc += w;
            cumulative.push(acc);
        }
        if (acc - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "selection weights sum to {acc}, not 1"
            )));
        }
        *cumulative.last_mut().expect("non-empty") = 1.0;
        Ok(ComponentSelector { cumulative })
    }

    /// Smallest zero-based `k` with `u <= w_0 + ... + w_k`.
    pub fn select(&self, u: f64) -> usize {
        self.cumulative
            .partition_point(|&c| c < u)
            .min(self.cumulative.len() - 1)
    }
}

/// Zero-based index of the smallest `k` with `u <= w_0 + ... + w_k`.
pub fn select_component(weights: &[f64], u: f64) -> Result<usize> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain(format!(
            "uniform variate must lie in (0, 1), got {u}"
        )));
    }
    Ok(ComponentSelector::new(weights)?.select(u))
}

/// Draws `y = mu + beta x_k + sqrt(x_k) Z` with `k` chosen by a uniform.
#[derive(Debug, Clone)]
pub struct GhSampler {
    mixture: Mixture,
    selector: ComponentSelector,
}

impl GhSampler {
    pub fn new(params: &GHParams, n_quad: usize) -> Result<Self> {
        let mixture = Mixture::new(params, n_quad)?;
        let weights: Vec<f64> = mixture.components().iter().map(|c| c.weight).collect();
        Ok(GhSampler {
            selector: ComponentSelector::new(&weights)?,
            mixture,
        })
    }

    pub fn mixture(&self) -> &Mixture {
        &self.mixture
    }

    /// The variate for given uniform `u` and standard normal `z`.
    pub fn variate(&self, u: f64, z: f64) -> f64 {
        let c = &self.mixture.components()[self.selector.select(u)];
        c.mean + c.variance.sqrt() * z
    }

    /// `count` draws. With `antithetic` set, consecutive draws pair `(U, Z)`
    /// with `(1 - U, -Z)`.
    pub fn sample(&self, count: usize, rng: &mut RngStream, antithetic: bool) -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let u = rng.uniform();
            let z = rng.normal();
            out.push(self.variate(u, z));
            if antithetic && out.len() < count {
                out.push(self.variate(1.0 - u, -z));
            }
        }
        out
    }

    /// Deterministic multi-threaded generation: chunk `i` of `chunk_size`
    /// draws uses substream `i` of `seed`. Output order follows chunk order.
    pub fn sample_parallel(
        &self,
        count: usize,
        seed: u64,
        chunk_size: usize,
        antithetic: bool,
    ) -> Vec<f64> {
        let chunk_size = chunk_size.max(1);
        let root = RngStream::new(seed);
        let chunks: Vec<(u64, usize)> = (0..count.div_ceil(chunk_size))
            .map(|i| (i as u64, chunk_size.min(count - i * chunk_size)))
            .collect();
        let workers = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(chunks.len().max(1));
        let mut parts: Vec<Vec<f64>> = vec![Vec::new(); chunks.len()];
        std::thread::scope(|scope| {
            let mut slots: Vec<&mut Vec<f64>> = parts.iter_mut().collect();
            let mut assignments: Vec<Vec<(usize, &mut Vec<f64>)>> =
                (0..workers).map(|_| Vec::new()).collect();
            for (i, slot) in slots.drain(..).enumerate() {
                assignments[i % workers].push((i, slot));
            }
            for work in assignments {
                let root = &root;
                let chunks = &chunks;
                scope.spawn(move || {
                    for (i, slot) in work {
                        let (id, len) = chunks[i];
                        let mut rng = root.substream(id);
                        *slot = self.sample(len, &mut rng, antithetic);
                    }
                });
            }
        });
        parts.concat()
    }
}

/// GH variates from an `n_quad`-point mixture.
pub fn sample_gh(
    params: &GHParams,
    n_quad: usize,
    count: usize,
    rng: &mut RngStream,
    antithetic: bool,
) -> Result<Vec<f64>> {
    Ok(GhSampler::new(params, n_quad)?.sample(count, rng, antithetic))
}

/// The Michael–Schucany–Haas transform: the smaller root `x = phi^{-1}(-|z|)`
/// is kept when `u <= 1/(1 + x)`, otherwise its reciprocal; the result is
/// scaled by `delta / gamma`.
pub fn ig_variate(params: &IGParams, z: f64, u: f64) -> Result<f64> {
    params.validate()?;
    if params.gamma <= 0.0 {
        return Err(Error::Parameter(
            "exact IG sampling requires gamma > 0".into(),
        ));
    }
    let sigma = Sigma::new(params.sigma())?;
    let small = phi_inv(sigma, -z.abs());
    let x = if u <= 1.0 / (1.0 + small) {
        small
    } else {
        1.0 / small
    };
    Ok(params.scale() * x)
}

/// Exact IG variates.
pub fn sample_ig_exact(params: &IGParams, count: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    ig_variate(params, 0.0, 0.5)?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let z = rng.normal();
        let u = rng.uniform();
        out.push(ig_variate(params, z, u)?);
    }
    Ok(out)
}

/// Draws the GIG rule's nodes with probabilities equal to their weights. The
/// support is the `n_quad` nodes, so this is only a discrete approximation.
pub fn sample_gig_discrete(
    params: &GIGParams,
    n_quad: usize,
    count: usize,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    let rule = gig_rule_cached(params, n_quad, true)?;
    let selector = ComponentSelector::new(rule.weights())?;
    Ok((0..count)
        .map(|_| rule.nodes()[selector.select(rng.uniform())])
        .collect())
}
