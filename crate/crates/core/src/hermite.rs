//! Probabilists' Gauss–Hermite quadrature with respect to the standard normal
//! density.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;

/// Largest supported quadrature size.
pub const MAX_RULE_SIZE: usize = 300;

/// A discrete measure: ascending nodes with strictly positive weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    degraded: bool,
}

impl QuadratureRule {
    /// Builds a rule after checking the ordering and positivity invariants.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::Parameter(format!(
                "rule needs equal, nonzero numbers of nodes and weights (got {} and {})",
                nodes.len(),
                weights.len()
            )));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "rule nodes must be finite and strictly ascending".into(),
            ));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Parameter(
                "rule weights must be finite and positive".into(),
            ));
        }
        Ok(Self {
            nodes,
            weights,
            degraded: false,
        })
    }

    pub(crate) fn from_parts_unchecked(nodes: Vec<f64>, weights: Vec<f64>, degraded: bool) -> Self {
        debug_assert_eq!(nodes.len(), weights.len());
        Self {
            nodes,
            weights,
            degraded,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// True when nodes were dropped because their weights underflowed.
    pub fn is_degraded(&self) -> bool {
        self.degraded
    }

    /// `(node, weight)` pairs in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// `sum_k w_k g(x_k)` with compensated summation.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        compensated_sum(self.iter().map(|(x, w)| w * g(x)))
    }
}

pub(crate) fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_RULE_SIZE {
        Err(Error::Size {
            n,
            max: MAX_RULE_SIZE,
        })
    } else {
        Ok(())
    }
}

/// Gauss–Hermite rule of size `n` for the weight `exp(-z^2/2)/sqrt(2 pi)`.
///
/// Nodes are eigenvalues of the Jacobi matrix of the probabilists' Hermite
/// recurrence, polished by Newton steps on the orthonormal polynomial. Weights
/// come from the Christoffel formula `1 / (n psi_{n-1}(z_k)^2)`, which keeps
/// the far-tail weights accurate in relative terms.
pub fn hermite_rule(n: usize) -> Result<QuadratureRule> {
    check_size(n)?;
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (1..=n)
        .map(|k| if k < n { (k as f64).sqrt() } else { 0.0 })
        .collect();
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);

    let sqrt_n = (n as f64).sqrt();
    let mut nodes = diag;
    let mut weights = Vec::with_capacity(n);
    for z in nodes.iter_mut() {
        for _ in 0..4 {
            let (psi_n, psi_nm1) = orthonormal_hermite(n, *z);
            let step = psi_n / (sqrt_n * psi_nm1);
            *z -= step;
            if step.abs() <= f64::EPSILON * z.abs().max(1e-3) {
                break;
            }
        }
        let (_, psi_nm1) = orthonormal_hermite(n, *z);
        weights.push(1.0 / (n as f64 * psi_nm1 * psi_nm1));
    }

    for k in 0..n / 2 {
        let j = n - 1 - k;
        let z = 0.5 * (nodes[j] - nodes[k]);
        let w = 0.5 * (weights[j] + weights[k]);
        nodes[k] = -z;
        nodes[j] = z;
        weights[k] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let total = compensated_sum(weights.iter().copied());
    for w in weights.iter_mut() {
        *w /= total;
    }
    QuadratureRule::new(nodes, weights)
}

/// Shared, memoized [`hermite_rule`].
pub fn hermite_rule_cached(n: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(rule) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(hermite_rule(n)?);
    let mut guard = cache.write().unwrap_or_else(|e| e.into_inner());
    Ok(Arc::clone(guard.entry(n).or_insert(rule)))
}

/// `(psi_n(z), psi_{n-1}(z))` with `psi_j = He_j / sqrt(j!)`.
fn orthonormal_hermite(n: usize, z: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for j in 0..n {
        let jf = j as f64;
        let next = (z * cur - jf.sqrt() * prev) / (jf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `off[i]` couples rows `i` and `i + 1`; eigenvalues are left in `diag`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Convergence {
                    message: "tridiagonal QL iteration".into(),
                    partial: diag[l],
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn double_factorial_odd(r: u32) -> f64 {
        // (r - 1)!! for even r
        (1..r).step_by(2).map(f64::from).product()
    }

    fn he(a: usize, z: f64) -> f64 {
        let (mut prev, mut cur) = (0.0, 1.0);
        for j in 0..a {
            let next = z * cur - j as f64 * prev;
            prev = cur;
            cur = next;
        }
        cur
    }

    #[test]
    fn small_rules() {
        let r1 = hermite_rule(1).unwrap();
        assert_eq!(r1.nodes(), &[0.0]);
        assert_eq!(r1.weights(), &[1.0]);

        // Two-point moment conditions: w1 + w2 = 1, w1 z1 + w2 z2 = 0,
        // w1 z1^2 + w2 z2^2 = 1, w1 z1^3 + w2 z2^3 = 0 give z = -1, 1 and w = 1/2.
        let r2 = hermite_rule(2).unwrap();
        assert_relative_eq!(r2.nodes()[0], -1.0, max_relative = 1e-15);
        assert_relative_eq!(r2.nodes()[1], 1.0, max_relative = 1e-15);
        assert_relative_eq!(r2.weights()[0], 0.5, max_relative = 1e-15);

        // Lagrange-interpolation weights of He_3 roots: 1/6, 2/3, 1/6.
        let r3 = hermite_rule(3).unwrap();
        let s3 = 3f64.sqrt();
        assert_relative_eq!(r3.nodes()[0], -s3, max_relative = 1e-15);
        assert_eq!(r3.nodes()[1], 0.0);
        assert_relative_eq!(r3.weights()[0], 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(r3.weights()[1], 2.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn size_limits() {
        assert!(matches!(hermite_rule(0), Err(Error::Size { n: 0, .. })));
        assert!(matches!(hermite_rule(301), Err(Error::Size { .. })));
        let r = hermite_rule(300).unwrap();
        assert_eq!(r.len(), 300);
        assert!((r.total_weight() - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn symmetric_and_normalized() {
        for n in [4, 7, 20, 51, 150, 300] {
            let r = hermite_rule(n).unwrap();
            for k in 0..n {
                assert!((r.nodes()[k] + r.nodes()[n - 1 - k]).abs() <= 1e-13);
                assert_eq!(r.weights()[k], r.weights()[n - 1 - k]);
            }
            assert!((r.total_weight() - 1.0).abs() <= 1e-14);
            assert!(r.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn moment_matching() {
        for n in 1..=50 {
            let r = hermite_rule(n).unwrap();
            let max_r = (2 * n as u32 - 1).min(30);
            for p in (0..=max_r).step_by(2) {
                let got = r.integrate(|z| z.powi(p as i32));
                assert_relative_eq!(got, double_factorial_odd(p), max_relative = 1e-11);
            }
            for p in (1..=max_r).step_by(2) {
                let got = r.integrate(|z| z.powi(p as i32));
                assert!(
                    got.abs() <= 1e-11 * double_factorial_odd(p + 1),
                    "n={n} p={p}"
                );
            }
        }
    }

    #[test]
    fn high_order_moments_relative_accuracy() {
        for n in [10, 20, 40] {
            let r = hermite_rule(n).unwrap();
            for p in (0..=(2 * n as u32 - 1).min(20)).step_by(2) {
                let got = r.integrate(|z| z.powi(p as i32));
                assert_relative_eq!(got, double_factorial_odd(p), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn orthogonality() {
        for n in [8, 12, 30] {
            let r = hermite_rule(n).unwrap();
            for a in 0..=6 {
                for b in 0..=6 {
                    let got = r.integrate(|z| he(a, z) * he(b, z));
                    let expected = if a == b {
                        (1..=a).map(|k| k as f64).product()
                    } else {
                        0.0
                    };
                    assert!((got - expected).abs() <= 1e-9, "a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn cache_returns_shared_rule() {
        let a = hermite_rule_cached(17).unwrap();
        let b = hermite_rule_cached(17).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(*a, hermite_rule(17).unwrap());
    }

    #[test]
    fn rejects_invalid_rules() {
        assert!(QuadratureRule::new(vec![], vec![]).is_err());
        assert!(QuadratureRule::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(QuadratureRule::new(vec![0.0, 1.0], vec![0.5, 0.0]).is_err());
        assert!(QuadratureRule::new(vec![0.0], vec![0.5, 0.5]).is_err());
    }
}
