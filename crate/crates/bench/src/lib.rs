//! Fixtures shared by the benchmarks.

use ghquad::{GHParams, Mixture, PRESETS};

/// The four built-in parameter sets with their names.
pub fn sets() -> Vec<(&'static str, GHParams)> {
    PRESETS
        .iter()
        .map(|p| (p.name, p.gh_params().expect("presets are valid")))
        .collect()
}

/// The 99 percentile points of `params`, located with a 150-node rule.
pub fn percentile_points(params: &GHParams) -> Vec<f64> {
    let fine = Mixture::new(params, 150).expect("valid parameters");
    (1..=99)
        .map(|j| fine.quantile(j as f64 / 100.0).expect("q in (0,1)"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_increasing() {
        for (_, params) in sets() {
            let ys = percentile_points(&params);
            assert_eq!(ys.len(), 99);
            assert!(ys.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
