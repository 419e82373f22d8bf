//! The four reference parameter sets, stored in the `(mu, alpha, beta, delta, p)` form.

use serde::Serialize;

use crate::distribution::{from_alpha_parameterization, GHParams, GHParamsAlpha};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParameterSetPreset {
    pub name: &'static str,
    pub params: GHParamsAlpha,
}

impl ParameterSetPreset {
    pub fn gh_params(&self) -> Result<GHParams> {
        from_alpha_parameterization(&self.params)
    }
}

pub const PRESETS: [ParameterSetPreset; 4] = [
    ParameterSetPreset {
        name: "set1",
        params: GHParamsAlpha {
            mu: 0.0,
            alpha: 1.0,
            beta: 0.0,
            delta: 1.0,
            p: -0.5,
        },
    },
    ParameterSetPreset {
        name: "set2",
        params: GHParamsAlpha {
            mu: 0.00029,
            alpha: 138.78464,
            beta: -4.90461,
            delta: 0.00646,
            p: -0.5,
        },
    },
    ParameterSetPreset {
        name: "set3",
        params: GHParamsAlpha {
            mu: 0.000666,
            alpha: 214.4,
            beta: -6.17,
            delta: 0.0022,
            p: 0.8357,
        },
    },
    ParameterSetPreset {
        name: "set4",
        params: GHParamsAlpha {
            mu: 0.000048,
            alpha: 9.0,
            beta: 2.73,
            delta: 0.0161,
            p: -1.663,
        },
    },
];

/// Looks a preset up by name (`set1` .. `set4`).
pub fn preset(name: &str) -> Option<&'static ParameterSetPreset> {
    PRESETS.iter().find(|p| p.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_and_sigma() {
        let expected_sigma = [1.0, 0.9466, 0.6866, 0.3716];
        for (preset, sigma) in PRESETS.iter().zip(expected_sigma) {
            let gh = preset.gh_params().unwrap();
            assert!(
                (gh.sigma() - sigma).abs() < 5e-5,
                "{}: {}",
                preset.name,
                gh.sigma()
            );
        }
        assert_eq!(preset("SET3").unwrap().params.p, 0.8357);
        assert!(preset("set5").is_none());
    }
}
