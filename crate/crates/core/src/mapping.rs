//! The change of variables `z = sigma (sqrt(x) - 1/sqrt(x))` between the
//! positive half-line and the real line, under which `IG(sigma, sigma)` maps
//! onto the standard normal law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape parameter `sigma = sqrt(gamma * delta) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Sigma(f64);

impl Sigma {
    pub fn new(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Sigma(sigma))
        } else {
            Err(Error::Parameter(format!(
                "sigma must be finite and positive, got {sigma}"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Sigma {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Sigma::new(value)
    }
}

impl From<Sigma> for f64 {
    fn from(s: Sigma) -> f64 {
        s.0
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("expected finite x > 0, got {x}")))
    }
}

/// `sigma (sqrt(x) - 1/sqrt(x))`, strictly increasing on `(0, inf)`.
pub fn phi(sigma: Sigma, x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(sigma.0 * ((x - 1.0) / x.sqrt()))
}

/// Inverse of [`phi`].
///
/// With `u = z / (2 sigma)` the inverse is `(u + sqrt(1 + u^2))^2`; negative
/// arguments use `phi_inv(-z) = 1 / phi_inv(z)` to avoid cancellation.
pub fn phi_inv(sigma: Sigma, z: f64) -> f64 {
    let u = z.abs() / (2.0 * sigma.0);
    let root = u + u.hypot(1.0);
    let x = root * root;
    if z < 0.0 {
        1.0 / x
    } else {
        x
    }
}

/// Derivative `d phi / dx = sigma (1 + x) / (2 x^{3/2})`.
pub fn jacobian_weight(sigma: Sigma, x: f64) -> Result<f64> {
    check_positive(x)?;
    Ok(sigma.0 * (1.0 + x) / (2.0 * x * x.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn s(v: f64) -> Sigma {
        Sigma::new(v).unwrap()
    }

    #[test]
    fn point_values() {
        for v in [0.37, 1.0, 5.0] {
            assert_eq!(phi(s(v), 1.0).unwrap(), 0.0);
            assert_eq!(phi_inv(s(v), 0.0), 1.0);
        }
        assert_relative_eq!(phi(s(1.0), 4.0).unwrap(), 1.5, max_relative = 1e-15);
        assert_relative_eq!(phi(s(2.0), 0.25).unwrap(), -3.0, max_relative = 1e-15);
        assert_relative_eq!(phi_inv(s(1.0), 1.5), 4.0, max_relative = 1e-15);
        assert_relative_eq!(phi_inv(s(1.0), -1.5), 0.25, max_relative = 1e-15);
        assert_eq!(jacobian_weight(s(1.0), 1.0).unwrap(), 1.0);
        assert_eq!(jacobian_weight(s(2.0), 1.0).unwrap(), 2.0);
        assert_relative_eq!(
            jacobian_weight(s(1.0), 4.0).unwrap(),
            5.0 / 16.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn errors() {
        assert!(Sigma::new(0.0).is_err());
        assert!(Sigma::new(f64::NAN).is_err());
        assert!(matches!(phi(s(1.0), 0.0), Err(Error::Domain(_))));
        assert!(matches!(phi(s(1.0), -2.0), Err(Error::Domain(_))));
        assert!(matches!(
            jacobian_weight(s(1.0), 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn extreme_arguments_do_not_overflow() {
        let big = phi(s(1.0), 1e300).unwrap();
        assert_relative_eq!(big, 1e150, max_relative = 1e-14);
        let small = phi(s(1.0), 1e-300).unwrap();
        assert_relative_eq!(small, -1e150, max_relative = 1e-14);
    }

    #[test]
    fn round_trip_log_uniform_grid() {
        for sigma in [0.37, 0.5, 1.0, 2.0] {
            for i in 0..=240 {
                let x = 10f64.powf(-6.0 + 12.0 * i as f64 / 240.0);
                let back = phi_inv(s(sigma), phi(s(sigma), x).unwrap());
                assert_relative_eq!(back, x, max_relative = 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn reciprocal_pairs(z in 0.0f64..200.0, sigma in 0.05f64..10.0) {
            let xp = phi_inv(s(sigma), z);
            let xm = phi_inv(s(sigma), -z);
            prop_assert!((xp * xm - 1.0).abs() <= 1e-13);
            prop_assert!(xm <= 1.0 && 1.0 <= xp);
            let zz = phi(s(sigma), xp).unwrap();
            prop_assert!((zz - z).abs() <= 1e-13 * z.max(1.0));
        }

        #[test]
        fn phi_is_increasing(a in 1e-8f64..1e8, b in 1e-8f64..1e8) {
            prop_assume!(a < b);
            prop_assert!(phi(s(0.7), a).unwrap() < phi(s(0.7), b).unwrap());
        }
    }
}
