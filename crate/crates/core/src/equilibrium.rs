//! Equilibrium density of [-1, 1] and the mass it assigns to subintervals.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalMass {
    pub a: f64,
    pub b: f64,
    pub mass: f64,
}

/// omega(x) = 1 / (pi sqrt(1 - x^2)) for |x| < 1.
pub fn omega_density(x: f64) -> Result<f64> {
    if !(x.abs() < 1.0) {
        return Err(Error::domain(format!("equilibrium density needs |x| < 1, got {x}")));
    }
    Ok(1.0 / (PI * ((1.0 - x) * (1.0 + x)).sqrt()))
}

/// (arcsin b - arcsin a) / pi.
pub fn omega_mass(a: f64, b: f64) -> Result<f64> {
    interval_mass(a, b).map(|m| m.mass)
}

pub fn interval_mass(a: f64, b: f64) -> Result<IntervalMass> {
    if !(-1.0 <= a && a < b && b <= 1.0) {
        return Err(Error::domain(format!(
            "interval must satisfy -1 <= a < b <= 1, got ({a}, {b})"
        )));
    }
    Ok(IntervalMass {
        a,
        b,
        mass: (b.asin() - a.asin()) / PI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate_adaptive, AdaptiveOptions};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn density_values() {
        assert_relative_eq!(omega_density(0.0).unwrap(), 1.0 / PI, epsilon = 1e-16);
        assert_eq!(omega_density(0.6).unwrap(), omega_density(-0.6).unwrap());
        assert_relative_eq!(omega_density(0.8).unwrap(), 0.530_516_476_972_984_4, epsilon = 1e-15);
        assert!(omega_density(1.0).is_err());
        assert!(omega_density(-1.2).is_err());
    }

    #[test]
    fn mass_values() {
        assert_relative_eq!(omega_mass(-1.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(omega_mass(-0.5, 0.5).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(omega_mass(0.0, 0.9).unwrap(), 0.356_433_706_871_293_7, epsilon = 1e-15);
        assert!(omega_mass(0.5, 0.5).is_err());
        assert!(omega_mass(0.5, -0.5).is_err());
        assert!(omega_mass(-1.1, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn mass_is_integral_of_density(a in -0.99f64..0.98, len in 0.01f64..1.0) {
            let b = (a + len).min(0.99);
            prop_assume!(b > a);
            let r = integrate_adaptive(
                &|x| omega_density(x).unwrap(),
                &[a, b],
                AdaptiveOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_evals: 100_000 },
            );
            prop_assert!((r.value - omega_mass(a, b).unwrap()).abs() < 1e-10);
        }

        #[test]
        fn mass_is_additive(a in -1.0f64..-0.1, mid in -0.1f64..0.1, b in 0.1f64..1.0) {
            let whole = omega_mass(a, b).unwrap();
            let parts = omega_mass(a, mid).unwrap() + omega_mass(mid, b).unwrap();
            prop_assert!((whole - parts).abs() < 1e-14);
        }
    }
}
