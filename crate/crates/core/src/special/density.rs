//! State density of the internal energy mode.

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// phi(I) = I^alpha * rho(I) with alpha = (f_i - 2) / 2.
///
/// `PowerLaw` has rho = 1; `DampedPowerLaw` has
/// rho = exp(-b_damp I / c^2) (1 + I / m c^2)^r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateDensity {
    PowerLaw { f_i: f64 },
    DampedPowerLaw { f_i: f64, b_damp: f64, r: f64 },
}

impl Default for StateDensity {
    fn default() -> Self {
        StateDensity::PowerLaw { f_i: 2.0 }
    }
}

impl StateDensity {
    pub fn power_law(f_i: f64) -> Self {
        StateDensity::PowerLaw { f_i }
    }

    pub fn f_i(&self) -> f64 {
        match *self {
            StateDensity::PowerLaw { f_i } | StateDensity::DampedPowerLaw { f_i, .. } => f_i,
        }
    }

    /// Exponent of the power-law factor.
    pub fn alpha(&self) -> f64 {
        0.5 * (self.f_i() - 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let f_i = self.f_i();
        if !(f_i.is_finite() && f_i > 0.0) {
            return Err(Error::Config(format!(
                "internal degrees of freedom must satisfy f_i > 0 (alpha > -1), got {f_i}"
            )));
        }
        if let StateDensity::DampedPowerLaw { b_damp, r, .. } = *self {
            if !(b_damp.is_finite() && b_damp >= 0.0) {
                return Err(Error::Config(format!("b_damp must be >= 0, got {b_damp}")));
            }
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Config(format!("r must be > 0, got {r}")));
            }
        }
        Ok(())
    }

    /// Smooth factor rho(I); equals 1 for the pure power law.
    #[inline]
    pub fn rho(&self, i: f64, k: &PhysicalConstants) -> f64 {
        match *self {
            StateDensity::PowerLaw { .. } => 1.0,
            StateDensity::DampedPowerLaw { b_damp, r, .. } => {
                (-b_damp * i / (k.c * k.c)).exp() * (1.0 + i / k.rest_energy()).powf(r)
            }
        }
    }

    /// phi(I).
    #[inline]
    pub fn phi(&self, i: f64, k: &PhysicalConstants) -> f64 {
        i.powf(self.alpha()) * self.rho(i, k)
    }
}

/// gamma = m c^2 / (k_B T) together with gamma*(I) = gamma (1 + I / m c^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPair {
    pub gamma: f64,
    rest_energy: f64,
}

impl GammaPair {
    pub fn new(t: f64, k: &PhysicalConstants) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Domain(format!("temperature must be positive, got {t}")));
        }
        Ok(Self {
            gamma: k.gamma(t),
            rest_energy: k.rest_energy(),
        })
    }

    #[inline]
    pub fn gamma_star(&self, i: f64) -> f64 {
        self.gamma * (1.0 + i / self.rest_energy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::{integrate, integrate_semi_infinite, QuadOptions};

    #[test]
    fn validation() {
        assert!(StateDensity::power_law(2.0).validate().is_ok());
        assert!(StateDensity::power_law(0.0).validate().is_err());
        assert!(StateDensity::power_law(-1.0).validate().is_err());
        let d = StateDensity::DampedPowerLaw { f_i: 3.0, b_damp: 0.0, r: 0.0 };
        assert!(d.validate().is_err());
        let d = StateDensity::DampedPowerLaw { f_i: 3.0, b_damp: -1.0, r: 1.0 };
        assert!(d.validate().is_err());
    }

    #[test]
    fn toml_shape() {
        let d: StateDensity = toml::from_str("kind = \"damped_power_law\"\nf_i = 3.0\nb_damp = 0.5\nr = 2.0\n").unwrap();
        assert_eq!(d, StateDensity::DampedPowerLaw { f_i: 3.0, b_damp: 0.5, r: 2.0 });
        assert!(toml::from_str::<StateDensity>("kind = \"power_law\"\nf_i = 3.0\nr = 1.0\n").is_err());
    }

    #[test]
    fn gamma_star_bounds() {
        let k = PhysicalConstants::default();
        let g = GammaPair::new(0.7, &k).unwrap();
        assert_eq!(g.gamma_star(0.0), g.gamma);
        assert!(g.gamma_star(1e-9) > g.gamma);
        assert!(GammaPair::new(0.0, &k).is_err());
    }

    // Polynomial weights up to degree 6 in p0 against exp(-C W p0) stay finite
    // for both families; checked by integrating the radial and internal parts.
    #[test]
    fn moment_finiteness_up_to_degree_six() {
        let k = PhysicalConstants::default();
        let kinds = [
            StateDensity::power_law(0.5),
            StateDensity::power_law(7.0),
            StateDensity::DampedPowerLaw { f_i: 1.0, b_damp: 0.3, r: 2.5 },
        ];
        for d in kinds {
            for &cc in &[0.5, 3.0] {
                for deg in 0..=6 {
                    let p_part = integrate_semi_infinite(
                        |p: f64| {
                            let p0 = (1.0 + p * p).sqrt();
                            [p * p * p0.powi(deg) * (-cc * p0).exp()]
                        },
                        0.0,
                        1.0,
                        QuadOptions::relative(1e-10),
                    )
                    .unwrap()[0];
                    let near = integrate(
                        |v: f64| {
                            let i = v.powf(1.0 / (d.alpha() + 1.0));
                            [d.rho(i, &k) * (-cc * i).exp() * (1.0 + i).powi(deg) / (d.alpha() + 1.0)]
                        },
                        0.0,
                        1.0,
                        QuadOptions::relative(1e-10),
                    )
                    .unwrap()[0];
                    let far = integrate_semi_infinite(
                        |i: f64| [d.phi(i, &k) * (-cc * i).exp() * (1.0 + i).powi(deg)],
                        1.0,
                        1.0,
                        QuadOptions::relative(1e-10),
                    )
                    .unwrap()[0];
                    let total = p_part * (near + far);
                    assert!(total.is_finite() && total > 0.0);
                }
            }
        }
    }
}
