//! Equilibrium thermodynamics of the polyatomic Juttner gas.
//!
//! Every quantity reduces to one-dimensional integrals over the internal
//! energy of Bessel functions evaluated at gamma* = gamma (1 + I / m c^2).
//! The factor e^{-gamma*} = e^{-gamma} e^{-I/kT} is split off analytically,
//! so only scaled Bessel values enter and nothing underflows at large gamma.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::special::bessel::scaled_orders;
use crate::special::density::{GammaPair, StateDensity};
use crate::special::quadrature::{integrate, integrate_semi_infinite, QuadOptions};

/// Relative tolerance for the guard comparison in [`Thermodynamics::etilde_checked`].
pub const PATH_TOLERANCE: f64 = 1e-8;

/// Which Bessel moment [`Thermodynamics::internal_bessel_moment`] computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BesselWeight {
    /// Integral of K_2(gamma*) / gamma* phi(I) dI.
    K2OverGstar,
    /// Integral of K_3(gamma*) phi(I) dI.
    K3,
}

/// Result of a temperature inversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub temperature: f64,
    pub newton_steps: usize,
    pub bisection_steps: usize,
}

/// Closed-form equilibrium functions for fixed constants and state density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thermodynamics {
    pub constants: PhysicalConstants,
    pub density: StateDensity,
    pub quad: QuadOptions,
}

impl Thermodynamics {
    pub fn new(constants: PhysicalConstants, density: StateDensity) -> Result<Self> {
        constants.validate()?;
        density.validate()?;
        Ok(Self {
            constants,
            density,
            quad: QuadOptions::relative(1e-13),
        })
    }

    fn check_t(&self, t: f64) -> Result<GammaPair> {
        GammaPair::new(t, &self.constants)
    }

    /// Integral over I of phi(I) e^{-I/kT} g(I), divided by (kT)^{alpha+1}.
    ///
    /// Uses y = I / kT. On [0, 1] the substitution y = v^{1/(alpha+1)}
    /// absorbs the power singularity; [1, inf) uses the rational map.
    pub(crate) fn internal_integral<const N: usize, G>(&self, t: f64, g: G) -> Result<[f64; N]>
    where
        G: Fn(f64) -> [f64; N],
    {
        let kt = self.constants.k_b * t;
        let a1 = self.density.alpha() + 1.0;
        let k = &self.constants;
        let d = &self.density;
        let near: [f64; N] = integrate(
            |v: f64| {
                let y = v.powf(1.0 / a1);
                let i = kt * y;
                let s = d.rho(i, k) * (-y).exp() / a1;
                let gv = g(i);
                std::array::from_fn(|c| s * gv[c])
            },
            0.0,
            1.0,
            self.quad,
        )?;
        let far: [f64; N] = integrate_semi_infinite(
            |y: f64| {
                let i = kt * y;
                let s = y.powf(a1 - 1.0) * d.rho(i, k) * (-y).exp();
                let gv = g(i);
                std::array::from_fn(|c| s * gv[c])
            },
            1.0,
            a1.max(1.0),
            self.quad,
        )?;
        Ok(std::array::from_fn(|c| near[c] + far[c]))
    }

    // [int phi e^{-y} Ks2(g*)/g*, int phi e^{-y} Ks3(g*)] over (kT)^{alpha+1}.
    fn scaled_moments(&self, t: f64) -> Result<[f64; 2]> {
        let gp = self.check_t(t)?;
        self.internal_integral(t, |i| {
            let g = gp.gamma_star(i);
            let ks = scaled_orders(g);
            [ks[2] / g, ks[3]]
        })
    }

    /// Integral over I of the requested Bessel weight times phi(I).
    pub fn internal_bessel_moment(&self, weight: BesselWeight, t: f64) -> Result<f64> {
        let gp = self.check_t(t)?;
        let m = self.scaled_moments(t)?;
        let kt = self.constants.k_b * t;
        let scale = (-gp.gamma + (self.density.alpha() + 1.0) * kt.ln()).exp();
        Ok(scale
            * match weight {
                BesselWeight::K2OverGstar => m[0],
                BesselWeight::K3 => m[1],
            })
    }

    /// b = (n m c^2 / gamma^2) * (K3 moment) / (K2/gamma* moment).
    pub fn b_coefficient(&self, n: f64, t: f64) -> Result<f64> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain(format!("number density must be positive, got {n}")));
        }
        let gp = self.check_t(t)?;
        let m = self.scaled_moments(t)?;
        Ok(n * self.constants.rest_energy() / (gp.gamma * gp.gamma) * (m[1] / m[0]))
    }

    /// Energy per particle e/n at temperature T (closed form).
    pub fn etilde(&self, t: f64) -> Result<f64> {
        let m = self.scaled_moments(t)?;
        Ok(self.constants.k_b * t * (m[1] / m[0] - 1.0))
    }

    /// Energy per particle by direct quadrature of the defining ratio.
    ///
    /// The momentum integral runs in r = |p| / mc with x - 1 = r^2 / (1 + x)
    /// so that e^{-gamma* (x - 1)} is formed without cancellation.
    pub fn etilde_quadrature(&self, t: f64, epsrel: f64) -> Result<f64> {
        let gp = self.check_t(t)?;
        let failure: Cell<Option<Error>> = Cell::new(None);
        let inner_opts = QuadOptions::relative(epsrel * 0.1);
        let kt = self.constants.k_b * t;
        let outer = Thermodynamics {
            quad: QuadOptions::relative(epsrel),
            ..*self
        };
        let v = outer.internal_integral(t, |i| {
            let g = gp.gamma_star(i);
            let scale = (1.0 / g).max(1.0 / g.sqrt());
            let inner = integrate_semi_infinite(
                |r: f64| {
                    let x = (1.0 + r * r).sqrt();
                    let w = r * r * (-g * r * r / (1.0 + x)).exp();
                    [w, w * x]
                },
                0.0,
                scale,
                inner_opts,
            );
            match inner {
                Ok(a) => [a[0], kt * g * a[1]],
                Err(e) => {
                    failure.set(Some(e));
                    [0.0, 0.0]
                }
            }
        })?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(v[1] / v[0])
    }

    /// Closed form guarded by the quadrature path; errors when they disagree
    /// by more than [`PATH_TOLERANCE`].
    pub fn etilde_checked(&self, t: f64) -> Result<f64> {
        let closed = self.etilde(t)?;
        let direct = self.etilde_quadrature(t, 1e-11)?;
        let difference = ((closed - direct) / closed).abs();
        if difference > PATH_TOLERANCE {
            return Err(Error::PathDisagreement {
                temperature: t,
                difference,
            });
        }
        Ok(closed)
    }

    /// d(e/n)/dT through the energy-variance representation.
    pub fn etilde_prime(&self, t: f64) -> Result<f64> {
        let gp = self.check_t(t)?;
        let e = self.etilde(t)?;
        let kt = self.constants.k_b * t;
        // The variance integrand cancels to O((kT / mc^2)^2) at low T, so the
        // relative target is relaxed to stay above the roundoff floor.
        let loose = Thermodynamics {
            quad: QuadOptions::relative(1e-10),
            ..*self
        };
        let v = loose.internal_integral(t, |i| {
            let g = gp.gamma_star(i);
            let ks = scaled_orders(g);
            let j0 = ks[2] / g;
            let j1 = ks[3] / g - ks[2] / (g * g);
            let j2 = ks[2] / g + 3.0 * ks[3] / (g * g);
            let u = kt * g;
            [u * u * j2 - 2.0 * e * u * j1 + e * e * j0, j0]
        })?;
        Ok(v[0] / v[1] / (self.constants.k_b * t * t))
    }

    /// ln of the equilibrium amplitude giving number density n at rest.
    pub fn ln_amplitude(&self, n: f64, t: f64) -> Result<f64> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain(format!("number density must be positive, got {n}")));
        }
        let gp = self.check_t(t)?;
        let m = self.scaled_moments(t)?;
        let kt = self.constants.k_b * t;
        let mc = self.constants.mc();
        Ok(n.ln() - (4.0 * PI * mc * mc * mc).ln() + gp.gamma
            - (self.density.alpha() + 1.0) * kt.ln()
            - m[0].ln())
    }

    /// Inverts e/n = etilde(T) by safeguarded Newton inside a bisection bracket.
    pub fn invert_temperature(&self, e_over_n: f64) -> Result<f64> {
        self.invert_temperature_detailed(e_over_n).map(|r| r.temperature)
    }

    pub fn invert_temperature_detailed(&self, e_over_n: f64) -> Result<Inversion> {
        const T_MIN: f64 = 1e-6;
        const T_MAX: f64 = 1e6;
        let mc2 = self.constants.rest_energy();
        if !(e_over_n.is_finite() && e_over_n > mc2) {
            return Err(Error::Inversion(format!(
                "e/n = {e_over_n} is not above the rest energy {mc2}"
            )));
        }
        let kb = self.constants.k_b;
        // Nonrelativistic estimate; the bracket search corrects it.
        let guess = ((e_over_n - mc2) / (kb * (1.5 + self.density.alpha() + 1.0))).clamp(T_MIN, T_MAX);
        let (mut lo, mut hi) = (guess, guess);
        while self.etilde(lo)? >= e_over_n {
            lo *= 0.5;
            if lo < T_MIN {
                return Err(Error::Inversion(format!("no lower bracket for e/n = {e_over_n}")));
            }
        }
        while self.etilde(hi)? <= e_over_n {
            hi *= 2.0;
            if hi > T_MAX {
                return Err(Error::Inversion(format!("no upper bracket for e/n = {e_over_n}")));
            }
        }

        let mut t = 0.5 * (lo + hi);
        let mut newton_steps = 0;
        let mut bisection_steps = 0;
        for _ in 0..200 {
            let r = self.etilde(t)? - e_over_n;
            if r == 0.0 {
                break;
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = self.etilde_prime(t)?;
            let mut next = t - r / d;
            if next <= lo || next >= hi || !next.is_finite() {
                next = 0.5 * (lo + hi);
                bisection_steps += 1;
            } else {
                newton_steps += 1;
            }
            let step = (next - t).abs();
            t = next;
            if step <= 4.0 * f64::EPSILON * t || hi - lo <= 4.0 * f64::EPSILON * t {
                break;
            }
        }
        let resid = (self.etilde(t)? - e_over_n).abs();
        if resid > 1e-10 * e_over_n {
            return Err(Error::Inversion(format!(
                "residual {resid:e} after iteration for e/n = {e_over_n}"
            )));
        }
        Ok(Inversion {
            temperature: t,
            newton_steps,
            bisection_steps,
        })
    }
}
