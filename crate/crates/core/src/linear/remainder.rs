//! The nonlinear remainder Gamma by operator difference, and the scalar
//! functionals Psi, Psi_1 and node functions Phi, Phi_1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::reduce::Neumaier;
use crate::grid::DistributionField;
use crate::linear::basis::{inner, LinearSetup};
use crate::moments::{compute_v_t, eckart_decompose, AttractorMode, AttractorParams};
use crate::solver::relax::relaxation_rhs;

/// tau times the relaxation right-hand side, divided by sqrt(F_E^0).
pub fn scaled_rhs(setup: &LinearSetup, f: &[f64], mode: AttractorMode) -> Result<(AttractorParams, Vec<f64>)> {
    let g = &setup.grid;
    let big = setup.distribution(f);
    let seed = setup.reference.attractor_seed(g.constants.k_b);
    let (params, rhs) = relaxation_rhs(g, &big, mode, Some(&seed), 0)?;
    let tau = g.constants.tau;
    let out = rhs.iter().zip(&setup.reference.sqrt_f0).map(|(r, s)| tau * r / s).collect();
    Ok((params, out))
}

/// Gamma(f) = tau RHS / sqrt(F_E^0) - L(f) for one cell.
pub fn gamma_remainder(setup: &LinearSetup, f: &[f64], mode: AttractorMode) -> Result<Vec<f64>> {
    let (_, rhs) = scaled_rhs(setup, f, mode)?;
    let l = setup.basis.linearized(&setup.grid, f)?;
    Ok(rhs.iter().zip(&l).map(|(r, l)| r - l).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiPhi {
    pub psi: f64,
    pub psi1: f64,
    /// Phi = U.p - c p0 at each momentum node.
    pub phi: Vec<f64>,
    /// Phi_1 = Phi + c sum_i p^i <p^i f sqrt(F_E^0) / p0>.
    pub phi1: Vec<f64>,
    /// n of the Eckart decomposition of F.
    pub n: f64,
}

impl PsiPhi {
    /// |n - sqrt(1 + Psi)|.
    pub fn n_identity_residual(&self) -> f64 {
        (self.n - (1.0 + self.psi).sqrt()).abs()
    }
}

pub fn psi_phi(setup: &LinearSetup, f: &[f64]) -> Result<PsiPhi> {
    let g = &setup.grid;
    let k = g.constants;
    let m = &g.momentum;
    let ne = g.n_energy();
    let s0 = &setup.reference.sqrt_f0;
    let a: [f64; 4] = g.sum(|j, kk| {
        let i = j * ne + kk;
        let v = f[i] * s0[i];
        let p = &m.nodes[j];
        let inv = 1.0 / m.p0[j];
        [v, p[0] * v * inv, p[1] * v * inv, p[2] * v * inv]
    });
    let spatial = a[1] * a[1] + a[2] * a[2] + a[3] * a[3];
    let psi1 = a[0] * a[0] - spatial;
    let psi = 2.0 * a[0] + psi1;
    let big = setup.distribution(f);
    let st = eckart_decompose(&compute_v_t(g, &big)?, k.mc(), k.c)?;
    let phi: Vec<f64> = (0..g.n_momentum())
        .map(|j| st.u.dot_momentum(m.p0[j], &m.nodes[j]) - k.c * m.p0[j])
        .collect();
    let phi1 = phi
        .iter()
        .enumerate()
        .map(|(j, ph)| {
            let p = &m.nodes[j];
            ph + k.c * (p[0] * a[1] + p[1] * a[2] + p[2] * a[3])
        })
        .collect();
    Ok(PsiPhi {
        psi,
        psi1,
        phi,
        phi1,
        n: st.n,
    })
}

/// |<L f, f> + ||(I - P) f||^2|.
pub fn dissipativity_residual(setup: &LinearSetup, f: &[f64]) -> Result<f64> {
    let g = &setup.grid;
    let l = setup.basis.linearized(g, f)?;
    Ok((inner(g, &l, f) + inner(g, &l, &l)).abs())
}

/// |‖f‖² - ‖P f‖² - ‖(I - P) f‖²|.
pub fn pythagoras_residual(setup: &LinearSetup, f: &[f64]) -> Result<f64> {
    let g = &setup.grid;
    let (pf, _) = setup.basis.project(g, f)?;
    let micro: Vec<f64> = f.iter().zip(&pf).map(|(x, p)| x - p).collect();
    Ok((inner(g, f, f) - inner(g, &pf, &pf) - inner(g, &micro, &micro)).abs())
}

/// ‖Gamma(eps f)‖ / eps² at each eps.
pub fn quadratic_profile(setup: &LinearSetup, f: &[f64], eps: &[f64], mode: AttractorMode) -> Result<Vec<f64>> {
    let g = &setup.grid;
    eps.iter()
        .map(|&e| {
            let fe: Vec<f64> = f.iter().map(|x| e * x).collect();
            let gam = gamma_remainder(setup, &fe, mode)?;
            Ok(inner(g, &gam, &gam).sqrt() / (e * e))
        })
        .collect()
}

/// Relative spread (max - min) / min of a quadratic profile.
pub fn quadratic_ratio(profile: &[f64]) -> f64 {
    let lo = profile.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

/// dx * sum over cells of <Gamma(f), P f>.
pub fn box_gamma_projection(setup: &LinearSetup, field: &DistributionField, mode: AttractorMode) -> Result<f64> {
    let g = &setup.grid;
    let per_cell = field.map_cells(|c, v| -> Result<f64> {
        let f = setup.perturbation(v);
        let (pf, _) = setup.basis.project(g, &f)?;
        let gam = gamma_remainder(setup, &f, mode).map_err(|e| match e {
            Error::Attractor { reason, .. } => Error::Attractor { cell: c, reason },
            other => other,
        })?;
        Ok(inner(g, &gam, &pf))
    });
    let mut acc = Neumaier::default();
    for r in per_cell {
        acc.add(r?);
    }
    Ok(field.mesh.dx() * acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, PhaseGrid};
    use crate::special::StateDensity;
    use crate::PhysicalConstants;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn setup() -> LinearSetup {
        let spec = GridSpec {
            n_per_axis: 12,
            n_energy: 4,
            ..GridSpec::default()
        };
        let g = PhaseGrid::new(PhysicalConstants::default(), StateDensity::default(), &spec, 0.1).unwrap();
        LinearSetup::new(Arc::new(g), 0.1).unwrap()
    }

    fn smooth_random(s: &LinearSetup, seed: u64, eps: f64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        s.reference.sqrt_f0.iter().map(|&x| eps * x * rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn gamma_vanishes_at_equilibrium() {
        let s = setup();
        let zero = vec![0.0; s.grid.cell_len()];
        for mode in [AttractorMode::DiscreteExact, AttractorMode::Continuum] {
            let g = gamma_remainder(&s, &zero, mode).unwrap();
            if mode == AttractorMode::DiscreteExact {
                assert!(g.iter().all(|&x| x == 0.0));
            }
        }
    }

    #[test]
    fn gamma_is_quadratic() {
        let s = setup();
        let f = smooth_random(&s, 5, 1.0);
        let prof = quadratic_profile(&s, &f, &[1e-2, 1e-3], AttractorMode::DiscreteExact).unwrap();
        assert!(quadratic_ratio(&prof) < 0.05, "{prof:?}");
    }

    #[test]
    fn psi_reproduces_density() {
        let s = setup();
        let f = smooth_random(&s, 9, 0.05);
        let pp = psi_phi(&s, &f).unwrap();
        assert!(pp.n_identity_residual() < 1e-10);
        let z = psi_phi(&s, &vec![0.0; s.grid.cell_len()]).unwrap();
        assert_eq!((z.psi, z.psi1), (0.0, 0.0));
        assert!(z.phi.iter().chain(&z.phi1).all(|&x| x == 0.0));
    }
}
