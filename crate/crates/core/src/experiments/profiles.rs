//! Initial data shared by the drivers.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::experiments::config::Profile;
use crate::grid::{DistributionField, SpatialMesh};
use crate::linear::LinearSetup;

/// Bounded momentum profile xi(p) in (-1, 1).
///
/// The even part is a traceless quadrupole, so it carries pressure
/// anisotropy only. The odd part in p^1 carries rest-frame energy flux.
pub fn xi(setup: &LinearSetup, profile: Profile) -> Vec<f64> {
    let g = &setup.grid;
    let k = g.constants;
    let m = &g.momentum;
    let width = k.thermal_momentum(setup.reference.t0);
    (0..g.n_momentum())
        .map(|j| {
            let p = m.nodes[j];
            let aniso = (p[0] * p[0] - 0.5 * (p[1] * p[1] + p[2] * p[2])) / (width * width);
            let odd = match profile {
                Profile::Anisotropic => 0.0,
                Profile::AnisotropicHeat => p[0] / width * (m.p0[j] - k.mc()) / width,
            };
            (0.5 * aniso + 0.5 * odd).tanh()
        })
        .collect()
}

/// F_E^0 (1 + amp xi) on one cell; positive for amp < 1.
pub fn anisotropic_cell(setup: &LinearSetup, amp: f64, profile: Profile) -> Vec<f64> {
    let ne = setup.grid.n_energy();
    let x = xi(setup, profile);
    let mut out = setup.reference.f0.clone();
    for (i, v) in out.iter_mut().enumerate() {
        *v *= 1.0 + amp * x[i / ne];
    }
    out
}

/// Perturbation with (I - P) f = f: the micro part of amp xi sqrt(F_E^0).
pub fn micro_perturbation(setup: &LinearSetup, amp: f64) -> Result<Vec<f64>> {
    let ne = setup.grid.n_energy();
    let x = xi(setup, Profile::Anisotropic);
    let raw: Vec<f64> = setup
        .reference
        .sqrt_f0
        .iter()
        .enumerate()
        .map(|(i, s)| amp * x[i / ne] * s)
        .collect();
    let (pf, _) = setup.basis.project(&setup.grid, &raw)?;
    Ok(raw.iter().zip(&pf).map(|(r, p)| r - p).collect())
}

/// amp sqrt(F_E^0) times uniform noise in (-1, 1); F stays positive for amp < 1.
pub fn random_perturbation(setup: &LinearSetup, rng: &mut ChaCha8Rng, amp: f64) -> Vec<f64> {
    setup
        .reference
        .sqrt_f0
        .iter()
        .map(|&s| amp * s * rng.random_range(-1.0..1.0))
        .collect()
}

/// Field whose cell c holds `cell(x_c)`.
pub fn slab<F>(setup: &LinearSetup, mesh: SpatialMesh, cell: F) -> Result<DistributionField>
where
    F: Fn(f64) -> Vec<f64>,
{
    let mut values = Vec::with_capacity(mesh.n_cells * setup.grid.cell_len());
    for c in 0..mesh.n_cells {
        values.extend(cell(mesh.center(c)));
    }
    DistributionField::from_values(setup.grid.clone(), mesh, values)
}

/// sin(2 pi mode x / L).
pub fn wave(mesh: &SpatialMesh, mode: usize, x: f64) -> f64 {
    (2.0 * std::f64::consts::PI * mode as f64 * x / mesh.length).sin()
}
