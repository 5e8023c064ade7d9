//! Finite-volume advection along x for every (p, I) node of a periodic slab.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::DistributionField;
use crate::solver::config::Scheme;

/// Largest stable transport step: cfl dx / max |phat_x|.
pub fn cfl_limit(field: &DistributionField, cfl: f64) -> f64 {
    let v = field.grid.momentum.max_speed_x();
    cfl * field.mesh.dx() / v
}

#[inline]
fn van_leer(a: f64, b: f64) -> f64 {
    if a * b > 0.0 {
        2.0 * a * b / (a + b)
    } else {
        0.0
    }
}

// Numerical flux through the face between `left` and `right`, given the
// neighbours beyond them for slope reconstruction.
#[inline]
fn face_flux(scheme: Scheme, v: f64, ll: f64, l: f64, r: f64, rr: f64) -> f64 {
    match scheme {
        Scheme::ExplicitUpwind1 => {
            if v >= 0.0 {
                v * l
            } else {
                v * r
            }
        }
        Scheme::Muscl2 => {
            if v >= 0.0 {
                v * (l + 0.5 * van_leer(l - ll, r - l))
            } else {
                v * (r - 0.5 * van_leer(r - l, rr - r))
            }
        }
    }
}

/// Writes -d(phat_x F)/dx into `out` for every cell, for the field laid out
/// like `field.values`.
///
/// Each face flux is computed with identical arithmetic by both adjacent
/// cells, so the cell sum of `out` telescopes to rounding error.
pub fn transport_rhs(field: &DistributionField, values: &[f64], scheme: Scheme, out: &mut [f64]) {
    let grid = &field.grid;
    let n = grid.cell_len();
    let nc = field.n_cells();
    let ne = grid.n_energy();
    let inv_dx = 1.0 / field.mesh.dx();
    let phat = &grid.momentum.phat;
    let at = |c: isize, i: usize| -> f64 {
        let cc = c.rem_euclid(nc as isize) as usize;
        values[cc * n + i]
    };
    out.par_chunks_mut(n).enumerate().for_each(|(c, dst)| {
        let c = c as isize;
        for (i, d) in dst.iter_mut().enumerate() {
            let v = phat[i / ne][0];
            let (m2, m1, c0, p1, p2) = (at(c - 2, i), at(c - 1, i), at(c, i), at(c + 1, i), at(c + 2, i));
            let left = face_flux(scheme, v, m2, m1, c0, p1);
            let right = face_flux(scheme, v, m1, c0, p1, p2);
            *d = -(right - left) * inv_dx;
        }
    });
}

/// Advances F by dt under dF/dt + phat_x dF/dx = 0.
pub fn transport_step(field: &mut DistributionField, dt: f64, scheme: Scheme, cfl: f64) -> Result<()> {
    let limit = cfl_limit(field, cfl);
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Cfl { dt, limit });
    }
    if field.n_cells() == 1 {
        return Ok(());
    }
    let len = field.values.len();
    let mut k1 = vec![0.0; len];
    transport_rhs(field, &field.values, scheme, &mut k1);
    match scheme {
        Scheme::ExplicitUpwind1 => {
            field.values.par_iter_mut().zip(&k1).for_each(|(f, k)| *f += dt * k);
        }
        Scheme::Muscl2 => {
            let stage: Vec<f64> = field.values.par_iter().zip(&k1).map(|(f, k)| f + dt * k).collect();
            let mut k2 = vec![0.0; len];
            transport_rhs(field, &stage, scheme, &mut k2);
            field
                .values
                .par_iter_mut()
                .zip(stage.par_iter().zip(&k2))
                .for_each(|(f, (s, k))| *f = 0.5 * *f + 0.5 * (s + dt * k));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, PhaseGrid, SpatialMesh};
    use crate::special::StateDensity;
    use crate::PhysicalConstants;
    use std::sync::Arc;

    fn field(n_cells: usize) -> DistributionField {
        let spec = GridSpec {
            n_per_axis: 8,
            n_energy: 2,
            ..GridSpec::default()
        };
        let g = PhaseGrid::new(PhysicalConstants::default(), StateDensity::default(), &spec, 0.1).unwrap();
        DistributionField::zeros(Arc::new(g), SpatialMesh::new(n_cells, 1.0).unwrap())
    }

    #[test]
    fn uniform_field_is_unchanged() {
        let mut f = field(16);
        for (i, v) in f.values.iter_mut().enumerate() {
            *v = 1.0 + (i % 97) as f64 * 0.01;
        }
        let n = f.grid.cell_len();
        let first: Vec<f64> = f.cell(0).to_vec();
        for c in 0..16 {
            f.cell_mut(c).copy_from_slice(&first);
        }
        let before = f.values.clone();
        let dt = cfl_limit(&f, 0.5);
        for scheme in [Scheme::ExplicitUpwind1, Scheme::Muscl2] {
            transport_step(&mut f, dt, scheme, 0.5).unwrap();
            assert_eq!(f.values, before);
        }
        assert_eq!(n, f.grid.cell_len());
    }

    // One momentum node carrying a top hat: upwind moves it at phat_x and
    // keeps its mass.
    #[test]
    fn top_hat_travels_at_node_speed() {
        let nc = 200;
        let mut f = field(nc);
        let g = f.grid.clone();
        let j = (0..g.n_momentum()).max_by(|&a, &b| g.momentum.phat[a][0].total_cmp(&g.momentum.phat[b][0])).unwrap();
        let v = g.momentum.phat[j][0];
        let ne = g.n_energy();
        for c in 40..60 {
            f.cell_mut(c)[j * ne] = 1.0;
        }
        let dx = f.mesh.dx();
        let dt = cfl_limit(&f, 0.8);
        let steps = 100;
        let mass0: f64 = (0..nc).map(|c| f.cell(c)[j * ne]).sum();
        let centroid = |f: &DistributionField| {
            let (m, x) = (0..nc).fold((0.0, 0.0), |(m, x), c| {
                let u = f.cell(c)[j * ne];
                (m + u, x + u * f.mesh.center(c))
            });
            x / m
        };
        let x0 = centroid(&f);
        for _ in 0..steps {
            transport_step(&mut f, dt, Scheme::ExplicitUpwind1, 0.8).unwrap();
        }
        let mass: f64 = (0..nc).map(|c| f.cell(c)[j * ne]).sum();
        assert!((mass - mass0).abs() < 1e-12 * mass0);
        let moved = centroid(&f) - x0;
        let want = v * dt * steps as f64;
        assert!((moved - want).abs() < 1e-9 * dx.max(1.0), "{moved} vs {want}");
    }

    #[test]
    fn cfl_violation_is_rejected() {
        let mut f = field(8);
        let dt = 2.0 * cfl_limit(&f, 0.5);
        assert!(matches!(transport_step(&mut f, dt, Scheme::Muscl2, 0.5), Err(Error::Cfl { .. })));
    }
}
