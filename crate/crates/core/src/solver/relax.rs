//! The relaxation substep dF/dt = (U.p / (c tau p0)) (A - F), cell by cell.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{DistributionField, PhaseGrid};
use crate::moments::attractor::kappa_for;
use crate::moments::{build_attractor, AttractorMode, AttractorParams, ConservationWeights, FourVector};
use crate::solver::config::StiffMode;

/// Collision frequency nu_j = U.p / (c tau p0) at every momentum node.
pub fn collision_rate(grid: &PhaseGrid, u: &FourVector) -> Vec<f64> {
    let k = &grid.constants;
    let m = &grid.momentum;
    (0..grid.n_momentum())
        .map(|j| u.dot_momentum(m.p0[j], &m.nodes[j]) / (k.c * k.tau * m.p0[j]))
        .collect()
}

/// nu (A - F) for one cell, with A built from F.
pub fn relaxation_rhs(
    grid: &PhaseGrid,
    values: &[f64],
    mode: AttractorMode,
    seed: Option<&AttractorParams>,
    cell: usize,
) -> Result<(AttractorParams, Vec<f64>)> {
    let (params, a) = build_attractor(grid, values, mode, ConservationWeights::Model, seed, cell)?;
    let nu = collision_rate(grid, &params.u);
    let ne = grid.n_energy();
    let rhs = values
        .iter()
        .zip(&a)
        .enumerate()
        .map(|(i, (f, a))| nu[i / ne] * (a - f))
        .collect();
    Ok((params, rhs))
}

fn relax_cell(
    grid: &PhaseGrid,
    values: &mut [f64],
    dt: f64,
    mode: AttractorMode,
    stiff: StiffMode,
    seed: Option<&AttractorParams>,
    cell: usize,
) -> Result<AttractorParams> {
    let ne = grid.n_energy();
    match stiff {
        StiffMode::ImplicitRelaxation => {
            let weights = ConservationWeights::Exponential { dt };
            let (params, a) = build_attractor(grid, values, mode, weights, seed, cell)?;
            let kappa = kappa_for(grid, &params.u, weights);
            for (i, (f, a)) in values.iter_mut().zip(&a).enumerate() {
                *f += kappa[i / ne] * (a - *f);
            }
            Ok(params)
        }
        StiffMode::ExplicitRk2 => {
            let (p1, k1) = relaxation_rhs(grid, values, mode, seed, cell)?;
            let stage: Vec<f64> = values.iter().zip(&k1).map(|(f, k)| f + dt * k).collect();
            let (p2, k2) = relaxation_rhs(grid, &stage, mode, Some(&p1), cell)?;
            for ((f, a), b) in values.iter_mut().zip(&k1).zip(&k2) {
                *f += 0.5 * dt * (a + b);
            }
            Ok(p2)
        }
    }
}

/// Relaxes every cell over dt. `warm` holds per-cell Newton seeds and is
/// updated in place.
pub fn relax_step(
    field: &mut DistributionField,
    dt: f64,
    mode: AttractorMode,
    stiff: StiffMode,
    warm: &mut [Option<AttractorParams>],
) -> Result<()> {
    if warm.len() != field.n_cells() {
        return Err(Error::Shape(format!(
            "{} warm starts for {} cells",
            warm.len(),
            field.n_cells()
        )));
    }
    let grid = field.grid.clone();
    let n = grid.cell_len();
    let results: Vec<Result<AttractorParams>> = field
        .values
        .par_chunks_mut(n)
        .zip(warm.par_iter())
        .enumerate()
        .map(|(c, (cell, seed))| relax_cell(&grid, cell, dt, mode, stiff, seed.as_ref(), c))
        .collect();
    for (slot, r) in warm.iter_mut().zip(results) {
        *slot = Some(r?);
    }
    Ok(())
}

/// Upper bound of nu over the grid for the cells of `field`.
pub fn max_collision_rate(field: &DistributionField) -> Result<f64> {
    let k = field.grid.constants;
    let rates = field.map_cells(|c, v| -> Result<f64> {
        let st = crate::moments::eckart_decompose(&crate::moments::compute_v_t(&field.grid, v)?, k.mc(), k.c)
            .map_err(|e| Error::Attractor {
                cell: c,
                reason: e.to_string(),
            })?;
        let r = collision_rate(&field.grid, &st.u);
        Ok(r.into_iter().fold(0.0, f64::max))
    });
    let mut m = 0.0f64;
    for r in rates {
        m = m.max(r?);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{GridSpec, SpatialMesh};
    use crate::moments::{build_equilibrium, AmplitudeMode};
    use crate::special::StateDensity;
    use crate::PhysicalConstants;
    use std::sync::Arc;

    fn grid() -> Arc<PhaseGrid> {
        let spec = GridSpec {
            n_per_axis: 12,
            n_energy: 4,
            ..GridSpec::default()
        };
        Arc::new(PhaseGrid::new(PhysicalConstants::default(), StateDensity::default(), &spec, 0.1).unwrap())
    }

    #[test]
    fn equilibrium_is_left_in_place() {
        let g = grid();
        let (params, fe) = build_equilibrium(&g, 1.0, FourVector::rest(1.0), 0.1, AmplitudeMode::DiscreteExact).unwrap();
        let mut field = DistributionField::uniform(g.clone(), SpatialMesh::new(2, 1.0).unwrap(), &fe).unwrap();
        let seed = AttractorParams::from_juttner(&params, 1.0);
        for stiff in [StiffMode::ImplicitRelaxation, StiffMode::ExplicitRk2] {
            let mut warm = vec![Some(seed); 2];
            relax_step(&mut field, 0.1, AttractorMode::DiscreteExact, stiff, &mut warm).unwrap();
            assert_eq!(field.cell(0), &fe[..]);
        }
    }

    #[test]
    fn rate_is_positive_for_fast_flow() {
        let g = grid();
        let mut rng = 0.3f64;
        for _ in 0..10 {
            rng = (rng * 7.31 + 0.17).fract();
            let speed = 0.9 * rng;
            let u = FourVector::velocity([speed * rng.cos(), speed * rng.sin(), 0.0], 1.0);
            let min = collision_rate(&g, &u).into_iter().fold(f64::INFINITY, f64::min);
            assert!(min > 0.0);
        }
    }
}
