//! Serializable summary of the macroscopic state and attractor of one cell.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::PhaseGrid;
use crate::moments::attractor::{build_attractor, conservation_residuals, AttractorMode, ConservationWeights};
use crate::moments::eckart::{compute_v_t, eckart_decompose};
use crate::moments::equilibrium::thermodynamics_for;
use crate::moments::fourvector::FourVector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub n: f64,
    #[serde(rename = "U")]
    pub u: FourVector,
    pub e_over_n: f64,
    pub q: FourVector,
    #[serde(rename = "T")]
    pub t: f64,
    /// Continuum b(n, T) of the attractor's linear factor.
    pub b: f64,
    /// Discrete correction w_alpha of the attractor.
    pub w: [f64; 4],
    /// Scaled conservation residuals of (A - F): V^0 row, then U_mu T^{mu nu} rows.
    pub residuals: [f64; 5],
}

pub fn state_report(grid: &PhaseGrid, values: &[f64], mode: AttractorMode) -> Result<StateReport> {
    let k = grid.constants;
    let st = eckart_decompose(&compute_v_t(grid, values)?, k.mc(), k.c)?;
    let (params, attractor) = build_attractor(grid, values, mode, ConservationWeights::Model, None, 0)?;
    let b = thermodynamics_for(grid)?.b_coefficient(st.n, params.t)?;
    Ok(StateReport {
        n: st.n,
        u: st.u,
        e_over_n: st.e_over_n,
        q: st.q,
        t: params.t,
        b,
        w: params.w,
        residuals: conservation_residuals(grid, values, &attractor, &params.u, ConservationWeights::Model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::moments::equilibrium::reference_equilibrium;
    use crate::special::StateDensity;
    use crate::PhysicalConstants;

    #[test]
    fn equilibrium_report_has_fixed_field_names() {
        let spec = GridSpec {
            n_per_axis: 10,
            n_energy: 4,
            ..GridSpec::default()
        };
        let g = PhaseGrid::new(PhysicalConstants::default(), StateDensity::default(), &spec, 0.1).unwrap();
        let (_, f0) = reference_equilibrium(&g, 0.1).unwrap();
        let r = state_report(&g, &f0, AttractorMode::DiscreteExact).unwrap();
        assert!((r.n - 1.0).abs() < 1e-14);
        assert!(r.residuals.iter().all(|x| x.abs() < 1e-12));
        let v = serde_json::to_value(r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(keys, ["T", "U", "b", "e_over_n", "n", "q", "residuals", "w"]);
    }
}
