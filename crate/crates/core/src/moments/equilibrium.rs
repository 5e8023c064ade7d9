//! Generalized Juttner equilibria sampled on the phase grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::moments::eckart::{compute_v_t, eckart_decompose};
use crate::moments::fourvector::FourVector;
use crate::special::Thermodynamics;

/// How the equilibrium amplitude is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMode {
    /// Rescaled so the discrete number density equals n exactly.
    #[default]
    DiscreteExact,
    /// Closed-form amplitude from the Bessel moment.
    Continuum,
}

/// F_E = exp(ln_amplitude - beta W U.p).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JuttnerParams {
    pub ln_amplitude: f64,
    /// 1 / (k_B T).
    pub beta: f64,
    #[serde(rename = "U")]
    pub u: FourVector,
}

impl JuttnerParams {
    pub fn temperature(&self, k_b: f64) -> f64 {
        1.0 / (k_b * self.beta)
    }

    /// Samples F_E at every (p, I) node of one cell.
    pub fn sample(&self, grid: &PhaseGrid) -> Vec<f64> {
        let m = &grid.momentum;
        let ne = grid.n_energy();
        let mut out = Vec::with_capacity(grid.cell_len());
        for j in 0..grid.n_momentum() {
            let up = self.u.dot_momentum(m.p0[j], &m.nodes[j]);
            for k in 0..ne {
                out.push((self.ln_amplitude - self.beta * grid.w_int[k] * up).exp());
            }
        }
        out
    }
}

pub fn thermodynamics_for(grid: &PhaseGrid) -> Result<Thermodynamics> {
    Thermodynamics::new(grid.constants, grid.density)
}

/// Equilibrium with density n, velocity U and temperature T.
pub fn build_equilibrium(
    grid: &PhaseGrid,
    n: f64,
    u: FourVector,
    t: f64,
    mode: AmplitudeMode,
) -> Result<(JuttnerParams, Vec<f64>)> {
    let th = thermodynamics_for(grid)?;
    let k = &grid.constants;
    let mut params = JuttnerParams {
        ln_amplitude: th.ln_amplitude(n, t)?,
        beta: 1.0 / (k.k_b * t),
        u,
    };
    let mut values = params.sample(grid);
    if mode == AmplitudeMode::DiscreteExact {
        let st = eckart_decompose(&compute_v_t(grid, &values)?, k.mc(), k.c)?;
        if !(st.n > 0.0 && st.n.is_finite()) {
            return Err(Error::Singular(format!("discrete density {} of the equilibrium", st.n)));
        }
        params.ln_amplitude += (n / st.n).ln();
        values = params.sample(grid);
    }
    Ok((params, values))
}

/// The rest-frame reference equilibrium with n = 1 at temperature t0.
pub fn reference_equilibrium(grid: &PhaseGrid, t0: f64) -> Result<(JuttnerParams, Vec<f64>)> {
    build_equilibrium(grid, 1.0, FourVector::rest(grid.constants.c), t0, AmplitudeMode::DiscreteExact)
}

/// Both sides of the contracted third-moment identity for a synthetic q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThirdMomentReport {
    /// -(1/(b m)) sum p^nu (p^alpha q_alpha) W^2 F_E.
    pub lhs: [f64; 4],
    pub q: FourVector,
    pub max_rel_residual: f64,
    /// U_mu sum p^mu (correction) F_E / p0, which vanishes by U.q = 0.
    pub scalar_condition: f64,
}

/// Evaluates the identity at rest with n = 1 and spatial heat flux `q`.
pub fn third_moment_contraction_check(grid: &PhaseGrid, t: f64, q: [f64; 3]) -> Result<ThirdMomentReport> {
    let (_, fe) = reference_equilibrium(grid, t)?;
    let th = thermodynamics_for(grid)?;
    let k = &grid.constants;
    let b = th.b_coefficient(1.0, t)?;
    let m = &grid.momentum;
    let ne = grid.n_energy();
    let s: [f64; 5] = grid.sum(|j, kk| {
        let p = &m.nodes[j];
        // p^alpha q_alpha with q^0 = 0
        let pq = -(p[0] * q[0] + p[1] * q[1] + p[2] * q[2]);
        let w = grid.w_int[kk];
        let f = fe[j * ne + kk];
        let a = pq * w * w * f;
        [m.p0[j] * a, p[0] * a, p[1] * a, p[2] * a, pq * w * f]
    });
    let scale = -1.0 / (b * k.m);
    let lhs = [scale * s[0], scale * s[1], scale * s[2], scale * s[3]];
    let qv = FourVector([0.0, q[0], q[1], q[2]]);
    let qn = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2]).sqrt();
    let max_abs = (0..4).map(|i| (lhs[i] - qv.0[i]).abs()).fold(0.0, f64::max);
    let max_rel_residual = if qn > 0.0 { max_abs / qn } else { max_abs };
    let scalar_condition = -k.c / (b * k.m * k.c * k.c) * s[4];
    Ok(ThirdMomentReport {
        lhs,
        q: qv,
        max_rel_residual,
        scalar_condition,
    })
}
