//! Particle flux, energy-momentum tensor and their Eckart decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::moments::fourvector::{projector, FourVector, Tensor4, METRIC};

/// V^mu and the symmetric T^{mu nu} of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxMoments {
    pub v: FourVector,
    pub t: Tensor4,
}

/// V^mu = mc sum p^mu F w / p0 and T^{mu nu} = c sum p^mu p^nu W F w / p0.
pub fn compute_v_t(grid: &PhaseGrid, values: &[f64]) -> Result<FluxMoments> {
    if values.len() != grid.cell_len() {
        return Err(Error::Shape(format!(
            "cell slice has {} values, grid expects {}",
            values.len(),
            grid.cell_len()
        )));
    }
    let m = &grid.momentum;
    let ne = grid.n_energy();
    let s: [f64; 14] = grid.sum(|j, k| {
        let f = values[j * ne + k];
        let p = &m.nodes[j];
        let p0 = m.p0[j];
        let fp = f / p0;
        let fw = f * grid.w_int[k];
        let fwp = fw / p0;
        [
            f,
            p[0] * fp,
            p[1] * fp,
            p[2] * fp,
            p0 * fw,
            p[0] * fw,
            p[1] * fw,
            p[2] * fw,
            p[0] * p[0] * fwp,
            p[0] * p[1] * fwp,
            p[0] * p[2] * fwp,
            p[1] * p[1] * fwp,
            p[1] * p[2] * fwp,
            p[2] * p[2] * fwp,
        ]
    });
    let mc = grid.constants.mc();
    let c = grid.constants.c;
    let v = FourVector([mc * s[0], mc * s[1], mc * s[2], mc * s[3]]);
    let mut t = [[0.0; 4]; 4];
    t[0][0] = c * s[4];
    for i in 0..3 {
        t[0][i + 1] = c * s[5 + i];
        t[i + 1][0] = c * s[5 + i];
    }
    let ij = [(0, 0, 8), (0, 1, 9), (0, 2, 10), (1, 1, 11), (1, 2, 12), (2, 2, 13)];
    for (a, b, idx) in ij {
        t[a + 1][b + 1] = c * s[idx];
        t[b + 1][a + 1] = c * s[idx];
    }
    Ok(FluxMoments { v, t })
}

/// Eckart-frame fields of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EckartState {
    pub n: f64,
    #[serde(rename = "U")]
    pub u: FourVector,
    /// Energy density e = U_mu U_nu T^{mu nu} / c^2.
    pub e: f64,
    pub e_over_n: f64,
    pub q: FourVector,
    /// p + Pi.
    pub pressure_dyn: f64,
    pub sigma: Tensor4,
}

fn lower_index(t: &Tensor4) -> Tensor4 {
    std::array::from_fn(|a| std::array::from_fn(|b| METRIC[a] * METRIC[b] * t[a][b]))
}

/// Decomposes (V, T) relative to the particle-flux velocity.
pub fn eckart_decompose(fm: &FluxMoments, mc: f64, c: f64) -> Result<EckartState> {
    let vv = fm.v.dot(&fm.v);
    if !(vv > 0.0 && fm.v.0[0] > 0.0) {
        return Err(Error::NotTimelike(vv));
    }
    let norm = vv.sqrt();
    let n = norm / mc;
    let u = FourVector::velocity([c * fm.v.0[1] / norm, c * fm.v.0[2] / norm, c * fm.v.0[3] / norm], c);
    let ul = u.lower();
    let t = &fm.t;

    // U_mu T^{mu nu}
    let ut: [f64; 4] = std::array::from_fn(|nu| (0..4).map(|mu| ul[mu] * t[mu][nu]).sum());
    let e = (0..4).map(|nu| ul[nu] * ut[nu]).sum::<f64>() / (c * c);
    let q = FourVector(std::array::from_fn(|nu| ut[nu] - e * u.0[nu]));

    let trace: f64 = (0..4).map(|a| METRIC[a] * t[a][a]).sum();
    let pressure_dyn = (e - trace) / 3.0;

    let h_up = projector(&u, c);
    // h^mu_alpha = h^{mu beta} g_{beta alpha}
    let h_mixed: Tensor4 = std::array::from_fn(|m| std::array::from_fn(|a| h_up[m][a] * METRIC[a]));
    let h_low = lower_index(&h_up);
    let ht: f64 = (0..4)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .map(|(a, b)| h_low[a][b] * t[a][b])
        .sum();
    let mut sigma = [[0.0; 4]; 4];
    for m in 0..4 {
        for nn in 0..4 {
            let mut s = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    s += t[a][b] * h_mixed[m][a] * h_mixed[nn][b];
                }
            }
            sigma[m][nn] = s - h_up[m][nn] * ht / 3.0;
        }
    }

    Ok(EckartState {
        n,
        u,
        e,
        e_over_n: e / n,
        q,
        pressure_dyn,
        sigma,
    })
}

impl EckartState {
    /// Rebuilds (V, T) from the Eckart fields.
    pub fn reconstruct(&self, mc: f64, c: f64) -> FluxMoments {
        let v = FourVector(std::array::from_fn(|i| self.n * mc * self.u.0[i]));
        let h = projector(&self.u, c);
        let u = &self.u.0;
        let q = &self.q.0;
        let t = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                self.sigma[a][b]
                    + self.pressure_dyn * h[a][b]
                    + (q[a] * u[b] + q[b] * u[a]) / (c * c)
                    + self.e * u[a] * u[b] / (c * c)
            })
        });
        FluxMoments { v, t }
    }

    /// Largest violation of U.q = 0, U_mu sigma^{mu nu} = 0, tr sigma = 0,
    /// each scaled by the natural magnitude of the quantity.
    pub fn constraint_defect(&self, c: f64) -> f64 {
        let ul = self.u.lower();
        let scale_q = self.e.abs() * c;
        let uq = (0..4).map(|i| ul[i] * self.q.0[i]).sum::<f64>() / scale_q;
        let scale_s = self.e.abs().max(self.pressure_dyn.abs()) * c;
        let mut worst = uq.abs();
        for nu in 0..4 {
            let s: f64 = (0..4).map(|mu| ul[mu] * self.sigma[mu][nu]).sum();
            worst = worst.max(s.abs() / scale_s);
        }
        let tr: f64 = (0..4).map(|a| METRIC[a] * self.sigma[a][a]).sum();
        worst.max(tr.abs() / scale_s * c)
    }
}
