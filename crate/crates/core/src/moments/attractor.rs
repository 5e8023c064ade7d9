//! Corrected equilibrium A = (1 - p^alpha w_alpha W) F_E toward which the
//! relaxation operator drives F.
//!
//! In discrete-exact mode the amplitude, temperature and the three free
//! components of w are solved by Newton so that the five contracted moments
//! of (A - F) vanish on the grid. w is kept orthogonal to U by writing
//! w = sum_k wt_k e^(k) with e^(k)_0 = -U^k / U^0 and e^(k)_j = delta_jk.

use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::moments::eckart::{compute_v_t, eckart_decompose, EckartState};
use crate::moments::equilibrium::{thermodynamics_for, JuttnerParams};
use crate::moments::fourvector::FourVector;

/// Newton stops once every scaled residual is at or below this.
pub const NEWTON_TARGET: f64 = 1e-14;
/// Residual above which a finished solve is reported as a failure.
pub const NEWTON_ACCEPT: f64 = 1e-11;
const MAX_NEWTON: usize = 30;
/// Relative L2 distance between F and A that triggers an admissibility warning.
pub const ADMISSIBILITY: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttractorMode {
    #[default]
    DiscreteExact,
    Continuum,
}

/// Per-node weights kappa under which the five moments of (A - F) vanish.
///
/// `Model` makes the relaxation right-hand side conservative. `Exponential`
/// makes the update F + (1 - e^{-nu dt}) (A - F) conservative for a given
/// step, with nu = U.p / (c tau p0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConservationWeights {
    Model,
    Exponential { dt: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorParams {
    pub ln_amplitude: f64,
    #[serde(rename = "U")]
    pub u: FourVector,
    #[serde(rename = "T")]
    pub t: f64,
    /// 1 / (k_B T), kept alongside T so that seeding does not round-trip it.
    pub beta: f64,
    /// Covariant correction w_alpha.
    pub w: [f64; 4],
    pub iterations: usize,
    /// Largest scaled conservation residual at exit.
    pub residual: f64,
}

impl AttractorParams {
    /// Uncorrected parameters (w = 0) of a Juttner equilibrium.
    pub fn from_juttner(j: &JuttnerParams, k_b: f64) -> Self {
        Self {
            ln_amplitude: j.ln_amplitude,
            u: j.u,
            t: j.temperature(k_b),
            beta: j.beta,
            w: [0.0; 4],
            iterations: 0,
            residual: 0.0,
        }
    }

    pub fn juttner(&self) -> JuttnerParams {
        JuttnerParams {
            ln_amplitude: self.ln_amplitude,
            beta: self.beta,
            u: self.u,
        }
    }

    /// The three free components of w in the U-orthogonal parameterization.
    pub fn w_free(&self) -> [f64; 3] {
        [self.w[1], self.w[2], self.w[3]]
    }
}

/// Builds the attractor for one cell.
///
/// `seed` supplies a starting point for (amplitude, T, w); when absent the
/// continuum values for the cell's (n, e/n) are used. A seed that already
/// satisfies the conservation conditions is returned unchanged.
pub fn build_attractor(
    grid: &PhaseGrid,
    values: &[f64],
    mode: AttractorMode,
    weights: ConservationWeights,
    seed: Option<&AttractorParams>,
    cell: usize,
) -> Result<(AttractorParams, Vec<f64>)> {
    let k = grid.constants;
    let wrap = |e: Error| Error::Attractor {
        cell,
        reason: e.to_string(),
    };
    let state = eckart_decompose(&compute_v_t(grid, values).map_err(wrap)?, k.mc(), k.c).map_err(wrap)?;
    let out = match mode {
        AttractorMode::Continuum => continuum(grid, &state).map_err(wrap)?,
        AttractorMode::DiscreteExact => discrete_exact(grid, values, &state, weights, seed, cell)?,
    };
    let [dist, norm] = grid.sum(|j, kk| {
        let i = grid.index(j, kk);
        let d = values[i] - out.1[i];
        [d * d, out.1[i] * out.1[i]]
    });
    let rel = (dist / norm).sqrt();
    if rel > ADMISSIBILITY {
        log::warn!("cell {cell}: distance to attractor {rel:.3} exceeds admissibility threshold {ADMISSIBILITY}");
    }
    Ok(out)
}

fn continuum(grid: &PhaseGrid, st: &EckartState) -> Result<(AttractorParams, Vec<f64>)> {
    let th = thermodynamics_for(grid)?;
    let k = &grid.constants;
    let t = th.invert_temperature(st.e_over_n)?;
    let ln_amplitude = th.ln_amplitude(st.n, t)?;
    let b = th.b_coefficient(st.n, t)?;
    let scale = 1.0 / (b * k.m * k.c * k.c);
    let ql = st.q.lower();
    let w = std::array::from_fn(|i| ql[i] * scale);
    let params = AttractorParams {
        ln_amplitude,
        u: st.u,
        t,
        beta: 1.0 / (k.k_b * t),
        w,
        iterations: 0,
        residual: f64::NAN,
    };
    let values = sample_corrected(grid, &params);
    Ok((params, values))
}

/// A = (1 - p^alpha w_alpha W) F_E for given parameters.
pub fn sample_corrected(grid: &PhaseGrid, params: &AttractorParams) -> Vec<f64> {
    let m = &grid.momentum;
    let beta = params.beta;
    let ne = grid.n_energy();
    let mut out = Vec::with_capacity(grid.cell_len());
    let w = params.w;
    for j in 0..grid.n_momentum() {
        let p = &m.nodes[j];
        let up = params.u.dot_momentum(m.p0[j], p);
        let pw = m.p0[j] * w[0] + p[0] * w[1] + p[1] * w[2] + p[2] * w[3];
        for kk in 0..ne {
            let wi = grid.w_int[kk];
            let e = (params.ln_amplitude - beta * wi * up).exp();
            out.push((1.0 - pw * wi) * e);
        }
    }
    out
}

struct Eval {
    resid: [f64; 5],
    scale: [f64; 5],
    jac: [[f64; 5]; 5],
}

fn evaluate(
    grid: &PhaseGrid,
    values: &[f64],
    u: &FourVector,
    kappa: &[f64],
    x: &[f64; 5],
    with_jacobian: bool,
) -> Eval {
    let m = &grid.momentum;
    let ne = grid.n_energy();
    let (lam, beta) = (x[0], x[1]);
    let wt = [x[2], x[3], x[4]];
    let ratio = [u.0[1] / u.0[0], u.0[2] / u.0[0], u.0[3] / u.0[0]];
    let s: [f64; 35] = grid.sum(|j, kk| {
        let p = &m.nodes[j];
        let p0 = m.p0[j];
        let up = u.dot_momentum(p0, p);
        let d = [p[0] - p0 * ratio[0], p[1] - p0 * ratio[1], p[2] - p0 * ratio[2]];
        let wi = grid.w_int[kk];
        let e = (lam - beta * wi * up).exp();
        let corr = 1.0 - wi * (wt[0] * d[0] + wt[1] * d[1] + wt[2] * d[2]);
        let a = corr * e;
        let f = values[j * ne + kk];
        let kap = kappa[j];
        let row = [kap, kap * p0 * wi, kap * p[0] * wi, kap * p[1] * wi, kap * p[2] * wi];
        let mut out = [0.0; 35];
        for r in 0..5 {
            out[r] = row[r] * (a - f);
            out[5 + r] = row[r].abs() * f.abs();
        }
        if with_jacobian {
            let cols = [a, -wi * up * a, -wi * d[0] * e, -wi * d[1] * e, -wi * d[2] * e];
            for r in 0..5 {
                for c in 0..5 {
                    out[10 + 5 * r + c] = row[r] * cols[c];
                }
            }
        }
        out
    });
    let mut ev = Eval {
        resid: [0.0; 5],
        scale: [0.0; 5],
        jac: [[0.0; 5]; 5],
    };
    for r in 0..5 {
        ev.resid[r] = s[r];
        ev.scale[r] = s[5 + r];
        for c in 0..5 {
            ev.jac[r][c] = s[10 + 5 * r + c];
        }
    }
    ev
}

fn scaled_norm(ev: &Eval) -> f64 {
    (0..5)
        .map(|r| {
            if ev.scale[r] > 0.0 {
                (ev.resid[r] / ev.scale[r]).abs()
            } else {
                ev.resid[r].abs()
            }
        })
        .fold(0.0, f64::max)
}

pub(crate) fn kappa_for(grid: &PhaseGrid, u: &FourVector, weights: ConservationWeights) -> Vec<f64> {
    let m = &grid.momentum;
    let k = &grid.constants;
    (0..grid.n_momentum())
        .map(|j| {
            let rate = u.dot_momentum(m.p0[j], &m.nodes[j]) / m.p0[j];
            match weights {
                ConservationWeights::Model => rate,
                ConservationWeights::Exponential { dt } => -(-rate / (k.c * k.tau) * dt).exp_m1(),
            }
        })
        .collect()
}

fn discrete_exact(
    grid: &PhaseGrid,
    values: &[f64],
    st: &EckartState,
    weights: ConservationWeights,
    seed: Option<&AttractorParams>,
    cell: usize,
) -> Result<(AttractorParams, Vec<f64>)> {
    let k = grid.constants;
    let fail = |reason: String| Error::Attractor { cell, reason };
    let mut x = match seed {
        Some(s) => [s.ln_amplitude, s.beta, s.w[1], s.w[2], s.w[3]],
        None => {
            let th = thermodynamics_for(grid).map_err(|e| fail(e.to_string()))?;
            let t = th.invert_temperature(st.e_over_n).map_err(|e| fail(e.to_string()))?;
            let la = th.ln_amplitude(st.n, t).map_err(|e| fail(e.to_string()))?;
            [la, 1.0 / (k.k_b * t), 0.0, 0.0, 0.0]
        }
    };
    let u = st.u;
    let kappa = kappa_for(grid, &u, weights);

    let mut ev = evaluate(grid, values, &u, &kappa, &x, true);
    let mut res = scaled_norm(&ev);
    let mut iterations = 0;
    while res > NEWTON_TARGET && iterations < MAX_NEWTON {
        iterations += 1;
        let jac = Matrix5::from_fn(|r, c| ev.jac[r][c]);
        let rhs = Vector5::from_fn(|r, _| -ev.resid[r]);
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or_else(|| fail("singular conservation Jacobian; grid too coarse?".into()))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let trial: [f64; 5] = std::array::from_fn(|i| x[i] + t * step[i]);
            let tev = evaluate(grid, values, &u, &kappa, &trial, true);
            let tres = scaled_norm(&tev);
            if tres.is_finite() && tres < res {
                x = trial;
                ev = tev;
                res = tres;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if !(res <= NEWTON_ACCEPT) {
        return Err(fail(format!(
            "conservation residual {res:e} after {iterations} Newton steps"
        )));
    }
    let ratio = [u.0[1] / u.0[0], u.0[2] / u.0[0], u.0[3] / u.0[0]];
    let w0 = -(x[2] * ratio[0] + x[3] * ratio[1] + x[4] * ratio[2]);
    let params = AttractorParams {
        ln_amplitude: x[0],
        u,
        t: 1.0 / (k.k_b * x[1]),
        beta: x[1],
        w: [w0, x[2], x[3], x[4]],
        iterations,
        residual: res,
    };
    let values = sample_attractor_exact(grid, &params);
    Ok((params, values))
}

// Same arithmetic as `evaluate`, so a converged seed reproduces its field bit for bit.
fn sample_attractor_exact(grid: &PhaseGrid, params: &AttractorParams) -> Vec<f64> {
    let beta = params.beta;
    let m = &grid.momentum;
    let u = &params.u;
    let ratio = [u.0[1] / u.0[0], u.0[2] / u.0[0], u.0[3] / u.0[0]];
    let wt = [params.w[1], params.w[2], params.w[3]];
    let ne = grid.n_energy();
    let mut out = Vec::with_capacity(grid.cell_len());
    for j in 0..grid.n_momentum() {
        let p = &m.nodes[j];
        let p0 = m.p0[j];
        let up = u.dot_momentum(p0, p);
        let d = [p[0] - p0 * ratio[0], p[1] - p0 * ratio[1], p[2] - p0 * ratio[2]];
        let dot = wt[0] * d[0] + wt[1] * d[1] + wt[2] * d[2];
        for kk in 0..ne {
            let wi = grid.w_int[kk];
            let e = (params.ln_amplitude - beta * wi * up).exp();
            out.push((1.0 - wi * dot) * e);
        }
    }
    out
}

/// The five contracted conservation moments of (A - F) under `weights`,
/// scaled by the corresponding moments of |F|.
pub fn conservation_residuals(
    grid: &PhaseGrid,
    values: &[f64],
    attractor: &[f64],
    u: &FourVector,
    weights: ConservationWeights,
) -> [f64; 5] {
    let kappa = kappa_for(grid, u, weights);
    let m = &grid.momentum;
    let ne = grid.n_energy();
    let s: [f64; 10] = grid.sum(|j, kk| {
        let i = j * ne + kk;
        let p = &m.nodes[j];
        let wi = grid.w_int[kk];
        let kap = kappa[j];
        let row = [kap, kap * m.p0[j] * wi, kap * p[0] * wi, kap * p[1] * wi, kap * p[2] * wi];
        let d = attractor[i] - values[i];
        let mut out = [0.0; 10];
        for r in 0..5 {
            out[r] = row[r] * d;
            out[5 + r] = row[r].abs() * values[i].abs();
        }
        out
    });
    std::array::from_fn(|r| if s[5 + r] > 0.0 { s[r] / s[5 + r] } else { s[r] })
}
