//! Reference equilibrium, the five-vector basis of the collision invariants,
//! and the orthogonal projection onto their span.

use nalgebra::{Matrix5, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::moments::equilibrium::{reference_equilibrium, thermodynamics_for, JuttnerParams};
use crate::moments::AttractorParams;

/// The global equilibrium F_E^0 (n = 1, U at rest, T = T0) and its scalars.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub t0: f64,
    pub params: JuttnerParams,
    pub f0: Vec<f64>,
    pub sqrt_f0: Vec<f64>,
    pub b0: f64,
    pub etilde0: f64,
    pub etilde_prime0: f64,
}

impl Reference {
    pub fn new(grid: &PhaseGrid, t0: f64) -> Result<Self> {
        let (params, f0) = reference_equilibrium(grid, t0)?;
        if f0.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::NonFinite(format!(
                "reference equilibrium at T0 = {t0} underflows on this grid"
            )));
        }
        let th = thermodynamics_for(grid)?;
        Ok(Self {
            t0,
            params,
            sqrt_f0: f0.iter().map(|x| x.sqrt()).collect(),
            f0,
            b0: th.b_coefficient(1.0, t0)?,
            etilde0: th.etilde(t0)?,
            etilde_prime0: th.etilde_prime(t0)?,
        })
    }

    /// Attractor parameters of F_E^0, used to seed Newton near equilibrium.
    pub fn attractor_seed(&self, k_b: f64) -> AttractorParams {
        AttractorParams::from_juttner(&self.params, k_b)
    }
}

/// Coefficients of P(f) = {a + b.W p + c (c p0 W - etilde0)} sqrt(F_E^0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroCoefficients {
    pub a: f64,
    pub b: [f64; 3],
    pub c: f64,
}

/// Raw basis e_1..e_5 and its discretely orthonormalized counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub raw: [Vec<f64>; 5],
    pub e: [Vec<f64>; 5],
    /// L^{-1} where L L^T is the discrete Gram matrix of `raw`.
    pub correction: [[f64; 5]; 5],
    pub raw_gram: [[f64; 5]; 5],
    /// Raw normalization constants: raw_i = norm_i * (test function_i) sqrt(F_E^0).
    pub norms: [f64; 5],
}

/// Discrete inner product sum f g phi dI dp over one cell.
pub fn inner(grid: &PhaseGrid, f: &[f64], g: &[f64]) -> f64 {
    let ne = grid.n_energy();
    grid.sum(|j, k| [f[j * ne + k] * g[j * ne + k]])[0]
}

fn gram(grid: &PhaseGrid, v: &[Vec<f64>; 5]) -> [[f64; 5]; 5] {
    let ne = grid.n_energy();
    let s: [f64; 15] = grid.sum(|j, k| {
        let i = j * ne + k;
        let mut out = [0.0; 15];
        let mut idx = 0;
        for a in 0..5 {
            for b in a..5 {
                out[idx] = v[a][i] * v[b][i];
                idx += 1;
            }
        }
        out
    });
    let mut g = [[0.0; 5]; 5];
    let mut idx = 0;
    for a in 0..5 {
        for b in a..5 {
            g[a][b] = s[idx];
            g[b][a] = s[idx];
            idx += 1;
        }
    }
    g
}

fn max_dev(g: &[[f64; 5]; 5]) -> f64 {
    let mut m = 0.0f64;
    for (a, row) in g.iter().enumerate() {
        for (b, &x) in row.iter().enumerate() {
            let want = if a == b { 1.0 } else { 0.0 };
            m = m.max((x - want).abs());
        }
    }
    m
}

impl BasisSet {
    pub fn new(grid: &PhaseGrid, reference: &Reference) -> Result<Self> {
        let k = &grid.constants;
        let m = &grid.momentum;
        let ne = grid.n_energy();
        let n = grid.cell_len();
        let norms = [
            1.0,
            (1.0 / (reference.b0 * k.m)).sqrt(),
            (1.0 / (reference.b0 * k.m)).sqrt(),
            (1.0 / (reference.b0 * k.m)).sqrt(),
            (1.0 / (k.k_b * reference.t0 * reference.t0 * reference.etilde_prime0)).sqrt(),
        ];
        let mut raw: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
        for j in 0..grid.n_momentum() {
            let p = &m.nodes[j];
            for kk in 0..ne {
                let i = j * ne + kk;
                let w = grid.w_int[kk];
                let s = reference.sqrt_f0[i];
                raw[0][i] = norms[0] * s;
                for d in 0..3 {
                    raw[1 + d][i] = norms[1 + d] * w * p[d] * s;
                }
                raw[4][i] = norms[4] * (k.c * m.p0[j] * w - reference.etilde0) * s;
            }
        }
        let raw_gram = gram(grid, &raw);
        let chol = Matrix5::from_fn(|a, b| raw_gram[a][b])
            .cholesky()
            .ok_or_else(|| Error::Singular("Gram matrix of the invariant basis is not positive definite".into()))?;
        let linv = chol
            .l()
            .try_inverse()
            .ok_or_else(|| Error::Singular("Cholesky factor of the Gram matrix".into()))?;
        let correction: [[f64; 5]; 5] = std::array::from_fn(|a| std::array::from_fn(|b| linv[(a, b)]));
        let mut e: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);
        for (a, ea) in e.iter_mut().enumerate() {
            for (i, v) in ea.iter_mut().enumerate() {
                let mut acc = 0.0;
                for b in 0..=a {
                    acc += correction[a][b] * raw[b][i];
                }
                *v = acc;
            }
        }
        Ok(Self {
            raw,
            e,
            correction,
            raw_gram,
            norms,
        })
    }

    /// max |<e_i, e_j> - delta_ij| of the uncorrected basis.
    pub fn raw_gram_deviation(&self) -> f64 {
        max_dev(&self.raw_gram)
    }

    /// max |<e_i, e_j> - delta_ij| of the corrected basis, recomputed.
    pub fn gram_deviation(&self, grid: &PhaseGrid) -> f64 {
        max_dev(&gram(grid, &self.e))
    }

    /// Coefficients <f, e_i> in the corrected basis.
    pub fn coefficients(&self, grid: &PhaseGrid, f: &[f64]) -> [f64; 5] {
        let ne = grid.n_energy();
        let e = &self.e;
        grid.sum(|j, k| {
            let i = j * ne + k;
            let v = f[i];
            [v * e[0][i], v * e[1][i], v * e[2][i], v * e[3][i], v * e[4][i]]
        })
    }

    pub fn combine(&self, coeffs: &[f64; 5]) -> Vec<f64> {
        let n = self.e[0].len();
        let e = &self.e;
        (0..n)
            .map(|i| coeffs[0] * e[0][i] + coeffs[1] * e[1][i] + coeffs[2] * e[2][i] + coeffs[3] * e[3][i] + coeffs[4] * e[4][i])
            .collect()
    }

    /// P(f) and the macroscopic coefficients (a, b, c).
    pub fn project(&self, grid: &PhaseGrid, f: &[f64]) -> Result<(Vec<f64>, MacroCoefficients)> {
        if f.len() != grid.cell_len() {
            return Err(Error::Shape(format!(
                "perturbation has {} values, basis expects {}",
                f.len(),
                grid.cell_len()
            )));
        }
        let alpha = self.coefficients(grid, f);
        Ok((self.combine(&alpha), self.macro_coefficients(&alpha)))
    }

    /// Converts corrected-basis coefficients into (a, b, c).
    pub fn macro_coefficients(&self, alpha: &[f64; 5]) -> MacroCoefficients {
        let l = SMatrix::<f64, 5, 5>::from_fn(|a, b| self.correction[a][b]);
        let beta = l.transpose() * nalgebra::Vector5::from_column_slice(alpha);
        MacroCoefficients {
            a: beta[0] * self.norms[0],
            b: [beta[1] * self.norms[1], beta[2] * self.norms[2], beta[3] * self.norms[3]],
            c: beta[4] * self.norms[4],
        }
    }

    /// Evaluates {a + b.W p + c (c p0 W - etilde0)} sqrt(F_E^0).
    pub fn reconstruct(&self, grid: &PhaseGrid, reference: &Reference, mc: &MacroCoefficients) -> Vec<f64> {
        let m = &grid.momentum;
        let ne = grid.n_energy();
        let c = grid.constants.c;
        let mut out = Vec::with_capacity(grid.cell_len());
        for j in 0..grid.n_momentum() {
            let p = &m.nodes[j];
            for kk in 0..ne {
                let w = grid.w_int[kk];
                let poly = mc.a
                    + w * (mc.b[0] * p[0] + mc.b[1] * p[1] + mc.b[2] * p[2])
                    + mc.c * (c * m.p0[j] * w - reference.etilde0);
                out.push(poly * reference.sqrt_f0[j * ne + kk]);
            }
        }
        out
    }

    /// L(f) = P(f) - f.
    pub fn linearized(&self, grid: &PhaseGrid, f: &[f64]) -> Result<Vec<f64>> {
        let (pf, _) = self.project(grid, f)?;
        Ok(pf.iter().zip(f).map(|(p, x)| p - x).collect())
    }
}

/// Projection context bundling grid, reference and basis.
#[derive(Debug, Clone)]
pub struct LinearSetup {
    pub grid: std::sync::Arc<PhaseGrid>,
    pub reference: Reference,
    pub basis: BasisSet,
}

impl LinearSetup {
    pub fn new(grid: std::sync::Arc<PhaseGrid>, t0: f64) -> Result<Self> {
        let reference = Reference::new(&grid, t0)?;
        let basis = BasisSet::new(&grid, &reference)?;
        Ok(Self { grid, reference, basis })
    }

    /// f = (F - F_E^0) / sqrt(F_E^0) for one cell.
    ///
    /// Each entry is nudged by at most a few ulps so that
    /// F_E^0 + f sqrt(F_E^0) reproduces F exactly.
    pub fn perturbation(&self, cell: &[f64]) -> Vec<f64> {
        let r = &self.reference;
        cell.iter()
            .zip(&r.f0)
            .zip(&r.sqrt_f0)
            .map(|((&big, &f0), &s)| {
                let mut f = (big - f0) / s;
                for _ in 0..8 {
                    let back = f0 + f * s;
                    if back == big {
                        break;
                    }
                    f = if back < big {
                        libm::nextafter(f, f64::INFINITY)
                    } else {
                        libm::nextafter(f, f64::NEG_INFINITY)
                    };
                }
                f
            })
            .collect()
    }

    /// F = F_E^0 + f sqrt(F_E^0) for one cell.
    pub fn distribution(&self, f: &[f64]) -> Vec<f64> {
        let r = &self.reference;
        f.iter().zip(&r.f0).zip(&r.sqrt_f0).map(|((&f, &f0), &s)| f0 + f * s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
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

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn corrected_basis_is_orthonormal() {
        let s = setup();
        assert!(s.basis.gram_deviation(&s.grid) <= 1e-13);
    }

    #[test]
    fn projection_is_idempotent_and_fixes_basis() {
        let s = setup();
        let f = random(s.grid.cell_len(), 1);
        let (pf, _) = s.basis.project(&s.grid, &f).unwrap();
        let (ppf, _) = s.basis.project(&s.grid, &pf).unwrap();
        let scale = pf.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(pf.iter().zip(&ppf).all(|(a, b)| (a - b).abs() <= 1e-13 * scale));
        for e in &s.basis.e {
            let l = s.basis.linearized(&s.grid, e).unwrap();
            assert!(l.iter().all(|x| x.abs() < 1e-13));
        }
    }

    #[test]
    fn macro_coefficients_reconstruct_projection() {
        let s = setup();
        let f = random(s.grid.cell_len(), 2);
        let (pf, mc) = s.basis.project(&s.grid, &f).unwrap();
        let back = s.basis.reconstruct(&s.grid, &s.reference, &mc);
        let scale = pf.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!(pf.iter().zip(&back).all(|(a, b)| (a - b).abs() <= 1e-13 * scale));
    }

    #[test]
    fn perturbation_round_trip_is_exact() {
        let s = setup();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let big: Vec<f64> = s.reference.f0.iter().map(|&x| x * (1.0 + 0.2 * rng.random_range(-1.0..1.0))).collect();
        let f = s.perturbation(&big);
        assert_eq!(s.distribution(&f), big);
    }
}
