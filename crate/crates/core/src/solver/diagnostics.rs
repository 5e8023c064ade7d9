//! Conserved totals, entropy and perturbation norms of a field.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::reduce::NeumaierN;
use crate::grid::DistributionField;
use crate::linear::LinearSetup;
use crate::moments::{compute_v_t, eckart_decompose};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// Sum over cells of V^0.
    pub v0_total: f64,
    /// Sum over cells of T^{0 nu}.
    pub t0nu_total: [f64; 4],
    /// -k_B sum F ln F over nodes with F > 0.
    pub entropy: f64,
    /// Sum of |F| over nodes with F < 0.
    pub negative_mass: f64,
    pub min_f: f64,
    /// L2 norm over x, p, I of f = (F - F_E^0) / sqrt(F_E^0).
    pub perturbation_norm: f64,
    /// L2 norm of (I - P) f.
    pub micro_norm: f64,
    /// L2 norm over x of the spatial Eckart heat flux.
    pub heat_flux_norm: f64,
}

pub const CSV_HEADER: &str =
    "t,V0_total,T00_total,T01_total,T02_total,T03_total,entropy,min_F,perturbation_norm,micro_norm";

impl DiagnosticsRecord {
    pub fn csv_row(&self) -> String {
        let cols = [
            self.t,
            self.v0_total,
            self.t0nu_total[0],
            self.t0nu_total[1],
            self.t0nu_total[2],
            self.t0nu_total[3],
            self.entropy,
            self.min_f,
            self.perturbation_norm,
            self.micro_norm,
        ];
        cols.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
    }

    /// Largest relative change of V^0 and T^{0 nu} totals against `base`.
    ///
    /// Components of T^{0i} are measured relative to T^{00}, since they may
    /// vanish.
    pub fn conservation_drift(&self, base: &DiagnosticsRecord) -> f64 {
        let mut d = ((self.v0_total - base.v0_total) / base.v0_total).abs();
        let e = base.t0nu_total[0].abs();
        for i in 0..4 {
            d = d.max(((self.t0nu_total[i] - base.t0nu_total[i]) / e).abs());
        }
        d
    }
}

pub fn write_csv<W: Write>(mut w: W, records: &[DiagnosticsRecord]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

struct CellDiag {
    sums: [f64; 10],
    min: f64,
}

/// Diagnoses `field` against the reference of `setup`.
pub fn diagnose(field: &DistributionField, setup: &LinearSetup, t: f64) -> Result<DiagnosticsRecord> {
    let grid = &field.grid;
    let k = grid.constants;
    let m = &grid.momentum;
    let ne = grid.n_energy();
    let per_cell = field.map_cells(|_, cell| -> Result<CellDiag> {
        let f = setup.perturbation(cell);
        let (pf, _) = setup.basis.project(grid, &f)?;
        let s: [f64; 9] = grid.sum(|j, kk| {
            let i = j * ne + kk;
            let v = cell[i];
            let w = grid.w_int[kk];
            let p = &m.nodes[j];
            let (ent, neg) = if v > 0.0 { (-v * v.ln(), 0.0) } else { (0.0, -v) };
            let micro = f[i] - pf[i];
            [v, m.p0[j] * w * v, p[0] * w * v, p[1] * w * v, p[2] * w * v, ent, neg, f[i] * f[i], micro * micro]
        });
        let q2 = eckart_decompose(&compute_v_t(grid, cell)?, k.mc(), k.c).map_or(f64::NAN, |st| {
            let q = st.q.spatial();
            q[0] * q[0] + q[1] * q[1] + q[2] * q[2]
        });
        let mut sums = [0.0; 10];
        sums[..9].copy_from_slice(&s);
        sums[9] = q2;
        Ok(CellDiag {
            sums,
            min: cell.iter().copied().fold(f64::INFINITY, f64::min),
        })
    });
    let mut acc = NeumaierN::<10>::default();
    let mut min_f = f64::INFINITY;
    for c in per_cell {
        let c = c?;
        acc.add(&c.sums);
        min_f = min_f.min(c.min);
    }
    let s = acc.value();
    let dx = field.mesh.dx();
    Ok(DiagnosticsRecord {
        t,
        v0_total: k.mc() * s[0],
        t0nu_total: [k.c * s[1], k.c * s[2], k.c * s[3], k.c * s[4]],
        entropy: k.k_b * s[5],
        negative_mass: s[6],
        min_f,
        perturbation_norm: (dx * s[7]).sqrt(),
        micro_norm: (dx * s[8]).sqrt(),
        heat_flux_norm: (dx * s[9]).sqrt(),
    })
}
