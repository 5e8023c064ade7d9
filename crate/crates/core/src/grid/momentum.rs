//! Uniform Cartesian momentum grid with exact p -> -p symmetry.

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Node-centred midpoint grid on [-p_max, p_max]^3.
///
/// Nodes are stored in lexicographic order j = (i1 n + i2) n + i3, so the
/// mirror image of node j is node N - 1 - j.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub p_max: f64,
    pub n_per_axis: usize,
    pub dp: f64,
    pub axis: Vec<f64>,
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub p0: Vec<f64>,
    pub phat: Vec<[f64; 3]>,
}

impl MomentumGrid {
    pub fn new(p_max: f64, n_per_axis: usize, constants: &PhysicalConstants) -> Result<Self> {
        if !(p_max.is_finite() && p_max > 0.0) {
            return Err(Error::Config(format!("p_max must be positive, got {p_max}")));
        }
        if n_per_axis % 2 != 0 || n_per_axis < 8 {
            return Err(Error::Config(format!(
                "n_per_axis must be even and at least 8, got {n_per_axis}"
            )));
        }
        let n = n_per_axis;
        let half = n / 2;
        let dp = 2.0 * p_max / n as f64;
        // Both halves are built from the same |offset| so a[n-1-i] = -a[i] bit for bit.
        let axis: Vec<f64> = (0..n)
            .map(|i| {
                if i < half {
                    -(dp * ((half - 1 - i) as f64 + 0.5))
                } else {
                    dp * ((i - half) as f64 + 0.5)
                }
            })
            .collect();

        let mc = constants.mc();
        let c = constants.c;
        let total = n * n * n;
        let mut nodes = Vec::with_capacity(total);
        let mut p0 = Vec::with_capacity(total);
        let mut phat = Vec::with_capacity(total);
        for &x in &axis {
            for &y in &axis {
                for &z in &axis {
                    let q0 = (mc * mc + (x * x + y * y + z * z)).sqrt();
                    nodes.push([x, y, z]);
                    p0.push(q0);
                    phat.push([c * x / q0, c * y / q0, c * z / q0]);
                }
            }
        }
        let w = dp * dp * dp;
        Ok(Self {
            p_max,
            n_per_axis,
            dp,
            axis,
            nodes,
            weights: vec![w; total],
            p0,
            phat,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The index of -p_j.
    #[inline]
    pub fn mirror(&self, j: usize) -> usize {
        self.len() - 1 - j
    }

    /// Common cell volume (dp)^3.
    #[inline]
    pub fn cell_volume(&self) -> f64 {
        self.dp * self.dp * self.dp
    }

    /// Largest |phat^1| over the grid.
    pub fn max_speed_x(&self) -> f64 {
        self.phat.iter().map(|v| v[0].abs()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_and_symmetry() {
        let k = PhysicalConstants::default();
        let g = MomentumGrid::new(4.0, 8, &k).unwrap();
        let vol: f64 = g.weights.iter().sum();
        assert_eq!(vol, 512.0);
        for j in 0..g.len() {
            let m = g.mirror(j);
            for d in 0..3 {
                assert_eq!(g.nodes[m][d], -g.nodes[j][d]);
                assert_eq!(g.phat[m][d], -g.phat[j][d]);
            }
            assert_eq!(g.p0[m], g.p0[j]);
            assert_eq!(g.weights[m], g.weights[j]);
        }
    }

    #[test]
    fn speeds_below_light() {
        let k = PhysicalConstants { c: 2.0, ..Default::default() };
        let g = MomentumGrid::new(50.0, 10, &k).unwrap();
        for v in &g.phat {
            assert!((v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt() < k.c);
        }
        assert!(g.max_speed_x() < k.c);
    }

    #[test]
    fn rejects_odd_or_small() {
        let k = PhysicalConstants::default();
        assert!(MomentumGrid::new(1.0, 9, &k).is_err());
        assert!(MomentumGrid::new(1.0, 6, &k).is_err());
        assert!(MomentumGrid::new(0.0, 8, &k).is_err());
    }
}
