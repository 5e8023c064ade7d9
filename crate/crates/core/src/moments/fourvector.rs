//! Minkowski four-vectors with metric diag(1, -1, -1, -1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Tensor4 = [[f64; 4]; 4];

pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Contravariant components (x^0, x^1, x^2, x^3).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FourVector(pub [f64; 4]);

impl FourVector {
    pub const ZERO: FourVector = FourVector([0.0; 4]);

    /// Four-velocity at rest, (c, 0, 0, 0).
    pub fn rest(c: f64) -> Self {
        FourVector([c, 0.0, 0.0, 0.0])
    }

    /// Four-velocity with spatial part u; U^0 = sqrt(c^2 + |u|^2).
    pub fn velocity(u: [f64; 3], c: f64) -> Self {
        let u0 = (c * c + (u[0] * u[0] + u[1] * u[1] + u[2] * u[2])).sqrt();
        FourVector([u0, u[0], u[1], u[2]])
    }

    #[inline]
    pub fn spatial(&self) -> [f64; 3] {
        [self.0[1], self.0[2], self.0[3]]
    }

    /// Index lowering; applying it twice returns the original components.
    #[inline]
    pub fn lower(&self) -> [f64; 4] {
        std::array::from_fn(|i| METRIC[i] * self.0[i])
    }

    /// Raises covariant components.
    #[inline]
    pub fn raise(w: [f64; 4]) -> Self {
        FourVector(std::array::from_fn(|i| METRIC[i] * w[i]))
    }

    #[inline]
    pub fn dot(&self, other: &FourVector) -> f64 {
        self.0[0] * other.0[0] - self.0[1] * other.0[1] - self.0[2] * other.0[2] - self.0[3] * other.0[3]
    }

    /// U_mu p^mu for a particle with energy component p0 and spatial momentum p.
    #[inline]
    pub fn dot_momentum(&self, p0: f64, p: &[f64; 3]) -> f64 {
        self.0[0] * p0 - (self.0[1] * p[0] + self.0[2] * p[1] + self.0[3] * p[2])
    }
}

/// Projection tensor h^{mu nu} = -g^{mu nu} + U^mu U^nu / c^2.
pub fn projector(u: &FourVector, c: f64) -> Tensor4 {
    std::array::from_fn(|m| {
        std::array::from_fn(|n| {
            let g = if m == n { METRIC[m] } else { 0.0 };
            -g + u.0[m] * u.0[n] / (c * c)
        })
    })
}

/// Lorentz transformation taking the timelike velocity U to (c, 0, 0, 0).
///
/// The spatial block uses U^i U^j / (c (U^0 + c)), which has no removable
/// singularity at U = 0, where the matrix is exactly the identity.
pub fn lorentz_boost_matrix(u: &FourVector, c: f64) -> Result<Tensor4> {
    let norm = u.dot(u);
    if !(u.0[0] > 0.0) || ((norm - c * c) / (c * c)).abs() > 1e-10 {
        return Err(Error::Domain(format!("U is not a normalized future velocity (U.U = {norm})")));
    }
    let mut l = [[0.0; 4]; 4];
    l[0][0] = u.0[0] / c;
    let den = c * (u.0[0] + c);
    for i in 1..4 {
        l[0][i] = -u.0[i] / c;
        l[i][0] = -u.0[i] / c;
        for j in 1..4 {
            l[i][j] = if i == j { 1.0 } else { 0.0 } + u.0[i] * u.0[j] / den;
        }
    }
    Ok(l)
}

pub fn apply(l: &Tensor4, v: &FourVector) -> FourVector {
    FourVector(std::array::from_fn(|i| (0..4).map(|j| l[i][j] * v.0[j]).sum()))
}

/// max |(L^T g L - g)_{ij}|.
pub fn metric_defect(l: &Tensor4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let s: f64 = (0..4).map(|k| l[k][i] * METRIC[k] * l[k][j]).sum();
            let g = if i == j { METRIC[i] } else { 0.0 };
            worst = worst.max((s - g).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_raise_round_trip() {
        let v = FourVector([1.5, -0.2, 0.3, 7.0]);
        assert_eq!(FourVector::raise(v.lower()), v);
    }

    #[test]
    fn velocity_is_normalized() {
        let u = FourVector::velocity([0.3, -0.4, 0.1], 1.0);
        assert!((u.dot(&u) - 1.0).abs() < 1e-15);
        assert_eq!(FourVector::velocity([0.0; 3], 2.0), FourVector::rest(2.0));
    }

    #[test]
    fn rest_boost_is_identity() {
        let l = lorentz_boost_matrix(&FourVector::rest(1.0), 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(l[i][j], if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn boost_along_x() {
        let u = FourVector::velocity([0.6, 0.0, 0.0], 1.0);
        let l = lorentz_boost_matrix(&u, 1.0).unwrap();
        let r = apply(&l, &u);
        assert!((r.0[0] - 1.0).abs() < 1e-14);
        for i in 1..4 {
            assert!(r.0[i].abs() < 1e-14);
        }
        assert!(metric_defect(&l) < 1e-14);
    }

    #[test]
    fn unnormalized_velocity_rejected() {
        assert!(lorentz_boost_matrix(&FourVector([1.0, 0.5, 0.0, 0.0]), 1.0).is_err());
    }
}
