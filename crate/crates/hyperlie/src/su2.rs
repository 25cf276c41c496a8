//! Coordinate model of su(2): R^3 with the cross product as Lie bracket and
//! the dot product as invariant pairing, plus the cubic form `phi` and the
//! symmetric tensor `A` defined wherever `phi` is nonzero.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{HyperLieError, Result};

/// An su(2) element in a fixed positively-oriented orthonormal basis.
pub type Vec3 = Vector3<f64>;

/// Lie bracket: the cross product in coordinates, so [e1,e2] = e3 cyclically.
#[inline]
pub fn bracket(x: &Vec3, y: &Vec3) -> Vec3 {
    x.cross(y)
}

/// Invariant pairing (dot product under the positive-definite normalization).
#[inline]
pub fn inner(x: &Vec3, y: &Vec3) -> f64 {
    x.dot(y)
}

/// A point (a1, a2, a3) of su(2)^3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triple {
    pub a1: Vec3,
    pub a2: Vec3,
    pub a3: Vec3,
}

impl Triple {
    pub fn new(a1: Vec3, a2: Vec3, a3: Vec3) -> Self {
        Triple { a1, a2, a3 }
    }

    /// Flatten to the coordinate order (a1x, a1y, a1z, a2x, ..., a3z).
    pub fn to_array(&self) -> [f64; 9] {
        [
            self.a1.x, self.a1.y, self.a1.z, self.a2.x, self.a2.y, self.a2.z, self.a3.x,
            self.a3.y, self.a3.z,
        ]
    }

    pub fn from_array(v: &[f64; 9]) -> Self {
        Triple {
            a1: Vec3::new(v[0], v[1], v[2]),
            a2: Vec3::new(v[3], v[4], v[5]),
            a3: Vec3::new(v[6], v[7], v[8]),
        }
    }

    /// Largest component norm; the natural length scale of the configuration.
    pub fn scale(&self) -> f64 {
        self.a1.norm().max(self.a2.norm()).max(self.a3.norm())
    }

    pub fn norm(&self) -> f64 {
        (self.a1.norm_squared() + self.a2.norm_squared() + self.a3.norm_squared()).sqrt()
    }
}

impl std::ops::Add for Triple {
    type Output = Triple;
    fn add(self, o: Triple) -> Triple {
        Triple::new(self.a1 + o.a1, self.a2 + o.a2, self.a3 + o.a3)
    }
}

impl std::ops::Sub for Triple {
    type Output = Triple;
    fn sub(self, o: Triple) -> Triple {
        Triple::new(self.a1 - o.a1, self.a2 - o.a2, self.a3 - o.a3)
    }
}

impl std::ops::Mul<f64> for Triple {
    type Output = Triple;
    fn mul(self, c: f64) -> Triple {
        Triple::new(self.a1 * c, self.a2 * c, self.a3 * c)
    }
}

/// The cubic form `<a1, [a2, a3]>` (a scalar triple product).
pub fn phi(t: &Triple) -> f64 {
    inner(&t.a1, &bracket(&t.a2, &t.a3))
}

/// Dead-band under which a configuration counts as degenerate. Cubic in the
/// length scale because `phi` is.
pub fn eps_phi(scale: f64) -> f64 {
    1e-12 * scale.powi(3) + f64::MIN_POSITIVE
}

/// Sign bucket of `phi` with a dead-band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    Plus,
    Minus,
    Boundary,
}

pub fn region_classify(t: &Triple, eps: f64) -> Region {
    let p = phi(t);
    if p > eps {
        Region::Plus
    } else if p < -eps {
        Region::Minus
    } else {
        Region::Boundary
    }
}

/// A symmetric 3x3 tensor on su(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor {
    pub m: Matrix3<f64>,
}

/// The tensor `A = (1/phi) ([a1,a2]⊗[a1,a2] + [a2,a3]⊗[a2,a3] + [a3,a1]⊗[a3,a1])`,
/// defined wherever `phi` is nonzero.
pub fn a_tensor(t: &Triple) -> Result<SymTensor> {
    let p = phi(t);
    let eps = eps_phi(t.scale());
    if p.abs() < eps {
        return Err(HyperLieError::DegenerateConfiguration {
            phi_abs: p.abs(),
            eps,
        });
    }
    let c12 = bracket(&t.a1, &t.a2);
    let c23 = bracket(&t.a2, &t.a3);
    let c31 = bracket(&t.a3, &t.a1);
    let m = (c12 * c12.transpose() + c23 * c23.transpose() + c31 * c31.transpose()) / p;
    Ok(SymTensor { m })
}

/// Contraction `xi^T A eta`.
pub fn a_eval(t: &Triple, xi: &Vec3, eta: &Vec3) -> Result<f64> {
    Ok((xi.transpose() * a_tensor(t)?.m * eta)[(0, 0)])
}

/// Matrix of pairings `G_ij = <a_i, a_j>`; positive semidefinite, with
/// `det G = phi^2`.
pub fn gram(t: &Triple) -> Matrix3<f64> {
    let a = [&t.a1, &t.a2, &t.a3];
    Matrix3::from_fn(|i, j| inner(a[i], a[j]))
}
