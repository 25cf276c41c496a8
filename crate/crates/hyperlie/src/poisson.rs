//! The three compatible Poisson bivectors on the open set where `phi` is
//! nonzero, as point-dependent antisymmetric 9x9 matrices; the five Casimir
//! functions; a finite-difference Jacobi verifier; and the check that
//! projection onto the first two components is a Poisson map onto the
//! Lie-Poisson structure of su(2) complexified.

use nalgebra::{Matrix3, SMatrix};

use crate::error::{HyperLieError, Result};
use crate::su2::{a_tensor, bracket, eps_phi, inner, phi, Triple, Vec3};

pub type Mat9 = SMatrix<f64, 9, 9>;
pub type Mat6 = SMatrix<f64, 6, 6>;

/// A Poisson bivector at a point, in coordinates (a1x, a1y, a1z, ..., a3z).
#[derive(Debug, Clone)]
pub struct BivectorMatrix {
    pub at: Triple,
    pub m: Mat9,
}

/// Antisymmetric matrix L(v)[α,β] = <v, [e_α, e_β]>, the building block of
/// every linear bracket rule.
fn lin_block(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(
        0.0, v.z, -v.y, //
        -v.z, 0.0, v.x, //
        v.y, -v.x, 0.0,
    )
}

fn set_block(m: &mut Mat9, bi: usize, bj: usize, b: &Matrix3<f64>) {
    for r in 0..3 {
        for c in 0..3 {
            m[(3 * bi + r, 3 * bj + c)] = b[(r, c)];
        }
    }
}

/// The first bivector assembled from the six bracket rules:
/// diagonal blocks L(a1), -L(a1), -L(a1); symmetric off-diagonal pair
/// blocks L(a2) (slots 1,2) and L(a3) (slots 1,3); and the tensor A with a
/// sign in the (2,3)/(3,2) blocks.
fn pi1_matrix(t: &Triple) -> Result<Mat9> {
    let a = a_tensor(t)?.m;
    let l1 = lin_block(&t.a1);
    let l2 = lin_block(&t.a2);
    let l3 = lin_block(&t.a3);
    let mut m = Mat9::zeros();
    set_block(&mut m, 0, 0, &l1);
    set_block(&mut m, 0, 1, &l2);
    set_block(&mut m, 1, 0, &l2);
    set_block(&mut m, 0, 2, &l3);
    set_block(&mut m, 2, 0, &l3);
    set_block(&mut m, 1, 1, &(-l1));
    set_block(&mut m, 2, 2, &(-l1));
    set_block(&mut m, 1, 2, &a);
    set_block(&mut m, 2, 1, &(-a));
    Ok(m)
}

/// 9x9 matrix of the cyclic shift (a1,a2,a3) -> (a3,a1,a2).
fn cyclic_shift_matrix() -> Mat9 {
    let mut s = Mat9::zeros();
    let id = Matrix3::identity();
    set_block(&mut s, 0, 2, &id);
    set_block(&mut s, 1, 0, &id);
    set_block(&mut s, 2, 1, &id);
    s
}

/// Apply the cyclic shift to a point.
fn cyclic_shift(t: &Triple) -> Triple {
    Triple::new(t.a3, t.a1, t.a2)
}

fn cyclic_unshift(t: &Triple) -> Triple {
    Triple::new(t.a2, t.a3, t.a1)
}

/// The k-th bivector (k = 1, 2, 3). The second and third are pushforwards of
/// the first under one and two cyclic shifts: (S_* m)(y) = S m(S^{-1} y) S^T.
pub fn pi_matrix(k: usize, t: &Triple) -> Result<BivectorMatrix> {
    let s = cyclic_shift_matrix();
    let m = match k {
        1 => pi1_matrix(t)?,
        2 => s * pi1_matrix(&cyclic_unshift(t))? * s.transpose(),
        3 => {
            let s2 = s * s;
            s2 * pi1_matrix(&cyclic_shift(t))? * s2.transpose()
        }
        _ => {
            return Err(HyperLieError::InvalidArgument(format!(
                "bivector index must be 1, 2 or 3, got {k}"
            )))
        }
    };
    Ok(BivectorMatrix { at: *t, m })
}

/// Pushforward of a bivector matrix field under a constant linear map.
pub fn pushforward(field: impl Fn(&Triple) -> Result<Mat9>, s: &Mat9, at: &Triple) -> Result<Mat9> {
    // s is orthogonal in every use here (block permutations), so the inverse
    // is the transpose.
    let pre = Triple::from_array(
        &(s.transpose() * SMatrix::<f64, 9, 1>::from_column_slice(&at.to_array()))
            .as_slice()
            .try_into()
            .unwrap(),
    );
    Ok(s * field(&pre)? * s.transpose())
}

/// Max over coordinate triples (i,j,k) of the finite-difference Schouten
/// expression |Σ_l (Π^{li}∂_lΠ^{jk} + Π^{lj}∂_lΠ^{ki} + Π^{lk}∂_lΠ^{ij})|,
/// with central differences of step `h`. Near zero certifies the Jacobi
/// identity at `t`.
pub fn jacobi_residual(k: usize, t: &Triple, h: f64) -> Result<f64> {
    if h <= 0.0 {
        return Err(HyperLieError::InvalidArgument("h must be positive".into()));
    }
    let m = pi_matrix(k, t)?.m;
    let x = t.to_array();
    let mut d = [Mat9::zeros(); 9]; // d[l] = ∂_l Π
    for l in 0..9 {
        let mut xp = x;
        let mut xm = x;
        xp[l] += h;
        xm[l] -= h;
        let mp = pi_matrix(k, &Triple::from_array(&xp))?.m;
        let mm = pi_matrix(k, &Triple::from_array(&xm))?.m;
        d[l] = (mp - mm) / (2.0 * h);
    }
    let mut worst: f64 = 0.0;
    for i in 0..9 {
        for j in (i + 1)..9 {
            for kk in (j + 1)..9 {
                let mut s = 0.0;
                for l in 0..9 {
                    s += m[(l, i)] * d[l][(j, kk)]
                        + m[(l, j)] * d[l][(kk, i)]
                        + m[(l, kk)] * d[l][(i, j)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// Values of the five Casimir functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirVector {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub f4: f64,
    pub f5: f64,
}

impl CasimirVector {
    pub fn to_array(&self) -> [f64; 5] {
        [self.f1, self.f2, self.f3, self.f4, self.f5]
    }
}

pub fn casimirs(t: &Triple) -> CasimirVector {
    CasimirVector {
        f1: inner(&t.a1, &t.a2),
        f2: inner(&t.a2, &t.a3),
        f3: inner(&t.a3, &t.a1),
        f4: inner(&t.a1, &t.a1) - inner(&t.a2, &t.a2),
        f5: inner(&t.a2, &t.a2) - inner(&t.a3, &t.a3),
    }
}

/// Analytic coordinate gradients of the five Casimirs at `t`.
pub fn casimir_gradients(t: &Triple) -> [[f64; 9]; 5] {
    let z = Vec3::zeros();
    let g = [
        Triple::new(t.a2, t.a1, z),
        Triple::new(z, t.a3, t.a2),
        Triple::new(t.a3, z, t.a1),
        Triple::new(2.0 * t.a1, -2.0 * t.a2, z),
        Triple::new(z, 2.0 * t.a2, -2.0 * t.a3),
    ];
    [
        g[0].to_array(),
        g[1].to_array(),
        g[2].to_array(),
        g[3].to_array(),
        g[4].to_array(),
    ]
}

/// The four frame fields spanning the common rank-4 distribution, each an
/// element of su(2)^3 read as a tangent vector.
pub fn distribution_frame(t: &Triple) -> Result<[Triple; 4]> {
    let p = phi(t);
    let eps = eps_phi(t.scale());
    if p.abs() < eps {
        return Err(HyperLieError::DegenerateConfiguration {
            phi_abs: p.abs(),
            eps,
        });
    }
    let z = Vec3::zeros();
    Ok([
        Triple::new(
            bracket(&t.a2, &t.a3),
            bracket(&t.a3, &t.a1),
            bracket(&t.a1, &t.a2),
        ),
        Triple::new(z, bracket(&t.a2, &t.a1), bracket(&t.a3, &t.a1)),
        Triple::new(bracket(&t.a1, &t.a2), z, bracket(&t.a3, &t.a2)),
        Triple::new(bracket(&t.a1, &t.a3), bracket(&t.a2, &t.a3), z),
    ])
}

/// Rank of a 9x9 matrix by singular-value count.
pub fn rank(m: &Mat9, rel_tol: f64) -> usize {
    let sv = m.singular_values();
    let top = sv.max();
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// The 6x6 Lie-Poisson matrix of su(2) complexified at z = x + i y, in
/// coordinates (x1,x2,x3,y1,y2,y3).
pub fn lie_bivector6(x: &Vec3, y: &Vec3) -> Mat6 {
    let lx = lin_block(x);
    let ly = lin_block(y);
    let mut m = Mat6::zeros();
    for r in 0..3 {
        for c in 0..3 {
            m[(r, c)] = lx[(r, c)];
            m[(r, c + 3)] = ly[(r, c)];
            m[(r + 3, c)] = ly[(r, c)];
            m[(r + 3, c + 3)] = -lx[(r, c)];
        }
    }
    m
}

/// Finite-difference Jacobi residual of the 6x6 Lie-Poisson matrix (the
/// linear part alone); exactly zero up to rounding since the brackets are
/// linear in the point.
pub fn lie_jacobi_residual(x: &Vec3, y: &Vec3, h: f64) -> f64 {
    let m = lie_bivector6(x, y);
    let coords = [x.x, x.y, x.z, y.x, y.y, y.z];
    let mut d = [Mat6::zeros(); 6];
    for l in 0..6 {
        let mut cp = coords;
        let mut cm = coords;
        cp[l] += h;
        cm[l] -= h;
        let mp = lie_bivector6(
            &Vec3::new(cp[0], cp[1], cp[2]),
            &Vec3::new(cp[3], cp[4], cp[5]),
        );
        let mm = lie_bivector6(
            &Vec3::new(cm[0], cm[1], cm[2]),
            &Vec3::new(cm[3], cm[4], cm[5]),
        );
        d[l] = (mp - mm) / (2.0 * h);
    }
    let mut worst: f64 = 0.0;
    for i in 0..6 {
        for j in (i + 1)..6 {
            for k in (j + 1)..6 {
                let mut s = 0.0;
                for l in 0..6 {
                    s += m[(l, i)] * d[l][(j, k)]
                        + m[(l, j)] * d[l][(k, i)]
                        + m[(l, k)] * d[l][(i, j)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// Deviation of the projection (a1,a2,a3) -> a1 + i a2 from being a Poisson
/// map: ‖J Π J^T − Π_Lie(a1, a2)‖ with J the constant 6x9 projection. The
/// A-blocks cancel exactly, so this is zero up to rounding.
pub fn pr12_pushforward_check(t: &Triple) -> Result<f64> {
    let m = pi_matrix(1, t)?.m;
    let lie = lie_bivector6(&t.a1, &t.a2);
    let mut diff: f64 = 0.0;
    for r in 0..6 {
        for c in 0..6 {
            diff += (m[(r, c)] - lie[(r, c)]).powi(2);
        }
    }
    Ok(diff.sqrt())
}
