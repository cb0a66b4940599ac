use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{PinqError, Result};

/// Rotation by `theta` in the plane of Majorana coordinates `(p, q)`, `p < q`:
/// `G[p][p] = G[q][q] = cos`, `G[p][q] = -sin`, `G[q][p] = sin`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GivensRotation {
    pub p: usize,
    pub q: usize,
    pub theta: f64,
}

impl GivensRotation {
    pub fn new(p: usize, q: usize, theta: f64) -> Self {
        if p < q {
            GivensRotation { p, q, theta }
        } else {
            GivensRotation {
                p: q,
                q: p,
                theta: -theta,
            }
        }
    }

    pub fn matrix(&self, dim: usize) -> DMatrix<f64> {
        let mut g = DMatrix::identity(dim, dim);
        let (s, c) = self.theta.sin_cos();
        g[(self.p, self.p)] = c;
        g[(self.q, self.q)] = c;
        g[(self.p, self.q)] = -s;
        g[(self.q, self.p)] = s;
        g
    }

    /// Modes touched; at most two.
    pub fn modes(&self) -> (usize, usize) {
        (self.p / 2, self.q / 2)
    }

    /// `gamma -> G gamma G^T` in place.
    pub fn conjugate(&self, gamma: &mut DMatrix<f64>) {
        let (s, c) = self.theta.sin_cos();
        let (p, q) = (self.p, self.q);
        let d = gamma.nrows();
        for k in 0..d {
            let (a, b) = (gamma[(p, k)], gamma[(q, k)]);
            gamma[(p, k)] = c * a - s * b;
            gamma[(q, k)] = s * a + c * b;
        }
        for k in 0..d {
            let (a, b) = (gamma[(k, p)], gamma[(k, q)]);
            gamma[(k, p)] = c * a - s * b;
            gamma[(k, q)] = s * a + c * b;
        }
    }
}

/// Factors `O` in `SO(d)` into plane rotations returned in application
/// order, so `O = g_m ... g_2 g_1`. At most `d(d-1)/2` factors; zero angles
/// are dropped.
pub fn givens_decompose(o: &DMatrix<f64>) -> Result<Vec<GivensRotation>> {
    let d = o.nrows();
    if o.ncols() != d {
        return Err(PinqError::Dimension(format!(
            "expected a square matrix, got {}x{}",
            d,
            o.ncols()
        )));
    }
    let orth = (o.transpose() * o - DMatrix::identity(d, d)).amax();
    if orth > 1e-8 {
        return Err(PinqError::Precondition(format!(
            "matrix is not orthogonal (defect {orth:.3e})"
        )));
    }
    if o.determinant() < 0.0 {
        return Err(PinqError::Precondition("matrix has determinant -1".into()));
    }
    let mut a = o.clone();
    // eliminating rotations G_k ... G_1 O = I, so O = G_1^T ... G_k^T
    let mut eliminating: Vec<GivensRotation> = Vec::new();
    for j in 0..d.saturating_sub(1) {
        for i in (j + 1..d).rev() {
            let theta = a[(i, j)].atan2(a[(j, j)]);
            if theta == 0.0 {
                continue;
            }
            // rotating row i into row j by -theta zeroes a[i][j] and leaves a[j][j] >= 0
            let g = GivensRotation {
                p: j,
                q: i,
                theta: -theta,
            };
            let (s, c) = g.theta.sin_cos();
            for k in 0..d {
                let (x, y) = (a[(j, k)], a[(i, k)]);
                a[(j, k)] = c * x - s * y;
                a[(i, k)] = s * x + c * y;
            }
            a[(i, j)] = 0.0;
            eliminating.push(g);
        }
    }
    Ok(eliminating
        .into_iter()
        .rev()
        .map(|g| GivensRotation {
            theta: -g.theta,
            ..g
        })
        .collect())
}

/// `g_m ... g_1` as a dense matrix.
pub fn givens_product(rotations: &[GivensRotation], dim: usize) -> DMatrix<f64> {
    let mut o = DMatrix::identity(dim, dim);
    for g in rotations {
        o = g.matrix(dim) * o;
    }
    o
}

/// `max |theta| / ||O - I||_2`; the constant relating angles to the distance
/// from the identity. Zero for the identity.
pub fn near_identity_ratio(o: &DMatrix<f64>, rotations: &[GivensRotation]) -> f64 {
    let d = o.nrows();
    let dist = (o - DMatrix::identity(d, d)).singular_values().max();
    if dist == 0.0 {
        return 0.0;
    }
    rotations.iter().fold(0.0f64, |m, g| m.max(g.theta.abs())) / dist
}
