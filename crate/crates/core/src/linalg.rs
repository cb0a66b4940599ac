//! Dense helpers shared across modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CVec = Vec<Complex64>;

pub fn is_real(m: &DMatrix<Complex64>) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Largest entry of `|M - M^dagger|`.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Real symmetric form used for diagonalization: `A` itself when `M` is real,
/// otherwise the embedding `[[A, -B], [B, A]]` of `M = A + iB`, whose spectrum
/// is that of `M` with every eigenvalue doubled.
fn real_form(m: &DMatrix<Complex64>) -> (DMatrix<f64>, bool) {
    let n = m.nrows();
    if is_real(m) {
        return (m.map(|z| z.re), false);
    }
    let mut r = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            r[(i, j)] = z.re;
            r[(i + n, j + n)] = z.re;
            r[(i, j + n)] = -z.im;
            r[(i + n, j)] = z.im;
        }
    }
    (r, true)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (r, doubled) = real_form(m);
    let mut ev: Vec<f64> = r.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    if doubled {
        ev.into_iter().step_by(2).collect()
    } else {
        ev
    }
}

/// Smallest eigenvalue and a normalized eigenvector.
pub fn hermitian_min(m: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let n = m.nrows();
    let (r, doubled) = real_form(m);
    let eig = SymmetricEigen::new(r);
    let (idx, val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, v)| (i, *v))
        .expect("non-empty matrix");
    let col = eig.eigenvectors.column(idx);
    let v = if doubled {
        DVector::from_fn(n, |i, _| Complex64::new(col[i], col[i + n]))
    } else {
        DVector::from_fn(n, |i, _| Complex64::new(col[i], 0.0))
    };
    let norm = v.norm();
    (val, v / Complex64::new(norm, 0.0))
}

/// `exp(-i t H)` by scaling-and-squaring Padé approximation.
pub fn propagator(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    (h * Complex64::new(0.0, -t)).exp()
}

pub fn mat_vec(m: &DMatrix<Complex64>, v: &[Complex64]) -> CVec {
    let n = m.nrows();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (r, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, vc) in v.iter().enumerate() {
            acc += m[(r, c)] * vc;
        }
        *o = acc;
    }
    out
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn normalize(v: &mut [Complex64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

/// Computational basis state `|index>` of dimension `dim`.
pub fn basis_state(dim: usize, index: usize) -> CVec {
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    v[index] = Complex64::new(1.0, 0.0);
    v
}
