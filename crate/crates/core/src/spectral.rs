//! Ground energies on full and pinned spaces.
//!
//! The dense path (nalgebra symmetric eigensolver) is the reference; the
//! iterative path is a restarted Lanczos iteration with full
//! reorthogonalization and a seeded start vector.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PinqError, Result};
use crate::linalg::{hermitian_min, hermiticity_defect, inner, norm};
use crate::pauli::{
    to_dense, to_matrix, HamiltonianSum, PauliOperator, SparseMatrix, SPARSE_CEILING,
};
use crate::pinning::{effective_sum, PinSpec, PromiseBounds};

/// Largest qubit count routed to the dense solver by [`Solver::Auto`].
pub const AUTO_DENSE_MAX: usize = 10;
/// Hermiticity defect accepted by the dense solver.
const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub value: f64,
    #[serde(skip)]
    pub vector: Option<Vec<Complex64>>,
    pub method: Method,
    /// `||H v - value v||` for the returned vector.
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub seed: u64,
    /// Stop when the Ritz value changes by less than this between iterations.
    pub value_tol: f64,
    pub residual_tol: f64,
    pub max_restarts: usize,
    /// Memory budget for the Krylov basis, in bytes.
    pub basis_bytes: usize,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            seed: 0,
            value_tol: 1e-10,
            residual_tol: 1e-8,
            max_restarts: 50,
            basis_bytes: 1 << 28,
        }
    }
}

/// Hermitian linear map applied without materializing its matrix.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, v: &[Complex64], out: &mut [Complex64]);
}

impl LinearOperator for PauliOperator {
    fn dim(&self) -> usize {
        PauliOperator::dim(self)
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        PauliOperator::apply(self, v, out)
    }
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        SparseMatrix::dim(self)
    }

    fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        SparseMatrix::apply(self, v, out)
    }
}

/// Smallest eigenvalue of a dense Hermitian matrix.
pub fn min_eig_dense(m: &DMatrix<Complex64>) -> Result<SpectralResult> {
    let defect = hermiticity_defect(m);
    if defect > HERMITIAN_TOL {
        return Err(PinqError::NonHermitian(defect));
    }
    let (value, v) = hermitian_min(m);
    let residual = (m * &v - &v * Complex64::new(value, 0.0)).norm();
    Ok(SpectralResult {
        value,
        vector: Some(v.iter().copied().collect()),
        method: Method::Dense,
        residual,
        iterations: 0,
    })
}

fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Smallest Ritz pair of the tridiagonal matrix `(alpha, beta)`.
fn tridiagonal_min(alpha: &[f64], beta: &[f64]) -> (f64, DVector<f64>) {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let idx = eig.eigenvalues.imin();
    (
        eig.eigenvalues[idx],
        eig.eigenvectors.column(idx).into_owned(),
    )
}

/// Restarted Lanczos for the smallest eigenvalue of a Hermitian operator.
pub fn min_eig_iterative(op: &dyn LinearOperator, opts: LanczosOptions) -> Result<SpectralResult> {
    let dim = op.dim();
    let kmax = (opts.basis_bytes / (16 * dim)).clamp(20, 120).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
        .collect();
    let s = norm(&start);
    start.iter_mut().for_each(|z| *z /= s);

    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;
    let mut w = zeros(dim);
    for _ in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<Complex64>> = vec![start.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut prev = f64::INFINITY;
        let (mut theta, mut y);
        loop {
            let j = basis.len() - 1;
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let a = inner(&basis[j], &w).re;
            alpha.push(a);
            // two passes of classical Gram-Schmidt against the whole basis
            for _ in 0..2 {
                for b in &basis {
                    let c = inner(b, &w);
                    axpy(&mut w, -c, b);
                }
            }
            let bnorm = norm(&w);
            (theta, y) = tridiagonal_min(&alpha, &beta);
            let estimate = bnorm * y[j].abs();
            let settled = (theta - prev).abs() < opts.value_tol && estimate <= opts.residual_tol;
            prev = theta;
            if settled || bnorm < 1e-13 || basis.len() == kmax {
                break;
            }
            beta.push(bnorm);
            basis.push(w.iter().map(|z| z / bnorm).collect());
        }
        let mut x = zeros(dim);
        for (yi, b) in y.iter().zip(&basis) {
            axpy(&mut x, Complex64::new(*yi, 0.0), b);
        }
        let xn = norm(&x);
        x.iter_mut().for_each(|z| *z /= xn);
        op.apply(&x, &mut w);
        let value = inner(&x, &w).re;
        axpy(&mut w, Complex64::new(-value, 0.0), &x);
        last_residual = norm(&w);
        if last_residual <= opts.residual_tol {
            return Ok(SpectralResult {
                value,
                vector: Some(x),
                method: Method::Iterative,
                residual: last_residual,
                iterations,
            });
        }
        start = x;
    }
    Err(PinqError::NoConvergence {
        iterations,
        residual: last_residual,
    })
}

/// Smallest eigenvalue of a Pauli sum.
pub fn min_eig(h: &HamiltonianSum, solver: Solver, seed: u64) -> Result<SpectralResult> {
    let dense = match solver {
        Solver::Dense => true,
        Solver::Iterative => false,
        Solver::Auto => h.n() <= AUTO_DENSE_MAX,
    };
    if dense {
        return min_eig_dense(&to_dense(h)?);
    }
    let opts = LanczosOptions {
        seed,
        ..LanczosOptions::default()
    };
    if h.n() <= SPARSE_CEILING {
        min_eig_iterative(&to_matrix(h)?, opts)
    } else {
        min_eig_iterative(&PauliOperator::new(h)?, opts)
    }
}

/// `min_psi <psi,phi|H|psi,phi>`, the ground energy of the effective Hamiltonian.
pub fn pinned_min_energy(
    h: &HamiltonianSum,
    pin: &PinSpec,
    solver: Solver,
    seed: u64,
) -> Result<SpectralResult> {
    min_eig(&effective_sum(h, pin)?, solver, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Yes,
    No,
    GapViolation,
}

/// YES at or below `a`, NO at or above `b`, otherwise the promise is broken.
pub fn decide(value: f64, bounds: &PromiseBounds) -> Decision {
    if value <= bounds.a {
        Decision::Yes
    } else if value >= bounds.b {
        Decision::No
    } else {
        Decision::GapViolation
    }
}

pub fn promise_decide(
    h: &HamiltonianSum,
    pin: &PinSpec,
    bounds: &PromiseBounds,
    solver: Solver,
    seed: u64,
) -> Result<(Decision, SpectralResult)> {
    let r = pinned_min_energy(h, pin, solver, seed)?;
    Ok((decide(r.value, bounds), r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinning::PinState;

    #[test]
    fn small_closed_forms() {
        let z = HamiltonianSum::from_pauli_strs(1, &[(1.0, "Z")]).unwrap();
        assert_eq!(min_eig(&z, Solver::Dense, 0).unwrap().value, -1.0);
        let zx = HamiltonianSum::from_pauli_strs(1, &[(1.0, "Z"), (1.0, "X")]).unwrap();
        let r = min_eig(&zx, Solver::Dense, 0).unwrap();
        assert!((r.value + 2f64.sqrt()).abs() < 1e-14);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn lanczos_matches_dense_on_chain() {
        let n = 6;
        let mut terms = Vec::new();
        let mut strings = Vec::new();
        for k in 0..n {
            let mut zz = vec!['I'; n];
            zz[k] = 'Z';
            zz[(k + 1) % n] = 'Z';
            let mut x = vec!['I'; n];
            x[k] = 'X';
            strings.push(zz.into_iter().collect::<String>());
            strings.push(x.into_iter().collect::<String>());
        }
        for (i, s) in strings.iter().enumerate() {
            terms.push((if i % 2 == 0 { -1.0 } else { -0.7 }, s.as_str()));
        }
        let h = HamiltonianSum::from_pauli_strs(n, &terms).unwrap();
        let d = min_eig(&h, Solver::Dense, 0).unwrap();
        let it = min_eig(&h, Solver::Iterative, 7).unwrap();
        assert_eq!(it.method, Method::Iterative);
        assert!(
            (d.value - it.value).abs() < 1e-8,
            "{} vs {}",
            d.value,
            it.value
        );
        assert!(it.residual <= 1e-8);
        let again = min_eig(&h, Solver::Iterative, 7).unwrap();
        assert_eq!(again.value.to_bits(), it.value.to_bits());
    }

    #[test]
    fn lanczos_handles_complex_terms() {
        let h = HamiltonianSum::from_pauli_strs(
            3,
            &[(0.4, "XYZ"), (-1.0, "ZZI"), (0.3, "IYY"), (0.2, "YII")],
        )
        .unwrap();
        let d = min_eig(&h, Solver::Dense, 0).unwrap();
        let it = min_eig(&h, Solver::Iterative, 1).unwrap();
        assert!((d.value - it.value).abs() < 1e-8);
    }

    #[test]
    fn non_hermitian_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        assert!(matches!(min_eig_dense(&m), Err(PinqError::NonHermitian(_))));
    }

    #[test]
    fn decisions() {
        let b = PromiseBounds::new(0.0, 1.0).unwrap();
        assert_eq!(decide(-0.1, &b), Decision::Yes);
        assert_eq!(decide(1.1, &b), Decision::No);
        assert_eq!(decide(0.5, &b), Decision::GapViolation);
        assert_eq!(
            serde_json::to_string(&Decision::GapViolation).unwrap(),
            "\"GAP_VIOLATION\""
        );
    }

    #[test]
    fn pinned_energy_of_extended_hamiltonian() {
        let h = HamiltonianSum::from_pauli_strs(2, &[(1.0, "ZI"), (1.0, "XI")]).unwrap();
        let r =
            pinned_min_energy(&h, &PinSpec::single(1, PinState::Zero), Solver::Auto, 0).unwrap();
        assert!((r.value + 2f64.sqrt()).abs() < 1e-14);
    }
}
