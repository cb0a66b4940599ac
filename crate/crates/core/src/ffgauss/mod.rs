//! Fermionic Gaussian states in Majorana form.
//!
//! A state on `n` modes is its covariance matrix `gamma`, a real antisymmetric
//! `2n x 2n` matrix with `gamma^T gamma = I` when pure. A quadratic
//! Hamiltonian is an antisymmetric `h`, and `<H> = tr(gamma h)`. Gaussian
//! gates act as `gamma -> O gamma O^T` with `O` in `SO(2n)`.

mod givens;
mod path;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{PinqError, Result};

pub use givens::{givens_decompose, givens_product, near_identity_ratio, GivensRotation};
pub(crate) use path::matrix_to_rows;
pub use path::{interpolation_path, verify_ff_path, FermionPath, FfVerdict, PathGate, PATH_FORMAT};

pub const CSV_FORMAT: &str = "pinq-majorana-csv/1";
/// Antisymmetry tolerance.
pub const ANTISYM_TOL: f64 = 1e-10;
/// Purity tolerance for `gamma^T gamma = I`.
pub const PURITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

fn check_square_even(m: &DMatrix<f64>, what: &str) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c || r % 2 != 0 || r == 0 {
        return Err(PinqError::Dimension(format!(
            "{what} must be 2n x 2n, got {r}x{c}"
        )));
    }
    Ok(r / 2)
}

/// Covariance matrix of a Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    n: usize,
    m: DMatrix<f64>,
}

impl CovMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = check_square_even(&m, "covariance matrix")?;
        let defect = max_abs(&(&m + m.transpose()));
        if defect > ANTISYM_TOL {
            return Err(PinqError::Precondition(format!(
                "covariance matrix is not antisymmetric (defect {defect:.3e})"
            )));
        }
        Ok(CovMatrix { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `max |gamma^T gamma - I|`.
    pub fn purity_defect(&self) -> f64 {
        let d = 2 * self.n;
        max_abs(&(self.m.transpose() * &self.m - DMatrix::identity(d, d)))
    }

    pub fn is_pure(&self) -> bool {
        self.purity_defect() <= PURITY_TOL
    }

    /// Diagonal block values `c_j = gamma[2j, 2j+1]`.
    pub fn block_values(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.m[(2 * j, 2 * j + 1)]).collect()
    }

    pub fn pfaffian(&self) -> f64 {
        pfaffian(&self.m)
    }

    /// Parity from the sign of the Pfaffian.
    pub fn parity(&self) -> Parity {
        if self.pfaffian() >= 0.0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `O gamma O^T`.
    pub fn rotated(&self, o: &DMatrix<f64>) -> CovMatrix {
        CovMatrix {
            n: self.n,
            m: o * &self.m * o.transpose(),
        }
    }
}

/// Quadratic Hamiltonian `h = -h^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamMatrix {
    n: usize,
    m: DMatrix<f64>,
    block_diagonal: bool,
}

impl HamMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = check_square_even(&m, "Hamiltonian matrix")?;
        let defect = max_abs(&(&m + m.transpose()));
        if defect > ANTISYM_TOL {
            return Err(PinqError::Precondition(format!(
                "Hamiltonian matrix is not antisymmetric (defect {defect:.3e})"
            )));
        }
        let block_diagonal = (0..2 * n)
            .all(|r| (0..2 * n).all(|c| r / 2 == c / 2 || m[(r, c)].abs() <= ANTISYM_TOL));
        Ok(HamMatrix {
            n,
            m,
            block_diagonal,
        })
    }

    /// `h = sum_j w_j [[0, 1], [-1, 0]]` on mode `j`.
    pub fn from_block_weights(w: &[f64]) -> Self {
        let n = w.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (j, wj) in w.iter().enumerate() {
            m[(2 * j, 2 * j + 1)] = *wj;
            m[(2 * j + 1, 2 * j)] = -wj;
        }
        HamMatrix {
            n,
            m,
            block_diagonal: true,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn is_block_diagonal(&self) -> bool {
        self.block_diagonal
    }

    /// `w_j = h[2j, 2j+1]`.
    pub fn block_weights(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.m[(2 * j, 2 * j + 1)]).collect()
    }

    /// `W` in `SO(2n)` with `W h W^T` block diagonal and non-negative weights
    /// on all blocks but possibly the last.
    pub fn block_diagonalize(&self) -> (DMatrix<f64>, HamMatrix) {
        let d = 2 * self.n;
        let h = &self.m;
        let neg_sq = -(h * h);
        let eig = nalgebra::SymmetricEigen::new(neg_sq);
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let scale = max_abs(h).max(1.0);
        let mut rows: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(d);
        let project = |v: &mut nalgebra::DVector<f64>, basis: &[nalgebra::DVector<f64>]| {
            for _ in 0..2 {
                for b in basis {
                    let c = b.dot(v);
                    *v -= b * c;
                }
            }
            v.norm()
        };
        let candidates: Vec<nalgebra::DVector<f64>> = order
            .iter()
            .map(|&k| eig.eigenvectors.column(k).into_owned())
            .chain(
                (0..d)
                    .map(|k| nalgebra::DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 })),
            )
            .collect();
        for cand in candidates {
            if rows.len() == d {
                break;
            }
            let mut u = cand;
            let nu = project(&mut u, &rows);
            if nu < 1e-6 {
                continue;
            }
            u /= nu;
            let mut v = h * &u;
            let nv = project(&mut v, &rows);
            if nv > 1e-12 * scale {
                v /= nv;
                // rows (v, u) give the block [[0, w], [-w, 0]] with w = |h u|
                rows.push(v);
                rows.push(u);
            } else {
                // kernel directions sort last and pair up in order
                rows.push(u);
            }
        }
        let mut w = DMatrix::from_fn(d, d, |r, c| rows[r][c]);
        if w.determinant() < 0.0 {
            w.row_mut(d - 1).neg_mut();
        }
        let mut hb = &w * h * w.transpose();
        for r in 0..d {
            for c in 0..d {
                if r / 2 != c / 2 {
                    hb[(r, c)] = 0.0;
                }
            }
        }
        (
            w,
            HamMatrix {
                n: self.n,
                m: hb,
                block_diagonal: true,
            },
        )
    }
}

/// Block sum of `[[0, 1], [-1, 0]]`, with the first block negated for odd parity.
pub fn canonical_gamma0(n: usize, parity: Parity) -> CovMatrix {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        let s = if j == 0 && parity == Parity::Odd {
            -1.0
        } else {
            1.0
        };
        m[(2 * j, 2 * j + 1)] = s;
        m[(2 * j + 1, 2 * j)] = -s;
    }
    CovMatrix { n, m }
}

/// `tr(gamma h)`.
pub fn energy(gamma: &CovMatrix, h: &HamMatrix) -> Result<f64> {
    if gamma.n != h.n {
        return Err(PinqError::Dimension(format!(
            "gamma has {} modes, h has {}",
            gamma.n, h.n
        )));
    }
    Ok(gamma.m.component_mul(&h.m.transpose()).sum())
}

/// Pfaffian by skew-symmetric `L T L^T` elimination with pivoting.
pub fn pfaffian(a: &DMatrix<f64>) -> f64 {
    let d = a.nrows();
    if d % 2 == 1 {
        return 0.0;
    }
    let mut a = a.clone();
    let mut pf = 1.0;
    for k in (0..d.saturating_sub(1)).step_by(2) {
        let kp = (k + 1..d)
            .max_by(|&i, &j| a[(i, k)].abs().total_cmp(&a[(j, k)].abs()))
            .expect("non-empty range");
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        if a[(k + 1, k)] == 0.0 {
            return 0.0;
        }
        pf *= a[(k, k + 1)];
        if k + 2 < d {
            let pivot = a[(k, k + 1)];
            let tau: Vec<f64> = (k + 2..d).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<f64> = (k + 2..d).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..d).enumerate() {
                for (jj, j) in (k + 2..d).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    pf
}

/// `O` in `SO(2n)` with `gamma = O gamma0(parity) O^T` for a pure `gamma`.
///
/// Columns come in pairs `(u, sigma gamma u)`; `u` is taken from `seeds`
/// (columns, in order) and then the standard basis, orthogonalized against
/// the columns already chosen.
pub fn canonical_frame(
    gamma: &CovMatrix,
    parity: Parity,
    seeds: Option<&DMatrix<f64>>,
) -> DMatrix<f64> {
    let d = 2 * gamma.n;
    let g = &gamma.m;
    let mut cols: Vec<nalgebra::DVector<f64>> = Vec::with_capacity(d);
    let seed_cols = seeds.map(|s| s.ncols()).unwrap_or(0);
    let mut cand = (0..seed_cols)
        .map(|k| seeds.expect("seeded").column(k).into_owned())
        .chain(
            (0..d).map(|k| nalgebra::DVector::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 })),
        );
    while cols.len() < d {
        let Some(mut u) = cand.next() else { break };
        for _ in 0..2 {
            for b in &cols {
                let c = b.dot(&u);
                u -= b * c;
            }
        }
        let nu = u.norm();
        if nu < 0.1 {
            continue;
        }
        u /= nu;
        let j = cols.len() / 2;
        let sigma = if j == 0 && parity == Parity::Odd {
            1.0
        } else {
            -1.0
        };
        let mut v = g * &u * sigma;
        let nv = v.norm();
        v /= nv;
        cols.push(u);
        cols.push(v);
    }
    DMatrix::from_fn(d, d, |r, c| cols[c][r])
}

/// Haar-like random special orthogonal matrix (QR of a Gaussian matrix).
pub fn random_special_orthogonal<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..d {
        if r[(k, k)] < 0.0 {
            q.column_mut(k).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Reads a `2n x 2n` matrix from CSV rows (no header).
pub fn read_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| PinqError::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| PinqError::Parse {
                line: rec.position().map(|p| p.line() as usize).unwrap_or(i + 1),
                message: e.to_string(),
            })?;
        rows.push(row);
    }
    let d = rows.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != d) {
        return Err(PinqError::Parse {
            line: bad + 1,
            message: format!("row has {} entries, expected {d}", rows[bad].len()),
        });
    }
    Ok(DMatrix::from_fn(d, d, |r, c| rows[r][c]))
}

pub fn write_matrix_csv(m: &DMatrix<f64>) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in 0..m.nrows() {
        w.write_record(m.row(r).iter().map(|v| format!("{v:.16e}")))
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}
