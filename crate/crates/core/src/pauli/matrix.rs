use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::hamiltonian::HamiltonianSum;
use crate::error::{PinqError, Result};

/// Largest qubit count for dense matrices.
pub const DENSE_CEILING: usize = 12;
/// Largest qubit count for assembled sparse matrices.
pub const SPARSE_CEILING: usize = 16;
/// Largest qubit count for matrix-free application.
pub const MATRIX_FREE_CEILING: usize = 20;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone)]
struct FlipGroup {
    x: u64,
    diag: Vec<(Complex64, u64)>,
}

/// Matrix-free form of a Pauli sum: strings grouped by their bit-flip mask,
/// so row `r` couples only to columns `r ^ x` for each group.
#[derive(Debug, Clone)]
pub struct PauliOperator {
    n: usize,
    groups: Vec<FlipGroup>,
}

impl PauliOperator {
    pub fn new(h: &HamiltonianSum) -> Result<Self> {
        if h.n() > MATRIX_FREE_CEILING {
            return Err(PinqError::TooLarge {
                what: "matrix-free operator",
                qubits: h.n(),
                ceiling: MATRIX_FREE_CEILING,
            });
        }
        let mut groups: BTreeMap<u64, Vec<(Complex64, u64)>> = BTreeMap::new();
        for (c, s) in h.pauli_expansion() {
            let (xi, zi) = s.index_masks();
            let phase = i_pow((s.x_mask() & s.z_mask()).count_ones());
            groups.entry(xi).or_default().push((phase * c, zi));
        }
        Ok(PauliOperator {
            n: h.n(),
            groups: groups
                .into_iter()
                .map(|(x, diag)| FlipGroup { x, diag })
                .collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    fn group_value(g: &FlipGroup, col: usize) -> Complex64 {
        let mut v = ZERO;
        for (c, z) in &g.diag {
            if (z & col as u64).count_ones().is_multiple_of(2) {
                v += c;
            } else {
                v -= c;
            }
        }
        v
    }

    /// `<row|H|col>`.
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        let x = (row ^ col) as u64;
        self.groups
            .iter()
            .find(|g| g.x == x)
            .map(|g| Self::group_value(g, col))
            .unwrap_or(ZERO)
    }

    /// `out = H v`, rows computed independently (deterministic for any thread count).
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.dim());
        assert_eq!(out.len(), self.dim());
        out.par_iter_mut().enumerate().for_each(|(r, o)| {
            let mut acc = ZERO;
            for g in &self.groups {
                let c = r ^ g.x as usize;
                acc += Self::group_value(g, c) * v[c];
            }
            *o = acc;
        });
    }

    /// `<v|H|v>` (real part; the imaginary part vanishes for Hermitian sums).
    pub fn expectation(&self, v: &[Complex64]) -> f64 {
        let mut hv = vec![ZERO; v.len()];
        self.apply(v, &mut hv);
        crate::linalg::inner(v, &hv).re
    }
}

/// Compressed-sparse-row complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (self.cols[k], self.vals[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.row(r)
            .find(|(cc, _)| *cc == c)
            .map(|(_, v)| v)
            .unwrap_or(ZERO)
    }

    pub fn is_real(&self) -> bool {
        self.vals.iter().all(|v| v.im == 0.0)
    }

    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.par_iter_mut().enumerate().for_each(|(r, o)| {
            *o = self.row(r).map(|(c, a)| a * v[c]).sum();
        });
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        if self.dim > 1 << DENSE_CEILING {
            return Err(PinqError::TooLarge {
                what: "dense matrix",
                qubits: self.dim.trailing_zeros() as usize,
                ceiling: DENSE_CEILING,
            });
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                m[(r, c)] = v;
            }
        }
        Ok(m)
    }

    /// Entry-wise sum of two matrices of equal dimension.
    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.dim != other.dim {
            return Err(PinqError::Dimension(format!(
                "{} vs {}",
                self.dim, other.dim
            )));
        }
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in 0..self.dim {
            let mut row: BTreeMap<usize, Complex64> = BTreeMap::new();
            for (c, v) in self.row(r).chain(other.row(r)) {
                *row.entry(c).or_insert(ZERO) += v;
            }
            for (c, v) in row {
                if v != ZERO {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Ok(SparseMatrix {
            dim: self.dim,
            row_ptr,
            cols,
            vals,
        })
    }
}

/// Assembles `sum_i coeff_i * (tensor product of letters)` as a sparse matrix.
pub fn to_matrix(h: &HamiltonianSum) -> Result<SparseMatrix> {
    if h.n() > SPARSE_CEILING {
        return Err(PinqError::TooLarge {
            what: "sparse matrix",
            qubits: h.n(),
            ceiling: SPARSE_CEILING,
        });
    }
    let op = PauliOperator::new(h)?;
    let dim = op.dim();
    let rows: Vec<Vec<(usize, Complex64)>> = (0..dim)
        .into_par_iter()
        .map(|r| {
            let mut row: Vec<(usize, Complex64)> = op
                .groups
                .iter()
                .map(|g| {
                    let c = r ^ g.x as usize;
                    (c, PauliOperator::group_value(g, c))
                })
                .filter(|(_, v)| *v != ZERO)
                .collect();
            row.sort_by_key(|(c, _)| *c);
            row
        })
        .collect();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    row_ptr.push(0);
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(SparseMatrix {
        dim,
        row_ptr,
        cols,
        vals,
    })
}

/// Dense matrix of a Hamiltonian sum.
pub fn to_dense(h: &HamiltonianSum) -> Result<DMatrix<Complex64>> {
    if h.n() > DENSE_CEILING {
        return Err(PinqError::TooLarge {
            what: "dense matrix",
            qubits: h.n(),
            ceiling: DENSE_CEILING,
        });
    }
    to_matrix(h)?.to_dense()
}
