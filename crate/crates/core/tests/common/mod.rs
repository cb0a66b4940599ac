//! Shared helpers and independent oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use pinq::pauli::{HamiltonianSum, ProductOp, Term};
use proptest::test_runner::{Config as ProptestConfig, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Global seed for randomized tests; override with `PINQ_SEED`.
pub fn seed() -> u64 {
    std::env::var("PINQ_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

pub fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed());
    r.set_stream(stream);
    r
}

/// Property-test configuration tied to the global seed.
pub fn proptest_config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(seed()),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// 2x2 matrix of a letter, written out independently of the library tables.
pub fn letter_matrix(c: char) -> DMatrix<Complex64> {
    let h = Complex64::new(0.5, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let v: [Complex64; 4] = match c {
        'I' => [C1, C0, C0, C1],
        'X' => [C0, C1, C1, C0],
        'Y' => [C0, -i, i, C0],
        'Z' => [C1, C0, C0, -C1],
        '0' => [C1, C0, C0, C0],
        '1' => [C0, C0, C0, C1],
        '+' => [h, h, h, h],
        '-' => [h, -h, -h, h],
        _ => panic!("unknown letter {c}"),
    };
    DMatrix::from_row_slice(2, 2, &v)
}

/// Kronecker product of letters, qubit 0 leftmost (most significant).
pub fn kron_string(s: &str) -> DMatrix<Complex64> {
    s.chars().fold(DMatrix::from_element(1, 1, C1), |acc, c| {
        acc.kronecker(&letter_matrix(c))
    })
}

/// Dense matrix by Kronecker products of every part of every term.
pub fn kron_oracle(h: &HamiltonianSum) -> DMatrix<Complex64> {
    let dim = 1usize << h.n();
    let mut m = DMatrix::zeros(dim, dim);
    for t in h.terms() {
        for p in &t.parts {
            let s: String = p.op.letters().iter().map(|l| l.to_char()).collect();
            m += kron_string(&s) * Complex64::new(t.coeff * p.weight, 0.0);
        }
    }
    m
}

/// `<row| P |col>` from the action of a Pauli string on a basis state:
/// `X|b> = |1-b>`, `Y|b> = i(-1)^b |1-b>`, `Z|b> = (-1)^b |b>`.
pub fn pauli_action_entry(s: &str, row: usize, col: usize) -> Complex64 {
    let n = s.len();
    let mut out = col;
    let mut phase = C1;
    for (q, c) in s.chars().enumerate() {
        let bit = (col >> (n - 1 - q)) & 1;
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        match c {
            'I' => {}
            'X' => out ^= 1 << (n - 1 - q),
            'Y' => {
                out ^= 1 << (n - 1 - q);
                phase *= Complex64::new(0.0, sign);
            }
            'Z' => phase *= sign,
            _ => panic!("not a Pauli letter: {c}"),
        }
    }
    if out == row {
        phase
    } else {
        C0
    }
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().fold(0.0f64, |m, z| m.max(z.norm()))
}

/// Smallest eigenvalue of a Hermitian matrix through nalgebra directly.
pub fn lambda_min(m: &DMatrix<Complex64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &v| a.min(v))
}

/// Random Hamiltonian: `count` terms, each a shape from `shapes` placed on
/// distinct random qubits, coefficients uniform in `[-1, 1]`. Shapes wider
/// than `n` are skipped.
pub fn random_hamiltonian(
    rng: &mut ChaCha8Rng,
    n: usize,
    shapes: &[&str],
    count: usize,
) -> HamiltonianSum {
    let shapes: Vec<&str> = shapes.iter().copied().filter(|s| s.len() <= n).collect();
    let mut h = HamiltonianSum::new(n);
    for _ in 0..count {
        let shape: Vec<char> = shapes[rng.random_range(0..shapes.len())].chars().collect();
        let mut qubits: Vec<usize> = (0..n).collect();
        for k in 0..shape.len() {
            let j = rng.random_range(k..n);
            qubits.swap(k, j);
        }
        let mut s = vec!['I'; n];
        for (k, c) in shape.iter().enumerate() {
            s[qubits[k]] = *c;
        }
        let s: String = s.into_iter().collect();
        let op = ProductOp::parse(&s).expect("valid string");
        h.push(Term::product(rng.random_range(-1.0..1.0), op))
            .expect("qubit count matches");
    }
    h
}

pub fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

/// Majorana operators on `n` modes by Jordan-Wigner:
/// `c_{2j} = Z..Z X_j`, `c_{2j+1} = Z..Z Y_j`.
pub fn majoranas(n: usize) -> Vec<DMatrix<Complex64>> {
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        for last in ['X', 'Y'] {
            let s: String = (0..n)
                .map(|k| {
                    if k < j {
                        'Z'
                    } else if k == j {
                        last
                    } else {
                        'I'
                    }
                })
                .collect();
            out.push(kron_string(&s));
        }
    }
    out
}

/// Quadratic Hamiltonian `H = -i sum_ab h_ab c_a c_b`, so `<H> = tr(gamma h)`
/// when `gamma_ab = i <c_a c_b>` off the diagonal.
pub fn fock_hamiltonian(h: &DMatrix<f64>, c: &[DMatrix<Complex64>]) -> DMatrix<Complex64> {
    let dim = c[0].nrows();
    let mut m = DMatrix::zeros(dim, dim);
    for a in 0..c.len() {
        for b in 0..c.len() {
            if h[(a, b)] != 0.0 {
                m += &c[a] * &c[b] * Complex64::new(0.0, -h[(a, b)]);
            }
        }
    }
    m
}

/// Ground state of `-(i/2) sum gamma_ab c_a c_b`, the Gaussian state with
/// covariance `gamma` (pure `gamma` only).
pub fn fock_state(gamma: &DMatrix<f64>, c: &[DMatrix<Complex64>]) -> Vec<Complex64> {
    let k = fock_hamiltonian(&(gamma * 0.5), c);
    let eig = k.symmetric_eigen();
    let (idx, _) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) },
            );
    eig.eigenvectors.column(idx).iter().copied().collect()
}

pub fn expectation(m: &DMatrix<Complex64>, v: &[Complex64]) -> f64 {
    let mv = m * nalgebra::DVector::from_column_slice(v);
    v.iter()
        .zip(mv.iter())
        .map(|(a, b)| (a.conj() * b).re)
        .sum()
}
