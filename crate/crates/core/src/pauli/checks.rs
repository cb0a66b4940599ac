//! Structural checks: stoquastic, commuting and permutation Hamiltonians.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::hamiltonian::{HamiltonianSum, Term};
use super::matrix::to_matrix;
use super::string::PauliString;
use crate::error::Result;

/// Default tolerance for structural checks.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// Location of the worst positive off-diagonal entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Offender {
    /// Term index (termwise mode) or `None` for the assembled matrix.
    pub term: Option<usize>,
    /// Qubits indexing `row`/`col` (the term support, or all qubits).
    pub qubits: Vec<usize>,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StoquasticReport {
    pub verdict: bool,
    pub termwise: bool,
    pub worst: Option<Offender>,
}

/// Off-diagonal entry badness: positive real part, or any imaginary part.
fn badness(z: Complex64) -> f64 {
    z.re.max(z.im.abs())
}

fn scan_dense(m: &DMatrix<Complex64>) -> Option<(usize, usize, f64)> {
    let mut worst: Option<(usize, usize, f64)> = None;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if r == c {
                continue;
            }
            let b = badness(m[(r, c)]);
            if worst.is_none_or(|w| b > w.2) {
                worst = Some((r, c, b));
            }
        }
    }
    worst
}

/// Checks that every off-diagonal entry is `<= tol` in the computational basis.
///
/// In termwise mode each term is checked on its own support; terms carrying
/// `Y` force the global check on the assembled matrix.
pub fn is_stoquastic(h: &HamiltonianSum, termwise: bool, tol: f64) -> Result<StoquasticReport> {
    let termwise = termwise && !h.is_complex();
    let mut worst: Option<Offender> = None;
    if termwise {
        for (i, t) in h.terms().iter().enumerate() {
            let (support, m) = t.local_matrix();
            if let Some((row, col, value)) = scan_dense(&m) {
                if worst.as_ref().is_none_or(|w| value > w.value) {
                    worst = Some(Offender {
                        term: Some(i),
                        qubits: support,
                        row,
                        col,
                        value,
                    });
                }
            }
        }
    } else {
        let m = to_matrix(h)?;
        for r in 0..m.dim() {
            for (c, v) in m.row(r) {
                if r == c {
                    continue;
                }
                let b = badness(v);
                if worst.as_ref().is_none_or(|w| b > w.value) {
                    worst = Some(Offender {
                        term: None,
                        qubits: (0..h.n()).collect(),
                        row: r,
                        col: c,
                        value: b,
                    });
                }
            }
        }
    }
    let verdict = worst.as_ref().is_none_or(|w| w.value <= tol);
    Ok(StoquasticReport {
        verdict,
        termwise,
        worst: worst.filter(|w| w.value > 0.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutingReport {
    pub verdict: bool,
    pub first_pair: Option<(usize, usize)>,
}

/// Exact commutation test for two terms.
///
/// Single Pauli strings use the symplectic form. Grouped terms expand into
/// Pauli strings (dyadic weights) and the commutator's expansion is checked
/// for exact cancellation; the overall coefficients factor out.
pub fn terms_commute(a: &Term, b: &Term) -> bool {
    if a.coeff == 0.0 || b.coeff == 0.0 {
        return true;
    }
    if let (Some(pa), Some(pb)) = (a.as_pauli(), b.as_pauli()) {
        return pa.commutes_with(&pb);
    }
    let ea = a.shape_expansion();
    let eb = b.shape_expansion();
    if ea
        .iter()
        .all(|(_, pa)| eb.iter().all(|(_, pb)| pa.commutes_with(pb)))
    {
        return true;
    }
    let mut acc: HashMap<PauliString, (f64, f64)> = HashMap::new();
    for (ca, pa) in &ea {
        for (cb, pb) in &eb {
            if pa.commutes_with(pb) {
                continue;
            }
            let (phase, r) = pa.mul(pb);
            let w = 2.0 * ca * cb;
            let e = acc.entry(r).or_insert((0.0, 0.0));
            match phase {
                0 => e.0 += w,
                1 => e.1 += w,
                2 => e.0 -= w,
                _ => e.1 -= w,
            }
        }
    }
    acc.values().all(|&(re, im)| re == 0.0 && im == 0.0)
}

pub fn is_commuting(h: &HamiltonianSum) -> CommutingReport {
    let terms = h.terms();
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            if !terms_commute(&terms[i], &terms[j]) {
                return CommutingReport {
                    verdict: false,
                    first_pair: Some((i, j)),
                };
            }
        }
    }
    CommutingReport {
        verdict: true,
        first_pair: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermutationReport {
    pub verdict: bool,
    pub per_term: bool,
    pub first_offender: Option<usize>,
    pub reason: Option<String>,
}

/// `None` if `entries(r)` describes a 0/1 permutation matrix, else the reason.
fn permutation_defect<I>(dim: usize, rows: impl Fn(usize) -> I, tol: f64) -> Option<String>
where
    I: Iterator<Item = (usize, Complex64)>,
{
    let mut col_hits = vec![0usize; dim];
    for r in 0..dim {
        let mut ones = 0;
        for (c, v) in rows(r) {
            if v.im.abs() > tol {
                return Some(format!("entry ({r},{c}) is complex"));
            }
            if (v.re - 1.0).abs() <= tol {
                ones += 1;
                col_hits[c] += 1;
            } else if v.re.abs() > tol {
                return Some(format!("entry ({r},{c}) = {} is not 0 or 1", v.re));
            }
        }
        if ones != 1 {
            return Some(format!("row {r} has {ones} unit entries"));
        }
    }
    col_hits
        .iter()
        .position(|&k| k != 1)
        .map(|c| format!("column {c} has {} unit entries", col_hits[c]))
}

/// Checks that each term (or the whole matrix) is a 0/1 permutation matrix.
pub fn is_permutation(h: &HamiltonianSum, per_term: bool, tol: f64) -> Result<PermutationReport> {
    if per_term {
        for (i, t) in h.terms().iter().enumerate() {
            let (_, m) = t.local_matrix();
            let dim = m.nrows();
            if let Some(reason) = permutation_defect(
                dim,
                |r| {
                    let m = &m;
                    (0..dim).map(move |c| (c, m[(r, c)]))
                },
                tol,
            ) {
                return Ok(PermutationReport {
                    verdict: false,
                    per_term,
                    first_offender: Some(i),
                    reason: Some(reason),
                });
            }
        }
        return Ok(PermutationReport {
            verdict: true,
            per_term,
            first_offender: None,
            reason: None,
        });
    }
    let m = to_matrix(h)?;
    let reason = permutation_defect(m.dim(), |r| m.row(r), tol);
    Ok(PermutationReport {
        verdict: reason.is_none(),
        per_term,
        first_offender: None,
        reason,
    })
}

/// True when the term's matrix has an all-zero diagonal.
pub fn is_off_diagonal(t: &Term, tol: f64) -> bool {
    let (_, m) = t.local_matrix();
    (0..m.nrows()).all(|k| m[(k, k)].norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::text::parse_hamiltonian;

    #[test]
    fn negative_xx_is_stoquastic() {
        let h = HamiltonianSum::from_pauli_strs(2, &[(-1.0, "XX")]).unwrap();
        let r = is_stoquastic(&h, true, STRUCTURE_TOL).unwrap();
        assert!(r.verdict);
        assert!(r.worst.is_none());
        assert!(is_stoquastic(&h, false, STRUCTURE_TOL).unwrap().verdict);
    }

    #[test]
    fn positive_x_is_not_stoquastic() {
        let h = HamiltonianSum::from_pauli_strs(1, &[(1.0, "X")]).unwrap();
        for termwise in [true, false] {
            let r = is_stoquastic(&h, termwise, STRUCTURE_TOL).unwrap();
            assert!(!r.verdict);
            assert_eq!(r.worst.unwrap().value, 1.0);
        }
    }

    #[test]
    fn termwise_and_global_can_differ() {
        // +X and -2X: not termwise stoquastic, stoquastic as a whole
        let h = HamiltonianSum::from_pauli_strs(1, &[(1.0, "X"), (-2.0, "X")]).unwrap();
        assert!(!is_stoquastic(&h, true, STRUCTURE_TOL).unwrap().verdict);
        assert!(is_stoquastic(&h, false, STRUCTURE_TOL).unwrap().verdict);
    }

    #[test]
    fn commuting_examples() {
        let h = HamiltonianSum::from_pauli_strs(2, &[(1.0, "ZI"), (1.0, "IX")]).unwrap();
        assert!(is_commuting(&h).verdict);
        let h = HamiltonianSum::from_pauli_strs(1, &[(1.0, "X"), (1.0, "Z")]).unwrap();
        let r = is_commuting(&h);
        assert!(!r.verdict);
        assert_eq!(r.first_pair, Some((0, 1)));
    }

    #[test]
    fn projector_gadgets_commute_exactly() {
        // Z (x) |+><+| and X (x) |-><-| commute though Z and X do not
        let h = parse_hamiltonian("qubits 2\n1 Z+\n1 X-\n").unwrap();
        assert!(is_commuting(&h).verdict);
        let h = parse_hamiltonian("qubits 2\n1 Z+\n1 X+\n").unwrap();
        assert!(!is_commuting(&h).verdict);
    }

    #[test]
    fn permutation_examples() {
        let x = HamiltonianSum::from_pauli_strs(1, &[(1.0, "X")]).unwrap();
        assert!(is_permutation(&x, true, STRUCTURE_TOL).unwrap().verdict);
        let z = HamiltonianSum::from_pauli_strs(1, &[(1.0, "Z")]).unwrap();
        let r = is_permutation(&z, true, STRUCTURE_TOL).unwrap();
        assert!(!r.verdict);
        assert_eq!(r.first_offender, Some(0));
        // the Z-replacement gadget |0><0| (x) I + |1><1| (x) X
        let g = parse_hamiltonian("qubits 2\n1 0I\n& 1 1X\n").unwrap();
        assert!(is_permutation(&g, true, STRUCTURE_TOL).unwrap().verdict);
        assert!(is_permutation(&g, false, STRUCTURE_TOL).unwrap().verdict);
        // half a gadget has empty rows
        let half = parse_hamiltonian("qubits 2\n1 0I\n").unwrap();
        assert!(!is_permutation(&half, true, STRUCTURE_TOL).unwrap().verdict);
    }

    #[test]
    fn off_diagonal_detection() {
        let h = parse_hamiltonian("qubits 2\n1 XZ\n1 ZI\n").unwrap();
        assert!(is_off_diagonal(&h.terms()[0], 0.0));
        assert!(!is_off_diagonal(&h.terms()[1], 0.0));
    }
}
