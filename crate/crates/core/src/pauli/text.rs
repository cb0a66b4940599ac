//! Hamiltonian text format.
//!
//! ```text
//! qubits 3
//! # comment
//! -1.0 XXI
//! 0.5  ZIZ
//! 1.0  0IX        # first product of a grouped term
//! & 1.0 1IZ       # further products of the same term
//! ```
//!
//! Strings have one letter per qubit (qubit 0 leftmost) from `I X Y Z` and the
//! projectors `0 1 + -` (`|0><0|`, `|1><1|`, `|+><+|`, `|-><-|`). A line starting
//! with `&` adds a weighted product to the previous term. Coefficients are
//! written with 17 significant digits so files round-trip exactly.

use std::fmt::Write as _;

use super::hamiltonian::{HamiltonianSum, Part, ProductOp, Term};
use crate::error::{PinqError, Result};

pub const FORMAT_VERSION: &str = "pinq-hamiltonian/1";

fn err(line: usize, message: impl Into<String>) -> PinqError {
    PinqError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_coeff(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| err(line, format!("invalid coefficient {tok:?}")))?;
    if !v.is_finite() {
        return Err(err(line, format!("non-finite coefficient {tok:?}")));
    }
    Ok(v)
}

fn parse_op(tok: &str, n: usize, line: usize) -> Result<ProductOp> {
    let op = ProductOp::parse(tok)
        .ok_or_else(|| err(line, format!("invalid operator string {tok:?}")))?;
    if op.n() != n {
        return Err(err(
            line,
            format!("operator string has {} letters, expected {n}", op.n()),
        ));
    }
    Ok(op)
}

pub fn parse_hamiltonian(text: &str) -> Result<HamiltonianSum> {
    let mut h: Option<HamiltonianSum> = None;
    let mut current: Option<Term> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(ham) = h.as_mut() else {
            match toks.as_slice() {
                ["qubits", n] => {
                    let n: usize = n
                        .parse()
                        .map_err(|_| err(line, format!("invalid qubit count {n:?}")))?;
                    if n > super::string::MAX_QUBITS {
                        return Err(err(
                            line,
                            format!("at most {} qubits", super::string::MAX_QUBITS),
                        ));
                    }
                    h = Some(HamiltonianSum::new(n));
                    continue;
                }
                _ => return Err(err(line, "expected header `qubits N`")),
            }
        };
        let n = ham.n();
        match toks.as_slice() {
            ["&", w, s] => {
                let weight = parse_coeff(w, line)?;
                let op = parse_op(s, n, line)?;
                match current.as_mut() {
                    Some(t) => t.parts.push(Part { weight, op }),
                    None => return Err(err(line, "continuation line without a term")),
                }
            }
            [c, s] => {
                let coeff = parse_coeff(c, line)?;
                let op = parse_op(s, n, line)?;
                if let Some(t) = current.take() {
                    ham.push(t).map_err(|e| err(line, e.to_string()))?;
                }
                current = Some(Term::product(coeff, op));
            }
            _ => {
                return Err(err(
                    line,
                    "expected `<coeff> <string>` or `& <weight> <string>`",
                ))
            }
        }
    }
    let mut ham = h.ok_or_else(|| err(last_line.max(1), "missing header `qubits N`"))?;
    if let Some(t) = current {
        ham.push(t).map_err(|e| err(last_line, e.to_string()))?;
    }
    Ok(ham)
}

/// 17 significant digits, exact for `f64`.
pub fn format_coeff(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_hamiltonian(h: &HamiltonianSum) -> String {
    let mut s = String::new();
    writeln!(s, "qubits {}", h.n()).unwrap();
    for t in h.terms() {
        let mut parts = t.parts.iter();
        let first = parts.next().expect("terms are non-empty");
        if first.weight == 1.0 {
            writeln!(s, "{} {}", format_coeff(t.coeff), first.op).unwrap();
        } else {
            // the first part must carry weight 1 in the text form
            writeln!(s, "{} {}", format_coeff(t.coeff * first.weight), first.op).unwrap();
        }
        for p in parts {
            let w = if first.weight == 1.0 {
                p.weight
            } else {
                p.weight / first.weight
            };
            writeln!(s, "& {} {}", format_coeff(w), p.op).unwrap();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_pauli_file() {
        let h = parse_hamiltonian("qubits 2\n# a comment\n-1.0 XX\n0.5 ZI # trailing\n\n").unwrap();
        assert_eq!(h.n(), 2);
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[0].coeff, -1.0);
        assert_eq!(h.terms()[1].parts[0].op.to_string(), "ZI");
    }

    #[test]
    fn parses_grouped_terms() {
        let h = parse_hamiltonian("qubits 2\n1 0I\n& 1 1X\n-2 ZZ\n").unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h.terms()[0].parts.len(), 2);
        assert_eq!(h.terms()[0].parts[1].op.to_string(), "1X");
    }

    #[test]
    fn reports_line_numbers() {
        let e = parse_hamiltonian("qubits 2\n1.0 XX\n0.5 ZQ\n").unwrap_err();
        assert!(matches!(e, PinqError::Parse { line: 3, .. }), "{e}");
        let e = parse_hamiltonian("qubits 2\n1.0 XXX\n").unwrap_err();
        assert!(matches!(e, PinqError::Parse { line: 2, .. }));
        let e = parse_hamiltonian("1.0 XX\n").unwrap_err();
        assert!(matches!(e, PinqError::Parse { line: 1, .. }));
        let e = parse_hamiltonian("qubits 1\n& 1 X\n").unwrap_err();
        assert!(matches!(e, PinqError::Parse { line: 2, .. }));
        let e = parse_hamiltonian("qubits 1\nabc X\n").unwrap_err();
        assert!(matches!(e, PinqError::Parse { line: 2, .. }));
    }

    #[test]
    fn format_round_trips_exactly() {
        let h = parse_hamiltonian("qubits 3\n0.1 XZI\n& -0.3333333333333333 1+-\n1e-300 III\n")
            .unwrap();
        let text = format_hamiltonian(&h);
        assert_eq!(parse_hamiltonian(&text).unwrap(), h);
        assert!(text.contains("1.0000000000000001e-1"));
    }
}
