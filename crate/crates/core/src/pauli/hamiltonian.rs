use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::string::{Letter, PauliString, MAX_QUBITS};
use crate::error::{PinqError, Result};

/// Tensor product of single-qubit letters, one per qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductOp {
    letters: Vec<Letter>,
}

impl ProductOp {
    pub fn identity(n: usize) -> Self {
        ProductOp {
            letters: vec![Letter::I; n],
        }
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        assert!(letters.len() <= MAX_QUBITS);
        ProductOp { letters }
    }

    pub fn from_pauli(p: &PauliString) -> Self {
        ProductOp {
            letters: (0..p.n()).map(|k| p.get(k)).collect(),
        }
    }

    /// Parses a letter string such as `"X0+I"`.
    pub fn parse(s: &str) -> Option<Self> {
        s.chars()
            .map(Letter::from_char)
            .collect::<Option<Vec<_>>>()
            .map(ProductOp::from_letters)
    }

    pub fn n(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn get(&self, qubit: usize) -> Letter {
        self.letters[qubit]
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        self.letters[qubit] = letter;
    }

    pub fn with(mut self, qubit: usize, letter: Letter) -> Self {
        self.set(qubit, letter);
        self
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&k| self.letters[k] != Letter::I)
            .collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.letters.iter().all(|l| l.is_diagonal())
    }

    pub fn has_y(&self) -> bool {
        self.letters.contains(&Letter::Y)
    }

    /// Pads with identities up to `n` qubits.
    pub fn extended(&self, n: usize) -> ProductOp {
        assert!(n >= self.n());
        let mut letters = self.letters.clone();
        letters.resize(n, Letter::I);
        ProductOp { letters }
    }

    /// Keeps only the listed qubits, in the listed order.
    pub fn restricted(&self, qubits: &[usize]) -> ProductOp {
        ProductOp {
            letters: qubits.iter().map(|&q| self.letters[q]).collect(),
        }
    }

    /// Expansion in Pauli strings; coefficients are products of `1` and `1/2`.
    pub fn pauli_expansion(&self) -> Vec<(f64, PauliString)> {
        let mut acc = vec![(1.0, PauliString::identity(self.n()))];
        for (q, letter) in self.letters.iter().enumerate() {
            if *letter == Letter::I {
                continue;
            }
            let c = letter.pauli_coefficients();
            let mut next = Vec::with_capacity(acc.len() * 2);
            for (w, s) in &acc {
                for (k, ck) in c.iter().enumerate() {
                    if *ck == 0.0 {
                        continue;
                    }
                    let mut s2 = *s;
                    s2.set(q, [Letter::I, Letter::X, Letter::Y, Letter::Z][k]);
                    next.push((w * ck, s2));
                }
            }
            acc = next;
        }
        acc
    }

    /// `<row|op|col>` for basis indices of this operator's own qubits
    /// (qubit 0 is the most significant bit).
    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        let n = self.n();
        let mut v = Complex64::new(1.0, 0.0);
        for (k, l) in self.letters.iter().enumerate() {
            let shift = n - 1 - k;
            let (re, im) = l.element(((row >> shift) & 1) as u8, ((col >> shift) & 1) as u8);
            if re == 0.0 && im == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            v *= Complex64::new(re, im);
        }
        v
    }
}

impl fmt::Display for ProductOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// One weighted product inside a [`Term`].
#[derive(Debug, Clone, PartialEq)]
pub struct Part {
    pub weight: f64,
    pub op: ProductOp,
}

/// A local Hamiltonian term `coeff * sum_j weight_j * op_j`.
///
/// Most terms have a single part with weight 1 (a plain Pauli term). Gadget
/// terms group several products that only have the required structure
/// (stoquastic, permutation, ...) as a whole.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    pub parts: Vec<Part>,
}

impl Term {
    pub fn pauli(coeff: f64, string: PauliString) -> Self {
        Term::product(coeff, ProductOp::from_pauli(&string))
    }

    pub fn product(coeff: f64, op: ProductOp) -> Self {
        Term {
            coeff,
            parts: vec![Part { weight: 1.0, op }],
        }
    }

    /// Sum of products with unit weights.
    pub fn grouped(coeff: f64, ops: Vec<ProductOp>) -> Self {
        assert!(!ops.is_empty());
        Term {
            coeff,
            parts: ops.into_iter().map(|op| Part { weight: 1.0, op }).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.parts[0].op.n()
    }

    /// Qubits on which some part acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.parts.iter().flat_map(|p| p.op.support()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn locality(&self) -> usize {
        self.support().len()
    }

    pub fn has_y(&self) -> bool {
        self.parts.iter().any(|p| p.op.has_y())
    }

    /// The Pauli string if this term is one unit-weight Pauli product.
    pub fn as_pauli(&self) -> Option<PauliString> {
        match self.parts.as_slice() {
            [Part { weight, op }]
                if *weight == 1.0 && op.letters().iter().all(|l| l.is_pauli()) =>
            {
                let mut s = PauliString::identity(op.n());
                for (k, l) in op.letters().iter().enumerate() {
                    s.set(k, *l);
                }
                Some(s)
            }
            _ => None,
        }
    }

    /// Pauli expansion without the overall coefficient, merged and zero-free.
    pub fn shape_expansion(&self) -> Vec<(f64, PauliString)> {
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        for part in &self.parts {
            for (w, s) in part.op.pauli_expansion() {
                *acc.entry(s).or_insert(0.0) += part.weight * w;
            }
        }
        acc.into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(s, c)| (c, s))
            .collect()
    }

    /// Pauli expansion including the coefficient.
    pub fn pauli_expansion(&self) -> Vec<(f64, PauliString)> {
        self.shape_expansion()
            .into_iter()
            .map(|(c, s)| (c * self.coeff, s))
            .collect()
    }

    pub fn extended(&self, n: usize) -> Term {
        Term {
            coeff: self.coeff,
            parts: self
                .parts
                .iter()
                .map(|p| Part {
                    weight: p.weight,
                    op: p.op.extended(n),
                })
                .collect(),
        }
    }

    /// Dense matrix (coefficient included) on the term's support qubits.
    pub fn local_matrix(&self) -> (Vec<usize>, DMatrix<Complex64>) {
        let support = self.support();
        let k = support.len();
        let dim = 1usize << k;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for part in &self.parts {
            let op = part.op.restricted(&support);
            for r in 0..dim {
                for c in 0..dim {
                    let e = op.element(r, c);
                    if e.re != 0.0 || e.im != 0.0 {
                        m[(r, c)] += e * (part.weight * self.coeff);
                    }
                }
            }
        }
        (support, m)
    }

    /// Operator norm, from dense diagonalization on the support.
    pub fn norm(&self) -> f64 {
        let (_, m) = self.local_matrix();
        crate::linalg::hermitian_eigenvalues(&m)
            .into_iter()
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Real-weighted sum of local terms on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSum {
    n: usize,
    terms: Vec<Term>,
}

impl HamiltonianSum {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        HamiltonianSum {
            n,
            terms: Vec::new(),
        }
    }

    pub fn from_terms(n: usize, terms: Vec<Term>) -> Result<Self> {
        let mut h = HamiltonianSum::new(n);
        for t in terms {
            h.push(t)?;
        }
        Ok(h)
    }

    /// Convenience constructor from `(coeff, "XZI...")` pairs.
    pub fn from_pauli_strs(n: usize, terms: &[(f64, &str)]) -> Result<Self> {
        let mut h = HamiltonianSum::new(n);
        for (c, s) in terms {
            let op = ProductOp::parse(s)
                .filter(|op| op.letters().iter().all(|l| l.is_pauli()))
                .ok_or_else(|| PinqError::Precondition(format!("bad Pauli string {s:?}")))?;
            h.push(Term::product(*c, op))?;
        }
        Ok(h)
    }

    pub fn push(&mut self, term: Term) -> Result<()> {
        if term.parts.is_empty() {
            return Err(PinqError::Precondition("term without parts".into()));
        }
        if term.parts.iter().any(|p| p.op.n() != self.n) {
            return Err(PinqError::Dimension(format!(
                "term acts on {} qubits, Hamiltonian has {}",
                term.n(),
                self.n
            )));
        }
        if !term.coeff.is_finite() || term.parts.iter().any(|p| !p.weight.is_finite()) {
            return Err(PinqError::Precondition("non-finite coefficient".into()));
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest term support.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(Term::locality).max().unwrap_or(0)
    }

    /// True when some term carries a `Y`, which makes the matrix complex.
    pub fn is_complex(&self) -> bool {
        self.terms.iter().any(Term::has_y)
    }

    pub fn max_term_norm(&self) -> f64 {
        self.terms.iter().map(Term::norm).fold(0.0, f64::max)
    }

    /// Triangle-inequality bound on the operator norm using exact term norms.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(Term::norm).sum()
    }

    /// Merged Pauli expansion of the whole sum.
    pub fn pauli_expansion(&self) -> Vec<(f64, PauliString)> {
        let mut acc: BTreeMap<PauliString, f64> = BTreeMap::new();
        for t in &self.terms {
            for (c, s) in t.pauli_expansion() {
                *acc.entry(s).or_insert(0.0) += c;
            }
        }
        acc.into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(s, c)| (c, s))
            .collect()
    }

    /// Same terms padded with identity on extra qubits.
    pub fn extended(&self, n: usize) -> HamiltonianSum {
        HamiltonianSum {
            n,
            terms: self.terms.iter().map(|t| t.extended(n)).collect(),
        }
    }

    /// Concatenates the term lists of two sums on the same qubits.
    pub fn plus(&self, other: &HamiltonianSum) -> Result<HamiltonianSum> {
        if self.n != other.n {
            return Err(PinqError::Dimension(format!(
                "{} vs {} qubits",
                self.n, other.n
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(HamiltonianSum { n: self.n, terms })
    }

    pub fn scaled(&self, factor: f64) -> HamiltonianSum {
        HamiltonianSum {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * factor,
                    parts: t.parts.clone(),
                })
                .collect(),
        }
    }

    /// Sorts terms by their letter strings, then by coefficient (stable).
    pub fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| {
            let ka: Vec<(&ProductOp, u64)> = a
                .parts
                .iter()
                .map(|p| (&p.op, p.weight.to_bits()))
                .collect();
            let kb: Vec<(&ProductOp, u64)> = b
                .parts
                .iter()
                .map(|p| (&p.op, p.weight.to_bits()))
                .collect();
            ka.cmp(&kb).then(a.coeff.total_cmp(&b.coeff))
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gadget_expansion_is_dyadic() {
        // |0><0| (x) I + |1><1| (x) X = (II + ZI + IX - ZX) / 2
        let t = Term::grouped(
            1.0,
            vec![
                ProductOp::parse("0I").unwrap(),
                ProductOp::parse("1X").unwrap(),
            ],
        );
        let e = t.pauli_expansion();
        let get = |s: &str| {
            let op = ProductOp::parse(s).unwrap();
            e.iter()
                .find(|(_, p)| ProductOp::from_pauli(p) == op)
                .map(|(c, _)| *c)
                .unwrap_or(0.0)
        };
        assert_eq!(get("II"), 0.5);
        assert_eq!(get("ZI"), 0.5);
        assert_eq!(get("IX"), 0.5);
        assert_eq!(get("ZX"), -0.5);
        assert_eq!(e.len(), 4);
    }

    #[test]
    fn term_norm_is_exact_on_support() {
        let t = Term::product(-0.75, ProductOp::parse("IXZI").unwrap());
        assert!((t.norm() - 0.75).abs() < 1e-14);
        assert_eq!(t.support(), vec![1, 2]);
        let h = HamiltonianSum::from_pauli_strs(2, &[(1.0, "ZI"), (1.0, "IX")]).unwrap();
        assert_eq!(h.norm_bound(), 2.0);
    }

    #[test]
    fn push_rejects_wrong_width() {
        let mut h = HamiltonianSum::new(2);
        assert!(h
            .push(Term::product(1.0, ProductOp::parse("XXX").unwrap()))
            .is_err());
        assert!(h
            .push(Term::product(f64::NAN, ProductOp::parse("XX").unwrap()))
            .is_err());
    }
}
