use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest qubit count a [`PauliString`] can address (one bit per qubit in a `u64`).
pub const MAX_QUBITS: usize = 64;

/// Single-qubit operator letters.
///
/// Besides the Pauli matrices the alphabet carries the four rank-one
/// projectors used by the pinning gadgets, so gadget terms such as
/// `|0><0| (x) I + |1><1| (x) X` can be written without expanding them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
    /// `|0><0|`
    P0,
    /// `|1><1|`
    P1,
    /// `|+><+|`
    Plus,
    /// `|-><-|`
    Minus,
}

impl Letter {
    pub fn from_char(c: char) -> Option<Letter> {
        Some(match c {
            'I' => Letter::I,
            'X' => Letter::X,
            'Y' => Letter::Y,
            'Z' => Letter::Z,
            '0' => Letter::P0,
            '1' => Letter::P1,
            '+' => Letter::Plus,
            '-' => Letter::Minus,
            _ => return None,
        })
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
            Letter::P0 => '0',
            Letter::P1 => '1',
            Letter::Plus => '+',
            Letter::Minus => '-',
        }
    }

    /// Coefficients `(i, x, y, z)` of the letter in the Pauli basis.
    pub fn pauli_coefficients(self) -> [f64; 4] {
        match self {
            Letter::I => [1.0, 0.0, 0.0, 0.0],
            Letter::X => [0.0, 1.0, 0.0, 0.0],
            Letter::Y => [0.0, 0.0, 1.0, 0.0],
            Letter::Z => [0.0, 0.0, 0.0, 1.0],
            Letter::P0 => [0.5, 0.0, 0.0, 0.5],
            Letter::P1 => [0.5, 0.0, 0.0, -0.5],
            Letter::Plus => [0.5, 0.5, 0.0, 0.0],
            Letter::Minus => [0.5, -0.5, 0.0, 0.0],
        }
    }

    /// Recognize a letter (up to a real factor) from Pauli-basis coefficients.
    pub fn from_pauli_coefficients(c: [f64; 4]) -> Option<(f64, Letter)> {
        let nz: Vec<usize> = (0..4).filter(|&k| c[k] != 0.0).collect();
        match nz.as_slice() {
            [k] => Some((c[*k], [Letter::I, Letter::X, Letter::Y, Letter::Z][*k])),
            [0, 3] if c[0] == c[3] => Some((2.0 * c[0], Letter::P0)),
            [0, 3] if c[0] == -c[3] => Some((2.0 * c[0], Letter::P1)),
            [0, 1] if c[0] == c[1] => Some((2.0 * c[0], Letter::Plus)),
            [0, 1] if c[0] == -c[1] => Some((2.0 * c[0], Letter::Minus)),
            _ => None,
        }
    }

    pub fn is_pauli(self) -> bool {
        matches!(self, Letter::I | Letter::X | Letter::Y | Letter::Z)
    }

    pub fn is_diagonal(self) -> bool {
        matches!(self, Letter::I | Letter::Z | Letter::P0 | Letter::P1)
    }

    /// `<a|L|b>` for computational basis bits `a`, `b` (real part, imaginary part).
    pub fn element(self, row: u8, col: u8) -> (f64, f64) {
        match (self, row, col) {
            (Letter::I, r, c) => (if r == c { 1.0 } else { 0.0 }, 0.0),
            (Letter::X, r, c) => (if r != c { 1.0 } else { 0.0 }, 0.0),
            (Letter::Y, 0, 1) => (0.0, -1.0),
            (Letter::Y, 1, 0) => (0.0, 1.0),
            (Letter::Y, _, _) => (0.0, 0.0),
            (Letter::Z, 0, 0) => (1.0, 0.0),
            (Letter::Z, 1, 1) => (-1.0, 0.0),
            (Letter::Z, _, _) => (0.0, 0.0),
            (Letter::P0, 0, 0) => (1.0, 0.0),
            (Letter::P0, _, _) => (0.0, 0.0),
            (Letter::P1, 1, 1) => (1.0, 0.0),
            (Letter::P1, _, _) => (0.0, 0.0),
            (Letter::Plus, _, _) => (0.5, 0.0),
            (Letter::Minus, r, c) => (if r == c { 0.5 } else { -0.5 }, 0.0),
        }
    }
}

/// Tensor product of Pauli matrices on `n` qubits in symplectic form.
///
/// Qubit `k` corresponds to bit `k` of both masks. A qubit with both bits
/// set carries `Y = i X Z`, so the string always denotes the Hermitian
/// product of the usual Pauli matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

fn mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        PauliString { n, x: 0, z: 0 }
    }

    /// Builds a string from masks. Panics if a mask has bits at or above `n`.
    pub fn new(n: usize, x: u64, z: u64) -> Self {
        assert!(n <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        assert!(
            x & !mask(n) == 0 && z & !mask(n) == 0,
            "mask exceeds {n} qubits"
        );
        PauliString { n, x, z }
    }

    pub fn single(n: usize, qubit: usize, letter: Letter) -> Self {
        let mut s = PauliString::identity(n);
        s.set(qubit, letter);
        s
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn set(&mut self, qubit: usize, letter: Letter) {
        assert!(qubit < self.n);
        let bit = 1u64 << qubit;
        self.x &= !bit;
        self.z &= !bit;
        match letter {
            Letter::I => {}
            Letter::X => self.x |= bit,
            Letter::Y => {
                self.x |= bit;
                self.z |= bit
            }
            Letter::Z => self.z |= bit,
            other => panic!("{other:?} is not a Pauli letter"),
        }
    }

    pub fn get(&self, qubit: usize) -> Letter {
        let bit = 1u64 << qubit;
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn has_y(&self) -> bool {
        self.x & self.z != 0
    }

    /// Exact commutation test: the symplectic form `x1.z2 + z1.x2` is even.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Product `self * other = i^phase * result`, with `phase` in `0..4`.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        assert_eq!(self.n, other.n);
        let x3 = self.x ^ other.x;
        let z3 = self.z ^ other.z;
        let e = (self.x & self.z).count_ones() as i64
            + (other.x & other.z).count_ones() as i64
            + 2 * (self.z & other.x).count_ones() as i64
            - (x3 & z3).count_ones() as i64;
        (
            e.rem_euclid(4) as u8,
            PauliString {
                n: self.n,
                x: x3,
                z: z3,
            },
        )
    }

    /// Pads with identities up to `n` qubits.
    pub fn extended(&self, n: usize) -> PauliString {
        assert!(n >= self.n);
        PauliString::new(n, self.x, self.z)
    }

    /// Masks re-expressed in basis-index bit order (qubit 0 is the most
    /// significant bit of a computational-basis index).
    pub fn index_masks(&self) -> (u64, u64) {
        (reverse_bits(self.x, self.n), reverse_bits(self.z, self.n))
    }
}

/// Mirrors the low `n` bits of `v`.
pub(crate) fn reverse_bits(v: u64, n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    v.reverse_bits() >> (64 - n)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.n {
            write!(f, "{}", self.get(k).to_char())?;
        }
        Ok(())
    }
}
