//! Pinned local Hamiltonians and the reductions that produce them.
//!
//! A pin fixes some qubits to a single-qubit product state `|phi>`; the
//! pinned problem asks for the minimum of `<psi,phi|H|psi,phi>`, i.e. the
//! ground energy of the effective Hamiltonian `(I (x) <phi|) H (I (x) |phi>)`.

mod commuting;
mod penalty;
mod permutation;
mod stoquastic;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{PinqError, Result};
use crate::pauli::{to_dense, HamiltonianSum, Letter, Part, ProductOp, Term};

pub use commuting::commuting_pin;
pub use penalty::{penalty_delta, pin_penalty_lift, LiftResult, NormBound};
pub use permutation::{default_bits, permutation_pin, DEFAULT_BITS};
pub use stoquastic::stoquastic_pin;

/// Single-qubit pin state with real amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinState {
    Zero,
    One,
    Plus,
    Minus,
    /// `cos a |0> + sin a |1>`
    Angle(f64),
}

impl PinState {
    /// `(<X>, <Z>)`; `<Y>` vanishes for every real state.
    pub fn bloch_xz(self) -> (f64, f64) {
        match self {
            PinState::Zero => (0.0, 1.0),
            PinState::One => (0.0, -1.0),
            PinState::Plus => (1.0, 0.0),
            PinState::Minus => (-1.0, 0.0),
            PinState::Angle(a) => ((2.0 * a).sin(), (2.0 * a).cos()),
        }
    }

    pub fn amplitudes(self) -> [f64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            PinState::Zero => [1.0, 0.0],
            PinState::One => [0.0, 1.0],
            PinState::Plus => [h, h],
            PinState::Minus => [h, -h],
            PinState::Angle(a) => [a.cos(), a.sin()],
        }
    }

    /// `<phi|L|phi>`.
    pub fn expectation(self, letter: Letter) -> f64 {
        let [i, x, _, z] = letter.pauli_coefficients();
        let (ex, ez) = self.bloch_xz();
        i + x * ex + z * ez
    }

    /// Pauli coefficients of `V L V^T`, where `V` is a real orthogonal map
    /// with `V|phi> = |0>`.
    fn conjugate(self, c: [f64; 4]) -> [f64; 4] {
        let [i, x, y, z] = c;
        match self {
            PinState::Zero => c,
            // V = X
            PinState::One => [i, x, -y, -z],
            // V = H
            PinState::Plus => [i, z, -y, x],
            // V = XH
            PinState::Minus => [i, z, y, -x],
            // V = [[cos a, sin a], [-sin a, cos a]]
            PinState::Angle(a) => {
                let (s, co) = (2.0 * a).sin_cos();
                [i, co * x - s * z, y, s * x + co * z]
            }
        }
    }
}

impl fmt::Display for PinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PinState::Zero => f.write_str("0"),
            PinState::One => f.write_str("1"),
            PinState::Plus => f.write_str("+"),
            PinState::Minus => f.write_str("-"),
            PinState::Angle(a) => write!(f, "angle:{a}"),
        }
    }
}

impl FromStr for PinState {
    type Err = PinqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "0" => Ok(PinState::Zero),
            "1" => Ok(PinState::One),
            "+" => Ok(PinState::Plus),
            "-" => Ok(PinState::Minus),
            _ => {
                let a = s
                    .strip_prefix("angle:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .filter(|a| a.is_finite())
                    .ok_or_else(|| PinqError::Precondition(format!("unknown pin state {s:?}")))?;
                Ok(PinState::Angle(a))
            }
        }
    }
}

impl Serialize for PinState {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinEntry {
    pub qubit: usize,
    pub state: PinState,
}

/// Ordered list of pinned qubits and their states.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct PinSpec {
    entries: Vec<PinEntry>,
}

impl PinSpec {
    pub fn new(entries: Vec<(usize, PinState)>) -> Result<Self> {
        let mut spec = PinSpec::default();
        for (q, s) in entries {
            spec.push(q, s)?;
        }
        Ok(spec)
    }

    pub fn single(qubit: usize, state: PinState) -> Self {
        PinSpec {
            entries: vec![PinEntry { qubit, state }],
        }
    }

    pub fn push(&mut self, qubit: usize, state: PinState) -> Result<()> {
        if self.state_of(qubit).is_some() {
            return Err(PinqError::Precondition(format!(
                "qubit {qubit} pinned twice"
            )));
        }
        self.entries.push(PinEntry { qubit, state });
        Ok(())
    }

    /// Parses `k=state`, as in `3=+` or `0=angle:0.25`.
    pub fn parse_entry(s: &str) -> Result<(usize, PinState)> {
        let (q, st) = s.split_once('=').ok_or_else(|| {
            PinqError::Precondition(format!("pin {s:?} is not of the form k=state"))
        })?;
        let q = q
            .trim()
            .parse()
            .map_err(|_| PinqError::Precondition(format!("invalid pin qubit {q:?}")))?;
        Ok((q, st.trim().parse()?))
    }

    pub fn entries(&self) -> &[PinEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn state_of(&self, qubit: usize) -> Option<PinState> {
        self.entries
            .iter()
            .find(|e| e.qubit == qubit)
            .map(|e| e.state)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if let Some(e) = self.entries.iter().find(|e| e.qubit >= n) {
            return Err(PinqError::Precondition(format!(
                "pinned qubit {} outside {n} qubits",
                e.qubit
            )));
        }
        Ok(())
    }

    /// Unpinned qubits in ascending order.
    pub fn free_qubits(&self, n: usize) -> Vec<usize> {
        (0..n).filter(|&q| self.state_of(q).is_none()).collect()
    }
}

/// Promise thresholds: YES if the (pinned) ground energy is `<= a`, NO if `>= b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PromiseBounds {
    pub a: f64,
    pub b: f64,
    pub gap_floor: f64,
}

impl PromiseBounds {
    /// Bounds with `gap_floor = b - a`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self::with_floor(a, b, b - a)
    }

    pub fn with_floor(a: f64, b: f64, gap_floor: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(PinqError::Precondition(format!(
                "bounds need a < b, got a={a}, b={b}"
            )));
        }
        if !(gap_floor > 0.0 && b - a >= gap_floor) {
            return Err(PinqError::Precondition(format!(
                "gap floor {gap_floor} must lie in (0, b - a]"
            )));
        }
        Ok(PromiseBounds { a, b, gap_floor })
    }

    pub fn gap(&self) -> f64 {
        self.b - self.a
    }

    /// Both thresholds multiplied by a positive factor.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        PromiseBounds::new(self.a * s, self.b * s)
    }
}

/// Bookkeeping emitted by every reduction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub reduction: &'static str,
    pub input_qubits: usize,
    pub output_qubits: usize,
    pub input_locality: usize,
    pub output_locality: usize,
    pub input_terms: usize,
    pub output_terms: usize,
    pub pin: PinSpec,
    pub input_bounds: Option<PromiseBounds>,
    pub output_bounds: Option<PromiseBounds>,
    /// Operator-norm bound on the coefficient truncation error (permutation pin).
    pub truncation_bound: Option<f64>,
    /// Factor dividing every input coefficient (permutation pin).
    pub scale: Option<f64>,
    /// Binary digits per coefficient (permutation pin).
    pub bits: Option<usize>,
    /// Penalty strength (penalty lift).
    pub delta: Option<f64>,
    pub notices: Vec<String>,
}

impl ReductionReport {
    pub(crate) fn new(
        reduction: &'static str,
        input: &HamiltonianSum,
        output: &HamiltonianSum,
        pin: PinSpec,
    ) -> Self {
        ReductionReport {
            reduction,
            input_qubits: input.n(),
            output_qubits: output.n(),
            input_locality: input.locality(),
            output_locality: output.locality(),
            input_terms: input.len(),
            output_terms: output.len(),
            pin,
            input_bounds: None,
            output_bounds: None,
            truncation_bound: None,
            scale: None,
            bits: None,
            delta: None,
            notices: Vec::new(),
        }
    }
}

/// Output of a pinning reduction.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub hamiltonian: HamiltonianSum,
    pub pin: PinSpec,
    pub report: ReductionReport,
}

/// Symbolic effective Hamiltonian on the unpinned qubits (in ascending order).
///
/// Each letter on a pinned qubit is replaced by its expectation in the pin
/// state; parts whose weight vanishes are dropped.
pub fn effective_sum(h: &HamiltonianSum, pin: &PinSpec) -> Result<HamiltonianSum> {
    pin.validate(h.n())?;
    let free = pin.free_qubits(h.n());
    let mut out = HamiltonianSum::new(free.len());
    for t in h.terms() {
        let parts: Vec<Part> = t
            .parts
            .iter()
            .filter_map(|p| {
                let w = pin
                    .entries()
                    .iter()
                    .fold(p.weight, |w, e| w * e.state.expectation(p.op.get(e.qubit)));
                (w != 0.0).then(|| Part {
                    weight: w,
                    op: p.op.restricted(&free),
                })
            })
            .collect();
        if !parts.is_empty() {
            out.push(Term {
                coeff: t.coeff,
                parts,
            })?;
        }
    }
    Ok(out)
}

/// Dense effective Hamiltonian `(I (x) <phi|) H (I (x) |phi>)`.
pub fn effective_hamiltonian(h: &HamiltonianSum, pin: &PinSpec) -> Result<DMatrix<Complex64>> {
    to_dense(&effective_sum(h, pin)?)
}

/// Conjugates `h` on each pinned qubit by a real orthogonal `V` with
/// `V|phi> = |0>`, so every pin becomes `|0>` and pinned spectra are unchanged.
pub fn rotate_pin_to_zero(h: &HamiltonianSum, pin: &PinSpec) -> Result<(HamiltonianSum, PinSpec)> {
    pin.validate(h.n())?;
    let mut out = HamiltonianSum::new(h.n());
    for t in h.terms() {
        let mut parts: Vec<Part> = t.parts.clone();
        for e in pin.entries() {
            parts = parts
                .into_iter()
                .flat_map(|p| rotate_part(p, e.qubit, e.state))
                .collect();
        }
        if !parts.is_empty() {
            out.push(Term {
                coeff: t.coeff,
                parts,
            })?;
        }
    }
    let zero = PinSpec::new(
        pin.entries()
            .iter()
            .map(|e| (e.qubit, PinState::Zero))
            .collect(),
    )?;
    Ok((out, zero))
}

fn rotate_part(p: Part, qubit: usize, state: PinState) -> Vec<Part> {
    let c = state.conjugate(p.op.get(qubit).pauli_coefficients());
    if let Some((f, letter)) = Letter::from_pauli_coefficients(c) {
        return vec![Part {
            weight: p.weight * f,
            op: p.op.with(qubit, letter),
        }];
    }
    [Letter::I, Letter::X, Letter::Y, Letter::Z]
        .into_iter()
        .zip(c)
        .filter(|(_, ck)| *ck != 0.0)
        .map(|(l, ck)| Part {
            weight: p.weight * ck,
            op: p.op.clone().with(qubit, l),
        })
        .collect()
}

/// Appends one qubit carrying `letter`.
pub(crate) fn with_ancilla(op: &ProductOp, letter: Letter) -> ProductOp {
    let n = op.n();
    op.extended(n + 1).with(n, letter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigenvalues;
    use crate::pauli::parse_hamiltonian;

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        a.shape() == b.shape() && (a - b).iter().all(|z| z.norm() <= tol)
    }

    #[test]
    fn pin_state_syntax() {
        assert_eq!("+".parse::<PinState>().unwrap(), PinState::Plus);
        assert_eq!(
            "angle:0.25".parse::<PinState>().unwrap(),
            PinState::Angle(0.25)
        );
        assert!("x".parse::<PinState>().is_err());
        assert_eq!(PinSpec::parse_entry("3=-").unwrap(), (3, PinState::Minus));
        assert!(PinSpec::new(vec![(1, PinState::Zero), (1, PinState::One)]).is_err());
        let angle = PinState::Angle(0.3);
        assert_eq!(angle.to_string().parse::<PinState>().unwrap(), angle);
    }

    #[test]
    fn expectation_matches_amplitudes() {
        for s in [
            PinState::Zero,
            PinState::One,
            PinState::Plus,
            PinState::Minus,
            PinState::Angle(0.7),
        ] {
            let a = s.amplitudes();
            for l in [Letter::X, Letter::Z, Letter::Y, Letter::P1, Letter::Minus] {
                let mut v = 0.0;
                for r in 0..2 {
                    for c in 0..2 {
                        v += a[r] * a[c] * l.element(r as u8, c as u8).0;
                    }
                }
                assert!((s.expectation(l) - v).abs() < 1e-15, "{s} {l:?}");
            }
        }
    }

    #[test]
    fn pinning_plus_on_zx_leaves_z() {
        let h = parse_hamiltonian("qubits 2\n1 ZX\n").unwrap();
        let eff = effective_hamiltonian(&h, &PinSpec::single(1, PinState::Plus)).unwrap();
        let z = to_dense(&parse_hamiltonian("qubits 1\n1 Z\n").unwrap()).unwrap();
        assert!(close(&eff, &z, 0.0));
    }

    #[test]
    fn pinning_every_qubit_gives_a_number() {
        let h = parse_hamiltonian("qubits 2\n0.5 ZX\n2 IZ\n").unwrap();
        let pin = PinSpec::new(vec![(0, PinState::One), (1, PinState::Angle(0.2))]).unwrap();
        let eff = effective_hamiltonian(&h, &pin).unwrap();
        assert_eq!(eff.shape(), (1, 1));
        let want = -0.5 * (0.4f64).sin() + 2.0 * (0.4f64).cos();
        assert!((eff[(0, 0)].re - want).abs() < 1e-15);
    }

    #[test]
    fn minus_pin_rotation_maps_x_to_minus_z() {
        let h = parse_hamiltonian("qubits 2\n1 ZX\n").unwrap();
        let (r, pin) = rotate_pin_to_zero(&h, &PinSpec::single(1, PinState::Minus)).unwrap();
        assert_eq!(pin.state_of(1), Some(PinState::Zero));
        assert_eq!(r.terms()[0].parts[0].op.to_string(), "ZZ");
        assert_eq!(r.terms()[0].parts[0].weight, -1.0);
        let (same, _) = rotate_pin_to_zero(&h, &PinSpec::single(0, PinState::Zero)).unwrap();
        assert_eq!(same, h);
    }

    #[test]
    fn rotation_keeps_effective_matrix() {
        let h = parse_hamiltonian("qubits 3\n0.3 XZY\n-0.7 Z+X\n& 0.5 11I\n1.1 IXX\n").unwrap();
        for s in [
            PinState::One,
            PinState::Plus,
            PinState::Minus,
            PinState::Angle(-1.3),
        ] {
            let pin = PinSpec::new(vec![(1, s), (2, PinState::Angle(0.4))]).unwrap();
            let (r, zero) = rotate_pin_to_zero(&h, &pin).unwrap();
            let a = effective_hamiltonian(&h, &pin).unwrap();
            let b = effective_hamiltonian(&r, &zero).unwrap();
            assert!(close(&a, &b, 1e-12), "{s}");
            let full_a = hermitian_eigenvalues(&to_dense(&h).unwrap());
            let full_b = hermitian_eigenvalues(&to_dense(&r).unwrap());
            for (x, y) in full_a.iter().zip(&full_b) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
