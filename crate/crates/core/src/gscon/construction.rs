//! Stoquastic GSCON Hamiltonian `H'' = O' (x) I - P' (x) Q + I (x) R3`.
//!
//! Qubit layout: system `0..n`, middle register `n..n+3`, last register
//! `n+3..n+6`. `H' = H (x) R3` (R3 on the middle register) splits into a
//! stoquastic part `O'` and a strictly off-diagonal part `P'` with positive
//! entries; `Q` and the second `R3` act on the last register.

use num_complex::Complex64;

use super::{GsconInstance, InstanceMetadata, UnitaryStep};
use crate::error::{PinqError, Result};
use crate::linalg::CVec;
use crate::pauli::{is_off_diagonal, HamiltonianSum, Letter, ProductOp, Term, STRUCTURE_TOL};

pub const DEFAULT_ETA3: f64 = 1e-6;
pub const DEFAULT_ETA4: f64 = 1.0;
pub const DEFAULT_PATH_LENGTH: usize = 1000;

const R3_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];
/// `|->` from `|0>`, as the real matrix `H X`.
const MINUS_PREP: [f64; 4] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
    -std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];
const PLUS_PREP: [f64; 4] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
    -std::f64::consts::FRAC_1_SQRT_2,
];

#[derive(Debug, Clone, PartialEq)]
pub struct GsconParams {
    /// YES threshold of the source problem.
    pub alpha: f64,
    /// NO threshold of the source problem.
    pub beta: f64,
    pub eta2: Option<f64>,
    pub eta3: f64,
    pub eta4: Option<f64>,
    pub delta: Option<f64>,
    pub m: usize,
}

impl GsconParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        GsconParams {
            alpha,
            beta,
            eta2: None,
            eta3: DEFAULT_ETA3,
            eta4: None,
            delta: None,
            m: DEFAULT_PATH_LENGTH,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GsconConstruction {
    /// `H''` on `n + 6` qubits.
    pub hamiltonian: HamiltonianSum,
    /// `O'` on `n + 3` qubits.
    pub o_prime: HamiltonianSum,
    /// `P'` on `n + 3` qubits.
    pub p_prime: HamiltonianSum,
    /// Source Hamiltonian after the shift, on `n` qubits.
    pub source: HamiltonianSum,
    pub system_qubits: usize,
    /// Constant added to the source so that `alpha >= 0`.
    pub shift: f64,
    /// Shifted thresholds.
    pub alpha: f64,
    pub beta: f64,
    pub instance: GsconInstance,
}

impl GsconConstruction {
    pub fn middle(&self, i: usize) -> usize {
        self.system_qubits + i
    }

    pub fn last(&self, i: usize) -> usize {
        self.system_qubits + 3 + i
    }

    pub fn qubits(&self) -> usize {
        self.system_qubits + 6
    }
}

/// `R3 = 3/4 - (X1X2 + X2X3 + X1X3)/4` on qubits `first..first+3` of `n`.
pub fn r3_operator(n: usize, first: usize) -> HamiltonianSum {
    let mut h = HamiltonianSum::new(n);
    h.push(Term::product(0.75, ProductOp::identity(n)))
        .expect("width");
    for (a, b) in R3_PAIRS {
        let op = ProductOp::identity(n)
            .with(first + a, Letter::X)
            .with(first + b, Letter::X);
        h.push(Term::product(-0.25, op)).expect("width");
    }
    h
}

/// `Q = (X1 + X2 + X3)/3` on qubits `first..first+3` of `n`.
pub fn q_operator(n: usize, first: usize) -> HamiltonianSum {
    let mut h = HamiltonianSum::new(n);
    for i in 0..3 {
        h.push(Term::product(
            1.0 / 3.0,
            ProductOp::identity(n).with(first + i, Letter::X),
        ))
        .expect("width");
    }
    h
}

/// Three-qubit X-basis product state; `true` is `|+>`, `false` is `|->`.
pub fn middle_x_state(plus: [bool; 3]) -> CVec {
    let amp = |q: usize, bit: usize| {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        if !plus[q] && bit == 1 {
            -s
        } else {
            s
        }
    };
    (0..8)
        .map(|idx| {
            let v = amp(0, idx >> 2 & 1) * amp(1, idx >> 1 & 1) * amp(2, idx & 1);
            Complex64::new(v, 0.0)
        })
        .collect()
}

/// Splits `w X_A Z_S` into its negative part (for `O'`) and positive part (for `P'`).
///
/// On each assignment `b` of the qubits in `S` the entries equal `w (-1)^{|b|}`;
/// the projectors `P_b` route each assignment to the part with its sign.
fn sign_split(w: f64, op: &ProductOp) -> (Option<Term>, Option<Term>) {
    if op.is_diagonal() {
        return (Some(Term::product(w, op.clone())), None);
    }
    let zs: Vec<usize> = (0..op.n()).filter(|&k| op.get(k) == Letter::Z).collect();
    let (mut neg, mut pos) = (Vec::new(), Vec::new());
    for bits in 0..1usize << zs.len() {
        let mut g = op.clone();
        for (j, &k) in zs.iter().enumerate() {
            g.set(
                k,
                if bits >> j & 1 == 0 {
                    Letter::P0
                } else {
                    Letter::P1
                },
            );
        }
        let parity = if bits.count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        if w * parity > 0.0 {
            pos.push(g);
        } else {
            neg.push(g);
        }
    }
    let make = |ops: Vec<ProductOp>, c: f64| (!ops.is_empty()).then(|| Term::grouped(c, ops));
    (make(neg, -w.abs()), make(pos, w.abs()))
}

/// Replaces terms of norm above 1 by equal copies of norm at most 1.
fn split_heavy(h: HamiltonianSum) -> HamiltonianSum {
    let mut out = HamiltonianSum::new(h.n());
    for t in h.terms() {
        let copies = t.norm().ceil().max(1.0) as usize;
        for _ in 0..copies {
            out.push(Term {
                coeff: t.coeff / copies as f64,
                parts: t.parts.clone(),
            })
            .expect("width");
        }
    }
    out
}

/// Builds `H''` and an instance asking for a path from
/// `|0...0>|--->|--->` to `|0...0>|+++>|--->`.
///
/// Uniform middle-register states have energy 0, so a negative `alpha` is
/// first lifted to 0 by adding `-alpha` to `H` (and to both thresholds).
pub fn build_stoquastic_gscon(
    h: &HamiltonianSum,
    params: &GsconParams,
) -> Result<GsconConstruction> {
    if !(params.alpha < params.beta) {
        return Err(PinqError::Precondition(format!(
            "need alpha < beta, got {} and {}",
            params.alpha, params.beta
        )));
    }
    let n = h.n();
    for (index, t) in h.terms().iter().enumerate() {
        let s = t.as_pauli().ok_or_else(|| PinqError::UnsupportedTerm {
            index,
            term: t.parts[0].op.to_string(),
            reason: "not a single Pauli string".into(),
        })?;
        if s.has_y() {
            return Err(PinqError::UnsupportedTerm {
                index,
                term: s.to_string(),
                reason: "contains Y".into(),
            });
        }
    }
    let shift = (-params.alpha).max(0.0);
    let mut source = h.clone();
    if shift > 0.0 {
        source.push(Term::product(shift, ProductOp::identity(n)))?;
    }

    let n3 = n + 3;
    let r3 = r3_operator(n3, n);
    let mut o_prime = HamiltonianSum::new(n3);
    let mut p_prime = HamiltonianSum::new(n3);
    for t in source.terms() {
        let base = t.parts[0].op.extended(n3);
        for r in r3.terms() {
            let mut op = base.clone();
            for q in n..n3 {
                op.set(q, r.parts[0].op.get(q));
            }
            let (neg, pos) = sign_split(t.coeff * r.coeff, &op);
            if let Some(term) = neg {
                o_prime.push(term)?;
            }
            if let Some(term) = pos {
                debug_assert!(is_off_diagonal(&term, STRUCTURE_TOL));
                p_prime.push(term)?;
            }
        }
    }
    if let Some(i) = p_prime
        .terms()
        .iter()
        .position(|t| !is_off_diagonal(t, STRUCTURE_TOL))
    {
        return Err(PinqError::Precondition(format!(
            "P' term {i} has a diagonal part"
        )));
    }

    let n6 = n + 6;
    let mut h2 = o_prime.extended(n6);
    for t in p_prime.terms() {
        for i in 0..3 {
            let ops = t
                .parts
                .iter()
                .map(|p| p.op.extended(n6).with(n3 + i, Letter::X))
                .collect();
            h2.push(Term::grouped(-t.coeff / 3.0, ops))?;
        }
    }
    h2 = h2.plus(&r3_operator(n6, n3))?;
    let mut h2 = split_heavy(h2);
    h2.canonicalize();

    let alpha = params.alpha + shift;
    let beta = params.beta + shift;
    let eta1 = alpha;
    let eta2 = params.eta2.map(|e| e + shift).unwrap_or(beta);
    let eta3 = params.eta3;
    let eta4 = params.eta4.unwrap_or(DEFAULT_ETA4);
    let delta = params.delta.unwrap_or((eta2 - eta1).min(eta4 - eta3));
    let u_psi = (n..n6)
        .map(|q| UnitaryStep::real_1q(q, MINUS_PREP))
        .collect();
    let u_phi = (n..n3)
        .map(|q| UnitaryStep::real_1q(q, PLUS_PREP))
        .chain((n3..n6).map(|q| UnitaryStep::real_1q(q, MINUS_PREP)))
        .collect();
    let mut notes =
        vec!["eta2 recorded from input; the soundness threshold is not verified".to_string()];
    if shift > 0.0 {
        notes.push(format!(
            "source Hamiltonian shifted by {shift} so that alpha >= 0"
        ));
    }
    let instance = GsconInstance {
        k: h2.locality(),
        hamiltonian: h2.clone(),
        eta1,
        eta2,
        eta3,
        eta4,
        delta,
        l: 2,
        m: params.m,
        u_psi,
        u_phi,
        metadata: InstanceMetadata {
            alpha: Some(alpha),
            beta: Some(beta),
            shift: Some(shift),
            system_qubits: Some(n),
            notes,
        },
    };
    instance.validate()?;
    Ok(GsconConstruction {
        hamiltonian: h2,
        o_prime,
        p_prime,
        source,
        system_qubits: n,
        shift,
        alpha,
        beta,
        instance,
    })
}

/// Prepare the witness, flip the middle register with `Z` gates
/// (`Z|-> = |+>`), then undo the witness.
///
/// `flip_order` lists middle-register positions `0..3`; default `[0, 1, 2]`.
pub fn witness_traversal(
    c: &GsconConstruction,
    witness: &[UnitaryStep],
    flip_order: Option<[usize; 3]>,
) -> Result<Vec<UnitaryStep>> {
    for (index, g) in witness.iter().enumerate() {
        if g.locality() > 2 {
            return Err(PinqError::MalformedStep {
                index,
                reason: format!(
                    "witness gate acts on {} qubits, at most 2 allowed",
                    g.locality()
                ),
            });
        }
        if let Some(&q) = g.targets.iter().find(|&&q| q >= c.system_qubits) {
            return Err(PinqError::MalformedStep {
                index,
                reason: format!("witness gate touches qubit {q} outside the system register"),
            });
        }
    }
    let order = flip_order.unwrap_or([0, 1, 2]);
    let mut seen = order;
    seen.sort_unstable();
    if seen != [0, 1, 2] {
        return Err(PinqError::Precondition(format!(
            "flip order {order:?} is not a permutation of 0..3"
        )));
    }
    let mut path: Vec<UnitaryStep> = witness.to_vec();
    path.extend(
        order
            .iter()
            .map(|&i| UnitaryStep::real_1q(c.middle(i), [1.0, 0.0, 0.0, -1.0])),
    );
    path.extend(witness.iter().rev().map(UnitaryStep::adjoint));
    Ok(path)
}
