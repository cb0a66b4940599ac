use super::{with_ancilla, PinSpec, PinState, PromiseBounds, Reduction, ReductionReport};
use crate::error::{PinqError, Result};
use crate::pauli::{HamiltonianSum, Letter, Term};

/// Largest number of `Z` factors accompanying an `X` factor in one term.
const MAX_SIGN_QUBITS: usize = 8;

/// Rewrites every term with positive off-diagonal entries so that the whole
/// Hamiltonian becomes termwise stoquastic, using one ancilla `q` pinned to
/// `|->`. The pinned effective Hamiltonian equals `H` exactly.
///
/// A term `c X_A Z_S` has entry sign `c (-1)^{|b|}` on each assignment `b` of
/// the qubits in `S`. It becomes
/// `-|c| X_A (sum_{b positive} P_b (x) X_q + sum_{b negative} P_b)`,
/// where `P_b` projects `S` onto `b`; since `<-|X|-> = -1` this pins back to
/// the original term. Diagonal terms and `c X_A` with `c <= 0` pass through.
pub fn stoquastic_pin(h: &HamiltonianSum, bounds: Option<PromiseBounds>) -> Result<Reduction> {
    let anc = h.n();
    let mut out = HamiltonianSum::new(anc + 1);
    for (index, t) in h.terms().iter().enumerate() {
        let unsupported = |reason: &str| PinqError::UnsupportedTerm {
            index,
            term: t.parts[0].op.to_string(),
            reason: reason.into(),
        };
        let s = t
            .as_pauli()
            .ok_or_else(|| unsupported("not a single Pauli string"))?;
        if s.has_y() {
            return Err(unsupported("contains Y"));
        }
        let base = &t.parts[0].op;
        let sign_qubits: Vec<usize> = (0..h.n()).filter(|&k| base.get(k) == Letter::Z).collect();
        if s.is_diagonal() || (sign_qubits.is_empty() && t.coeff <= 0.0) {
            out.push(Term::product(t.coeff, with_ancilla(base, Letter::I)))?;
            continue;
        }
        if sign_qubits.len() > MAX_SIGN_QUBITS {
            return Err(unsupported("too many Z factors next to X factors"));
        }
        let mut ops = Vec::with_capacity(1 << sign_qubits.len());
        for bits in 0..1usize << sign_qubits.len() {
            let mut op = base.clone();
            for (j, &q) in sign_qubits.iter().enumerate() {
                op.set(
                    q,
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
            let positive = t.coeff * parity > 0.0;
            ops.push(with_ancilla(
                &op,
                if positive { Letter::X } else { Letter::I },
            ));
        }
        out.push(Term::grouped(-t.coeff.abs(), ops))?;
    }
    out.canonicalize();
    let pin = PinSpec::single(anc, PinState::Minus);
    let mut report = ReductionReport::new("stoquastic-pin", h, &out, pin.clone());
    report.input_bounds = bounds;
    report.output_bounds = bounds;
    Ok(Reduction {
        hamiltonian: out,
        pin,
        report,
    })
}
