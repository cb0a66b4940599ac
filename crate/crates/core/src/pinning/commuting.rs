use super::{with_ancilla, PinSpec, PinState, PromiseBounds, Reduction, ReductionReport};
use crate::error::{PinqError, Result};
use crate::pauli::{HamiltonianSum, Letter, Term};

/// Z-type terms `A_i` become `A_i (x) |+><+|` and X-type terms `B_j` become
/// `B_j (x) |-><-|` on a new ancilla pinned to `|0>`; the pinned effective
/// Hamiltonian is `H/2`.
///
/// Accepts single Pauli strings made only of `Z` (any weight) or only of `X`.
pub fn commuting_pin(h: &HamiltonianSum, bounds: Option<PromiseBounds>) -> Result<Reduction> {
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
        let letter = if s.is_diagonal() {
            Letter::Plus
        } else if s.z_mask() == 0 {
            Letter::Minus
        } else {
            return Err(unsupported("mixes X and Z factors"));
        };
        out.push(Term::product(t.coeff, with_ancilla(&t.parts[0].op, letter)))?;
    }
    out.canonicalize();
    let pin = PinSpec::single(anc, PinState::Zero);
    let mut report = ReductionReport::new("commuting-pin", h, &out, pin.clone());
    report.input_bounds = bounds;
    report.output_bounds = bounds.map(|b| b.scaled(0.5)).transpose()?;
    Ok(Reduction {
        hamiltonian: out,
        pin,
        report,
    })
}
