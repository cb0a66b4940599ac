use serde::Serialize;

use super::{PinSpec, PromiseBounds, ReductionReport};
use crate::error::{PinqError, Result};
use crate::linalg::hermitian_eigenvalues;
use crate::pauli::{to_dense, HamiltonianSum, Letter, ProductOp, Term};

/// Source of the norm bound `d >= ||G'||` entering the penalty strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum NormBound {
    /// Sum of exact term norms.
    TermSum,
    /// Dense operator norm (small instances only).
    Exact,
    Given(f64),
}

#[derive(Debug, Clone)]
pub struct LiftResult {
    pub hamiltonian: HamiltonianSum,
    pub bounds: PromiseBounds,
    pub delta: f64,
    pub d: f64,
    pub report: ReductionReport,
}

/// `Delta = (b + a)/2 + d (2d/(b - a) + 1)`.
pub fn penalty_delta(a: f64, b: f64, d: f64) -> Result<f64> {
    if b <= a {
        return Err(PinqError::Precondition(format!(
            "need a < b, got a={a}, b={b}"
        )));
    }
    if !(d >= 0.0 && d.is_finite()) {
        return Err(PinqError::Precondition(format!(
            "norm bound must be finite and >= 0, got {d}"
        )));
    }
    Ok((b + a) / 2.0 + d * (2.0 * d / (b - a) + 1.0))
}

/// Removes a `|0>` pin on `pin_qubit` by adding `Delta |1><1|` there.
///
/// YES instances (pinned minimum `<= a`) keep ground energy `<= a`; NO
/// instances (pinned minimum `>= b`) get ground energy `>= (a + b)/2`.
pub fn pin_penalty_lift(
    g: &HamiltonianSum,
    pin_qubit: usize,
    bounds: PromiseBounds,
    norm: NormBound,
) -> Result<LiftResult> {
    if pin_qubit >= g.n() {
        return Err(PinqError::Precondition(format!(
            "pin qubit {pin_qubit} outside {} qubits",
            g.n()
        )));
    }
    let d = match norm {
        NormBound::TermSum => g.norm_bound(),
        NormBound::Exact => hermitian_eigenvalues(&to_dense(g)?)
            .into_iter()
            .fold(0.0f64, |m, v| m.max(v.abs())),
        NormBound::Given(d) => d,
    };
    let delta = penalty_delta(bounds.a, bounds.b, d)?;
    let mut out = g.clone();
    out.push(Term::product(
        delta,
        ProductOp::identity(g.n()).with(pin_qubit, Letter::P1),
    ))?;
    let new_bounds = PromiseBounds::new(bounds.a, (bounds.a + bounds.b) / 2.0)?;
    let mut report = ReductionReport::new("unpin-penalty", g, &out, PinSpec::default());
    report.input_bounds = Some(bounds);
    report.output_bounds = Some(new_bounds);
    report.delta = Some(delta);
    Ok(LiftResult {
        hamiltonian: out,
        bounds: new_bounds,
        delta,
        d,
        report,
    })
}
