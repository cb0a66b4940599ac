//! Dynamical pinning: short evolutions under `H'` alternated with projective
//! measurement of one ancilla, post-selected on the pinned outcome.
//!
//! Stoquastic kind: `H' = A (x) I + B (x) X_q`, ancilla `|->`, measured in the
//! X basis; the post-selected dynamics follow `A - B`. Commuting kind:
//! `H' = 2A (x) |+><+| + 2B (x) |-><-|`, ancilla `|0>`, measured in the
//! computational basis; the dynamics follow `A + B`. The ancilla is the last
//! qubit.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PinqError, Result};
use crate::linalg::{self, CVec};
use crate::pauli::{
    is_commuting, is_off_diagonal, is_stoquastic, to_dense, HamiltonianSum, Letter, Part, Term,
};
use crate::pauli::{DENSE_CEILING, STRUCTURE_TOL};

/// Probability below which post-selection is reported as failed.
const SURVIVAL_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZenoKind {
    Stoquastic,
    Commuting,
}

impl FromStr for ZenoKind {
    type Err = PinqError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stoq" | "stoquastic" => Ok(ZenoKind::Stoquastic),
            "comm" | "commuting" => Ok(ZenoKind::Commuting),
            _ => Err(PinqError::Precondition(format!(
                "unknown protocol kind {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ZenoProtocol {
    kind: ZenoKind,
    a: HamiltonianSum,
    b: HamiltonianSum,
    t: f64,
    steps: usize,
}

impl ZenoProtocol {
    /// Checks the structural requirements of the protocol kind.
    pub fn new(
        kind: ZenoKind,
        a: HamiltonianSum,
        b: HamiltonianSum,
        t: f64,
        steps: usize,
    ) -> Result<Self> {
        if a.n() != b.n() {
            return Err(PinqError::Dimension(format!(
                "A has {} qubits, B has {}",
                a.n(),
                b.n()
            )));
        }
        if a.n() + 1 > DENSE_CEILING {
            return Err(PinqError::TooLarge {
                what: "Zeno propagator",
                qubits: a.n() + 1,
                ceiling: DENSE_CEILING,
            });
        }
        if steps == 0 || !t.is_finite() {
            return Err(PinqError::Precondition("need N >= 1 and finite t".into()));
        }
        match kind {
            ZenoKind::Stoquastic => {
                for (name, h) in [("A", &a), ("B", &b)] {
                    if !is_stoquastic(h, true, STRUCTURE_TOL)?.verdict {
                        return Err(PinqError::Precondition(format!(
                            "{name} is not termwise stoquastic"
                        )));
                    }
                }
                if let Some(i) = b
                    .terms()
                    .iter()
                    .position(|t| !is_off_diagonal(t, STRUCTURE_TOL))
                {
                    return Err(PinqError::Precondition(format!(
                        "B term {i} has a diagonal part"
                    )));
                }
            }
            ZenoKind::Commuting => {
                for (name, h) in [("A", &a), ("B", &b)] {
                    if let Some((i, j)) = is_commuting(h).first_pair {
                        return Err(PinqError::Precondition(format!(
                            "{name} terms {i} and {j} do not commute"
                        )));
                    }
                }
            }
        }
        Ok(ZenoProtocol {
            kind,
            a,
            b,
            t,
            steps,
        })
    }

    pub fn kind(&self) -> ZenoKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        ZenoProtocol::new(self.kind, self.a.clone(), self.b.clone(), self.t, steps)
    }

    /// `H'` on `n + 1` qubits.
    pub fn ancilla_hamiltonian(&self) -> HamiltonianSum {
        let n = self.n();
        let (la, lb, f) = match self.kind {
            ZenoKind::Stoquastic => (Letter::I, Letter::X, 1.0),
            ZenoKind::Commuting => (Letter::Plus, Letter::Minus, 2.0),
        };
        let mut out = HamiltonianSum::new(n + 1);
        for (h, letter) in [(&self.a, la), (&self.b, lb)] {
            for t in h.terms() {
                let parts = t
                    .parts
                    .iter()
                    .map(|p| Part {
                        weight: p.weight,
                        op: p.op.extended(n + 1).with(n, letter),
                    })
                    .collect();
                out.push(Term {
                    coeff: f * t.coeff,
                    parts,
                })
                .expect("widths match");
            }
        }
        out
    }

    /// `A - B` (stoquastic) or `A + B` (commuting).
    pub fn reference_hamiltonian(&self) -> HamiltonianSum {
        let sign = match self.kind {
            ZenoKind::Stoquastic => -1.0,
            ZenoKind::Commuting => 1.0,
        };
        self.a.plus(&self.b.scaled(sign)).expect("widths match")
    }

    fn reference_label(&self) -> &'static str {
        match self.kind {
            ZenoKind::Stoquastic => "A-B",
            ZenoKind::Commuting => "A+B",
        }
    }

    /// Amplitudes `(<0|a>, <1|a>)` of the pinned ancilla state.
    fn ancilla_state(&self) -> [f64; 2] {
        match self.kind {
            ZenoKind::Stoquastic => [
                std::f64::consts::FRAC_1_SQRT_2,
                -std::f64::consts::FRAC_1_SQRT_2,
            ],
            ZenoKind::Commuting => [1.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryResult {
    #[serde(skip)]
    pub final_state: CVec,
    pub survival_probability: f64,
    pub error_norm: f64,
    pub reference: &'static str,
    pub steps: usize,
    /// Largest single-step probability of leaving the pinned state.
    pub max_step_flip: f64,
    /// Set for the stoquastic kind, whose error vanishes instead of being `O(t/N)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<&'static str>,
}

const STOQUASTIC_NOTICE: &str =
    "H' commutes with I (x) X_q: survival is 1 and the post-selected error vanishes, stronger than O(t/N)";

fn check_state(psi0: &[Complex64], n: usize) -> Result<CVec> {
    if psi0.len() != 1 << n {
        return Err(PinqError::Dimension(format!(
            "state has {} amplitudes, expected {}",
            psi0.len(),
            1usize << n
        )));
    }
    let mut v = psi0.to_vec();
    if linalg::normalize(&mut v) == 0.0 {
        return Err(PinqError::Precondition("initial state is zero".into()));
    }
    Ok(v)
}

/// Post-selected Zeno trajectory from `psi0` (normalized internally).
pub fn zeno_evolve(p: &ZenoProtocol, psi0: &[Complex64]) -> Result<TrajectoryResult> {
    let psi = check_state(psi0, p.n())?;
    let u = linalg::propagator(&to_dense(&p.ancilla_hamiltonian())?, p.t / p.steps as f64);
    let reference = linalg::mat_vec(
        &linalg::propagator(&to_dense(&p.reference_hamiltonian())?, p.t),
        &psi,
    );
    evolve_with(p, &u, psi, &reference)
}

fn evolve_with(
    p: &ZenoProtocol,
    u: &DMatrix<Complex64>,
    mut psi: CVec,
    reference: &[Complex64],
) -> Result<TrajectoryResult> {
    let [a0, a1] = p.ancilla_state();
    let (a0, a1) = (Complex64::new(a0, 0.0), Complex64::new(a1, 0.0));
    let mut survival = 1.0;
    let mut max_flip: f64 = 0.0;
    let mut full = vec![Complex64::new(0.0, 0.0); 2 * psi.len()];
    for step in 0..p.steps {
        for (k, amp) in psi.iter().enumerate() {
            full[2 * k] = amp * a0;
            full[2 * k + 1] = amp * a1;
        }
        let next = linalg::mat_vec(u, &full);
        for (k, amp) in psi.iter_mut().enumerate() {
            *amp = a0 * next[2 * k] + a1 * next[2 * k + 1];
        }
        let prob = linalg::norm(&psi).powi(2);
        if prob < SURVIVAL_FLOOR {
            return Err(PinqError::SurvivalUnderflow { step });
        }
        max_flip = max_flip.max(1.0 - prob);
        survival *= prob;
        linalg::normalize(&mut psi);
    }
    let mut r = reference.to_vec();
    linalg::normalize(&mut r);
    Ok(TrajectoryResult {
        error_norm: linalg::distance(&psi, &r),
        final_state: psi,
        survival_probability: survival,
        reference: p.reference_label(),
        steps: p.steps,
        max_step_flip: max_flip,
        notice: (p.kind == ZenoKind::Stoquastic).then_some(STOQUASTIC_NOTICE),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub steps: usize,
    pub error: f64,
    pub survival: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Slope of `log error` against `log N`; `None` if some error is zero.
    pub error_slope: Option<f64>,
    /// Slope of `log (1 - survival)` against `log N`; `None` if some deficit is zero.
    pub survival_slope: Option<f64>,
}

/// Least-squares slope of `log y` against `log x`; `None` unless all values are positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Runs the protocol for every step count in `ns` (concurrently) and fits
/// the error and survival-deficit slopes.
pub fn zeno_scaling_sweep(
    p: &ZenoProtocol,
    psi0: &[Complex64],
    ns: &[usize],
) -> Result<SweepResult> {
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PinqError::Precondition(
            "step counts must be increasing".into(),
        ));
    }
    let psi = check_state(psi0, p.n())?;
    let h = to_dense(&p.ancilla_hamiltonian())?;
    let reference = linalg::mat_vec(
        &linalg::propagator(&to_dense(&p.reference_hamiltonian())?, p.t),
        &psi,
    );
    let rows: Vec<SweepRow> = ns
        .par_iter()
        .map(|&steps| {
            let q = p.with_steps(steps)?;
            let u = linalg::propagator(&h, p.t / steps as f64);
            let r = evolve_with(&q, &u, psi.clone(), &reference)?;
            Ok(SweepRow {
                steps,
                error: r.error_norm,
                survival: r.survival_probability,
            })
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.steps as f64).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let deficits: Vec<f64> = rows.iter().map(|r| 1.0 - r.survival).collect();
    Ok(SweepResult {
        error_slope: loglog_slope(&xs, &errs),
        survival_slope: loglog_slope(&xs, &deficits),
        rows,
    })
}

/// Parses a state file: one amplitude per line as `re` or `re im`; `#` comments.
pub fn parse_state(text: &str) -> Result<CVec> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = || PinqError::Parse {
            line: idx + 1,
            message: format!("invalid amplitude {line:?}"),
        };
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        match vals.as_slice() {
            [re] => out.push(Complex64::new(*re, 0.0)),
            [re, im] => out.push(Complex64::new(*re, *im)),
            _ => return Err(bad()),
        }
    }
    Ok(out)
}
