use super::{PinSpec, PinState, PromiseBounds, Reduction, ReductionReport};
use crate::error::{PinqError, Result};
use crate::pauli::{HamiltonianSum, Letter, ProductOp, Term};

/// Binary digits per coefficient when no promise gap is supplied.
pub const DEFAULT_BITS: usize = 20;
/// Beyond this the expansion exceeds double precision.
const MAX_BITS: usize = 52;
/// Relative headroom keeping every rescaled magnitude strictly below 1.
const SCALE_HEADROOM: f64 = 1e-9;

/// Smallest `Q >= 1` with `M 2^{1-Q} <= (b - a) / (4 scale)`, or
/// [`DEFAULT_BITS`] without bounds.
pub fn default_bits(terms: usize, bounds: Option<PromiseBounds>, scale: f64) -> usize {
    let Some(b) = bounds else {
        return DEFAULT_BITS;
    };
    let target = b.gap() / (4.0 * scale);
    (1..=MAX_BITS)
        .find(|&q| terms as f64 * 2f64.powi(1 - q as i32) <= target)
        .unwrap_or(MAX_BITS)
}

/// Pin angle with `sin 2a = 2^-j`.
pub fn bit_angle(j: usize) -> f64 {
    0.5 * 2f64.powi(-(j as i32)).asin()
}

/// Rewrites `H` (terms `X`, `XX`, `Z`, `ZZ`, or any `Y`-free string) into a sum
/// of 0/1 permutation terms with unit coefficients.
///
/// Qubit layout after the `n` system qubits: `z` (parity ancilla), `q0`
/// (sign ancilla), then `q1..qQ` (one per binary digit). `Z` factors become
/// the parity gadget `E_even (x) I_z + E_odd (x) X_z` with `z` pinned to
/// `|->`. Magnitudes are divided by `scale = max|c| (1 + 1e-9)` and
/// truncated to `Q` binary digits; digit `j` contributes `O (x) X_{qj}` with
/// `qj` pinned so that `<X> = 2^-j`, and negative terms also carry `X_{q0}`
/// with `q0` pinned to `|->`. The pinned effective Hamiltonian is
/// `H/scale + E` with `||E|| <= M 2^-Q`.
pub fn permutation_pin(
    h: &HamiltonianSum,
    bits: Option<usize>,
    bounds: Option<PromiseBounds>,
) -> Result<Reduction> {
    let n = h.n();
    let mut notices = Vec::new();
    let mut inputs = Vec::new();
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
        if t.coeff == 0.0 {
            notices.push(format!(
                "term {index} ({}) has coefficient 0 and was dropped",
                t.parts[0].op
            ));
            continue;
        }
        inputs.push((t.coeff, t.parts[0].op.clone()));
    }
    let m = inputs.len();
    let max = inputs.iter().fold(0.0f64, |acc, (c, _)| acc.max(c.abs()));
    let scale = if m == 0 {
        1.0
    } else {
        max * (1.0 + SCALE_HEADROOM)
    };
    let q = bits.unwrap_or_else(|| default_bits(m, bounds, scale));
    if !(1..=MAX_BITS).contains(&q) {
        return Err(PinqError::Precondition(format!(
            "bit count must lie in 1..={MAX_BITS}, got {q}"
        )));
    }

    let n_out = n + 2 + q;
    let (z, q0) = (n, n + 1);
    let mut out = HamiltonianSum::new(n_out);
    for (c, op) in &inputs {
        let gadget = parity_gadget(op, n_out, z);
        let mut x = c.abs() / scale;
        for j in 1..=q {
            x *= 2.0;
            if x < 1.0 {
                continue;
            }
            x -= 1.0;
            let ops = gadget
                .iter()
                .map(|g| {
                    let g = g.clone().with(q0 + j, Letter::X);
                    if *c < 0.0 {
                        g.with(q0, Letter::X)
                    } else {
                        g
                    }
                })
                .collect();
            out.push(Term::grouped(1.0, ops))?;
        }
    }
    out.canonicalize();

    let mut pin = PinSpec::new(vec![(z, PinState::Minus), (q0, PinState::Minus)])?;
    for j in 1..=q {
        pin.push(q0 + j, PinState::Angle(bit_angle(j)))?;
    }
    let truncation = m as f64 * 2f64.powi(-(q as i32));
    let output_bounds = match bounds {
        Some(b) => {
            let (a2, b2) = (b.a / scale + truncation, b.b / scale - truncation);
            if b2 > a2 {
                Some(PromiseBounds::new(a2, b2)?)
            } else {
                notices.push(format!("{q} bits close the rescaled promise gap"));
                None
            }
        }
        None => None,
    };
    let mut report = ReductionReport::new("permutation-pin", h, &out, pin.clone());
    report.input_bounds = bounds;
    report.output_bounds = output_bounds;
    report.truncation_bound = Some(truncation);
    report.scale = Some(scale);
    report.bits = Some(q);
    report.notices = notices;
    Ok(Reduction {
        hamiltonian: out,
        pin,
        report,
    })
}

/// `X` factors kept; `Z` factors replaced by the parity gadget on `z`.
fn parity_gadget(op: &ProductOp, n_out: usize, z: usize) -> Vec<ProductOp> {
    let base = op.extended(n_out);
    let zs: Vec<usize> = (0..op.n()).filter(|&k| op.get(k) == Letter::Z).collect();
    if zs.is_empty() {
        return vec![base];
    }
    (0..1usize << zs.len())
        .map(|bits| {
            let mut g = base.clone();
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
            g.with(
                z,
                if bits.count_ones() % 2 == 0 {
                    Letter::I
                } else {
                    Letter::X
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{is_permutation, parse_hamiltonian, STRUCTURE_TOL};
    use crate::pinning::effective_sum;

    #[test]
    fn angles_give_powers_of_two() {
        for j in 1..=10 {
            let a = bit_angle(j);
            assert!(((2.0 * a).sin() - 2f64.powi(-(j as i32))).abs() < 1e-16);
        }
    }

    #[test]
    fn single_z_becomes_parity_gadget() {
        let h = parse_hamiltonian("qubits 1\n1 Z\n").unwrap();
        // 1/(1 + 1e-9) starts with many binary ones
        let r = permutation_pin(&h, Some(3), None).unwrap();
        assert_eq!(r.hamiltonian.len(), 3);
        let first: Vec<String> = r.hamiltonian.terms()[0]
            .parts
            .iter()
            .map(|p| p.op.to_string())
            .collect();
        assert_eq!(first, ["0IIIIX", "1XIIIX"]);
        assert!(
            is_permutation(&r.hamiltonian, true, STRUCTURE_TOL)
                .unwrap()
                .verdict
        );
    }

    #[test]
    fn zero_terms_are_dropped_with_notice() {
        let h = parse_hamiltonian("qubits 1\n0 X\n0.5 X\n").unwrap();
        let r = permutation_pin(&h, Some(4), None).unwrap();
        assert_eq!(r.report.notices.len(), 1);
        assert_eq!(r.report.truncation_bound, Some(1.0 / 16.0));
        let eff = effective_sum(&r.hamiltonian, &r.pin).unwrap();
        assert_eq!(eff.n(), 1);
    }

    #[test]
    fn default_bits_follow_gap() {
        assert_eq!(default_bits(3, None, 1.0), DEFAULT_BITS);
        let b = PromiseBounds::new(0.0, 1.0).unwrap();
        // 3 * 2^{1-Q} <= 1/4  <=>  Q >= 1 + log2(12)
        assert_eq!(default_bits(3, Some(b), 1.0), 5);
    }
}
