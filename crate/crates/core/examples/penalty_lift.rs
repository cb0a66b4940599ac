//! Replace a `|0>` pin by an energy penalty and compare both promise cases.
use pinq::pauli::parse_hamiltonian;
use pinq::pinning::{pin_penalty_lift, NormBound, PinSpec, PinState, PromiseBounds};
use pinq::spectral::{min_eig, pinned_min_energy, Solver};

fn main() -> pinq::Result<()> {
    let g = parse_hamiltonian("qubits 2\n1 ZI\n-0.5 XX\n0.3 IZ\n")?;
    let m = pinned_min_energy(&g, &PinSpec::single(1, PinState::Zero), Solver::Dense, 0)?.value;
    println!("pinned minimum {m:.6}");
    for (label, a, b) in [("YES", m + 0.1, m + 0.6), ("NO", m - 0.6, m - 0.1)] {
        let lift = pin_penalty_lift(&g, 1, PromiseBounds::new(a, b)?, NormBound::TermSum)?;
        let lam = min_eig(&lift.hamiltonian, Solver::Dense, 0)?.value;
        println!(
            "{label}: a={a:.3} b={b:.3} Delta={:.3} lambda_min={lam:.6} new bounds ({:.3}, {:.3})",
            lift.delta, lift.bounds.a, lift.bounds.b
        );
    }
    Ok(())
}
