//! Zeno-pinned simulation of `A - B` (stoquastic) and `A + B` (commuting).
use num_complex::Complex64;
use pinq::pauli::parse_hamiltonian;
use pinq::zeno::{zeno_evolve, zeno_scaling_sweep, ZenoKind, ZenoProtocol};

fn main() -> pinq::Result<()> {
    let a = parse_hamiltonian("qubits 1\n1 Z\n")?;
    let psi = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];

    let b = parse_hamiltonian("qubits 1\n-1 X\n")?;
    let p = ZenoProtocol::new(ZenoKind::Stoquastic, a.clone(), b, 1.0, 10)?;
    let r = zeno_evolve(&p, &psi)?;
    println!(
        "stoquastic N=10: error {:.2e}, survival {:.12}",
        r.error_norm, r.survival_probability
    );

    let b = parse_hamiltonian("qubits 1\n1 X\n")?;
    let p = ZenoProtocol::new(ZenoKind::Commuting, a, b, 1.0, 50)?;
    let s = zeno_scaling_sweep(&p, &psi, &[50, 100, 200, 400])?;
    for row in &s.rows {
        println!(
            "commuting N={:4}: error {:.3e}, survival {:.6}",
            row.steps, row.error, row.survival
        );
    }
    println!(
        "slopes: error {:?}, survival deficit {:?}",
        s.error_slope, s.survival_slope
    );
    Ok(())
}
