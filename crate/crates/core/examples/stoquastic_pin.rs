//! Remove the sign problem of `Z + X` with one pinned ancilla.
use pinq::pauli::{format_hamiltonian, parse_hamiltonian};
use pinq::pinning::stoquastic_pin;
use pinq::spectral::{min_eig, pinned_min_energy, Solver};

fn main() -> pinq::Result<()> {
    let h = parse_hamiltonian("qubits 1\n1 Z\n1 X\n")?;
    let r = stoquastic_pin(&h, None)?;
    print!("{}", format_hamiltonian(&r.hamiltonian));
    println!("pin: {:?}", r.pin.entries());
    let before = min_eig(&h, Solver::Dense, 0)?.value;
    let after = pinned_min_energy(&r.hamiltonian, &r.pin, Solver::Dense, 0)?.value;
    println!("ground energy {before:.12} -> pinned {after:.12}");
    Ok(())
}
