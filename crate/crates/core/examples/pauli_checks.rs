//! Parse a Hamiltonian and run the structural checks.
use pinq::pauli::{is_commuting, is_permutation, is_stoquastic, parse_hamiltonian, STRUCTURE_TOL};

fn main() -> pinq::Result<()> {
    let h = parse_hamiltonian("qubits 3\n-1 XXI\n-1 IXX\n0.5 ZIZ\n")?;
    println!(
        "{} qubits, {} terms, locality {}",
        h.n(),
        h.len(),
        h.locality()
    );
    println!(
        "stoquastic (termwise): {}",
        is_stoquastic(&h, true, STRUCTURE_TOL)?.verdict
    );
    println!(
        "stoquastic (assembled): {}",
        is_stoquastic(&h, false, STRUCTURE_TOL)?.verdict
    );
    println!("commuting: {}", is_commuting(&h).verdict);
    println!(
        "permutation: {}",
        is_permutation(&h, true, STRUCTURE_TOL)?.verdict
    );
    Ok(())
}
