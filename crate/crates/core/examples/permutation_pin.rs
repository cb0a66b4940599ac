//! Expand a two-qubit Hamiltonian into 0/1 permutation terms.
use num_complex::Complex64;
use pinq::pauli::{is_permutation, parse_hamiltonian, to_dense, STRUCTURE_TOL};
use pinq::pinning::{effective_hamiltonian, permutation_pin};

fn main() -> pinq::Result<()> {
    let h = parse_hamiltonian("qubits 2\n0.8 ZZ\n-0.35 XI\n0.6 XZ\n")?;
    for bits in [4, 8, 16] {
        let r = permutation_pin(&h, Some(bits), None)?;
        assert!(is_permutation(&r.hamiltonian, true, STRUCTURE_TOL)?.verdict);
        let scale = r.report.scale.unwrap_or(1.0);
        let eff = effective_hamiltonian(&r.hamiltonian, &r.pin)?;
        let err = (eff * Complex64::new(scale, 0.0) - to_dense(&h)?)
            .singular_values()
            .max();
        println!(
            "Q={bits:2}: {} qubits, {} terms, locality {}, error {err:.3e}",
            r.hamiltonian.n(),
            r.hamiltonian.len(),
            r.hamiltonian.locality()
        );
    }
    Ok(())
}
