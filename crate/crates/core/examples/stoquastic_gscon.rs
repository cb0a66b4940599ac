//! Build a stoquastic ground-space connectivity instance and check a traversal.
use pinq::gscon::{build_stoquastic_gscon, verify_path, witness_traversal, GsconParams};
use pinq::pauli::parse_hamiltonian;

fn main() -> pinq::Result<()> {
    let h = parse_hamiltonian("qubits 2\n-1 ZZ\n")?;
    let c = build_stoquastic_gscon(&h, &GsconParams::new(-0.9, 0.5))?;
    println!(
        "{} qubits, {} terms, locality {}, shifted alpha {:.3}",
        c.qubits(),
        c.hamiltonian.len(),
        c.hamiltonian.locality(),
        c.alpha
    );
    let path = witness_traversal(&c, &[], None)?;
    let v = verify_path(&c.instance, &path)?;
    println!(
        "{} steps: {:?}, max energy {:.3e}, final distance {:.3e}",
        path.len(),
        v.outcome,
        v.max_intermediate_energy,
        v.final_distance
    );
    Ok(())
}
