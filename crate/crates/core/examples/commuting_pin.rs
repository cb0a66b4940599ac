//! Turn a transverse-field Ising chain into a commuting Hamiltonian.
use pinq::pauli::{is_commuting, parse_hamiltonian};
use pinq::pinning::{commuting_pin, PromiseBounds};
use pinq::spectral::{min_eig, pinned_min_energy, Solver};

fn main() -> pinq::Result<()> {
    let h = parse_hamiltonian("qubits 3\n-1 ZZI\n-1 IZZ\n-0.7 XII\n-0.7 IXI\n-0.7 IIX\n")?;
    println!("input commuting: {}", is_commuting(&h).verdict);
    let r = commuting_pin(&h, Some(PromiseBounds::new(-3.0, -2.0)?))?;
    println!("output commuting: {}", is_commuting(&r.hamiltonian).verdict);
    let lam = min_eig(&h, Solver::Dense, 0)?.value;
    let pinned = pinned_min_energy(&r.hamiltonian, &r.pin, Solver::Dense, 0)?.value;
    println!("lambda_min/2 = {:.12}, pinned = {pinned:.12}", lam / 2.0);
    println!("bounds: {:?}", r.report.output_bounds);
    Ok(())
}
