//! Compare the iterative ground-energy solver with dense diagonalization.
use pinq::pauli::HamiltonianSum;
use pinq::spectral::{min_eig, Solver};

/// Periodic transverse-field Ising ring.
fn ising_ring(n: usize, field: f64) -> pinq::Result<HamiltonianSum> {
    let mut terms = Vec::new();
    for q in 0..n {
        let mut zz = vec!['I'; n];
        zz[q] = 'Z';
        zz[(q + 1) % n] = 'Z';
        let mut x = vec!['I'; n];
        x[q] = 'X';
        terms.push((-1.0, zz.into_iter().collect::<String>()));
        terms.push((-field, x.into_iter().collect::<String>()));
    }
    let refs: Vec<(f64, &str)> = terms.iter().map(|(c, s)| (*c, s.as_str())).collect();
    HamiltonianSum::from_pauli_strs(n, &refs)
}

fn main() -> pinq::Result<()> {
    let h = ising_ring(9, 1.1)?;
    let dense = min_eig(&h, Solver::Dense, 0)?;
    let iter = min_eig(&h, Solver::Iterative, 0)?;
    println!("dense     {:.12}", dense.value);
    println!(
        "iterative {:.12} ({} iterations, residual {:.1e})",
        iter.value, iter.iterations, iter.residual
    );
    Ok(())
}
