//! Interpolate between two pure Gaussian states with two-mode rotations.
use pinq::ffgauss::{
    canonical_gamma0, energy, interpolation_path, verify_ff_path, CovMatrix, HamMatrix, Parity,
};

fn main() -> pinq::Result<()> {
    let h = HamMatrix::from_block_weights(&[1.0, 0.5, 0.25]);
    let start = canonical_gamma0(3, Parity::Even);
    // flip the first two modes; flipping an odd number would change the parity
    let mut flipped = start.matrix().clone();
    flipped.view_mut((0, 0), (4, 4)).neg_mut();
    let end = CovMatrix::new(flipped)?;
    println!(
        "E(start) = {:.6}, E(end) = {:.6}",
        energy(&start, &h)?,
        energy(&end, &h)?
    );
    for steps in [8, 32, 128] {
        let path = interpolation_path(&start, &end, &h, steps)?;
        let v = verify_ff_path(&path, &h, f64::INFINITY)?;
        println!(
            "N={steps:3}: {} gates, epsilon {:.2e}, purity defect {:.2e}, max energy {:.6}",
            path.gates.len(),
            path.epsilon,
            v.max_purity_defect,
            v.max_energy
        );
    }
    Ok(())
}
