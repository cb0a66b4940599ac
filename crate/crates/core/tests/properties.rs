//! Randomized invariants of every module.

mod common;

use common::{kron_oracle, lambda_min, proptest_config, random_hamiltonian, random_state};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use pinq::ffgauss::{self, canonical_gamma0, energy, CovMatrix, HamMatrix, Parity};
use pinq::gscon::{self, build_stoquastic_gscon, middle_x_state, GsconParams, UnitaryStep};
use pinq::pauli::{
    format_hamiltonian, is_commuting, is_permutation, is_stoquastic, parse_hamiltonian, to_dense,
    HamiltonianSum, STRUCTURE_TOL,
};
use pinq::pinning::{
    commuting_pin, effective_hamiltonian, permutation_pin, pin_penalty_lift, rotate_pin_to_zero,
    stoquastic_pin, NormBound, PinSpec, PinState, PromiseBounds,
};
use pinq::spectral::{min_eig, pinned_min_energy, Solver};
use pinq::zeno::{zeno_evolve, ZenoKind, ZenoProtocol};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense_min(h: &HamiltonianSum) -> f64 {
    lambda_min(&kron_oracle(h))
}

fn pin_state() -> impl Strategy<Value = PinState> {
    prop_oneof![
        Just(PinState::Zero),
        Just(PinState::One),
        Just(PinState::Plus),
        Just(PinState::Minus),
        (-3.0f64..3.0).prop_map(PinState::Angle),
    ]
}

proptest! {
    #![proptest_config(proptest_config(48))]

    #[test]
    fn diagonal_and_negative_x_sums_are_stoquastic(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let diag = random_hamiltonian(&mut rng, n, &["Z", "ZZ", "ZZZ"], 8);
        prop_assert!(is_stoquastic(&diag, true, STRUCTURE_TOL).unwrap().verdict);
        let mut xs = random_hamiltonian(&mut rng, n, &["X", "XX", "XXX"], 8);
        for t in 0..xs.len() {
            let c = -xs.terms()[t].coeff.abs();
            xs = HamiltonianSum::from_terms(n, xs.terms().iter().enumerate().map(|(k, term)| {
                let mut term = term.clone();
                if k == t { term.coeff = c; }
                term
            }).collect()).unwrap();
        }
        prop_assert!(is_stoquastic(&xs, true, STRUCTURE_TOL).unwrap().verdict);
        prop_assert!(is_stoquastic(&xs, false, STRUCTURE_TOL).unwrap().verdict);
    }

    #[test]
    fn stoquastic_pin_preserves_the_ground_energy(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, &["Z", "ZZ", "X", "XX", "XZ", "ZXZ"], 6);
        let r = stoquastic_pin(&h, None).unwrap();
        prop_assert!(is_stoquastic(&r.hamiltonian, true, STRUCTURE_TOL).unwrap().verdict);
        let eff = effective_hamiltonian(&r.hamiltonian, &r.pin).unwrap();
        prop_assert!((lambda_min(&eff) - dense_min(&h)).abs() < 1e-9);
    }

    #[test]
    fn commuting_pin_halves_the_ground_energy(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // Z-type and X-type strings on disjoint halves commute
        let split = n / 2;
        let mut h = HamiltonianSum::new(n);
        for t in random_hamiltonian(&mut rng, n, &["Z", "ZZ"], 4).terms() {
            if t.support().iter().all(|&q| q < split.max(1)) || split == 0 { h.push(t.clone()).unwrap(); }
        }
        for t in random_hamiltonian(&mut rng, n, &["X", "XX"], 4).terms() {
            if t.support().iter().all(|&q| q >= split) && split > 0 { h.push(t.clone()).unwrap(); }
        }
        prop_assume!(!h.is_empty() && is_commuting(&h).verdict);
        let r = commuting_pin(&h, Some(PromiseBounds::new(-1.0, 1.0).unwrap())).unwrap();
        prop_assert!(is_commuting(&r.hamiltonian).verdict);
        let eff = effective_hamiltonian(&r.hamiltonian, &r.pin).unwrap();
        prop_assert!((lambda_min(&eff) - 0.5 * dense_min(&h)).abs() < 1e-9);
        let b = r.report.output_bounds.unwrap();
        prop_assert_eq!((b.a, b.b), (-0.5, 0.5));
    }

    #[test]
    fn permutation_pin_truncation_is_bounded(seed in any::<u64>(), n in 1usize..=2, bits in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, &["Z", "X", "ZZ", "XZ"], 3);
        let r = permutation_pin(&h, Some(bits), None).unwrap();
        prop_assert!(is_permutation(&r.hamiltonian, true, STRUCTURE_TOL).unwrap().verdict);
        let scale = r.report.scale.unwrap();
        let eff = effective_hamiltonian(&r.hamiltonian, &r.pin).unwrap() * Complex64::new(scale, 0.0);
        let diff = eff - kron_oracle(&h);
        let norm = diff.singular_values().max();
        let m = h.len() as f64;
        prop_assert!(norm <= m * scale * 2f64.powi(-(bits as i32)) + 1e-12, "norm {norm}");
    }

    #[test]
    fn penalty_lift_separates_yes_and_no(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // G' acts on n system qubits plus the pin qubit at index n
        let g = random_hamiltonian(&mut rng, n + 1, &["Z", "X", "ZZ", "XX", "ZX"], 5);
        let pin = PinSpec::single(n, PinState::Zero);
        let m = pinned_min_energy(&g, &pin, Solver::Dense, 0).unwrap().value;
        let gap = rng.random_range(0.1..1.0);
        // YES: a just above the pinned minimum; NO: b just below it
        for (a, b, yes) in [(m + 1e-3, m + 1e-3 + gap, true), (m - 1e-3 - gap, m - 1e-3, false)] {
            let lift = pin_penalty_lift(&g, n, PromiseBounds::new(a, b).unwrap(), NormBound::TermSum).unwrap();
            let lam = dense_min(&lift.hamiltonian);
            if yes {
                prop_assert!(lam <= a + 1e-9);
            } else {
                prop_assert!(lam >= (a + b) / 2.0 - 1e-9, "lam {lam} < {}", (a + b) / 2.0);
            }
        }
    }

    #[test]
    fn full_pin_gives_the_product_expectation(seed in any::<u64>(), states in prop::collection::vec(pin_state(), 1..=4)) {
        let n = states.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, &["Z", "X", "ZZ", "XZ", "YY"], 5);
        let pin = PinSpec::new(states.iter().copied().enumerate().collect()).unwrap();
        let got = pinned_min_energy(&h, &pin, Solver::Dense, 0).unwrap().value;
        let phi = states.iter().fold(DVector::from_element(1, Complex64::new(1.0, 0.0)), |acc, s| {
            let [u, v] = s.amplitudes();
            acc.kronecker(&DVector::from_vec(vec![Complex64::new(u, 0.0), Complex64::new(v, 0.0)]))
        });
        let want = common::expectation(&kron_oracle(&h), phi.as_slice());
        prop_assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn rotating_a_pin_keeps_the_spectrum(seed in any::<u64>(), n in 2usize..=4, state in pin_state()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, &["Z", "X", "ZZ", "XZ", "XX"], 6);
        let pin = PinSpec::single(0, state);
        let (rot, zero_pin) = rotate_pin_to_zero(&h, &pin).unwrap();
        prop_assert!((min_eig(&rot, Solver::Dense, 0).unwrap().value - dense_min(&h)).abs() < 1e-10);
        let a = pinned_min_energy(&h, &pin, Solver::Dense, 0).unwrap().value;
        let b = pinned_min_energy(&rot, &zero_pin, Solver::Dense, 0).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn ground_energy_is_a_variational_lower_bound(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, &["Z", "X", "Y", "ZZ", "XY"], 8);
        let lam = min_eig(&h, Solver::Auto, 0).unwrap().value;
        let m = to_dense(&h).unwrap();
        for _ in 0..10 {
            let psi = random_state(&mut rng, 1 << n);
            prop_assert!(common::expectation(&m, &psi) >= lam - 1e-8);
        }
    }

    #[test]
    fn hamiltonian_text_round_trips(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, &["Z", "X", "Y", "ZZ", "XZY"], 7);
        let r = stoquastic_pin(&h.plus(&HamiltonianSum::new(n)).unwrap().clone(), None);
        let mut outputs = vec![h];
        if let Ok(r) = r { outputs.push(r.hamiltonian); }
        for out in outputs {
            let text = format_hamiltonian(&out);
            let back = parse_hamiltonian(&text).unwrap();
            prop_assert_eq!(back.terms(), out.terms());
            prop_assert_eq!(format_hamiltonian(&back), text);
        }
    }

    #[test]
    fn zeno_final_state_is_normalized(seed in any::<u64>(), steps in 1usize..40, comm in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (kind, a, b) = if comm {
            let a = random_hamiltonian(&mut rng, 2, &["Z", "ZZ"], 2);
            let b = random_hamiltonian(&mut rng, 2, &["X", "XX"], 2);
            (ZenoKind::Commuting, a, b)
        } else {
            let a = random_hamiltonian(&mut rng, 2, &["Z", "ZZ"], 2);
            let b = random_hamiltonian(&mut rng, 2, &["X", "XX"], 2).scaled(-1.0);
            let b = HamiltonianSum::from_terms(2, b.terms().iter().map(|t| {
                let mut t = t.clone();
                t.coeff = -t.coeff.abs();
                t
            }).collect()).unwrap();
            (ZenoKind::Stoquastic, a, b)
        };
        let p = ZenoProtocol::new(kind, a, b, 0.7, steps).unwrap();
        let r = zeno_evolve(&p, &random_state(&mut rng, 4)).unwrap();
        let norm: f64 = r.final_state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-12);
        if !comm {
            prop_assert!(r.error_norm < 1e-9);
            prop_assert!((r.survival_probability - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zeno_flip_probability_is_second_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_hamiltonian(&mut rng, 2, &["Z", "ZZ"], 2);
        let b = random_hamiltonian(&mut rng, 2, &["X", "XX"], 2);
        let diff = a.plus(&b.scaled(-1.0)).unwrap();
        let norm = to_dense(&diff).unwrap().singular_values().max();
        let steps = 200;
        let delta = 0.5 / steps as f64;
        let p = ZenoProtocol::new(ZenoKind::Commuting, a, b, 0.5, steps).unwrap();
        let r = zeno_evolve(&p, &random_state(&mut rng, 4)).unwrap();
        let bound = (2.0 * delta * norm / 2.0).powi(2);
        prop_assert!(r.max_step_flip <= bound * 1.05 + 1e-15, "{} > {}", r.max_step_flip, bound);
    }

    #[test]
    fn orthogonal_conjugation_keeps_purity_and_energy(seed in any::<u64>(), n in 1usize..=5, odd in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parity = if odd { Parity::Odd } else { Parity::Even };
        let g = canonical_gamma0(n, parity).rotated(&ffgauss::random_special_orthogonal(2 * n, &mut rng));
        let o = ffgauss::random_special_orthogonal(2 * n, &mut rng);
        let rotated = g.rotated(&o);
        prop_assert!((rotated.purity_defect() - g.purity_defect()).abs() < 1e-12);
        prop_assert_eq!(rotated.parity(), parity);
        let a = DMatrix::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-1.0..1.0));
        let h = HamMatrix::new(&a - a.transpose()).unwrap();
        let hr = HamMatrix::new(&o * h.matrix() * o.transpose()).unwrap();
        prop_assert!((energy(&rotated, &hr).unwrap() - energy(&g, &h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn block_diagonal_energy_sees_only_diagonal_blocks(seed in any::<u64>(), n in 1usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = canonical_gamma0(n, Parity::Even).rotated(&ffgauss::random_special_orthogonal(2 * n, &mut rng));
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let h = HamMatrix::from_block_weights(&w);
        let mut blocks = g.matrix().clone();
        for r in 0..2 * n {
            for c in 0..2 * n {
                if r / 2 != c / 2 { blocks[(r, c)] = 0.0; }
            }
        }
        let stripped = CovMatrix::new(blocks).unwrap();
        prop_assert!((energy(&g, &h).unwrap() - energy(&stripped, &h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn givens_factors_reconstruct(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let o = ffgauss::random_special_orthogonal(2 * n, &mut rng);
        let rots = ffgauss::givens_decompose(&o).unwrap();
        prop_assert!(rots.len() <= n * (2 * n - 1));
        prop_assert!((ffgauss::givens_product(&rots, 2 * n) - o).amax() < 1e-10);
    }

    #[test]
    fn path_energies_stay_in_the_envelope(seed in any::<u64>(), steps in 2usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = [rng.random_range(0.1..1.0), rng.random_range(0.1..1.0)];
        let h = HamMatrix::from_block_weights(&w);
        let start = canonical_gamma0(2, Parity::Even);
        let end = CovMatrix::new(-start.matrix()).unwrap();
        let path = ffgauss::interpolation_path(&start, &end, &h, steps).unwrap();
        let (e0, e1) = (energy(&start, &h).unwrap(), energy(&end, &h).unwrap());
        let v = ffgauss::verify_ff_path(&path, &h, f64::INFINITY).unwrap();
        prop_assert!(v.max_energy <= e0.max(e1) + path.epsilon + 1e-12);
        prop_assert!(v.max_purity_defect < 1e-8);
        prop_assert!(v.first_nonlocal_gate.is_none());
    }

    #[test]
    fn gscon_hamiltonian_is_stoquastic_with_the_expectation_identity(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, n, &["Z", "X", "ZZ", "ZX", "XX"], 4);
        let c = build_stoquastic_gscon(&h, &GsconParams::new(-0.5, 0.5)).unwrap();
        prop_assert!(is_stoquastic(&c.hamiltonian, true, STRUCTURE_TOL).unwrap().verdict);
        let hh = to_dense(&c.hamiltonian).unwrap();
        let src = to_dense(&c.source).unwrap();
        let last = middle_x_state([false; 3]);
        for bits in 1..7usize {
            let plus = [bits & 4 != 0, bits & 2 != 0, bits & 1 != 0];
            let mid = middle_x_state(plus);
            let psi = random_state(&mut rng, 1 << n);
            let full = DVector::from_column_slice(&psi)
                .kronecker(&DVector::from_column_slice(&mid))
                .kronecker(&DVector::from_column_slice(&last));
            let lhs = common::expectation(&hh, full.as_slice());
            let rhs = common::expectation(&src, &psi);
            prop_assert!((lhs - rhs).abs() < 1e-10, "middle {plus:?}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn witness_traversal_is_yes_when_the_witness_is_good(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hamiltonian(&mut rng, 2, &["Z", "X", "ZZ", "ZX", "XX"], 3);
        // witness: a random real 2-qubit rotation; alpha is its energy plus slack
        let a = DMatrix::from_fn(4, 4, |_, _| rng.random_range(-1.0..1.0));
        let q = a.qr().q();
        let u = UnitaryStep::new(vec![0, 1], q.map(|x| Complex64::new(x, 0.0))).unwrap();
        let mut psi = vec![Complex64::new(0.0, 0.0); 4];
        psi[0] = Complex64::new(1.0, 0.0);
        u.apply(&mut psi, 2);
        let e = common::expectation(&to_dense(&h).unwrap(), &psi);
        let alpha = e + 0.01;
        let c = build_stoquastic_gscon(&h, &GsconParams::new(alpha, alpha + 0.5)).unwrap();
        let path = gscon::witness_traversal(&c, &[u], None).unwrap();
        let v = gscon::verify_path(&c.instance, &path).unwrap();
        prop_assert!(v.is_yes(), "{:?}", v.outcome);
        prop_assert!(v.max_intermediate_energy <= c.alpha + 1e-9);
        // the last register stays |--->
        let nq = c.qubits();
        let mut state = c.instance.start_state();
        let minus3 = middle_x_state([false; 3]);
        for g in &path {
            g.apply(&mut state, nq);
            let mut overlap = 0.0;
            for sys_mid in 0..(1usize << (nq - 3)) {
                let block = &state[sys_mid * 8..sys_mid * 8 + 8];
                let proj: Complex64 = block.iter().zip(&minus3).map(|(x, m)| x * m.conj()).sum();
                overlap += proj.norm_sqr();
            }
            prop_assert!((overlap - 1.0).abs() < 1e-12);
        }
    }
}
