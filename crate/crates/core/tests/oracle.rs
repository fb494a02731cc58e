use magic_core::coupling::{coupling_matrix_full, local_field_corrections, three_body_coulomb, three_body_trap};
use magic_core::oracle::{
    build_hamiltonian, extract_sector, jacobi_eigenvalues, polaron_transform, run_oracle,
    run_oracle_with, shifted_annihilation, OracleInputs, Order, TruncatedSpace,
};
use magic_core::tensor::Tensor3;
use magic_core::{ChainModel, Configuration};

fn model(n: usize, grad: f64) -> ChainModel {
    ChainModel::build(&Configuration::yb171_130khz(n, grad).unwrap()).unwrap()
}

#[test]
fn two_ion_spin_spin_coefficient() {
    let m = model(2, 150.0);
    let r = run_oracle(&m, 10, Order::Two).unwrap();
    let want = -0.5 * m.j2()[(0, 1)];
    assert!((r.analytic["Z1Z2"] - want).abs() < 1e-12 * want.abs());
    assert!(r.relative_error("Z1Z2").unwrap() < 1e-6, "{r:?}");
    assert!(!r.truncation_flagged);
    assert!(r.unitarity_defect < 1e-12);
    assert!(r.spectrum_defect.unwrap() < 1e-12);
}

#[test]
fn three_ion_cubic_coefficients() {
    // Mirror symmetry forces J_123 = 0 in a harmonic trap. A cubic trap term
    // on one edge ion breaks the symmetry; the oracle sees Coulomb and trap
    // parts of the cubic tensor together.
    let base = Configuration::yb171_130khz(3, 150.0).unwrap();
    let chain = magic_core::chain::solve_equilibrium(&base).unwrap();
    let alpha = magic_core::cubic::coulomb_cubic_scale(&chain, &base);
    let mut cfg = base;
    cfg.alpha_n = vec![alpha, 0.0, 0.0];
    let m = ChainModel::build(&cfg).unwrap();
    let r = run_oracle(&m, 8, Order::Three).unwrap();
    let hbar = m.hbar();

    let total = three_body_coulomb(&m.c_total, &m.eps, hbar).get(0, 1, 2).unwrap();
    let trap = three_body_trap(&coupling_matrix_full(&m.eps, &m.axial), &m.resonance, &cfg.alpha_n, hbar)
        .unwrap()
        .get(0, 1, 2)
        .unwrap();
    let coulomb = three_body_coulomb(&m.c_coulomb, &m.eps, hbar).get(0, 1, 2).unwrap();
    assert!(coulomb.abs() < 1e-10 * trap.abs());
    assert!((total - trap).abs() < 1e-10 * trap.abs());

    assert!((r.analytic["Z1Z2Z3"] - total).abs() < 1e-12 * total.abs());
    assert!(r.relative_error("Z1Z2Z3").unwrap() < 1e-3, "{r:?}");
    for key in ["Z1", "Z2", "Z3", "Z1Z2", "Z1Z3", "Z2Z3"] {
        assert!(r.relative_error(key).unwrap() < 1e-3, "{key}: {r:?}");
    }
}

#[test]
fn two_ion_local_field_includes_coinciding_terms() {
    let m = model(2, 150.0);
    let r = run_oracle(&m, 10, Order::Three).unwrap();
    let lf = local_field_corrections(&m.c_total, &m.eps, &[0, 0], m.hbar()).unwrap();
    assert!(r.relative_error("Z1").unwrap() < 1e-3, "{r:?}");
    // the occupation-dependent part dominates the single-spin coefficient
    assert!((r.extracted["Z1"] / (0.5 * lf[0]) - 1.0).abs() < 0.05);
}

#[test]
fn excited_sector_follows_two_n_plus_one() {
    let m = model(2, 300.0);
    let inputs = OracleInputs::from_model(&m);
    let space = TruncatedSpace::new(2, 2, 10).unwrap();
    let h = polaron_transform(&build_hamiltonian(&inputs, &space, Order::Three).unwrap(), &inputs);
    let vac = extract_sector(&h, &[0, 0]);
    let hbar = m.hbar();
    let scale = (0..2)
        .flat_map(|i| (0..2).map(move |r| (i, r)))
        .map(|(i, r)| (m.c_total[(i, i, r)] * m.eps.eps.row(0).amax()).abs() / hbar)
        .fold(0.0, f64::max);
    for i in 0..2 {
        let mut occ = [0, 0];
        occ[i] = 1;
        let excited = extract_sector(&h, &occ);
        for n in 0..2 {
            let key = format!("Z{}", n + 1);
            let want: f64 = (0..2).map(|r| m.c_total[(i, i, r)] * m.eps.eps[(n, r)]).sum::<f64>() / hbar;
            let got = excited[&key] - vac[&key];
            assert!((got - want).abs() < 1e-4 * scale, "mode {i} ion {n}: {got} vs {want}");
        }
    }
}

#[test]
fn zero_cubic_tensor_reproduces_order_two() {
    let m = model(2, 150.0);
    let mut inputs = OracleInputs::from_model(&m);
    inputs.c = Tensor3::zeros(2);
    let two = run_oracle_with(&inputs, 6, Order::Two).unwrap();
    let three = run_oracle_with(&inputs, 6, Order::Three).unwrap();
    assert_eq!(two.extracted, three.extracted);
}

#[test]
fn dual_eigensolver_ground_state() {
    let m = model(2, 150.0);
    let inputs = OracleInputs::from_model(&m);
    let space = TruncatedSpace::new(2, 2, 6).unwrap();
    let h = build_hamiltonian(&inputs, &space, Order::Two).unwrap().to_dense();
    let library = h.clone().symmetric_eigen().eigenvalues.min();
    let jacobi = jacobi_eigenvalues(&h)[0];
    assert!((library - jacobi).abs() < 1e-10 * h.amax(), "{library} vs {jacobi}");
}

#[test]
fn spectrum_is_invariant_for_three_ions() {
    let m = model(3, 150.0);
    let r = run_oracle(&m, 4, Order::Three).unwrap();
    assert!(r.spectrum_defect.unwrap() < 1e-12);
}

#[test]
fn shifted_annihilation_converges_with_cutoff() {
    // strong gradient so the displacement tail is visible above round-off
    let m = model(2, 1000.0);
    let inputs = OracleInputs::from_model(&m);
    let mut previous = f64::INFINITY;
    for cutoff in [4, 8, 12] {
        let space = TruncatedSpace::new(2, 2, cutoff).unwrap();
        let mut worst: f64 = 0.0;
        for l in 0..2 {
            let shifted = shifted_annihilation(&inputs, &space, l);
            for (b, block) in shifted.blocks.iter().enumerate() {
                let s = space.spins(b);
                let beta = 0.5 * (0..2).map(|n| m.eps.eps[(n, l)] * s[n]).sum::<f64>();
                // compare on states with at most one phonon per mode
                for p in (0..space.block_dim()).filter(|&p| space.occupations(p).iter().all(|&o| o <= 1)) {
                    for q in (0..space.block_dim()).filter(|&q| space.occupations(q).iter().all(|&o| o <= 1)) {
                        let mut want = 0.0;
                        let (op, oq) = (space.occupations(p), space.occupations(q));
                        if p == q {
                            want += beta;
                        }
                        let others_equal = (0..2).filter(|&k| k != l).all(|k| op[k] == oq[k]);
                        if others_equal && oq[l] == op[l] + 1 {
                            want += (oq[l] as f64).sqrt();
                        }
                        worst = worst.max((block[(p, q)] - want).abs());
                    }
                }
            }
        }
        assert!(worst < previous, "cutoff {cutoff}: {worst} !< {previous}");
        previous = worst;
    }
    assert!(previous < 1e-3);
}

#[test]
fn extracted_coefficients_converge_with_cutoff() {
    let m = model(2, 2000.0);
    let runs: Vec<_> = [4, 6, 8, 10].iter().map(|&c| run_oracle(&m, c, Order::Three).unwrap()).collect();
    for key in ["Z1", "Z1Z2"] {
        let diffs: Vec<f64> = runs.windows(2).map(|w| (w[1].extracted[key] - w[0].extracted[key]).abs()).collect();
        assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{key}: {diffs:?}");
    }
    let leaks: Vec<f64> = runs.iter().map(|r| r.truncation_error_estimate).collect();
    assert!(leaks.windows(2).all(|w| w[1] < w[0]), "{leaks:?}");
}

#[test]
fn oracle_refuses_large_chains() {
    let m = model(4, 19.0);
    assert!(run_oracle(&m, 2, Order::Two).is_err());
}
