//! Reference values for a 171Yb+ chain at omega_z = 2π·130 kHz.

use magic_core::coupling::{local_field_corrections, three_body_coulomb};
use magic_core::cubic::coulomb_cubic_scale;
use magic_core::{to_hz, ChainModel, Configuration};

fn model(n: usize, grad: f64) -> ChainModel {
    ChainModel::build(&Configuration::yb171_130khz(n, grad).unwrap()).unwrap()
}

fn near(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

#[test]
fn fifteen_ion_edge_field_rivals_the_strongest_coupling() {
    let m = model(15, 19.0);
    let j = m.j2();
    let j_max = (0..15).flat_map(|i| (i + 1..15).map(move |k| (i, k))).map(|(i, k)| j[(i, k)]).fold(0.0, f64::max);
    assert!(near(to_hz(j_max), 15.1, 0.01), "{}", to_hz(j_max));
    assert!(near(to_hz(j[(0, 1)]), to_hz(j_max), 1e-12));

    let lf = local_field_corrections(&m.c_total, &m.eps, &[0; 15], m.hbar()).unwrap();
    assert!(near(to_hz(lf[0].abs()), 11.9, 0.01), "{}", to_hz(lf[0]));
    assert!(lf[0] * lf[14] < 0.0);
}

#[test]
fn coulomb_anharmonicity_energy_scale() {
    let cfg = Configuration::yb171_130khz(5, 150.0).unwrap();
    let chain = magic_core::chain::solve_equilibrium(&cfg).unwrap();
    let dz = cfg.oscillator_width(cfg.omega_z);
    let ratio = coulomb_cubic_scale(&chain, &cfg) * dz.powi(3) / (cfg.constants().hbar * cfg.omega_z);
    assert!(near(ratio, 0.004, 0.1), "{ratio}");
}

#[test]
fn centre_of_mass_mode_sits_at_the_trap_frequency() {
    for n in [2, 5, 15, 40] {
        let m = model(n, 19.0);
        assert!(near(m.axial.nu[0], m.cfg.omega_z, 1e-10), "N = {n}");
    }
}

#[test]
fn coulomb_three_body_coupling_is_millihertz() {
    let m = model(5, 150.0);
    let j3 = three_body_coulomb(&m.c_total, &m.eps, m.hbar());
    assert!(near(to_hz(j3.max_abs_value()), 0.006, 0.2));
}
