//! Three-spin couplings from a local cubic trap anharmonicity.

use nalgebra::DMatrix;

use super::ThreeBodyMap;
use crate::config::Configuration;
use crate::error::{Error, Result};
use crate::field::ResonanceProfile;

/// `hbar J_ijk = sum_n alpha_n J_in J_jn J_kn / domega_n^3`, returned in rad/s.
/// `j_full` must include the diagonal.
pub fn three_body_trap(
    j_full: &DMatrix<f64>,
    res: &ResonanceProfile,
    alpha_n: &[f64],
    hbar: f64,
) -> Result<ThreeBodyMap> {
    let n = j_full.nrows();
    if alpha_n.len() != n || res.n_ions() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} anharmonicities, {} resonance entries for {n} ions",
            alpha_n.len(),
            res.n_ions()
        )));
    }
    let mut weights = vec![0.0; n];
    for (m, (&a, &d)) in alpha_n.iter().zip(&res.domega).enumerate() {
        if a == 0.0 {
            continue;
        }
        if d == 0.0 {
            return Err(Error::ZeroGradient { ion: m });
        }
        weights[m] = a / (d * d * d);
    }
    Ok(ThreeBodyMap::from_fn(n, |i, j, k| {
        (0..n)
            .map(|m| weights[m] * j_full[(i, m)] * j_full[(j, m)] * j_full[(k, m)])
            .sum::<f64>()
            / hbar
    }))
}

/// Centre-of-mass Lamb-Dicke parameter `|domega| dz / (omega_z sqrt N)` with
/// `dz = sqrt(hbar / 2 m omega_z)`.
pub fn center_of_mass_lamb_dicke(cfg: &Configuration, domega: f64) -> f64 {
    domega.abs() * cfg.oscillator_width(cfg.omega_z) / (cfg.omega_z * (cfg.n_ions as f64).sqrt())
}

/// Order-of-magnitude three-spin strength `alpha dz^3 eps^3 / (sqrt N hbar)`, rad/s.
pub fn trap_estimate(cfg: &Configuration, alpha: f64, domega: f64) -> f64 {
    let eps = center_of_mass_lamb_dicke(cfg, domega);
    let dz = cfg.oscillator_width(cfg.omega_z);
    alpha * dz.powi(3) * eps.powi(3) / ((cfg.n_ions as f64).sqrt() * cfg.constants().hbar)
}

/// Upper bound `eps / sqrt N` on the achievable ratio J3 / J2.
pub fn stability_bound(eps: f64, n_ions: usize) -> f64 {
    eps / (n_ions as f64).sqrt()
}

/// Anharmonicity `alpha dz^3 / (hbar omega_z)` needed for J3 = lambda J2.
pub fn anharmonicity_ratio(lambda: f64, n_ions: usize, eps: f64) -> f64 {
    lambda * (n_ions as f64).sqrt() / eps
}
