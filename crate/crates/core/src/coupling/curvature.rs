//! Three-spin couplings from field curvature, `J_nij = gamma_n J_ni J_nj`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::ThreeBodyMap;
use crate::config::Configuration;
use crate::field::ResonanceProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEntry {
    /// Ion carrying the curvature.
    pub n: usize,
    /// Unordered partner pair, `pair[0] < pair[1]`, both distinct from `n`.
    pub pair: [usize; 2],
    /// rad/s
    pub value: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurvatureCouplings {
    /// Unsymmetrized `J_nij`; symmetric in `(i, j)` by construction.
    pub unsymmetrized: Vec<CurvatureEntry>,
    /// `J~_ijk = gamma_i J_ij J_ik + gamma_j J_ji J_jk + gamma_k J_ki J_kj`.
    pub symmetrized: ThreeBodyMap,
}

impl CurvatureCouplings {
    pub fn get(&self, n: usize, i: usize, j: usize) -> Option<f64> {
        let pair = [i.min(j), i.max(j)];
        self.unsymmetrized
            .iter()
            .find(|e| e.n == n && e.pair == pair)
            .map(|e| e.value)
    }
}

/// Both curvature maps from the coupling matrix and the per-ion gamma.
/// Ions with undefined gamma (no gradient) contribute nothing: their
/// Lamb-Dicke row, and hence the underlying sum, vanishes.
pub fn three_body_curvature(j: &DMatrix<f64>, res: &ResonanceProfile) -> CurvatureCouplings {
    let n = j.nrows();
    let gamma: Vec<f64> = res.gamma.iter().map(|g| g.unwrap_or(0.0)).collect();
    let jnij = |m: usize, a: usize, b: usize| gamma[m] * j[(m, a)] * j[(m, b)];

    let mut unsymmetrized = Vec::new();
    for m in 0..n {
        for a in (0..n).filter(|&a| a != m) {
            for b in (a + 1..n).filter(|&b| b != m) {
                unsymmetrized.push(CurvatureEntry {
                    n: m,
                    pair: [a, b],
                    value: jnij(m, a, b),
                });
            }
        }
    }
    let symmetrized = ThreeBodyMap::from_fn(n, |a, b, c| jnij(a, b, c) + jnij(b, a, c) + jnij(c, a, b));
    CurvatureCouplings {
        unsymmetrized,
        symmetrized,
    }
}

/// `d2omega dz^2 eps^2 / N` with centre-of-mass width and Lamb-Dicke parameter, rad/s.
pub fn curvature_estimate(cfg: &Configuration, domega: f64, d2omega: f64) -> f64 {
    let eps = super::center_of_mass_lamb_dicke(cfg, domega);
    let dz = cfg.oscillator_width(cfg.omega_z);
    d2omega * dz * dz * eps * eps / cfg.n_ions as f64
}
