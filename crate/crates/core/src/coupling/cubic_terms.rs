//! Terms generated by a cubic potential after the polaron transformation.

use serde::{Deserialize, Serialize};

use super::{LambDickeMatrix, ThreeBodyMap};
use crate::chain::ModeDecomposition;
use crate::cubic::CubicTensor;
use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// `C_ijk = sum B_mnl S_mi S_nj S_lk dz_i dz_j dz_k`, J.
pub fn mode_frame_cubic(b: &CubicTensor, modes: &ModeDecomposition) -> Tensor3 {
    b.values.transform(&modes.scaled_participation())
}

/// `T_ijk = sum_lrs C_lrs eps_il eps_jr eps_ks`, J, over all ion triples.
pub fn three_spin_tensor(c: &Tensor3, eps: &LambDickeMatrix) -> Tensor3 {
    c.transform(&eps.eps.transpose())
}

/// Coefficient of `hbar Z_i Z_j Z_k` for each `i < j < k`, rad/s.
///
/// Expanding `(1/6) sum C (X + y)^3` with `y_l = sum_n eps_nl Z_n` produces
/// every ordering of a distinct triple once, so the coefficient of the
/// ordered product is `T_ijk` itself.
pub fn three_body_coulomb(c: &Tensor3, eps: &LambDickeMatrix, hbar: f64) -> ThreeBodyMap {
    let t = three_spin_tensor(c, eps);
    ThreeBodyMap::from_fn(t.dim(), |i, j, k| t[(i, j, k)] / hbar)
}

/// Single-spin terms left over from the cubic spin polynomial when two or
/// three indices coincide (`Z_n^2 = 1`), rad/s per ion.
pub fn coinciding_index_fields(c: &Tensor3, eps: &LambDickeMatrix, hbar: f64) -> Vec<f64> {
    let t = three_spin_tensor(c, eps);
    let n = t.dim();
    (0..n)
        .map(|m| {
            let pairs: f64 = (0..n).map(|a| t[(a, a, m)]).sum();
            (3.0 * pairs - 2.0 * t[(m, m, m)]) / (6.0 * hbar)
        })
        .collect()
}

/// `sum_ik C_iik eps_nk (2 n_i + 1) / hbar` per ion, rad/s.
pub fn local_field_corrections(
    c: &Tensor3,
    eps: &LambDickeMatrix,
    occupations: &[u32],
    hbar: f64,
) -> Result<Vec<f64>> {
    let modes = c.dim();
    if occupations.len() != modes {
        return Err(Error::DimensionMismatch(format!(
            "{} occupations for {modes} modes",
            occupations.len()
        )));
    }
    // w_k = sum_i C_iik (2 n_i + 1)
    let w: Vec<f64> = (0..modes)
        .map(|k| {
            (0..modes)
                .map(|i| c[(i, i, k)] * (2.0 * occupations[i] as f64 + 1.0))
                .sum()
        })
        .collect();
    Ok((0..eps.eps.nrows())
        .map(|n| (0..modes).map(|k| w[k] * eps.eps[(n, k)]).sum::<f64>() / hbar)
        .collect())
}

/// Largest spin-phonon strengths discarded in the rotating-wave argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinPhononMagnitudes {
    /// max |C_ijk eps_nj eps_mk| / hbar, rad/s.
    pub two_body_max: f64,
    /// max |C_ijk eps_nk| / hbar, rad/s.
    pub pair_max: f64,
}

pub fn spin_phonon_magnitudes(c: &Tensor3, eps: &LambDickeMatrix, hbar: f64) -> SpinPhononMagnitudes {
    let n = c.dim();
    // ion indices are free, so each factor maximizes independently
    let col_max: Vec<f64> = (0..n).map(|k| eps.eps.column(k).amax()).collect();
    let mut two_body: f64 = 0.0;
    let mut pair: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = c[(i, j, k)].abs();
                two_body = two_body.max(v * col_max[j] * col_max[k]);
                pair = pair.max(v * col_max[k]);
            }
        }
    }
    SpinPhononMagnitudes {
        two_body_max: two_body / hbar,
        pair_max: pair / hbar,
    }
}

/// Closest approach to a two-to-one conversion resonance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceGap {
    /// min |nu_i + nu_j - nu_k|, rad/s.
    pub gap: f64,
    /// Minimizing modes (i <= j, k).
    pub modes: [usize; 3],
}

pub fn phonon_resonance_gap(modes: &ModeDecomposition) -> ResonanceGap {
    let nu = &modes.nu;
    let mut best = ResonanceGap {
        gap: f64::INFINITY,
        modes: [0, 0, 0],
    };
    for i in 0..nu.len() {
        for j in i..nu.len() {
            for (k, nk) in nu.iter().enumerate() {
                let d = (nu[i] + nu[j] - nk).abs();
                if d < best.gap {
                    best = ResonanceGap { gap: d, modes: [i, j, k] };
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{axial_modes, solve_equilibrium};
    use crate::config::Configuration;
    use crate::coupling::lamb_dicke;
    use crate::cubic::cubic_tensor_axial;
    use crate::field::{resonance_profile, FieldProfile};
    use crate::to_hz;

    struct Setup {
        cfg: Configuration,
        modes: ModeDecomposition,
        eps: LambDickeMatrix,
        c: Tensor3,
    }

    fn setup(n: usize, grad: f64) -> Setup {
        let cfg = Configuration::yb171_130khz(n, grad).unwrap();
        let chain = solve_equilibrium(&cfg).unwrap();
        let modes = axial_modes(&chain, &cfg).unwrap();
        let res = resonance_profile(&FieldProfile::from_config(&cfg), &chain, &cfg);
        let eps = lamb_dicke(&modes, &res).unwrap();
        let c = mode_frame_cubic(&cubic_tensor_axial(&chain, &cfg), &modes);
        Setup { cfg, modes, eps, c }
    }

    #[test]
    fn mode_frame_tensor_is_symmetric() {
        let s = setup(6, 19.0);
        assert!(s.c.symmetry_defect() < 1e-10);
    }

    #[test]
    fn single_ion_has_no_cubic_couplings() {
        let s = setup(1, 150.0);
        let hbar = s.cfg.constants().hbar;
        assert_eq!(s.c.max_abs(), 0.0);
        assert!(three_body_coulomb(&s.c, &s.eps, hbar).is_empty());
        assert_eq!(local_field_corrections(&s.c, &s.eps, &[0], hbar).unwrap(), vec![0.0]);
    }

    #[test]
    fn five_ion_edge_fields() {
        let s = setup(5, 150.0);
        let hbar = s.cfg.constants().hbar;
        let lf = local_field_corrections(&s.c, &s.eps, &[0; 5], hbar).unwrap();
        assert!((to_hz(lf[0].abs()) - 49.2).abs() < 0.5, "{lf:?}");
        assert!((lf[0] + lf[4]).abs() < 1e-8 * lf[0].abs());
        assert!(lf[2].abs() < 1e-12 * lf[0].abs());
        assert!(local_field_corrections(&s.c, &s.eps, &[0; 4], hbar).is_err());
    }

    #[test]
    fn occupation_enters_as_two_n_plus_one() {
        let s = setup(3, 150.0);
        let hbar = s.cfg.constants().hbar;
        let base = local_field_corrections(&s.c, &s.eps, &[0; 3], hbar).unwrap();
        let excited = local_field_corrections(&s.c, &s.eps, &[0, 1, 0], hbar).unwrap();
        for n in 0..3 {
            let want: f64 = (0..3).map(|k| 2.0 * s.c[(1, 1, k)] * s.eps.eps[(n, k)]).sum::<f64>() / hbar;
            assert!((excited[n] - base[n] - want).abs() < 1e-10 * want.abs().max(base[n].abs()));
        }
    }

    #[test]
    fn resonance_gap_small_chains() {
        let s = setup(1, 0.0);
        assert!((phonon_resonance_gap(&s.modes).gap / s.cfg.omega_z - 1.0).abs() < 1e-12);
        let s = setup(2, 0.0);
        let g = phonon_resonance_gap(&s.modes);
        assert!((g.gap / s.cfg.omega_z - (2.0 - 3f64.sqrt())).abs() < 1e-10);
        assert_eq!(g.modes, [0, 0, 1]);
    }

    #[test]
    fn magnitudes_vanish_without_gradient() {
        let s = setup(4, 0.0);
        let m = spin_phonon_magnitudes(&s.c, &s.eps, s.cfg.constants().hbar);
        assert_eq!(m.two_body_max, 0.0);
        assert_eq!(m.pair_max, 0.0);
    }
}
