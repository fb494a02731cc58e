//! Classical equilibrium of the linear Coulomb crystal and its normal modes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::Configuration;
use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;
const FORCE_TOLERANCE: f64 = 1e-12;

/// Equilibrium of the chain in the harmonic trap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSolution {
    /// Dimensionless positions, ascending.
    pub u: Vec<f64>,
    /// Characteristic length l, m.
    pub length_scale: f64,
    /// Physical positions l * u, m.
    pub z0: Vec<f64>,
}

impl ChainSolution {
    pub fn n_ions(&self) -> usize {
        self.u.len()
    }
}

/// Spatial direction of a set of modes. Numbering follows the convention
/// that 3 is the chain axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Axial,
    Transversal1,
    Transversal2,
}

impl Direction {
    pub fn index(self) -> u8 {
        match self {
            Direction::Transversal1 => 1,
            Direction::Transversal2 => 2,
            Direction::Axial => 3,
        }
    }
}

/// Normal modes of one direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeDecomposition {
    pub direction: Direction,
    /// Participation matrix; column `l` is mode `l` (`q_n = sum_l S_nl Q_l`).
    pub s: DMatrix<f64>,
    /// Mode frequencies, rad/s, ascending.
    pub nu: Vec<f64>,
    /// Ground-state widths sqrt(hbar / 2 m nu_l), m.
    pub dz: Vec<f64>,
}

impl ModeDecomposition {
    pub fn n_modes(&self) -> usize {
        self.nu.len()
    }

    /// Same modes with the sign of column `l` reversed.
    pub fn with_flipped_mode(&self, l: usize) -> Self {
        let mut out = self.clone();
        out.s.column_mut(l).neg_mut();
        out
    }

    /// `S` with column `l` scaled by `dz_l`.
    pub fn scaled_participation(&self) -> DMatrix<f64> {
        let mut m = self.s.clone();
        for (l, w) in self.dz.iter().enumerate() {
            m.column_mut(l).scale_mut(*w);
        }
        m
    }

    /// max |S^T S - 1|.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n_modes();
        let g = self.s.transpose() * &self.s - DMatrix::identity(n, n);
        g.amax()
    }
}

fn gradient(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            let coulomb: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = u[i] - u[j];
                    d.signum() / (d * d)
                })
                .sum();
            u[i] - coulomb
        })
        .collect()
}

fn residual(u: &[f64]) -> f64 {
    gradient(u).iter().fold(0.0, |m, g| m.max(g.abs()))
}

/// Dimensionless axial Hessian `A / (m omega_z^2)` at positions `u`.
pub fn dimensionless_axial_hessian(u: &[f64]) -> DMatrix<f64> {
    let n = u.len();
    let mut h = DMatrix::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let c = 2.0 / (u[i] - u[j]).abs().powi(3);
                h[(i, j)] = -c;
                h[(i, i)] += c;
            }
        }
    }
    h
}

/// Heuristic starting point: uniform spacing scaled by 2 / N^0.56.
pub fn initial_guess(n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.0];
    }
    let span = 2.0 / (n as f64).powf(0.56);
    let half = n as f64 / 2.0;
    (0..n)
        .map(|i| (-half + n as f64 * i as f64 / (n - 1) as f64) * span)
        .collect()
}

/// Dimensionless equilibrium positions for `n` ions.
pub fn equilibrium_positions(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n_ions", "n_ions must be ≥ 1"));
    }
    equilibrium_positions_from(initial_guess(n))
}

/// Damped Newton iteration from `guess` (which must be strictly ascending).
pub fn equilibrium_positions_from(guess: Vec<f64>) -> Result<Vec<f64>> {
    let n = guess.len();
    let mut u = guess;
    if n == 1 {
        return Ok(vec![0.0]);
    }
    let mut res = residual(&u);
    let mut iterations = 0;
    while res >= FORCE_TOLERANCE {
        if iterations == MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                iterations,
                residual: res,
            });
        }
        iterations += 1;

        let g = DVector::from_vec(gradient(&u));
        let h = dimensionless_axial_hessian(&u);
        let step = match h.clone().cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => h.lu().solve(&(-&g)).ok_or(Error::NoConvergence {
                iterations,
                residual: res,
            })?,
        };

        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = u.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            let ordered = trial.windows(2).all(|w| w[0] < w[1]);
            if ordered {
                let r = residual(&trial);
                if r < res {
                    u = trial;
                    res = r;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-12 {
                return Err(Error::NoConvergence {
                    iterations,
                    residual: res,
                });
            }
        }
    }

    // The minimum is mirror symmetric; remove round-off asymmetry.
    let mirrored: Vec<f64> = (0..n).map(|i| 0.5 * (u[i] - u[n - 1 - i])).collect();
    if residual(&mirrored) <= res.max(FORCE_TOLERANCE) {
        u = mirrored;
    }
    Ok(u)
}

pub fn solve_equilibrium(cfg: &Configuration) -> Result<ChainSolution> {
    let u = equilibrium_positions(cfg.n_ions)?;
    let l = cfg.length_scale();
    let z0 = u.iter().map(|x| x * l).collect();
    Ok(ChainSolution {
        u,
        length_scale: l,
        z0,
    })
}

/// Axial Hessian of trap plus Coulomb energy, J/m^2.
pub fn axial_hessian(chain: &ChainSolution, cfg: &Configuration) -> DMatrix<f64> {
    dimensionless_axial_hessian(&chain.u) * (cfg.species_mass * cfg.omega_z * cfg.omega_z)
}

/// Hessian along a transversal direction with trap frequency `omega_alpha`,
/// J/m^2. The Coulomb part is -1/2 of the axial one on a linear chain.
pub fn transversal_hessian(chain: &ChainSolution, cfg: &Configuration, omega_alpha: f64) -> DMatrix<f64> {
    let n = chain.n_ions();
    let ratio2 = (omega_alpha / cfg.omega_z).powi(2);
    let coulomb = dimensionless_axial_hessian(&chain.u) - DMatrix::<f64>::identity(n, n);
    let h = DMatrix::identity(n, n) * ratio2 - coulomb * 0.5;
    h * (cfg.species_mass * cfg.omega_z * cfg.omega_z)
}

/// Rough lower bound on omega_radial / omega_z for a stable linear chain.
pub fn linear_stability_ratio(n: usize) -> f64 {
    if n < 3 {
        return 0.0;
    }
    0.73 * (n as f64).powf(0.86)
}

/// Diagonalizes a symmetric positive-definite Hessian.
///
/// Modes are sorted by frequency; each eigenvector is oriented so that its
/// largest-magnitude entry is positive (ties go to the lowest index).
pub fn normal_modes(a: &DMatrix<f64>, cfg: &Configuration, direction: Direction) -> Result<ModeDecomposition> {
    let n = a.nrows();
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));

    let mut s = DMatrix::zeros(n, n);
    let mut nu = Vec::with_capacity(n);
    for (col, &idx) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[idx];
        if lambda <= 0.0 {
            return Err(Error::UnstableConfiguration { eigenvalue: lambda });
        }
        let mut v = eig.eigenvectors.column(idx).into_owned();
        let amax = v.amax();
        let lead = v
            .iter()
            .position(|x| x.abs() >= amax * (1.0 - 1e-9))
            .expect("non-empty eigenvector");
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        s.set_column(col, &v);
        nu.push((lambda / cfg.species_mass).sqrt());
    }
    let dz = nu.iter().map(|&w| cfg.oscillator_width(w)).collect();
    Ok(ModeDecomposition { direction, s, nu, dz })
}

pub fn axial_modes(chain: &ChainSolution, cfg: &Configuration) -> Result<ModeDecomposition> {
    normal_modes(&axial_hessian(chain, cfg), cfg, Direction::Axial)
}

/// Modes of both transversal directions, requires `omega_radial`.
pub fn transversal_modes(chain: &ChainSolution, cfg: &Configuration) -> Result<[ModeDecomposition; 2]> {
    let radial = cfg.omega_radial.ok_or(Error::MissingRadial)?;
    let bound = linear_stability_ratio(chain.n_ions());
    for w in radial {
        if w / cfg.omega_z < bound {
            log::warn!(
                "omega_radial/omega_z = {:.3} is below the linear-chain heuristic {:.3}",
                w / cfg.omega_z,
                bound
            );
        }
    }
    let m1 = normal_modes(&transversal_hessian(chain, cfg, radial[0]), cfg, Direction::Transversal1)?;
    let m2 = normal_modes(&transversal_hessian(chain, cfg, radial[1]), cfg, Direction::Transversal2)?;
    Ok([m1, m2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn cfg(n: usize) -> Configuration {
        Configuration::new(n, TAU * 130e3, 19.0).unwrap()
    }

    #[test]
    fn single_ion_sits_at_origin() {
        assert_eq!(equilibrium_positions(1).unwrap(), vec![0.0]);
    }

    #[test]
    fn two_and_three_ions_analytic() {
        let u = equilibrium_positions(2).unwrap();
        let x = 0.5f64.powf(2.0 / 3.0);
        assert!((u[0] + x).abs() < 1e-12 && (u[1] - x).abs() < 1e-12);

        let u = equilibrium_positions(3).unwrap();
        let x = 1.25f64.cbrt();
        assert!((u[0] + x).abs() < 1e-12);
        assert_eq!(u[1], 0.0);
        assert!((u[2] - x).abs() < 1e-12);
    }

    #[test]
    fn zero_ions_rejected() {
        assert!(equilibrium_positions(0).is_err());
    }

    #[test]
    fn chain_invariants_up_to_sixty() {
        for n in [2, 5, 10, 25, 40, 60] {
            let u = equilibrium_positions(n).unwrap();
            assert!(u.windows(2).all(|w| w[0] < w[1]));
            assert!(residual(&u) < FORCE_TOLERANCE, "n={n}");
            let sum: f64 = u.iter().sum();
            assert!(sum.abs() < 1e-12);
            for i in 0..n {
                assert_eq!(u[i], -u[n - 1 - i]);
            }
        }
    }

    #[test]
    fn single_ion_hessian_is_trap() {
        let c = cfg(1);
        let chain = solve_equilibrium(&c).unwrap();
        let a = axial_hessian(&chain, &c);
        let k = c.species_mass * c.omega_z * c.omega_z;
        assert!((a[(0, 0)] / k - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_ion_hessian_and_modes() {
        let u = equilibrium_positions(2).unwrap();
        let h = dimensionless_axial_hessian(&u);
        for (got, want) in h.iter().zip([2.0, -1.0, -1.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let c = cfg(2);
        let modes = axial_modes(&solve_equilibrium(&c).unwrap(), &c).unwrap();
        assert!((modes.nu[0] / c.omega_z - 1.0).abs() < 1e-12);
        assert!((modes.nu[1] / c.omega_z - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn modes_are_orthonormal_and_gauge_fixed() {
        for n in [1, 3, 5, 12, 40] {
            let c = cfg(n);
            let modes = axial_modes(&solve_equilibrium(&c).unwrap(), &c).unwrap();
            assert!(modes.orthogonality_defect() < 1e-12);
            assert!(modes.nu.windows(2).all(|w| w[0] < w[1]));
            assert!((modes.nu[0] / c.omega_z - 1.0).abs() < 1e-10);
            assert!(modes.nu[1..].iter().all(|&w| w > c.omega_z));
            let com = 1.0 / (n as f64).sqrt();
            for i in 0..n {
                assert!((modes.s[(i, 0)] - com).abs() < 1e-10);
            }
            for l in 0..n {
                let col = modes.s.column(l);
                let amax = col.amax();
                let lead = col.iter().position(|x| x.abs() >= amax * (1.0 - 1e-9)).unwrap();
                assert!(col[lead] > 0.0);
            }
        }
    }

    #[test]
    fn unstable_hessian_is_reported() {
        let c = cfg(2);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            normal_modes(&a, &c, Direction::Axial),
            Err(Error::UnstableConfiguration { .. })
        ));
    }

    #[test]
    fn transversal_requires_radial() {
        let c = cfg(3);
        let chain = solve_equilibrium(&c).unwrap();
        assert!(matches!(transversal_modes(&chain, &c), Err(Error::MissingRadial)));
        let c = c.with_radial(10.0 * TAU * 130e3);
        let [m1, _] = transversal_modes(&chain, &c).unwrap();
        // the highest transversal mode is the centre-of-mass mode
        assert!((m1.nu[2] / (10.0 * TAU * 130e3) - 1.0).abs() < 1e-10);
    }
}
