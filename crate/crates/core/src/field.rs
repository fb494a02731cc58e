//! Static field along the chain and the resulting qubit resonance profile.

use serde::{Deserialize, Serialize};

use crate::chain::ChainSolution;
use crate::config::Configuration;

/// B(z) = B0 + dB_dz z + d2B_dz2 z^2 / 2, along the chain axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub b0: f64,
    pub db_dz: f64,
    pub d2b_dz2: f64,
}

impl FieldProfile {
    pub fn from_config(cfg: &Configuration) -> Self {
        FieldProfile {
            b0: cfg.b0,
            db_dz: cfg.db_dz,
            d2b_dz2: cfg.d2b_dz2,
        }
    }

    pub fn field(&self, z: f64) -> f64 {
        self.b0 + self.db_dz * z + 0.5 * self.d2b_dz2 * z * z
    }

    pub fn gradient(&self, z: f64) -> f64 {
        self.db_dz + self.d2b_dz2 * z
    }

    pub fn scaled(&self, c: f64) -> Self {
        FieldProfile {
            b0: c * self.b0,
            db_dz: c * self.db_dz,
            d2b_dz2: c * self.d2b_dz2,
        }
    }
}

/// Per-ion resonance frequency and its derivatives at equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceProfile {
    /// rad/s
    pub omega: Vec<f64>,
    /// rad s^-1 m^-1
    pub domega: Vec<f64>,
    /// rad s^-1 m^-2
    pub d2omega: Vec<f64>,
    /// d2omega / domega^2, s; `None` where the gradient vanishes.
    pub gamma: Vec<Option<f64>>,
    /// Uniform resonance gradients along the two transversal directions,
    /// rad s^-1 m^-1.
    pub domega_transversal: [f64; 2],
}

impl ResonanceProfile {
    pub fn n_ions(&self) -> usize {
        self.omega.len()
    }

    /// Same derivatives with the absolute offsets removed, i.e. the frame
    /// rotating at each ion's own resonance.
    pub fn rotating_frame(&self) -> Self {
        ResonanceProfile {
            omega: vec![0.0; self.n_ions()],
            ..self.clone()
        }
    }

    /// First derivatives scaled by `c`, curvature kept; gamma follows.
    pub fn scaled_gradient(&self, c: f64) -> Self {
        let domega: Vec<f64> = self.domega.iter().map(|d| c * d).collect();
        let gamma = gammas(&domega, &self.d2omega);
        ResonanceProfile {
            omega: self.omega.clone(),
            domega,
            d2omega: self.d2omega.clone(),
            gamma,
            domega_transversal: self.domega_transversal.map(|d| c * d),
        }
    }

    pub fn has_gradient(&self) -> bool {
        self.domega.iter().any(|&d| d != 0.0)
    }
}

fn gammas(domega: &[f64], d2omega: &[f64]) -> Vec<Option<f64>> {
    domega
        .iter()
        .zip(d2omega)
        .map(|(&d, &dd)| (d != 0.0).then(|| dd / (d * d)))
        .collect()
}

pub fn resonance_profile(field: &FieldProfile, chain: &ChainSolution, cfg: &Configuration) -> ResonanceProfile {
    let k = cfg.zeeman_angular_per_tesla();
    let omega = chain.z0.iter().map(|&z| k * field.field(z)).collect();
    let domega: Vec<f64> = chain.z0.iter().map(|&z| k * field.gradient(z)).collect();
    let d2omega = vec![k * field.d2b_dz2; chain.n_ions()];
    let gamma = gammas(&domega, &d2omega);
    ResonanceProfile {
        omega,
        domega,
        d2omega,
        gamma,
        domega_transversal: cfg.db_dtransversal.map(|g| k * g),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::solve_equilibrium;
    use crate::config::SignConvention;

    fn setup(n: usize, grad: f64, curv: f64) -> (Configuration, ChainSolution) {
        let cfg = Configuration::yb171_130khz(n, grad).unwrap().with_curvature(curv);
        let chain = solve_equilibrium(&cfg).unwrap();
        (cfg, chain)
    }

    #[test]
    fn constant_field_has_no_gradient() {
        let (cfg, chain) = setup(4, 0.0, 0.0);
        let res = resonance_profile(&FieldProfile::from_config(&cfg), &chain, &cfg);
        assert!(res.domega.iter().all(|&d| d == 0.0));
        assert!(res.gamma.iter().all(Option::is_none));
        assert!(!res.has_gradient());
    }

    #[test]
    fn nineteen_tesla_per_metre() {
        let (cfg, chain) = setup(5, 19.0, 0.0);
        let res = resonance_profile(&FieldProfile::from_config(&cfg), &chain, &cfg);
        for d in &res.domega {
            let ghz_per_m = d.abs() / std::f64::consts::TAU / 1e9;
            assert!((ghz_per_m - 19.0 * 13.996245).abs() < 1e-3, "{ghz_per_m}");
        }
        assert!(res.domega.iter().all(|&d| d < 0.0));
    }

    #[test]
    fn curvature_variation_is_small() {
        let (cfg, chain) = setup(5, 150.0, 1e3);
        let res = resonance_profile(&FieldProfile::from_config(&cfg), &chain, &cfg);
        let max = res.domega.iter().fold(f64::MIN, |m, &d| m.max(d));
        let min = res.domega.iter().fold(f64::MAX, |m, &d| m.min(d));
        let rel = (max - min) / res.domega[2].abs();
        assert!(rel > 1e-5 && rel < 1e-3, "{rel}");
    }

    #[test]
    fn gamma_scales_inversely_with_field() {
        let (cfg, chain) = setup(3, 40.0, 500.0);
        let field = FieldProfile::from_config(&cfg);
        let a = resonance_profile(&field, &chain, &cfg);
        let b = resonance_profile(&field.scaled(2.0), &chain, &cfg);
        for (ga, gb) in a.gamma.iter().zip(&b.gamma) {
            let (ga, gb) = (ga.unwrap(), gb.unwrap());
            assert!((gb * 2.0 / ga - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sign_convention_flips_only_the_sign() {
        let (cfg, chain) = setup(3, 19.0, 0.0);
        let field = FieldProfile::from_config(&cfg);
        let neg = resonance_profile(&field, &chain, &cfg);
        let pos = resonance_profile(&field, &chain, &cfg.clone().with_sign(SignConvention::ZeemanPositive));
        for (a, b) in neg.domega.iter().zip(&pos.domega) {
            assert_eq!(*a, -*b);
        }
    }
}
