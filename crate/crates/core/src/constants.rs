//! CODATA 2018 recommended values.

/// Fundamental constants in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, J s.
    pub hbar: f64,
    /// Elementary charge, C.
    pub e: f64,
    /// Vacuum permittivity, F/m.
    pub eps0: f64,
    /// Bohr magneton, J/T.
    pub mu_b: f64,
    /// Atomic mass unit, kg.
    pub amu: f64,
    /// Electron mass, kg.
    pub m_e: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    e: 1.602_176_634e-19,
    eps0: 8.854_187_812_8e-12,
    mu_b: 9.274_010_078_3e-24,
    amu: 1.660_539_066_60e-27,
    m_e: 9.109_383_701_5e-31,
};

/// Atomic mass of neutral 171Yb in u.
pub const YB171_ATOMIC_MASS_U: f64 = 170.936_323;

impl PhysicalConstants {
    pub const fn codata() -> &'static PhysicalConstants {
        &CODATA_2018
    }

    /// Coulomb constant e^2 / (4 pi eps0), J m.
    pub fn coulomb_energy_length(&self) -> f64 {
        self.e * self.e / (4.0 * std::f64::consts::PI * self.eps0)
    }

    /// Mass of a singly charged 171Yb ion (one electron removed), kg.
    pub fn yb171_ion_mass(&self) -> f64 {
        YB171_ATOMIC_MASS_U * self.amu - self.m_e
    }

    /// mu_B / hbar in rad s^-1 T^-1.
    pub fn bohr_angular_per_tesla(&self) -> f64 {
        self.mu_b / self.hbar
    }
}
