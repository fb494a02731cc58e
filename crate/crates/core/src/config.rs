//! Run configuration and its flat key-value file format.
//!
//! The file is TOML with a fixed set of top-level keys. Frequencies may be
//! given in rad/s (`omega_z`) or in Hz with an `_hz` suffix (`omega_z_hz`);
//! they are stored as angular frequencies either way.
//!
//! ```toml
//! n_ions = 5
//! omega_z_hz = 130e3
//! dB_dz = 19.0
//! ```

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Sign of the linear Zeeman shift entering omega(z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// omega(z) = -g mu_B B(z) / hbar.
    #[default]
    ZeemanNegative,
    /// omega(z) = +g mu_B B(z) / hbar.
    ZeemanPositive,
}

impl SignConvention {
    pub fn factor(self) -> f64 {
        match self {
            SignConvention::ZeemanNegative => -1.0,
            SignConvention::ZeemanPositive => 1.0,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            SignConvention::ZeemanNegative => "zeeman_negative",
            SignConvention::ZeemanPositive => "zeeman_positive",
        }
    }
}

/// Validated, fully populated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub n_ions: usize,
    /// Ion mass, kg.
    pub species_mass: f64,
    /// Axial trap frequency, rad/s.
    pub omega_z: f64,
    /// Trap frequencies of the two transversal directions, rad/s.
    pub omega_radial: Option<[f64; 2]>,
    /// Offset field, T.
    pub b0: f64,
    /// Axial gradient, T/m.
    pub db_dz: f64,
    /// Axial curvature, T/m^2.
    pub d2b_dz2: f64,
    /// Gradients along the two transversal directions, T/m.
    pub db_dtransversal: [f64; 2],
    /// g_F^(e) m_F^(e) - g_F^(g) m_F^(g).
    pub g_factor_combination: f64,
    /// Per-ion cubic anharmonicity, J/m^3.
    pub alpha_n: Vec<f64>,
    /// Axial phonon occupation per mode.
    pub phonon_occupations: Vec<u32>,
    /// Transversal phonon occupation per mode, shared by both directions.
    pub transversal_occupations: Vec<u32>,
    pub sign_convention: SignConvention,
}

const KEYS: &[&str] = &[
    "n_ions",
    "species_mass",
    "omega_z",
    "omega_z_hz",
    "omega_radial",
    "omega_radial_hz",
    "B0",
    "dB_dz",
    "d2B_dz2",
    "dB_dx",
    "dB_dy",
    "g_factor_combination",
    "alpha_n",
    "phonon_occupations",
    "transversal_occupations",
    "sign_convention",
];

impl Configuration {
    /// A 171Yb+ chain with the given trap frequency (rad/s) and gradient (T/m);
    /// everything else at its default.
    pub fn new(n_ions: usize, omega_z: f64, db_dz: f64) -> Result<Self> {
        let mut raw = Table::new();
        raw.insert("n_ions".into(), Value::Integer(n_ions as i64));
        raw.insert("omega_z".into(), Value::Float(omega_z));
        raw.insert("dB_dz".into(), Value::Float(db_dz));
        validate_config(&raw)
    }

    /// The five-ion (or `n_ions`-ion) 171Yb+ setup at 2 pi x 130 kHz.
    pub fn yb171_130khz(n_ions: usize, db_dz: f64) -> Result<Self> {
        Self::new(n_ions, TAU * 130e3, db_dz)
    }

    pub fn with_curvature(mut self, d2b_dz2: f64) -> Self {
        self.d2b_dz2 = d2b_dz2;
        self
    }

    pub fn with_radial(mut self, omega_radial: f64) -> Self {
        self.omega_radial = Some([omega_radial; 2]);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha_n = vec![alpha; self.n_ions];
        self
    }

    pub fn with_occupations(mut self, occupations: Vec<u32>) -> Self {
        assert_eq!(occupations.len(), self.n_ions);
        self.phonon_occupations = occupations;
        self
    }

    pub fn with_sign(mut self, sign: SignConvention) -> Self {
        self.sign_convention = sign;
        self
    }

    pub fn with_gradient(mut self, db_dz: f64) -> Self {
        self.db_dz = db_dz;
        self
    }

    /// Same setup with `n_ions` ions. Per-ion lists carry over only when
    /// they are uniform.
    pub fn with_n_ions(&self, n_ions: usize) -> Result<Self> {
        let mut raw = self.to_raw();
        raw.insert("n_ions".into(), Value::Integer(n_ions as i64));
        for key in ["alpha_n", "phonon_occupations", "transversal_occupations"] {
            let Some(Value::Array(items)) = raw.get(key) else {
                continue;
            };
            match items.first() {
                None => {
                    raw.remove(key);
                }
                Some(first) if items.iter().all(|x| x == first) => {
                    let first = first.clone();
                    raw.insert(key.into(), first);
                }
                Some(_) if items.len() == n_ions => {}
                Some(_) => {
                    return Err(Error::invalid(key, format!("non-uniform values cannot be resized to {n_ions} ions")));
                }
            }
        }
        validate_config(&raw)
    }

    pub fn constants(&self) -> &'static PhysicalConstants {
        PhysicalConstants::codata()
    }

    /// Characteristic length l with l^3 = e^2 / (4 pi eps0 m omega_z^2), m.
    pub fn length_scale(&self) -> f64 {
        let k = self.constants().coulomb_energy_length();
        (k / (self.species_mass * self.omega_z * self.omega_z)).cbrt()
    }

    /// Oscillator width sqrt(hbar / 2 m nu) of a mode at `nu` rad/s.
    pub fn oscillator_width(&self, nu: f64) -> f64 {
        (self.constants().hbar / (2.0 * self.species_mass * nu)).sqrt()
    }

    /// Resonance-frequency shift per tesla, rad s^-1 T^-1, including the sign.
    pub fn zeeman_angular_per_tesla(&self) -> f64 {
        self.sign_convention.factor()
            * self.g_factor_combination
            * self.constants().bohr_angular_per_tesla()
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::invalid("<file>", e.to_string()))?;
        validate_config(&raw)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Flat key-value form; frequencies are written in rad/s so that
    /// re-validation reproduces the configuration exactly.
    pub fn to_raw(&self) -> Table {
        let mut t = Table::new();
        t.insert("n_ions".into(), Value::Integer(self.n_ions as i64));
        t.insert("species_mass".into(), Value::Float(self.species_mass));
        t.insert("omega_z".into(), Value::Float(self.omega_z));
        if let Some(r) = self.omega_radial {
            t.insert("omega_radial".into(), float_array(&r));
        }
        t.insert("B0".into(), Value::Float(self.b0));
        t.insert("dB_dz".into(), Value::Float(self.db_dz));
        t.insert("d2B_dz2".into(), Value::Float(self.d2b_dz2));
        t.insert("dB_dx".into(), Value::Float(self.db_dtransversal[0]));
        t.insert("dB_dy".into(), Value::Float(self.db_dtransversal[1]));
        t.insert(
            "g_factor_combination".into(),
            Value::Float(self.g_factor_combination),
        );
        t.insert("alpha_n".into(), float_array(&self.alpha_n));
        t.insert("phonon_occupations".into(), int_array(&self.phonon_occupations));
        t.insert(
            "transversal_occupations".into(),
            int_array(&self.transversal_occupations),
        );
        t.insert(
            "sign_convention".into(),
            Value::String(self.sign_convention.as_str().into()),
        );
        t
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(&self.to_raw()).expect("flat table always serializes")
    }
}

fn float_array(v: &[f64]) -> Value {
    Value::Array(v.iter().copied().map(Value::Float).collect())
}

fn int_array(v: &[u32]) -> Value {
    Value::Array(v.iter().map(|&x| Value::Integer(x as i64)).collect())
}

fn number(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(x) => Ok(*x as f64),
        _ => Err(Error::invalid(key, "expected a number")),
    }
}

fn finite(key: &str, v: &Value) -> Result<f64> {
    let x = number(key, v)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::invalid(key, "must be finite"))
    }
}

fn positive(key: &str, v: &Value) -> Result<f64> {
    let x = finite(key, v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(Error::invalid(key, "must be positive"))
    }
}

/// Scalar broadcast to `n` entries, or an array of exactly `n` entries.
fn per_ion<T>(
    key: &str,
    v: &Value,
    n: usize,
    mut item: impl FnMut(&str, &Value) -> Result<T>,
) -> Result<Vec<T>>
where
    T: Clone,
{
    match v {
        Value::Array(items) => {
            if items.len() != n {
                return Err(Error::invalid(
                    key,
                    format!("expected {n} entries, got {}", items.len()),
                ));
            }
            items.iter().map(|x| item(key, x)).collect()
        }
        scalar => Ok(vec![item(key, scalar)?; n]),
    }
}

fn occupation(key: &str, v: &Value) -> Result<u32> {
    match v {
        Value::Integer(x) if *x < 0 => Err(Error::invalid(key, "occupation must be non-negative")),
        Value::Integer(x) => {
            u32::try_from(*x).map_err(|_| Error::invalid(key, "occupation too large"))
        }
        _ => Err(Error::invalid(key, "expected an integer occupation")),
    }
}

fn frequency(raw: &Table, key: &str) -> Result<Option<Value>> {
    let hz_key = format!("{key}_hz");
    match (raw.get(key), raw.get(&hz_key)) {
        (Some(_), Some(_)) => Err(Error::invalid(
            key,
            format!("give either `{key}` or `{hz_key}`, not both"),
        )),
        (Some(v), None) => Ok(Some(v.clone())),
        (None, Some(v)) => Ok(Some(scale_value(&hz_key, v, TAU)?)),
        (None, None) => Ok(None),
    }
}

fn scale_value(key: &str, v: &Value, factor: f64) -> Result<Value> {
    match v {
        Value::Array(items) => Ok(Value::Array(
            items
                .iter()
                .map(|x| Ok(Value::Float(number(key, x)? * factor)))
                .collect::<Result<_>>()?,
        )),
        x => Ok(Value::Float(number(key, x)? * factor)),
    }
}

/// Validates a raw key-value map and fills in defaults.
pub fn validate_config(raw: &Table) -> Result<Configuration> {
    if let Some(key) = raw.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::UnknownKey(key.clone()));
    }

    let n_ions = match raw.get("n_ions") {
        None => return Err(Error::invalid("n_ions", "missing")),
        Some(Value::Integer(n)) if *n >= 1 => *n as usize,
        Some(Value::Integer(_)) => return Err(Error::invalid("n_ions", "n_ions must be ≥ 1")),
        Some(_) => return Err(Error::invalid("n_ions", "expected an integer")),
    };

    let constants = PhysicalConstants::codata();
    let species_mass = match raw.get("species_mass") {
        Some(v) => positive("species_mass", v)?,
        None => constants.yb171_ion_mass(),
    };

    let omega_z = match frequency(raw, "omega_z")? {
        Some(v) => positive("omega_z", &v)?,
        None => return Err(Error::invalid("omega_z", "missing (give omega_z or omega_z_hz)")),
    };

    let omega_radial = match frequency(raw, "omega_radial")? {
        None => None,
        Some(v) => {
            let r = per_ion("omega_radial", &v, 2, positive)?;
            Some([r[0], r[1]])
        }
    };
    if let Some(r) = omega_radial {
        if r.iter().any(|&w| w <= omega_z) {
            log::warn!("omega_radial {r:?} does not exceed omega_z {omega_z}; the chain may not be linear");
        }
    }

    let get = |key: &str, default: f64| -> Result<f64> {
        raw.get(key).map_or(Ok(default), |v| finite(key, v))
    };

    let sign_convention = match raw.get("sign_convention") {
        None => SignConvention::default(),
        // `paper_negative` is the historical spelling
        Some(Value::String(s)) if s == "zeeman_negative" || s == "paper_negative" => SignConvention::ZeemanNegative,
        Some(Value::String(s)) if s == "zeeman_positive" => SignConvention::ZeemanPositive,
        Some(_) => {
            return Err(Error::invalid(
                "sign_convention",
                "expected \"zeeman_negative\" or \"zeeman_positive\"",
            ))
        }
    };

    let alpha_n = match raw.get("alpha_n") {
        Some(v) => per_ion("alpha_n", v, n_ions, finite)?,
        None => vec![0.0; n_ions],
    };
    let phonon_occupations = match raw.get("phonon_occupations") {
        Some(v) => per_ion("phonon_occupations", v, n_ions, occupation)?,
        None => vec![0; n_ions],
    };
    let transversal_occupations = match raw.get("transversal_occupations") {
        Some(v) => per_ion("transversal_occupations", v, n_ions, occupation)?,
        None => vec![0; n_ions],
    };

    Ok(Configuration {
        n_ions,
        species_mass,
        omega_z,
        omega_radial,
        b0: get("B0", 0.0)?,
        db_dz: get("dB_dz", 0.0)?,
        d2b_dz2: get("d2B_dz2", 0.0)?,
        db_dtransversal: [get("dB_dx", 0.0)?, get("dB_dy", 0.0)?],
        g_factor_combination: get("g_factor_combination", 1.0)?,
        alpha_n,
        phonon_occupations,
        transversal_occupations,
        sign_convention,
    })
}
