use nalgebra::DMatrix;

use super::{annihilation, embed, embed_many, Order, SpinBlockOperator, TruncatedSpace};
use crate::chain::ModeDecomposition;
use crate::coupling::LambDickeMatrix;
use crate::error::{Error, Result};
use crate::field::ResonanceProfile;
use crate::model::ChainModel;
use crate::tensor::Tensor3;

/// Everything the operator construction needs, decoupled from the model.
#[derive(Debug, Clone)]
pub struct OracleInputs {
    pub modes: ModeDecomposition,
    pub resonance: ResonanceProfile,
    pub eps: LambDickeMatrix,
    /// Mode-frame cubic tensor, J.
    pub c: Tensor3,
    pub hbar: f64,
}

impl OracleInputs {
    /// Axial data of `model` in the frame rotating with each ion's resonance.
    pub fn from_model(model: &ChainModel) -> Self {
        OracleInputs {
            modes: model.axial.clone(),
            resonance: model.resonance.rotating_frame(),
            eps: model.eps.clone(),
            c: model.c_total.clone(),
            hbar: model.hbar(),
        }
    }
}

/// `H / hbar = sum nu a^dag a - 1/2 sum (omega_n + domega_n q_n) Z_n`
/// `         [+ (1/6 hbar) sum C_lrs X_l X_r X_s]`, with `X = a + a^dag`.
pub fn build_hamiltonian(inputs: &OracleInputs, space: &TruncatedSpace, order: Order) -> Result<SpinBlockOperator> {
    let modes = &inputs.modes;
    let n_modes = modes.n_modes();
    if space.n_modes != n_modes || space.n_ions != inputs.resonance.n_ions() {
        return Err(Error::DimensionMismatch(format!(
            "space has {} ions / {} modes, inputs {} / {n_modes}",
            space.n_ions,
            space.n_modes,
            inputs.resonance.n_ions()
        )));
    }
    let levels = space.levels();
    let a = annihilation(levels);
    let x = &a + a.transpose();
    let number = a.transpose() * &a;

    let d = space.block_dim();
    let mut free = DMatrix::zeros(d, d);
    for l in 0..n_modes {
        free += embed(&number, l, space) * modes.nu[l];
    }
    let xs: Vec<DMatrix<f64>> = (0..n_modes).map(|l| embed(&x, l, space)).collect();
    if order == Order::Three {
        free += cubic_term(&inputs.c, &x, space) / inputs.hbar;
    }

    let blocks = (0..space.n_spin_configs())
        .map(|b| {
            let s = space.spins(b);
            let offset: f64 = (0..space.n_ions).map(|n| -0.5 * inputs.resonance.omega[n] * s[n]).sum();
            let mut h = &free + DMatrix::identity(d, d) * offset;
            for (l, xl) in xs.iter().enumerate() {
                let g: f64 = (0..space.n_ions)
                    .map(|n| inputs.resonance.domega[n] * modes.s[(n, l)] * modes.dz[l] * s[n])
                    .sum();
                if g != 0.0 {
                    h -= xl * (0.5 * g);
                }
            }
            h
        })
        .collect();
    Ok(SpinBlockOperator {
        space: *space,
        blocks,
    })
}

/// `sum_lrs C_lrs X_l X_r X_s`, grouped by distinct index multisets.
fn cubic_term(c: &Tensor3, x: &DMatrix<f64>, space: &TruncatedSpace) -> DMatrix<f64> {
    let m = c.dim();
    let x2 = x * x;
    let x2 = (&x2 + x2.transpose()) * 0.5;
    let x3 = (&x2 * x + x * &x2) * 0.5;
    let d = space.block_dim();
    let mut out = DMatrix::zeros(d, d);
    for l in 0..m {
        if c[(l, l, l)] != 0.0 {
            out += embed(&x3, l, space) * c[(l, l, l)];
        }
        for r in (0..m).filter(|&r| r != l) {
            if c[(l, l, r)] != 0.0 {
                out += embed_many(&[(l, &x2), (r, x)], space) * (3.0 * c[(l, l, r)]);
            }
        }
        for r in l + 1..m {
            for s in r + 1..m {
                if c[(l, r, s)] != 0.0 {
                    out += embed_many(&[(l, x), (r, x), (s, x)], space) * (6.0 * c[(l, r, s)]);
                }
            }
        }
    }
    out / 6.0
}
