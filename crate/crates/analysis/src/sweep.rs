use std::ops::RangeInclusive;

use magic_core::coupling::{local_field_corrections, phonon_resonance_gap};
use magic_core::{ChainModel, Configuration, Error};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fit::{fit_points, FitError, FitModel, FitResult, ResidualSpace};

pub const MIN_SWEEP_IONS: usize = 2;
pub const MAX_SWEEP_IONS: usize = 60;

/// One chain length of a sweep; frequencies in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J2_max")]
    pub j2_max: f64,
    #[serde(rename = "J2_min")]
    pub j2_min: f64,
    /// |local field| of the first ion with all modes in the ground state.
    pub local_field_edge: f64,
    pub resonance_gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepColumn {
    J2Max,
    J2Min,
    LocalFieldEdge,
    ResonanceGap,
}

impl SweepColumn {
    pub fn value(self, row: &SweepRow) -> f64 {
        match self {
            SweepColumn::J2Max => row.j2_max,
            SweepColumn::J2Min => row.j2_min,
            SweepColumn::LocalFieldEdge => row.local_field_edge,
            SweepColumn::ResonanceGap => row.resonance_gap,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepColumn::J2Max => "J2_max",
            SweepColumn::J2Min => "J2_min",
            SweepColumn::LocalFieldEdge => "local_field_edge",
            SweepColumn::ResonanceGap => "resonance_gap",
        }
    }
}

/// Extremes of the off-diagonal couplings, `(max, min)`.
pub fn coupling_extremes(j: &nalgebra::DMatrix<f64>) -> (f64, f64) {
    let n = j.nrows();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..n {
        for k in i + 1..n {
            hi = hi.max(j[(i, k)]);
            lo = lo.min(j[(i, k)]);
        }
    }
    (hi, lo)
}

pub fn sweep_row(cfg: &Configuration) -> Result<SweepRow, Error> {
    let model = ChainModel::build(cfg)?;
    let (j2_max, j2_min) = coupling_extremes(&model.j2());
    let ground = vec![0; cfg.n_ions];
    let lf = local_field_corrections(&model.c_total, &model.eps, &ground, model.hbar())?;
    Ok(SweepRow {
        n: cfg.n_ions,
        j2_max,
        j2_min,
        local_field_edge: lf[0].abs(),
        resonance_gap: phonon_resonance_gap(&model.axial).gap,
    })
}

/// Sweeps the chain length over `range`, in parallel. A failing chain length
/// is logged and left out.
pub fn run_sweep(cfg: &Configuration, range: RangeInclusive<usize>) -> Result<Vec<SweepRow>, Error> {
    if range.is_empty() || *range.start() < MIN_SWEEP_IONS || *range.end() > MAX_SWEEP_IONS {
        return Err(Error::InvalidConfig {
            field: "n_range".into(),
            reason: format!("must lie within {MIN_SWEEP_IONS}:{MAX_SWEEP_IONS}, got {}:{}", range.start(), range.end()),
        });
    }
    let sizes: Vec<usize> = range.collect();
    let rows: Vec<Option<SweepRow>> = sizes
        .par_iter()
        .map(|&n| match cfg.with_n_ions(n).and_then(|c| sweep_row(&c)) {
            Ok(row) => Some(row),
            Err(e) => {
                log::error!("sweep point N = {n} skipped: {e}");
                None
            }
        })
        .collect();
    // collect() keeps the input order, so rows stay sorted by N
    Ok(rows.into_iter().flatten().collect())
}

/// Fits one column of a sweep.
pub fn fit_scaling(
    rows: &[SweepRow],
    column: SweepColumn,
    model: FitModel,
    space: ResidualSpace,
) -> Result<FitResult, FitError> {
    let n: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let y: Vec<f64> = rows.iter().map(|r| column.value(r)).collect();
    fit_points(&n, &y, model, space)
}
