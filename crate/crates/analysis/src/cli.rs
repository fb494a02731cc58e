use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use magic_core::coupling::{CouplingReport, CurvatureCouplings, ThreeBodyMap};
use magic_core::oracle::{run_oracle, Order};
use magic_core::{ChainModel, Configuration};
use serde::Serialize;

use crate::error::AppError;
use crate::fit::{FitModel, ResidualSpace};
use crate::report::{self, output_path, output_stem, ColumnFit, ModelSummary, Table};
use crate::sweep::{fit_scaling, run_sweep, SweepColumn, SweepRow};

const DEFAULT_IONS: usize = 5;
const DEFAULT_GRADIENT: f64 = 19.0;

#[derive(Debug, Parser)]
#[command(name = "magic-ions", version, about = "Couplings of trapped-ion chains in a magnetic field gradient")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Chain lengths `a:b` for sweep, fit and report.
    #[arg(long, global = true, default_value = "2:40")]
    pub n_range: NRange,
    /// Axial gradient in T/m, overrides the configuration.
    #[arg(long, global = true)]
    pub gradient: Option<f64>,
    /// Number of ions, overrides the configuration.
    #[arg(long, global = true)]
    pub n_ions: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Delimited table (.csv), also echoed to stdout.
    Table,
    /// Machine-readable document (.json).
    Structured,
    /// Vector graphics (.svg), where a curve exists.
    Plot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibrium positions.
    Equilibrium,
    /// Normal modes and oscillator widths.
    Modes,
    /// Spin-spin couplings of every ion pair.
    Couplings,
    /// Coulomb, trap and curvature three-spin couplings.
    ThreeBody,
    /// Phonon-number dependent longitudinal fields.
    LocalFields,
    /// Curvature-induced three-spin couplings.
    Curvature,
    /// Corrections from axial-transversal cubic terms.
    Transversal,
    /// Chain-length sweep.
    Sweep,
    /// Scaling-law fits of a sweep.
    Fit {
        /// Fit a single column instead of the default set.
        #[arg(long, value_enum)]
        column: Option<SweepColumn>,
        #[arg(long, value_enum, requires = "column")]
        model: Option<FitModel>,
        /// Residual space; by default linear for power laws and log for
        /// the log-corrected law.
        #[arg(long, value_enum)]
        residuals: Option<ResidualSpace>,
    },
    /// Brute-force operator check in a truncated Fock space.
    Oracle {
        #[arg(long, default_value_t = 8)]
        cutoff: usize,
        /// 2 or 3.
        #[arg(long, default_value_t = 3)]
        order: u8,
    },
    /// Sweep, fits and couplings in all formats.
    Report,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Equilibrium => "equilibrium",
            Command::Modes => "modes",
            Command::Couplings => "couplings",
            Command::ThreeBody => "three-body",
            Command::LocalFields => "local-fields",
            Command::Curvature => "curvature",
            Command::Transversal => "transversal",
            Command::Sweep => "sweep",
            Command::Fit { .. } => "fit",
            Command::Oracle { .. } => "oracle",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NRange {
    pub start: usize,
    pub end: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got `{s}`"))?;
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("`{x}`: {e}"));
        let r = NRange {
            start: parse(a)?,
            end: parse(b)?,
        };
        if r.start > r.end {
            return Err(format!("empty range {s}"));
        }
        Ok(r)
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// Configuration from file and overrides.
pub fn resolve_config(common: &Common) -> Result<Configuration, AppError> {
    let mut cfg = match &common.config {
        Some(path) => Configuration::from_path(path)?,
        None => Configuration::yb171_130khz(common.n_ions.unwrap_or(DEFAULT_IONS), DEFAULT_GRADIENT)?,
    };
    if let Some(n) = common.n_ions {
        if n != cfg.n_ions {
            cfg = cfg.with_n_ions(n)?;
        }
    }
    if let Some(g) = common.gradient {
        if !g.is_finite() {
            return Err(AppError::Usage(format!("gradient must be finite, got {g}")));
        }
        cfg = cfg.with_gradient(g);
    }
    Ok(cfg)
}

/// Default fits: both coupling extremes as power laws and the edge local
/// field with the logarithmic correction.
pub const DEFAULT_FITS: [(SweepColumn, FitModel); 3] = [
    (SweepColumn::J2Max, FitModel::PowerLaw),
    (SweepColumn::J2Min, FitModel::PowerLaw),
    (SweepColumn::LocalFieldEdge, FitModel::LogCorrected),
];

pub fn default_residuals(model: FitModel) -> ResidualSpace {
    match model {
        FitModel::PowerLaw => ResidualSpace::Linear,
        FitModel::LogCorrected => ResidualSpace::Log,
    }
}

pub fn fit_columns(
    rows: &[SweepRow],
    which: &[(SweepColumn, FitModel)],
    residuals: Option<ResidualSpace>,
) -> Result<Vec<ColumnFit>, AppError> {
    which
        .iter()
        .map(|&(column, model)| {
            let space = residuals.unwrap_or_else(|| default_residuals(model));
            Ok(ColumnFit {
                column,
                fit: fit_scaling(rows, column, model, space)?,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct ThreeBodyDoc<'a> {
    coulomb: &'a ThreeBodyMap,
    trap: &'a ThreeBodyMap,
    trap_estimate: f64,
    curvature: &'a ThreeBodyMap,
    curvature_estimate: f64,
}

#[derive(Serialize)]
struct LocalFieldDoc<'a> {
    phonon_occupations: &'a [u32],
    local_field: &'a [f64],
    coinciding_index_field: &'a [f64],
}

#[derive(Serialize)]
struct CurvatureDoc<'a> {
    #[serde(flatten)]
    couplings: &'a CurvatureCouplings,
    estimate: f64,
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    rows: &'a [SweepRow],
}

#[derive(Serialize)]
struct FitDoc<'a> {
    n_range: [usize; 2],
    fits: &'a [ColumnFit],
}

/// Everything one subcommand produces, in each output format.
struct Output {
    table: Table,
    json: serde_json::Value,
    svg: Option<String>,
}

impl Output {
    fn new(table: Table, doc: impl Serialize) -> Result<Self, AppError> {
        Ok(Output {
            table,
            json: serde_json::to_value(doc)?,
            svg: None,
        })
    }

    fn with_svg(mut self, svg: String) -> Self {
        self.svg = Some(svg);
        self
    }

    fn write(&self, dir: &Path, stem: &str, format: Format, echo: bool) -> Result<PathBuf, AppError> {
        match format {
            Format::Table => {
                let path = output_path(dir, stem, "csv");
                self.table.write_csv(&path)?;
                if echo {
                    print!("{}", self.table.to_text());
                }
                Ok(path)
            }
            Format::Structured => {
                let path = output_path(dir, stem, "json");
                report::write_json(&path, &self.json)?;
                Ok(path)
            }
            Format::Plot => {
                let svg = self
                    .svg
                    .as_ref()
                    .ok_or_else(|| AppError::Usage(format!("no plot is available for `{stem}`")))?;
                let path = output_path(dir, stem, "svg");
                report::write_text(&path, svg)?;
                Ok(path)
            }
        }
    }
}

fn build_output(command: &Command, cfg: &Configuration, range: NRange) -> Result<Output, AppError> {
    let sweep = || run_sweep(cfg, range.start..=range.end);
    let output = match command {
        Command::Equilibrium => {
            let m = ChainModel::build(cfg)?;
            Output::new(report::equilibrium_table(&m.chain), &m.chain)?
        }
        Command::Modes => {
            let m = ChainModel::build(cfg)?;
            let mut table = report::modes_table(&m.axial);
            if let Some(t) = &m.transversal {
                for modes in t {
                    table.rows.extend(report::modes_table(modes).rows);
                }
            }
            Output::new(table, ModelSummary::from(&m))?
        }
        Command::Couplings => {
            let r = CouplingReport::compute(&ChainModel::build(cfg)?)?;
            Output::new(report::couplings_table(&r), &r)?
        }
        Command::ThreeBody => {
            let r = CouplingReport::compute(&ChainModel::build(cfg)?)?;
            let doc = ThreeBodyDoc {
                coulomb: &r.j3_coulomb,
                trap: &r.j3_trap,
                trap_estimate: r.j3_trap_estimate,
                curvature: &r.j3_curvature.symmetrized,
                curvature_estimate: r.j3_curvature_estimate,
            };
            Output::new(report::three_body_table(&r), doc)?
        }
        Command::LocalFields => {
            let m = ChainModel::build(cfg)?;
            let r = CouplingReport::compute(&m)?;
            let coinciding = CouplingReport::coinciding_index_fields(&m);
            let doc = LocalFieldDoc {
                phonon_occupations: &cfg.phonon_occupations,
                local_field: &r.local_field,
                coinciding_index_field: &coinciding,
            };
            let svg = report::profile_plot(&r.local_field, "local field profile");
            Output::new(report::local_field_table(&r, &coinciding), doc)?.with_svg(svg)
        }
        Command::Curvature => {
            let r = CouplingReport::compute(&ChainModel::build(cfg)?)?;
            let doc = CurvatureDoc {
                couplings: &r.j3_curvature,
                estimate: r.j3_curvature_estimate,
            };
            Output::new(report::curvature_table(&r.j3_curvature), doc)?
        }
        Command::Transversal => {
            let c = ChainModel::build(cfg)?.transversal_corrections()?;
            Output::new(report::transversal_table(&c), &c)?
        }
        Command::Sweep => {
            let rows = sweep()?;
            let svg = report::sweep_plot(&rows, &[SweepColumn::J2Max, SweepColumn::J2Min], &[], "coupling extremes");
            Output::new(report::sweep_table(&rows), SweepDoc { rows: &rows })?.with_svg(svg)
        }
        Command::Fit { column, model, residuals } => {
            let rows = sweep()?;
            let which: Vec<(SweepColumn, FitModel)> = match column {
                Some(c) => vec![(*c, model.unwrap_or(FitModel::PowerLaw))],
                None => DEFAULT_FITS.to_vec(),
            };
            let fits = fit_columns(&rows, &which, *residuals)?;
            let columns: Vec<SweepColumn> = which.iter().map(|w| w.0).collect();
            let svg = report::sweep_plot(&rows, &columns, &fits, "scaling fits");
            let doc = FitDoc {
                n_range: [range.start, range.end],
                fits: &fits,
            };
            Output::new(report::fit_table(&fits), doc)?.with_svg(svg)
        }
        Command::Oracle { cutoff, order } => {
            let order = Order::try_from(*order)?;
            let r = run_oracle(&ChainModel::build(cfg)?, *cutoff, order)?;
            if r.truncation_flagged {
                log::warn!("truncation leakage {:.2e}: increase --cutoff", r.truncation_error_estimate);
            }
            Output::new(report::oracle_table(&r), &r)?
        }
        Command::Report => unreachable!("handled by run"),
    };
    Ok(output)
}

fn stem(command: &Command, cfg: &Configuration, range: NRange) -> String {
    let n = match command {
        Command::Sweep | Command::Fit { .. } | Command::Report => range.to_string(),
        _ => cfg.n_ions.to_string(),
    };
    output_stem(command.name(), &n, cfg.db_dz)
}

/// Runs one invocation and returns the files written.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, AppError> {
    let cfg = resolve_config(&cli.common)?;
    let range = cli.common.n_range;
    let dir = &cli.common.out;
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;

    if let Command::Report = cli.command {
        return run_report(&cfg, range, dir);
    }
    let output = build_output(&cli.command, &cfg, range)?;
    let path = output.write(dir, &stem(&cli.command, &cfg, range), cli.common.format, true)?;
    Ok(vec![path])
}

fn run_report(cfg: &Configuration, range: NRange, dir: &Path) -> Result<Vec<PathBuf>, AppError> {
    let mut written = Vec::new();
    for command in [
        Command::Couplings,
        Command::ThreeBody,
        Command::LocalFields,
        Command::Sweep,
        Command::Fit {
            column: None,
            model: None,
            residuals: None,
        },
    ] {
        let output = build_output(&command, cfg, range)?;
        let stem = stem(&command, cfg, range);
        for format in [Format::Table, Format::Structured, Format::Plot] {
            if format == Format::Plot && output.svg.is_none() {
                continue;
            }
            written.push(output.write(dir, &stem, format, false)?);
        }
    }
    Ok(written)
}

/// Parses `args` and runs, mapping every failure to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            for t in match &e {
                AppError::Fit(f) => f.trace(),
                _ => &[],
            } {
                eprintln!(
                    "  iteration {:>3}: sum of squares {:e}, damping {:e}{}",
                    t.iteration,
                    t.sum_squares,
                    t.damping,
                    if t.accepted { "" } else { " (rejected)" }
                );
            }
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        assert_eq!("2:40".parse::<NRange>().unwrap(), NRange { start: 2, end: 40 });
        assert!("40:2".parse::<NRange>().is_err());
        assert!("2-40".parse::<NRange>().is_err());
        assert_eq!(NRange { start: 2, end: 40 }.to_string(), "2-40");
    }

    #[test]
    fn overrides_apply() {
        let cli = Cli::try_parse_from(["magic-ions", "couplings", "--n-ions", "7", "--gradient", "150"]).unwrap();
        let cfg = resolve_config(&cli.common).unwrap();
        assert_eq!((cfg.n_ions, cfg.db_dz), (7, 150.0));
        assert_eq!(stem(&cli.command, &cfg, cli.common.n_range), "couplings_7_150");
    }
}
