//! Command-line flags and their resolution into run configurations.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plasma_penalty_core::experiments::{DEFAULT_BLOWUP_THRESHOLD, DEFAULT_CFL};
use plasma_penalty_core::{
    ManufacturedCase, PenaltyCoupling, PenaltyKind, Reconstruction, RunConfig,
};

use crate::error::AppError;

pub const DEFAULT_EPSILON: f64 = 0.1;
/// Penalty target of the cut-flux runs: the sonic value reached by case A at
/// the interface.
pub const DEFAULT_ISOARDI_M0: f64 = 1.0;

#[derive(Debug, Parser)]
#[command(
    name = "plasma-penalty",
    version,
    about = "Penalized plasma transport in a 1D scrape-off layer"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Single simulation; writes the final field.
    Run(RunArgs),
    /// Cut-flux blow-up under mesh refinement.
    Blowup(BlowupArgs),
    /// Convergence of the plasma-region errors as eta goes to zero.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PenaltyArg {
    None,
    Isoardi,
    #[value(alias = "linear-gues")]
    Linear,
    #[value(alias = "mach-gues")]
    Mach,
}

impl PenaltyArg {
    pub fn kind(self) -> PenaltyKind {
        match self {
            PenaltyArg::None => PenaltyKind::None,
            PenaltyArg::Isoardi => PenaltyKind::Isoardi,
            PenaltyArg::Linear => PenaltyKind::LinearGues,
            PenaltyArg::Mach => PenaltyKind::MachGues,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    #[value(name = "1")]
    First,
    #[value(name = "2")]
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum CouplingArg {
    #[default]
    Split,
    Staged,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Target Mach number in the limiter [default: 1 - epsilon, 1 for isoardi]
    #[arg(long)]
    pub m0: Option<f64>,
    /// Distance of the imposed Mach number to the sonic value [default: 0.1]
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = DEFAULT_CFL)]
    pub cfl: f64,
    /// Stop once max |M| exceeds this value
    #[arg(long, default_value_t = DEFAULT_BLOWUP_THRESHOLD)]
    pub threshold: f64,
    /// Manufactured solution [default: a for isoardi, b otherwise]
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    /// Spatial order [default: 1 for isoardi, 2 otherwise]
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    /// Coupling of the implicit penalty update with the Heun stages
    #[arg(long, value_enum, default_value_t = CouplingArg::Split)]
    pub coupling: CouplingArg,
    /// Output file; the table goes to stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value_t = PenaltyArg::Linear)]
    pub penalty: PenaltyArg,
    #[arg(long, default_value_t = 1e-3)]
    pub eta: f64,
    #[arg(long, default_value_t = 2000)]
    pub cells: usize,
    /// Extra snapshot times, written next to --out
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Vec<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BlowupArgs {
    #[arg(long, value_enum, default_value_t = PenaltyArg::Isoardi)]
    pub penalty: PenaltyArg,
    #[arg(long, default_value_t = 1e-3)]
    pub eta: f64,
    /// Increasing resolutions, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1280")]
    pub cells: Vec<usize>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[arg(long, value_enum, default_value_t = PenaltyArg::Linear)]
    pub penalty: PenaltyArg,
    /// Decreasing values of eta, comma separated
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4")]
    pub etas: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    pub cells: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

fn config_error(msg: impl Into<String>) -> AppError {
    AppError::Config(msg.into())
}

/// Resolves the flags of one run. `eta` is ignored for `--penalty none`.
pub fn build_config(
    penalty: PenaltyArg,
    eta: f64,
    cells: usize,
    common: &CommonArgs,
) -> Result<RunConfig, AppError> {
    let kind = penalty.kind();
    if let Some(e) = common.epsilon {
        if !(e > 0.0 && e < 1.0) {
            return Err(config_error(format!("--epsilon {e} must lie in (0, 1)")));
        }
    }
    let mut cfg = match kind {
        PenaltyKind::None => {
            if common.case == Some(CaseArg::A) {
                return Err(config_error(
                    "--case a conflicts with --penalty none: the reference problem uses case b",
                ));
            }
            let epsilon = gues_epsilon(common)?;
            RunConfig::reference(cells, epsilon)?
        }
        PenaltyKind::Isoardi => {
            let m0 = common.m0.unwrap_or(DEFAULT_ISOARDI_M0);
            let mut cfg = RunConfig::isoardi(cells, eta, m0)?;
            if common.case == Some(CaseArg::B) {
                cfg.case = ManufacturedCase::case_b(m0);
            }
            cfg
        }
        PenaltyKind::LinearGues | PenaltyKind::MachGues => {
            let epsilon = gues_epsilon(common)?;
            let mut cfg = RunConfig::gues(kind, cells, eta, epsilon)?;
            if common.case == Some(CaseArg::A) {
                cfg.case = ManufacturedCase::case_a();
            }
            cfg
        }
    };
    cfg.t_end = common.t_end;
    cfg.cfl = common.cfl;
    cfg.blowup_threshold = common.threshold;
    match common.order {
        Some(OrderArg::First) => cfg.reconstruction = Reconstruction::FirstOrder,
        Some(OrderArg::Second) => cfg.reconstruction = Reconstruction::Muscl,
        None => {}
    }
    cfg.coupling = match common.coupling {
        CouplingArg::Split => PenaltyCoupling::Split,
        CouplingArg::Staged => PenaltyCoupling::Staged,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `ε` of the single-field runs, taken from `--epsilon` or derived from `--m0`.
fn gues_epsilon(common: &CommonArgs) -> Result<f64, AppError> {
    match (common.m0, common.epsilon) {
        (None, None) => Ok(DEFAULT_EPSILON),
        (None, Some(e)) => Ok(e),
        (Some(m0), None) if m0 > 0.0 && m0 < 1.0 => Ok(1.0 - m0),
        (Some(m0), None) => Err(config_error(format!("--m0 {m0} must lie in (0, 1)"))),
        (Some(m0), Some(e)) if (m0 - (1.0 - e)).abs() <= 1e-12 => Ok(e),
        (Some(m0), Some(e)) => Err(config_error(format!(
            "--m0 {m0} conflicts with --epsilon {e}: the target Mach number is 1 - epsilon"
        ))),
    }
}

pub fn run_config(args: &RunArgs) -> Result<RunConfig, AppError> {
    let mut cfg = build_config(args.penalty, args.eta, args.cells, &args.common)?;
    if !args.snapshots.is_empty() && args.common.out.is_none() {
        return Err(config_error("--snapshots requires --out"));
    }
    let mut times = args.snapshots.clone();
    times.sort_by(f64::total_cmp);
    cfg.snapshot_times = times;
    cfg.validate()?;
    Ok(cfg)
}

pub fn blowup_config(args: &BlowupArgs) -> Result<RunConfig, AppError> {
    if args.penalty == PenaltyArg::None {
        return Err(config_error(
            "--penalty none conflicts with blowup: a penalty is required",
        ));
    }
    let first = *args
        .cells
        .first()
        .ok_or_else(|| config_error("--cells is empty"))?;
    build_config(args.penalty, args.eta, first, &args.common)
}

pub fn converge_config(args: &ConvergeArgs) -> Result<RunConfig, AppError> {
    if args.penalty == PenaltyArg::None {
        return Err(config_error(
            "--penalty none conflicts with converge: a penalty is required",
        ));
    }
    let first = *args
        .etas
        .first()
        .ok_or_else(|| config_error("--etas is empty"))?;
    build_config(args.penalty, first, args.cells, &args.common)
}

pub fn penalty_name(kind: PenaltyKind) -> &'static str {
    match kind {
        PenaltyKind::None => "none",
        PenaltyKind::Isoardi => "isoardi",
        PenaltyKind::LinearGues => "linear",
        PenaltyKind::MachGues => "mach",
    }
}

/// One comment line listing the resolved parameters.
pub fn describe(cfg: &RunConfig) -> String {
    let order = match cfg.reconstruction {
        Reconstruction::FirstOrder => 1,
        Reconstruction::Muscl => 2,
    };
    let coupling = match cfg.coupling {
        PenaltyCoupling::Split => "split",
        PenaltyCoupling::Staged => "staged",
    };
    let case = match cfg.case.kind() {
        plasma_penalty_core::CaseKind::A => "a",
        plasma_penalty_core::CaseKind::B => "b",
    };
    format!(
        "# penalty={} eta={:e} cells={} domain=[{}, {}] L={} m0={} epsilon={} t_end={} cfl={} \
         threshold={} case={} order={} coupling={}",
        penalty_name(cfg.penalty.kind()),
        cfg.penalty.eta(),
        cfg.mesh.n_cells(),
        cfg.mesh.x_min(),
        cfg.mesh.x_max(),
        cfg.mesh.limiter_start(),
        if cfg.penalty.kind() == PenaltyKind::None {
            cfg.case.m0()
        } else {
            cfg.penalty.m0()
        },
        cfg.boundary.epsilon(),
        cfg.t_end,
        cfg.cfl,
        cfg.blowup_threshold,
        case,
        order,
        coupling,
    )
}
