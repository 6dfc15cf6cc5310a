//! Simulation driver, error norms and the two reference studies: blow-up of
//! the cut-flux penalization under refinement and convergence in `η` of the
//! single-field penalizations.

use alloc::vec::Vec;

use crate::boundary::{BoundarySpec, Extrapolation};
use crate::error::{Error, Result};
use crate::mesh::Mesh1D;
use crate::model::ManufacturedCase;
use crate::penalty::{PenaltyConfig, PenaltyKind};
use crate::scheme::{compute_dt, Field, PenaltyCoupling, Problem, Reconstruction};

pub const DEFAULT_CFL: f64 = 0.45;
pub const DEFAULT_BLOWUP_THRESHOLD: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: Mesh1D,
    pub penalty: PenaltyConfig,
    pub boundary: BoundarySpec,
    pub case: ManufacturedCase,
    pub reconstruction: Reconstruction,
    pub coupling: PenaltyCoupling,
    pub t_end: f64,
    pub cfl: f64,
    /// The run stops once `max_i |M_i|` exceeds this value.
    pub blowup_threshold: f64,
    /// Times at which a copy of the field is kept, ascending.
    pub snapshot_times: Vec<f64>,
}

impl RunConfig {
    /// Cut-flux penalization on `[0, 0.5]` with case A data, run until the
    /// blow-up criterion fires or `t = 1`.
    ///
    /// Defaults to first-order reconstruction. The MUSCL scheme blows up at
    /// the same place, only sooner.
    pub fn isoardi(n_cells: usize, eta: f64, m0: f64) -> Result<Self> {
        let mesh = Mesh1D::reference(n_cells)?;
        Ok(Self {
            penalty: PenaltyConfig::new(PenaltyKind::Isoardi, eta, m0, &mesh)?,
            boundary: BoundarySpec::penalized(0.1)?,
            case: ManufacturedCase::case_a(),
            reconstruction: Reconstruction::FirstOrder,
            ..Self::defaults(mesh)
        })
    }

    /// Single-field penalization (`LinearGues` or `MachGues`) on `[0, 0.5]`
    /// with case B data and `M0 = 1 − ε`, up to `t = 1`.
    pub fn gues(kind: PenaltyKind, n_cells: usize, eta: f64, epsilon: f64) -> Result<Self> {
        let mesh = Mesh1D::reference(n_cells)?;
        let m0 = 1.0 - epsilon;
        Ok(Self {
            penalty: PenaltyConfig::new(kind, eta, m0, &mesh)?,
            boundary: BoundarySpec::penalized(epsilon)?,
            case: ManufacturedCase::case_b(m0),
            ..Self::defaults(mesh)
        })
    }

    /// Unpenalized reference problem on `[0, L]` with `M = 1 − ε` imposed at
    /// `x = L` and case B data. The density is extrapolated linearly into the
    /// wall ghosts; a constant copy drops the run to first order.
    pub fn reference(n_cells: usize, epsilon: f64) -> Result<Self> {
        let mesh = Mesh1D::new(0.0, 0.4, n_cells, 0.4)?;
        Ok(Self {
            penalty: PenaltyConfig::none(&mesh),
            boundary: BoundarySpec::reference(epsilon, Extrapolation::Linear)?,
            case: ManufacturedCase::case_b(1.0 - epsilon),
            ..Self::defaults(mesh)
        })
    }

    fn defaults(mesh: Mesh1D) -> Self {
        Self {
            penalty: PenaltyConfig::none(&mesh),
            mesh,
            boundary: BoundarySpec::penalized(0.1).expect("valid default"),
            case: ManufacturedCase::case_b(0.9),
            reconstruction: Reconstruction::Muscl,
            coupling: PenaltyCoupling::Split,
            t_end: 1.0,
            cfl: DEFAULT_CFL,
            blowup_threshold: DEFAULT_BLOWUP_THRESHOLD,
            snapshot_times: Vec::new(),
        }
    }

    /// Same run on a mesh with `n_cells` cells.
    pub fn with_cells(&self, n_cells: usize) -> Result<Self> {
        let mesh = self.mesh.with_cells(n_cells)?;
        let penalty = self.rebuild_penalty(&mesh, self.penalty.eta())?;
        Ok(Self {
            mesh,
            penalty,
            ..self.clone()
        })
    }

    /// Same run with penalization parameter `eta`.
    pub fn with_eta(&self, eta: f64) -> Result<Self> {
        let penalty = self.rebuild_penalty(&self.mesh, eta)?;
        Ok(Self {
            penalty,
            ..self.clone()
        })
    }

    fn rebuild_penalty(&self, mesh: &Mesh1D, eta: f64) -> Result<PenaltyConfig> {
        match self.penalty.kind() {
            PenaltyKind::None => Ok(PenaltyConfig::none(mesh)),
            kind => PenaltyConfig::new(kind, eta, self.penalty.m0(), mesh),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config("t_end must be positive"));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(Error::Config("cfl must lie in (0, 1)"));
        }
        if !(self.blowup_threshold > 1.0) {
            return Err(Error::Config("blow-up threshold must exceed 1"));
        }
        if self.snapshot_times.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("snapshot times must be ascending"));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<Problem> {
        Ok(
            Problem::new(self.mesh, self.boundary, self.penalty.clone(), self.case)?
                .with_reconstruction(self.reconstruction)
                .with_coupling(self.coupling),
        )
    }
}

/// Outcome of the blow-up monitor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupReport {
    pub cells: usize,
    pub eta: f64,
    pub blew_up: bool,
    /// Time at which the run stopped: either the blow-up time or `t_end`.
    pub t_blowup: f64,
    /// Cell center of `argmax_i |M_i|` at the stopping time.
    pub x_peak: f64,
    pub peak_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub field: Field,
    /// Time reached by `field`.
    pub t: f64,
    pub steps: usize,
    pub report: BlowupReport,
    pub snapshots: Vec<Snapshot>,
}

/// Advances the exact initial data with adaptive time steps until `t_end` or
/// until `max_i |M_i|` exceeds the blow-up threshold.
pub fn run_simulation(cfg: &RunConfig) -> Result<Simulation> {
    cfg.validate()?;
    let problem = cfg.problem()?;
    let mesh = cfg.mesh;
    let mut field = problem.initial_field();
    let mut t = 0.0;
    let mut steps = 0;
    let mut snapshots = Vec::with_capacity(cfg.snapshot_times.len());
    let mut pending = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&s| s <= cfg.t_end)
        .peekable();
    while pending.peek() == Some(&0.0) {
        snapshots.push(Snapshot {
            t: 0.0,
            field: field.clone(),
        });
        pending.next();
    }

    let report = |field: &Field, t: f64, blew_up: bool| {
        let (i, peak) = field.max_abs_mach();
        BlowupReport {
            cells: mesh.n_cells(),
            eta: cfg.penalty.eta(),
            blew_up,
            t_blowup: t,
            x_peak: mesh.center(i as isize),
            peak_value: if blew_up && !(peak > cfg.blowup_threshold) {
                f64::INFINITY
            } else {
                peak
            },
        }
    };

    loop {
        let stop = pending.peek().copied().unwrap_or(cfg.t_end);
        let remaining = stop - t;
        let mut dt = compute_dt(&field, &mesh, cfg.cfl);
        // avoid a sliver step right before a stop time
        if dt >= remaining || remaining - dt < 1e-3 * dt {
            dt = remaining;
        }
        let next = match problem.heun_step(&field, t, dt) {
            Ok(f) => f,
            Err(Error::NonFinite { cell }) => {
                let mut r = report(&field, t + dt, true);
                r.x_peak = mesh.center(cell as isize);
                r.peak_value = f64::INFINITY;
                return Ok(Simulation {
                    field,
                    t: t + dt,
                    steps: steps + 1,
                    report: r,
                    snapshots,
                });
            }
            Err(e) => return Err(e),
        };
        field = next;
        steps += 1;
        t = if dt == remaining { stop } else { t + dt };

        let (_, peak) = field.max_abs_mach();
        if !(peak <= cfg.blowup_threshold) {
            let r = report(&field, t, true);
            return Ok(Simulation {
                field,
                t,
                steps,
                report: r,
                snapshots,
            });
        }
        while pending.peek().is_some_and(|&s| s <= t) {
            snapshots.push(Snapshot {
                t,
                field: field.clone(),
            });
            pending.next();
        }
        if t >= cfg.t_end {
            let r = report(&field, t, false);
            return Ok(Simulation {
                field,
                t,
                steps,
                report: r,
                snapshots,
            });
        }
    }
}

/// L¹ errors over the plasma region `x < limiter_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1_n: f64,
    pub l1_dx_n: f64,
    pub l1_gamma: f64,
    pub l1_dx_gamma: f64,
}

impl ErrorNorms {
    pub fn as_array(&self) -> [f64; 4] {
        [self.l1_n, self.l1_dx_n, self.l1_gamma, self.l1_dx_gamma]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub eta: f64,
    pub norms: ErrorNorms,
}

/// Discrete derivative of `values` on a uniform grid: centered in the interior,
/// one-sided second order at both ends.
fn derivative(values: &[f64], dx: f64) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 3, "derivative needs at least three samples");
    let h2 = 2.0 * dx;
    (0..n)
        .map(|i| match i {
            0 => (-3.0 * values[0] + 4.0 * values[1] - values[2]) / h2,
            i if i == n - 1 => (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / h2,
            i => (values[i + 1] - values[i - 1]) / h2,
        })
        .collect()
}

pub fn l1_errors(field: &Field, case: &ManufacturedCase, t: f64, mesh: &Mesh1D) -> ErrorNorms {
    let plasma = &field.interior()[..mesh.first_limiter_cell()];
    let dx = mesh.dx();
    let n: Vec<f64> = plasma.iter().map(|u| u.density).collect();
    let g: Vec<f64> = plasma.iter().map(|u| u.flux).collect();
    let dn = derivative(&n, dx);
    let dg = derivative(&g, dx);
    let mut e = ErrorNorms {
        l1_n: 0.0,
        l1_dx_n: 0.0,
        l1_gamma: 0.0,
        l1_dx_gamma: 0.0,
    };
    for i in 0..plasma.len() {
        let x = mesh.center(i as isize);
        let exact = case.exact_state(t, x);
        let (exact_dn, exact_dg) = case.exact_gradient(t, x);
        e.l1_n += libm::fabs(n[i] - exact.density);
        e.l1_gamma += libm::fabs(g[i] - exact.flux);
        e.l1_dx_n += libm::fabs(dn[i] - exact_dn);
        e.l1_dx_gamma += libm::fabs(dg[i] - exact_dg);
    }
    e.l1_n *= dx;
    e.l1_dx_n *= dx;
    e.l1_gamma *= dx;
    e.l1_dx_gamma *= dx;
    e
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Config("slope fit needs at least two paired samples"));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Config("slope fit needs positive finite samples"));
    }
    let lx: Vec<f64> = xs.iter().map(|&v| libm::log(v)).collect();
    let ly: Vec<f64> = ys.iter().map(|&v| libm::log(v)).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        return Err(Error::Config("slope fit needs distinct abscissae"));
    }
    Ok(sxy / sxx)
}

/// Fitted log-log slopes of each error against `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slopes {
    pub n: f64,
    pub dx_n: f64,
    pub gamma: f64,
    pub dx_gamma: f64,
}

impl Slopes {
    pub fn as_array(&self) -> [f64; 4] {
        [self.n, self.dx_n, self.gamma, self.dx_gamma]
    }

    pub fn all_within(&self, lo: f64, hi: f64) -> bool {
        self.as_array().iter().all(|&s| s >= lo && s <= hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub reports: Vec<ErrorReport>,
    pub slopes: Slopes,
}

impl ConvergenceStudy {
    pub fn from_reports(reports: Vec<ErrorReport>) -> Result<Self> {
        let etas: Vec<f64> = reports.iter().map(|r| r.eta).collect();
        let column =
            |k: usize| -> Vec<f64> { reports.iter().map(|r| r.norms.as_array()[k]).collect() };
        let slopes = Slopes {
            n: fit_loglog_slope(&etas, &column(0))?,
            dx_n: fit_loglog_slope(&etas, &column(1))?,
            gamma: fit_loglog_slope(&etas, &column(2))?,
            dx_gamma: fit_loglog_slope(&etas, &column(3))?,
        };
        Ok(Self { reports, slopes })
    }
}

/// Checks the preconditions of a convergence sweep.
pub fn validate_etas(etas: &[f64]) -> Result<()> {
    if etas.len() < 3 {
        return Err(Error::Config(
            "a convergence study needs at least three values of eta",
        ));
    }
    if etas.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Config(
            "eta values must be sorted in descending order",
        ));
    }
    if etas.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Config("eta values must be positive"));
    }
    Ok(())
}

/// Runs `base` for one `η` and measures the plasma-region errors at `t_end`.
pub fn convergence_member(base: &RunConfig, eta: f64) -> Result<ErrorReport> {
    let cfg = base.with_eta(eta)?;
    let sim = run_simulation(&cfg)?;
    if sim.report.blew_up {
        return Err(Error::Blowup {
            eta,
            t: sim.report.t_blowup,
        });
    }
    Ok(ErrorReport {
        eta,
        norms: l1_errors(&sim.field, &cfg.case, sim.t, &cfg.mesh),
    })
}

pub fn convergence_study(etas: &[f64], base: &RunConfig) -> Result<ConvergenceStudy> {
    validate_etas(etas)?;
    if base.penalty.kind() == PenaltyKind::None {
        return Err(Error::Config("a convergence study needs a penalty"));
    }
    let reports = etas
        .iter()
        .map(|&eta| convergence_member(base, eta))
        .collect::<Result<Vec<_>>>()?;
    ConvergenceStudy::from_reports(reports)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupStudy {
    pub reports: Vec<BlowupReport>,
    /// Every run blew up and the blow-up time decreases with refinement.
    pub earlier_with_refinement: bool,
    /// Every run blew up and `|x_peak − L|` does not increase with refinement.
    pub closer_with_refinement: bool,
}

impl BlowupStudy {
    pub fn from_reports(reports: Vec<BlowupReport>, limiter_start: f64) -> Self {
        let all = reports.iter().all(|r| r.blew_up);
        let earlier = all && reports.windows(2).all(|w| w[1].t_blowup < w[0].t_blowup);
        let closer = all
            && reports.windows(2).all(|w| {
                libm::fabs(w[1].x_peak - limiter_start) <= libm::fabs(w[0].x_peak - limiter_start)
            });
        Self {
            reports,
            earlier_with_refinement: earlier,
            closer_with_refinement: closer,
        }
    }
}

pub fn validate_resolutions(resolutions: &[usize]) -> Result<()> {
    if resolutions.len() < 2 {
        return Err(Error::Config(
            "a refinement study needs at least two resolutions",
        ));
    }
    if resolutions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("resolutions must be increasing"));
    }
    Ok(())
}

pub fn blowup_member(cfg: &RunConfig, cells: usize) -> Result<BlowupReport> {
    Ok(run_simulation(&cfg.with_cells(cells)?)?.report)
}

pub fn blowup_refinement_study(resolutions: &[usize], cfg: &RunConfig) -> Result<BlowupStudy> {
    validate_resolutions(resolutions)?;
    let reports = resolutions
        .iter()
        .map(|&j| blowup_member(cfg, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(BlowupStudy::from_reports(reports, cfg.mesh.limiter_start()))
}
