use std::io::{self, Write};
use std::path::{Path, PathBuf};

use plasma_penalty_core::experiments::{l1_errors, run_simulation};
use plasma_penalty_core::{BlowupStudy, ConvergenceStudy, ErrorNorms};

use crate::args::{self, BlowupArgs, Cli, Command, ConvergeArgs, RunArgs};
use crate::error::AppError;
use crate::sweep;
use crate::table::{self, BlowupRow};

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), AppError> {
    match &cli.command {
        Command::Run(a) => run(a, stdout),
        Command::Blowup(a) => blowup(a, stdout).map(|_| ()),
        Command::Converge(a) => converge(a, stdout).map(|_| ()),
    }
}

fn stdout_err(e: io::Error) -> AppError {
    AppError::io("<stdout>", e)
}

/// Writes a table to `out`, or to `stdout` when no path is given.
fn emit(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), AppError> {
    match out {
        Some(path) => {
            table::write_file(path, f)?;
            writeln!(stdout, "# wrote {}", path.display()).map_err(stdout_err)
        }
        None => f(stdout).map_err(stdout_err),
    }
}

/// Fails before any computation if the output directory does not exist.
fn check_out(out: Option<&Path>) -> Result<(), AppError> {
    let Some(path) = out else { return Ok(()) };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if dir.is_dir() {
        Ok(())
    } else {
        Err(AppError::io(
            path,
            io::Error::new(io::ErrorKind::NotFound, "output directory does not exist"),
        ))
    }
}

fn norms_line(e: &ErrorNorms) -> String {
    format!(
        "# l1_N={:e} l1_dxN={:e} l1_Gamma={:e} l1_dxGamma={:e}",
        e.l1_n, e.l1_dx_n, e.l1_gamma, e.l1_dx_gamma
    )
}

fn snapshot_path(out: &Path, t: f64) -> PathBuf {
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("snapshot");
    let ext = out.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    out.with_file_name(format!("{stem}_t{t}.{ext}"))
}

pub fn run(a: &RunArgs, stdout: &mut dyn Write) -> Result<(), AppError> {
    let cfg = args::run_config(a)?;
    check_out(a.common.out.as_deref())?;
    writeln!(stdout, "{}", args::describe(&cfg)).map_err(stdout_err)?;
    let sim = run_simulation(&cfg)?;
    let r = sim.report;
    writeln!(
        stdout,
        "# t={} steps={} blew_up={} max_mach={:e} x_peak={}",
        sim.t, sim.steps, r.blew_up, r.peak_value, r.x_peak
    )
    .map_err(stdout_err)?;
    if !r.blew_up {
        let e = l1_errors(&sim.field, &cfg.case, sim.t, &cfg.mesh);
        writeln!(stdout, "{}", norms_line(&e)).map_err(stdout_err)?;
    }
    if let Some(out) = a.common.out.as_deref() {
        for s in &sim.snapshots {
            let rows = table::snapshot_rows(&s.field, &cfg.mesh);
            emit(Some(&snapshot_path(out, s.t)), stdout, |w| {
                table::write_snapshot(w, &rows)
            })?;
        }
    }
    let rows = table::snapshot_rows(&sim.field, &cfg.mesh);
    emit(a.common.out.as_deref(), stdout, |w| {
        table::write_snapshot(w, &rows)
    })
}

pub fn blowup(a: &BlowupArgs, stdout: &mut dyn Write) -> Result<BlowupStudy, AppError> {
    let cfg = args::blowup_config(a)?;
    check_out(a.common.out.as_deref())?;
    writeln!(stdout, "{}", args::describe(&cfg)).map_err(stdout_err)?;
    let study = sweep::blowup(&a.cells, &cfg)?;
    for r in &study.reports {
        writeln!(
            stdout,
            "# cells={} blew_up={} t_blowup={} x_peak={} peak_value={:e}",
            r.cells, r.blew_up, r.t_blowup, r.x_peak, r.peak_value
        )
        .map_err(stdout_err)?;
    }
    if study.reports.len() > 1 {
        writeln!(
            stdout,
            "# earlier_with_refinement={} closer_with_refinement={}",
            study.earlier_with_refinement, study.closer_with_refinement
        )
        .map_err(stdout_err)?;
    }
    let rows: Vec<BlowupRow> = study.reports.iter().map(BlowupRow::from).collect();
    emit(a.common.out.as_deref(), stdout, |w| {
        table::write_blowups(w, &rows)
    })?;
    Ok(study)
}

pub fn converge(a: &ConvergeArgs, stdout: &mut dyn Write) -> Result<ConvergenceStudy, AppError> {
    let cfg = args::converge_config(a)?;
    check_out(a.common.out.as_deref())?;
    writeln!(stdout, "{}", args::describe(&cfg)).map_err(stdout_err)?;
    let study = sweep::convergence(&a.etas, &cfg)?;
    emit(a.common.out.as_deref(), stdout, |w| {
        table::write_errors(&mut *w, &study.reports, Some(&study.slopes))
    })?;
    Ok(study)
}
