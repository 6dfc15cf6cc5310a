//! CSV tables: field snapshots, error tables and blow-up reports.
//!
//! Values are written in scientific notation with 17 significant digits so a
//! reread reproduces every `f64` exactly.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use plasma_penalty_core::{BlowupReport, ErrorNorms, ErrorReport, Field, Mesh1D, Slopes};

use crate::error::AppError;

pub const SNAPSHOT_HEADER: [&str; 4] = ["x", "N", "Gamma", "M"];
pub const ERROR_HEADER: [&str; 5] = ["eta", "l1_N", "l1_dxN", "l1_Gamma", "l1_dxGamma"];
pub const BLOWUP_HEADER: [&str; 5] = ["cells", "eta", "t_blowup", "x_peak", "peak_value"];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnapshotRow {
    pub x: f64,
    pub density: f64,
    pub flux: f64,
    pub mach: f64,
}

/// The columns of a blow-up table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupRow {
    pub cells: usize,
    pub eta: f64,
    pub t_blowup: f64,
    pub x_peak: f64,
    pub peak_value: f64,
}

impl From<&BlowupReport> for BlowupRow {
    fn from(r: &BlowupReport) -> Self {
        Self {
            cells: r.cells,
            eta: r.eta,
            t_blowup: r.t_blowup,
            x_peak: r.x_peak,
            peak_value: r.peak_value,
        }
    }
}

pub fn snapshot_rows(field: &Field, mesh: &Mesh1D) -> Vec<SnapshotRow> {
    field
        .interior()
        .iter()
        .zip(mesh.centers())
        .map(|(u, x)| SnapshotRow {
            x,
            density: u.density,
            flux: u.flux,
            mach: u.mach(),
        })
        .collect()
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn into_io(e: csv::Error) -> io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => io::Error::other(format!("{other:?}")),
    }
}

pub fn write_snapshot<W: Write>(w: W, rows: &[SnapshotRow]) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(SNAPSHOT_HEADER).map_err(into_io)?;
    for r in rows {
        out.write_record([r.x, r.density, r.flux, r.mach].map(fmt_f64))
            .map_err(into_io)?;
    }
    out.flush()
}

/// Error table with a trailing `# slope_...` comment when slopes are given.
pub fn write_errors<W: Write>(
    w: W,
    reports: &[ErrorReport],
    slopes: Option<&Slopes>,
) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(ERROR_HEADER).map_err(into_io)?;
    for r in reports {
        let n = r.norms;
        out.write_record([r.eta, n.l1_n, n.l1_dx_n, n.l1_gamma, n.l1_dx_gamma].map(fmt_f64))
            .map_err(into_io)?;
    }
    out.flush()?;
    let mut w = out
        .into_inner()
        .map_err(|e| io::Error::other(e.to_string()))?;
    if let Some(s) = slopes {
        writeln!(w, "{}", slope_comment(s))?;
    }
    w.flush()
}

pub fn slope_comment(s: &Slopes) -> String {
    format!(
        "# slope_N={:.15},slope_dxN={:.15},slope_Gamma={:.15},slope_dxGamma={:.15}",
        s.n, s.dx_n, s.gamma, s.dx_gamma
    )
}

pub fn write_blowups<W: Write>(w: W, rows: &[BlowupRow]) -> io::Result<()> {
    let mut out = writer(w);
    out.write_record(BLOWUP_HEADER).map_err(into_io)?;
    for r in rows {
        out.write_record([
            r.cells.to_string(),
            fmt_f64(r.eta),
            fmt_f64(r.t_blowup),
            fmt_f64(r.x_peak),
            fmt_f64(r.peak_value),
        ])
        .map_err(into_io)?;
    }
    out.flush()
}

/// Writes through `emit` into `path`, mapping failures to [`AppError::Io`].
pub fn write_file(
    path: &Path,
    emit: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), AppError> {
    let file = File::create(path).map_err(|e| AppError::io(path, e))?;
    let mut w = BufWriter::new(file);
    emit(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| AppError::io(path, e))
}

fn records<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(r)
}

fn check_header<R: Read>(rd: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), String> {
    let h = rd.headers().map_err(|e| e.to_string())?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(format!(
            "expected header {}, found {}",
            expected.join(","),
            h.iter().collect::<Vec<_>>().join(",")
        ));
    }
    Ok(())
}

fn numbers<const K: usize>(rec: &csv::StringRecord) -> Result<[f64; K], String> {
    if rec.len() != K {
        return Err(format!("expected {K} columns, found {}", rec.len()));
    }
    let mut v = [0.0; K];
    for (slot, s) in v.iter_mut().zip(rec.iter()) {
        *slot = s
            .trim()
            .parse()
            .map_err(|_| format!("not a number: {s:?}"))?;
    }
    Ok(v)
}

pub fn read_snapshot<R: Read>(r: R) -> Result<Vec<SnapshotRow>, String> {
    let mut rd = records(r);
    check_header(&mut rd, &SNAPSHOT_HEADER)?;
    rd.records()
        .map(|rec| {
            let [x, density, flux, mach] = numbers(&rec.map_err(|e| e.to_string())?)?;
            Ok(SnapshotRow {
                x,
                density,
                flux,
                mach,
            })
        })
        .collect()
}

/// Rows of an error table plus the slopes recorded in its comment, if any.
pub fn read_errors<R: Read>(mut r: R) -> Result<(Vec<ErrorReport>, Option<Slopes>), String> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(|e| e.to_string())?;
    let slopes = text
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("# slope_N="))
        .map(parse_slopes)
        .transpose()?;
    let mut rd = records(text.as_bytes());
    check_header(&mut rd, &ERROR_HEADER)?;
    let reports = rd
        .records()
        .map(|rec| {
            let [eta, l1_n, l1_dx_n, l1_gamma, l1_dx_gamma] =
                numbers(&rec.map_err(|e| e.to_string())?)?;
            Ok(ErrorReport {
                eta,
                norms: ErrorNorms {
                    l1_n,
                    l1_dx_n,
                    l1_gamma,
                    l1_dx_gamma,
                },
            })
        })
        .collect::<Result<_, String>>()?;
    Ok((reports, slopes))
}

fn parse_slopes(rest: &str) -> Result<Slopes, String> {
    let mut v = [0.0; 4];
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("malformed slope line: {rest:?}"));
    }
    for (k, p) in parts.iter().enumerate() {
        let value = if k == 0 {
            p
        } else {
            p.split_once('=').map(|(_, v)| v).unwrap_or(p)
        };
        v[k] = value
            .parse()
            .map_err(|_| format!("malformed slope: {p:?}"))?;
    }
    Ok(Slopes {
        n: v[0],
        dx_n: v[1],
        gamma: v[2],
        dx_gamma: v[3],
    })
}

pub fn read_blowups<R: Read>(r: R) -> Result<Vec<BlowupRow>, String> {
    let mut rd = records(r);
    check_header(&mut rd, &BLOWUP_HEADER)?;
    rd.records()
        .map(|rec| {
            let rec = rec.map_err(|e| e.to_string())?;
            let cells = rec
                .get(0)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|_| "malformed cell count".to_string())?;
            let [_, eta, t_blowup, x_peak, peak_value] = numbers(&rec)?;
            Ok(BlowupRow {
                cells,
                eta,
                t_blowup,
                x_peak,
                peak_value,
            })
        })
        .collect()
}
