//! File formats: load profiles in, trajectories, reports and curves out.
//!
//! Every number written is fixed 6-decimal and columns never move, so
//! reruns are byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::met_bank::StaticMetModel;
use crate::model::{FatigueTrajectory, LoadProfile, Segment};
use crate::reference::CurveComparison;
use crate::validation::ValidationReport;

pub const PROFILE_HEADER: [&str; 2] = ["duration_min", "load_N"];
pub const TRAJECTORY_HEADER: [&str; 4] = ["t_min", "f_load_N", "f_cem_N", "u_min"];
pub const VALIDATION_HEADER: [&str; 9] = [
    "model",
    "group",
    "r",
    "icc",
    "paper_r",
    "paper_icc",
    "delta_r",
    "delta_icc",
    "points_used",
];
pub const CATALOG_HEADER: [&str; 4] = ["id", "group", "formula", "domain"];
pub const MET_HEADER: [&str; 3] = ["model", "f_mvc", "met_min"];

/// Fixed 6-decimal rendering; negative zero prints as `0.000000`.
pub fn fmt6(value: f64) -> String {
    let s = format!("{value:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map(fmt6).unwrap_or_else(|| "NA".to_string())
}

fn csv_err(err: csv::Error) -> Error {
    let row = err.position().map(|p| p.line() as usize).unwrap_or(0);
    match err.kind() {
        csv::ErrorKind::Io(e) => Error::Io(e.to_string()),
        _ => Error::Parse {
            row,
            reason: err.to_string(),
        },
    }
}

/// Parses a `duration_min,load_N` CSV. Row numbers in errors count the
/// header as row 1.
pub fn parse_load_profile_str(text: &str) -> Result<LoadProfile> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != PROFILE_HEADER {
        return Err(Error::Parse {
            row: 1,
            reason: format!(
                "expected header `{}`, found `{}`",
                PROFILE_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut segments = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let cell = |i: usize, name: &str| -> Result<f64> {
            let raw = record.get(i).unwrap_or("");
            raw.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    reason: format!("{name}: non-numeric cell `{raw}`"),
                })
        };
        let duration = cell(0, "duration_min")?;
        let load = cell(1, "load_N")?;
        if duration <= 0.0 {
            return Err(Error::Parse {
                row,
                reason: "duration must be positive".into(),
            });
        }
        if load < 0.0 {
            return Err(Error::Parse {
                row,
                reason: "load must be non-negative".into(),
            });
        }
        segments.push(Segment::new(duration, load));
    }
    if segments.is_empty() {
        return Err(Error::Parse {
            row: 2,
            reason: "profile has no segments".into(),
        });
    }
    LoadProfile::new(segments)
}

pub fn parse_load_profile(path: &Path) -> Result<LoadProfile> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_load_profile_str(&text)
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush()?;
    Ok(())
}

pub fn write_trajectory_csv<W: Write>(trajectory: &FatigueTrajectory, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err)?;
    for s in &trajectory.samples {
        w.write_record([fmt6(s.t), fmt6(s.f_load), fmt6(s.f_cem), fmt6(s.u)])
            .map_err(csv_err)?;
    }
    finish(w)
}

fn validation_cells(report: &ValidationReport) -> Vec<[String; 9]> {
    report
        .rows
        .iter()
        .map(|row| {
            [
                row.model_id.to_string(),
                row.group.to_string(),
                fmt_opt(row.r),
                fmt_opt(row.icc),
                fmt6(row.paper_r),
                fmt6(row.paper_icc),
                fmt_opt(row.delta_r()),
                fmt_opt(row.delta_icc()),
                row.points_used.to_string(),
            ]
        })
        .collect()
}

pub fn write_validation_csv<W: Write>(report: &ValidationReport, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(VALIDATION_HEADER).map_err(csv_err)?;
    for cells in validation_cells(report) {
        w.write_record(&cells).map_err(csv_err)?;
    }
    finish(w)
}

/// Whitespace-aligned table with a dashed rule under the header.
pub fn render_text_table<S: AsRef<str>>(header: &[&str], rows: &[Vec<S>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.as_ref().len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect::<Vec<_>>()
            .join("  ")
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(line(row.iter().map(|c| c.as_ref()).collect()).trim_end());
        out.push('\n');
    }
    out
}

pub fn validation_text_table(report: &ValidationReport) -> String {
    let rows: Vec<Vec<String>> = validation_cells(report)
        .into_iter()
        .map(Vec::from)
        .collect();
    render_text_table(&VALIDATION_HEADER, &rows)
}

pub fn write_catalog_csv<'a, W, I>(models: I, out: W) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a StaticMetModel>,
{
    let mut w = writer(out);
    w.write_record(CATALOG_HEADER).map_err(csv_err)?;
    for m in models {
        w.write_record([
            m.id.to_string(),
            m.group.to_string(),
            m.formula.to_string(),
            m.domain.to_string(),
        ])
        .map_err(csv_err)?;
    }
    finish(w)
}

/// One evaluated MET point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetRow {
    pub model: String,
    pub f_mvc: f64,
    pub met: f64,
}

impl MetRow {
    fn cells(&self) -> Vec<String> {
        vec![self.model.clone(), fmt6(self.f_mvc), fmt6(self.met)]
    }
}

pub fn write_met_csv<W: Write>(rows: &[MetRow], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(MET_HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.cells()).map_err(csv_err)?;
    }
    finish(w)
}

pub fn met_text_table(rows: &[MetRow]) -> String {
    let cells: Vec<Vec<String>> = rows.iter().map(MetRow::cells).collect();
    render_text_table(&MET_HEADER, &cells)
}

/// Two curves on a shared grid, then a trailing `#` comment line with the
/// comparison metrics.
pub fn write_curves_csv<W: Write>(
    header: [&str; 3],
    reference: &[(f64, f64)],
    dynamic: &[(f64, f64)],
    comparison: &CurveComparison,
    mut out: W,
) -> Result<()> {
    {
        let mut w = writer(&mut out);
        w.write_record(header).map_err(csv_err)?;
        for (a, b) in reference.iter().zip(dynamic) {
            w.write_record([fmt6(a.0), fmt6(a.1), fmt6(b.1)])
                .map_err(csv_err)?;
        }
        finish(w)?;
    }
    writeln!(
        out,
        "# max_abs_diff={} r={}",
        fmt6(comparison.max_abs_diff),
        comparison
            .pearson_r
            .map(fmt6)
            .unwrap_or_else(|| "undefined".into())
    )?;
    Ok(())
}

/// Single curve as `t,value`.
pub fn write_curve_csv<W: Write>(header: [&str; 2], curve: &[(f64, f64)], out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(header).map_err(csv_err)?;
    for (t, v) in curve {
        w.write_record([fmt6(*t), fmt6(*v)]).map_err(csv_err)?;
    }
    finish(w)
}
