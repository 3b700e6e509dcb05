//! Report serialization: JSON, CSV and an aligned text table.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::config::Format;
use crate::run::{RunReport, TaskEntry};

pub const CSV_HEADER: [&str; 7] = [
    "name",
    "theorem",
    "lhs",
    "rhs",
    "margin",
    "error_budget",
    "verdict",
];

/// Pretty JSON with every float written with 17 significant digits.
struct ReportFormatter(PrettyFormatter<'static>);

impl Formatter for ReportFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any value with sorted keys and 17-digit floats.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // Going through Value sorts object keys.
    let value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, ReportFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

pub fn from_json(text: &str) -> serde_json::Result<RunReport> {
    serde_json::from_str(text)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// `(theorem, lhs, rhs, margin, error_budget)` for one entry, empty where
/// the entry has no such value.
fn row_values(t: &TaskEntry) -> [String; 5] {
    if let Some(r) = &t.report {
        [
            r.theorem.clone(),
            num(r.lhs),
            num(r.rhs),
            num(r.margin),
            num(r.error_budget),
        ]
    } else if let Some(v) = &t.class_verdict {
        let (lhs, rhs, margin) = match &v.counterexample {
            Some(c) => (num(c.lhs), num(c.rhs), num(c.rhs - c.lhs)),
            None => Default::default(),
        };
        [t.subject.clone(), lhs, rhs, margin, num(v.tolerance)]
    } else {
        [
            t.subject.clone(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ]
    }
}

pub fn write_csv<W: Write>(report: &RunReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for t in &report.tasks {
        let [theorem, lhs, rhs, margin, budget] = row_values(t);
        w.write_record([
            &t.name,
            &theorem,
            &lhs,
            &rhs,
            &margin,
            &budget,
            &t.verdict_label(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn short(v: &str) -> String {
    v.parse::<f64>()
        .map(|x| format!("{x:.6e}"))
        .unwrap_or_default()
}

pub fn write_table<W: Write>(report: &RunReport, mut out: W) -> io::Result<()> {
    let header = [
        "NAME", "THEOREM", "LHS", "RHS", "MARGIN", "BUDGET", "VERDICT",
    ];
    let rows: Vec<[String; 7]> = report
        .tasks
        .iter()
        .map(|t| {
            let [theorem, lhs, rhs, margin, budget] = row_values(t);
            [
                t.name.clone(),
                theorem,
                short(&lhs),
                short(&rhs),
                short(&margin),
                short(&budget),
                t.verdict_label(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[&str]| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            // numbers right-aligned, text left-aligned
            if (2..6).contains(&i) {
                s.push_str(&format!("{cell:>w$}"));
            } else {
                s.push_str(&format!("{cell:<w$}"));
            }
        }
        s.trim_end().to_string()
    };
    writeln!(out, "{}", line(&header))?;
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        writeln!(out, "{}", line(&cells))?;
    }
    let s = &report.summary;
    writeln!(out)?;
    writeln!(
        out,
        "holds {}  violated {}  inconclusive {}  no_violation_found {}  errors {}",
        s.holds, s.violated, s.inconclusive, s.no_violation_found, s.errors
    )?;
    for sweep in &report.sweeps {
        match &sweep.error {
            Some(e) => writeln!(out, "sweep {}: error: {e}", sweep.name)?,
            None => writeln!(
                out,
                "sweep {}: {} points, margins strictly decreasing in s: {}",
                sweep.name,
                sweep.points.len(),
                sweep.margins_strictly_decreasing
            )?,
        }
    }
    Ok(())
}

pub fn render(report: &RunReport, format: Format) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => to_canonical_json(report)?,
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(report, &mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Table => {
            let mut buf = Vec::new();
            write_table(report, &mut buf)?;
            String::from_utf8(buf)?
        }
    })
}

/// Writes the report to `path`, or to stdout when there is none.
pub fn emit_report(report: &RunReport, format: Format, path: Option<&Path>) -> anyhow::Result<()> {
    let text = render(report, format)?;
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
