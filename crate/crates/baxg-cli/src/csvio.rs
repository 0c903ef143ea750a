//! Trace CSV emission and parsing.
//!
//! Schema (exact header, UTF-8, LF line endings, reals as `%.12e`):
//! `algorithm,problem,seed,lambda,k,oracle_total,merit,inner_iters,wall_ms`

use baxg_core::{ConvergenceTrace, TraceRow};
use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const CSV_HEADER: &str =
    "algorithm,problem,seed,lambda,k,oracle_total,merit,inner_iters,wall_ms";

/// C-style `%.12e` formatting: twelve fractional digits, two-digit signed
/// exponent.
pub fn fmt_e12(x: f64) -> String {
    debug_assert!(x.is_finite(), "refusing to format non-finite value");
    let raw = format!("{x:.12e}");
    let (mantissa, exponent) = raw.split_once('e').expect("exponential format");
    let (sign, digits) = match exponent.strip_prefix('-') {
        Some(rest) => ('-', rest),
        None => ('+', exponent),
    };
    format!("{mantissa}e{sign}{digits:0>2}")
}

/// Identity of the run the rows belong to; repeated on every CSV line.
#[derive(Debug, Clone)]
pub struct RunLabel {
    pub algorithm: String,
    pub problem: String,
    pub seed: u64,
    pub lambda: f64,
}

pub fn render_csv(label: &RunLabel, rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            label.algorithm,
            label.problem,
            label.seed,
            fmt_e12(label.lambda),
            row.iteration,
            row.oracle_total,
            fmt_e12(row.merit),
            row.inner_iterations,
            fmt_e12(row.wall_ms),
        );
    }
    out
}

pub fn emit_csv(label: &RunLabel, trace: &ConvergenceTrace, path: &Path) -> io::Result<()> {
    std::fs::write(path, render_csv(label, &trace.rows))
}

/// One parsed trace series, as read back for plotting.
#[derive(Debug, Clone)]
pub struct CsvSeries {
    pub label: RunLabel,
    pub points: Vec<(u64, f64)>,
}

pub fn parse_csv(content: &str) -> Result<CsvSeries, String> {
    let mut lines = content.lines();
    let header = lines.next().ok_or("empty file")?;
    if header != CSV_HEADER {
        return Err(format!("unexpected header: {header}"));
    }
    let mut label: Option<RunLabel> = None;
    let mut points = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(format!(
                "line {}: expected 9 fields, got {}",
                idx + 2,
                fields.len()
            ));
        }
        let parse_f = |s: &str, what: &str| {
            s.parse::<f64>()
                .map_err(|e| format!("line {}: bad {what}: {e}", idx + 2))
        };
        let parse_u = |s: &str, what: &str| {
            s.parse::<u64>()
                .map_err(|e| format!("line {}: bad {what}: {e}", idx + 2))
        };
        if label.is_none() {
            label = Some(RunLabel {
                algorithm: fields[0].to_string(),
                problem: fields[1].to_string(),
                seed: parse_u(fields[2], "seed")?,
                lambda: parse_f(fields[3], "lambda")?,
            });
        }
        points.push((
            parse_u(fields[5], "oracle_total")?,
            parse_f(fields[6], "merit")?,
        ));
    }
    let label = label.ok_or("no data rows")?;
    Ok(CsvSeries { label, points })
}

/// Strip the wall-clock column, the only nondeterministic one, for
/// byte-level comparisons between runs.
pub fn strip_wall_ms(content: &str) -> String {
    content
        .lines()
        .map(|line| match line.rsplit_once(',') {
            Some((rest, _)) => rest.to_string(),
            None => line.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e12_matches_c_formatting() {
        assert_eq!(fmt_e12(0.0), "0.000000000000e+00");
        assert_eq!(fmt_e12(1.5), "1.500000000000e+00");
        assert_eq!(fmt_e12(-2.5e-3), "-2.500000000000e-03");
        assert_eq!(fmt_e12(1e-6), "1.000000000000e-06");
        assert_eq!(fmt_e12(6.02214076e23), "6.022140760000e+23");
        assert_eq!(fmt_e12(-1.23456789012345e-120), "-1.234567890123e-120");
    }

    #[test]
    fn csv_round_trips() {
        let label = RunLabel {
            algorithm: "baxg".into(),
            problem: "lad".into(),
            seed: 42,
            lambda: 1e-4,
        };
        let rows = vec![
            TraceRow {
                iteration: 1,
                oracle_total: 9,
                merit: 3.25,
                inner_iterations: 4,
                wall_ms: 0.5,
            },
            TraceRow {
                iteration: 2,
                oracle_total: 20,
                merit: 1.5,
                inner_iterations: 6,
                wall_ms: 1.25,
            },
        ];
        let text = render_csv(&label, &rows);
        assert!(text.starts_with(CSV_HEADER));
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));
        let series = parse_csv(&text).unwrap();
        assert_eq!(series.label.algorithm, "baxg");
        assert_eq!(series.label.seed, 42);
        assert_eq!(series.points, vec![(9, 3.25), (20, 1.5)]);
    }

    #[test]
    fn wall_ms_strip_removes_only_last_column() {
        let text = "a,b,c\n1,2,3\n";
        assert_eq!(strip_wall_ms(text), "a,b\n1,2");
    }

    #[test]
    fn parse_rejects_wrong_header() {
        assert!(parse_csv("nope\n1,2\n").is_err());
    }
}
