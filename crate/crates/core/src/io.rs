//! Text formats: matrix and vector files, breakpoint CSVs for plain and
//! total-variation paths, and the Monte Carlo frequency table. Writers emit
//! 17 significant digits so every value round-trips exactly; readers skip
//! blank lines and `#` comments.

use std::path::Path;

use crate::ensemble::FrequencyReport;
use crate::error::{Error, Result};
use crate::homotopy::{AuditReport, Breakpoint, Event, LassoProblem, SolutionPath};
use crate::matrix::DenseMatrix;
use crate::tv::TvPath;

/// Full-precision float formatting (17 significant digits).
pub fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reads a file to a string, naming the path in any i/o error.
pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| annotate_io(path, e))
}

/// Writes a string to a file, naming the path in any i/o error.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| annotate_io(path, e))
}

fn annotate_io(path: &Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

fn parse_f64(tok: &str, context: &str) -> Result<f64> {
    tok.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("{context}: bad number {tok:?}")))
}

/// Parses matrix text: one row per line, entries separated by commas or
/// whitespace, `#` starts a comment.
pub fn parse_matrix_str(s: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, raw) in s.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cleaned = line.replace(',', " ");
        let row = cleaned
            .split_whitespace()
            .map(|tok| parse_f64(tok, &format!("line {}", lineno + 1)))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no rows in matrix text".into()));
    }
    DenseMatrix::from_rows(&rows)
}

pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    parse_matrix_str(&read_text(path)?)
}

pub fn format_matrix(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format_full(*v)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: &Path, m: &DenseMatrix) -> Result<()> {
    write_text(path, &format_matrix(m))
}

/// Parses a vector from text; any layout of the entries works, line breaks
/// and commas included.
pub fn parse_vector_str(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, raw) in s.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cleaned = line.replace(',', " ");
        for tok in cleaned.split_whitespace() {
            out.push(parse_f64(tok, &format!("line {}", lineno + 1))?);
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no values in vector text".into()));
    }
    Ok(out)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    parse_vector_str(&read_text(path)?)
}

/// One value per line.
pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::new();
    for x in v {
        out.push_str(&format_full(*x));
        out.push('\n');
    }
    out
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<()> {
    write_text(path, &format_vector(v))
}

/// Breakpoint CSV with header `lambda,event,u_1,...,u_n`.
pub fn path_to_csv(path: &SolutionPath) -> String {
    let n = path.problem().a().cols();
    let mut out = String::from("lambda,event");
    for i in 1..=n {
        out.push_str(&format!(",u_{i}"));
    }
    out.push('\n');
    for bp in path.breakpoints() {
        out.push_str(&format_full(bp.lambda));
        out.push(',');
        out.push_str(&bp.event.to_string());
        for v in &bp.u {
            out.push(',');
            out.push_str(&format_full(*v));
        }
        out.push('\n');
    }
    out
}

/// A parsed breakpoint row.
#[derive(Debug, Clone)]
pub struct PathRow {
    pub lambda: f64,
    pub event: Event,
    pub u: Vec<f64>,
}

/// Parses a breakpoint CSV produced by [`path_to_csv`] (comment lines, e.g.
/// an appended audit block, are skipped).
pub fn parse_path_csv(s: &str) -> Result<Vec<PathRow>> {
    let mut lines = s
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty path CSV".into()))?;
    if !header.starts_with("lambda,event") {
        return Err(Error::Parse(
            "path CSV must start with a 'lambda,event,u_1,...' header".into(),
        ));
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let mut parts = line.split(',');
        let lambda = parse_f64(
            parts.next().ok_or_else(|| Error::Parse(format!("row {k}: missing lambda")))?,
            &format!("row {k}"),
        )?;
        let event: Event = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("row {k}: missing event")))?
            .parse()?;
        let u = parts
            .map(|tok| parse_f64(tok, &format!("row {k}")))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(PathRow { lambda, event, u });
    }
    if rows.is_empty() {
        return Err(Error::Parse("no breakpoints in path CSV".into()));
    }
    Ok(rows)
}

/// Reassembles a path from parsed rows for re-verification against the
/// original problem.
pub fn rebuild_path(problem: LassoProblem, rows: &[PathRow]) -> Result<SolutionPath> {
    let n = problem.a().cols();
    let mut bps = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        if row.u.len() != n {
            return Err(Error::Dimension(format!(
                "row {k}: {} coefficients but the dictionary has {n} columns",
                row.u.len()
            )));
        }
        if !row.lambda.is_finite() || row.lambda < 0.0 {
            return Err(Error::Parse(format!("row {k}: bad lambda {}", row.lambda)));
        }
        bps.push(Breakpoint::new(row.lambda, row.u.clone(), row.event.clone())?);
    }
    Ok(SolutionPath::from_parts(problem, bps))
}

/// `#`-prefixed audit summary plus the per-breakpoint trade-off pairs,
/// appended after the CSV rows by the `path --audit` command.
pub fn audit_comment_block(path: &SolutionPath, report: &AuditReport) -> String {
    let mut out = format!(
        "# audit cardinality_monotone={} magnitude_monotone={}\n",
        report.cardinality_monotone, report.magnitude_monotone
    );
    for issue in &report.issues {
        out.push_str(&format!("# audit issue: {issue}\n"));
    }
    for (bp, (l1, rss)) in path.breakpoints().iter().zip(path.pareto()) {
        out.push_str(&format!(
            "# pareto lambda={} l1={} rss={}\n",
            format_full(bp.lambda),
            format_full(l1),
            format_full(rss)
        ));
    }
    out
}

/// TV path CSV with header `lambda,x_1,...,x_n,u_1,...,u_m`.
pub fn tv_path_to_csv(path: &TvPath) -> String {
    let bps = path.lasso_path.breakpoints();
    let n = path.x_breakpoints.first().map_or(0, Vec::len);
    let m = bps.first().map_or(0, |bp| bp.u.len());
    let mut out = String::from("lambda");
    for i in 1..=n {
        out.push_str(&format!(",x_{i}"));
    }
    for i in 1..=m {
        out.push_str(&format!(",u_{i}"));
    }
    out.push('\n');
    for (bp, x) in bps.iter().zip(&path.x_breakpoints) {
        out.push_str(&format_full(bp.lambda));
        for v in x {
            out.push(',');
            out.push_str(&format_full(*v));
        }
        for v in &bp.u {
            out.push(',');
            out.push_str(&format_full(*v));
        }
        out.push('\n');
    }
    out
}

pub const FREQUENCY_CSV_HEADER: &str = "distribution,p,m,n,trials,dd,singular,frequency";

pub fn frequency_csv_row(r: &FrequencyReport) -> String {
    let p = r
        .spec
        .distribution
        .parameter()
        .map(|p| p.to_string())
        .unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{}",
        r.spec.distribution.name(),
        p,
        r.spec.m,
        r.spec.n,
        r.spec.trials,
        r.dd_count,
        r.singular_count,
        r.frequency()
    )
}

pub fn frequency_csv(reports: &[FrequencyReport]) -> String {
    let mut out = String::from(FREQUENCY_CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&frequency_csv_row(r));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::{solve_path, PathOpts};

    #[test]
    fn matrix_text_round_trip_with_comments_and_commas() {
        let text = "# dictionary\n1.5, -2.0  0.25\n0 1e-3 7 # trailing note\n\n";
        let m = parse_matrix_str(text).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.get(0, 1), -2.0);
        assert_eq!(m.get(1, 2), 7.0);
        let back = parse_matrix_str(&format_matrix(&m)).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn matrix_parse_errors() {
        assert!(matches!(parse_matrix_str("# nothing\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_matrix_str("1 2\n3"), Err(Error::Dimension(_))));
        assert!(matches!(parse_matrix_str("1 x"), Err(Error::Parse(_))));
    }

    #[test]
    fn vector_round_trip() {
        let v = vec![1.0, -0.125, 3.5e-9];
        let parsed = parse_vector_str(&format_vector(&v)).unwrap();
        assert_eq!(parsed, v);
        assert_eq!(parse_vector_str("1, 2\n3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn full_precision_round_trips_exactly() {
        for v in [1.0 / 3.0, -7.125e-300, 0.1 + 0.2, f64::MIN_POSITIVE, 123456.789] {
            let s = format_full(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn path_csv_round_trip() {
        let a = DenseMatrix::from_rows(&[
            vec![1.0, 0.3],
            vec![0.2, 1.0],
            vec![0.0, -0.5],
        ])
        .unwrap();
        let p = LassoProblem::new(a, vec![1.0, -0.4, 0.2]).unwrap();
        let path = solve_path(&p, &PathOpts::default()).unwrap();
        let csv = path_to_csv(&path);
        assert!(csv.starts_with("lambda,event,u_1,u_2\n"));
        let rows = parse_path_csv(&csv).unwrap();
        assert_eq!(rows.len(), path.breakpoints().len());
        let rebuilt = rebuild_path(p, &rows).unwrap();
        for (orig, back) in path.breakpoints().iter().zip(rebuilt.breakpoints()) {
            assert_eq!(orig.lambda.to_bits(), back.lambda.to_bits());
            assert_eq!(orig.event, back.event);
            for (a, b) in orig.u.iter().zip(&back.u) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
            assert_eq!(orig.active.indices(), back.active.indices());
        }
    }

    #[test]
    fn path_csv_rejects_garbage() {
        assert!(parse_path_csv("").is_err());
        assert!(parse_path_csv("nope,event,u_1\n1,start,0\n").is_err());
        assert!(parse_path_csv("lambda,event,u_1\n1,frob,0\n").is_err());
        assert!(parse_path_csv("lambda,event,u_1\n1,start,zzz\n").is_err());
    }

    #[test]
    fn frequency_rows_follow_the_header() {
        use crate::ensemble::{EnsembleSpec, FrequencyReport, MatrixDistribution};
        let spec = EnsembleSpec::new(MatrixDistribution::Bernoulli(0.1), 10, 8, 100, 5).unwrap();
        let rep = FrequencyReport {
            spec,
            dd_count: 25,
            non_dd_count: 70,
            singular_count: 5,
            caveat: None,
        };
        assert_eq!(frequency_csv_row(&rep), "bernoulli,0.1,10,8,100,25,5,0.25");
        let spec2 = EnsembleSpec::new(MatrixDistribution::Normal, 20, 3, 1000, 7).unwrap();
        let rep2 = FrequencyReport {
            spec: spec2,
            dd_count: 500,
            non_dd_count: 500,
            singular_count: 0,
            caveat: None,
        };
        assert_eq!(frequency_csv_row(&rep2), "normal,,20,3,1000,500,0,0.5");
    }
}
