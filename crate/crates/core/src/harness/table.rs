//! CSV and JSON tables of sweep rows.
//!
//! Floats are written with 17 significant digits so a table read back gives
//! the same `f64` values; missing values are empty CSV fields or JSON `null`.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::{SelfLoopPoint, SweepRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] =
    ["dim", "side", "N", "M", "a", "mode", "t_peak", "p_peak", "t_threshold", "p_threshold"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "json" => Ok(TableFormat::Json),
            other => Err(Error::Parse(format!("table format `{other}`: expected csv or json"))),
        }
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(x: Option<T>, f: impl Fn(T) -> String) -> String {
    x.map(f).unwrap_or_default()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_table<W: Write>(rows: &[SweepRow], format: TableFormat, out: W) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let mut w = csv_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.write_record([
                    r.dim.to_string(),
                    r.side.to_string(),
                    r.n.to_string(),
                    r.m.to_string(),
                    opt(r.a, float),
                    r.mode.clone(),
                    r.t_peak.to_string(),
                    float(r.p_peak),
                    opt(r.t_threshold, |t| t.to_string()),
                    opt(r.p_threshold, float),
                ])?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        TableFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, rows)?;
            out.write_all(b"\n").map_err(|e| Error::Io { path: "<table>".into(), source: e })?;
        }
    }
    Ok(())
}

/// Write to `path`, or to stdout when `path` is `None`.
pub fn emit_table(rows: &[SweepRow], format: TableFormat, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Error::Io { path: p.into(), source: e })?;
            let mut w = BufWriter::new(file);
            write_table(rows, format, &mut w)?;
            w.flush().map_err(|e| Error::Io { path: p.into(), source: e })
        }
        None => write_table(rows, format, io::stdout().lock()),
    }
}

/// Read a CSV table written by [`write_table`].
pub fn read_table<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse(format!(
            "table header `{}`: expected `{}`",
            header.iter().collect::<Vec<_>>().join(","),
            CSV_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        let row: SweepRow = rec?;
        let finite = |x: f64| x.is_finite();
        if !finite(row.p_peak) || !row.a.is_none_or(finite) || !row.p_threshold.is_none_or(finite) {
            return Err(Error::Parse(format!("non-finite value in row for N={}", row.n)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Self-loop sweep results as `M,a,Na,t_peak,p_peak` lines; no-peak points
/// have empty peak fields.
pub fn write_self_loop_csv<W: Write>(sweeps: &[(usize, Vec<SelfLoopPoint>)], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["M", "a", "Na", "t_peak", "p_peak"])?;
    for (m, points) in sweeps {
        for p in points {
            w.write_record([
                m.to_string(),
                float(p.a),
                float(p.na),
                opt(p.t_peak, |t| t.to_string()),
                opt(p.p_peak, float),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// A probability series as `t,p` lines, `t = 0..`.
pub fn write_series_csv<W: Write>(probabilities: &[f64], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["t", "p"])?;
    for (t, &p) in probabilities.iter().enumerate() {
        w.write_record([t.to_string(), float(p)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(a: Option<f64>, thr: Option<(usize, f64)>) -> SweepRow {
        SweepRow {
            dim: 1,
            side: 200,
            n: 200,
            m: 1,
            a,
            mode: "per_target_flip".into(),
            t_peak: 199,
            p_peak: 0.746_512_345_678_901_2,
            t_threshold: thr.map(|x| x.0),
            p_threshold: thr.map(|x| x.1),
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_table(&[row(Some(0.01), None)], TableFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "dim,side,N,M,a,mode,t_peak,p_peak,t_threshold,p_threshold");
        assert_eq!(
            lines.next().unwrap(),
            "1,200,200,1,1.0000000000000000e-2,per_target_flip,199,7.4651234567890123e-1,,"
        );
        assert!(!text.contains('\r'));
    }

    #[test]
    fn json_nulls() {
        let mut buf = Vec::new();
        write_table(&[row(None, None)], TableFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert!(v[0]["a"].is_null());
        assert_eq!(v[0]["N"], 200);
        assert_eq!(v[0]["t_peak"], 199);
    }

    #[test]
    fn rejects_wrong_header() {
        assert!(read_table("x,y\n1,2\n".as_bytes()).is_err());
        let bad = "dim,side,N,M,a,mode,t_peak,p_peak,t_threshold,p_threshold\n1,2,2,1,,m,x,0.5,,\n";
        assert!(read_table(bad.as_bytes()).is_err());
        let nan = "dim,side,N,M,a,mode,t_peak,p_peak,t_threshold,p_threshold\n1,2,2,1,,m,1,NaN,,\n";
        assert!(read_table(nan.as_bytes()).is_err());
    }

    #[test]
    fn series_layout() {
        let mut buf = Vec::new();
        write_series_csv(&[0.125, 0.5], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "t,p\n0,1.2500000000000000e-1\n1,5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn emit_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let empty = dir.path().join("empty.csv");
        emit_table(&[], TableFormat::Csv, Some(&empty)).unwrap();
        assert_eq!(std::fs::read_to_string(&empty).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
        let one = dir.path().join("one.csv");
        let rows = vec![row(Some(0.01), Some((40, 0.2)))];
        emit_table(&rows, TableFormat::Csv, Some(&one)).unwrap();
        assert_eq!(std::fs::read_to_string(&one).unwrap().lines().count(), 2);
        assert_eq!(read_table(std::fs::File::open(&one).unwrap()).unwrap(), rows);
        assert!(emit_table(&rows, TableFormat::Csv, Some(&dir.path().join("missing/x.csv"))).is_err());
    }

    #[test]
    fn self_loop_layout() {
        let pts = vec![
            SelfLoopPoint { a: 0.5, na: 2.0, t_peak: Some(7), p_peak: Some(0.25) },
            SelfLoopPoint { a: 1.0, na: 4.0, t_peak: None, p_peak: None },
        ];
        let mut buf = Vec::new();
        write_self_loop_csv(&[(2, pts)], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "M,a,Na,t_peak,p_peak\n2,5.0000000000000000e-1,2.0000000000000000e0,7,2.5000000000000000e-1\n\
             2,1.0000000000000000e0,4.0000000000000000e0,,\n"
        );
    }

    proptest! {
        #[test]
        fn csv_round_trip(
            a in proptest::option::of(0.0f64..1.0),
            p in 0.0f64..=1.0,
            thr in proptest::option::of((0usize..100_000, 0.0f64..=1.0)),
        ) {
            let mut r = row(a, thr);
            r.p_peak = p;
            let mut buf = Vec::new();
            write_table(std::slice::from_ref(&r), TableFormat::Csv, &mut buf).unwrap();
            prop_assert_eq!(read_table(buf.as_slice()).unwrap(), vec![r]);
        }
    }
}
