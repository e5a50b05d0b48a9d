//! Deterministic CSV and JSON writers.

use std::collections::BTreeSet;
use std::io::Write;

use serde::Serialize;

use super::check::CheckReport;
use super::fit::RateFit;
use super::sweeps::SweepResult;
use crate::error::Result;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per grid point; every bound component gets its own column.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let names: BTreeSet<&str> = result
        .rows
        .iter()
        .flat_map(|r| r.components.keys().map(String::as_str))
        .collect();
    let blocks = result.rows.iter().map(|r| r.counts.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["n".to_string()];
    header.extend((0..blocks).map(|i| format!("count[{i}]")));
    header.extend(["distance", "factor", "ratio", "error_budget"].map(String::from));
    header.extend(names.iter().map(|s| s.to_string()));
    header.push("warnings".into());
    w.write_record(&header)?;
    for r in &result.rows {
        let mut rec = vec![r.n.to_string()];
        rec.extend((0..blocks).map(|i| r.counts.get(i).map(u64::to_string).unwrap_or_default()));
        rec.extend([opt(r.distance), opt(r.factor), opt(r.ratio), r.error_budget.to_string()]);
        rec.extend(names.iter().map(|k| opt(r.components.get(*k).copied())));
        rec.push(r.warnings.join("; "));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_check_csv<W: Write>(report: &CheckReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["check", "instances", "failures", "worst_margin", "gating"])?;
    for c in &report.checks {
        w.write_record([
            c.name.clone(),
            c.instances.to_string(),
            c.failures.to_string(),
            c.worst_margin.to_string(),
            c.gating.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fit_csv<W: Write>(fit: &RateFit, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.serialize(fit)?;
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Reads `(n, column)` pairs from a CSV with a header row; empty cells are skipped.
pub fn read_points<R: std::io::Read>(input: R, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| crate::error::invalid(format!("column {name} not found")))
    };
    let (ni, di) = (find("n")?, find(column)?);
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let (Some(n), Some(d)) = (rec.get(ni), rec.get(di)) else { continue };
        if n.is_empty() || d.is_empty() {
            continue;
        }
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| crate::error::invalid(format!("bad number {s:?}: {e}")))
        };
        points.push((parse(n)?, parse(d)?));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sweeps::demo_intro;

    #[test]
    fn sweep_csv_round_trips_through_reader() {
        let r = demo_intro(&[2, 4, 8], 1e-12).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,count[0],distance,factor,ratio,error_budget,warnings\n"));
        let pts = read_points(buf.as_slice(), "distance").unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[1].1, r.rows[1].distance.unwrap());
        assert!(read_points(buf.as_slice(), "factor").unwrap().is_empty());
        assert!(read_points(buf.as_slice(), "missing").is_err());
    }

    #[test]
    fn fit_csv_has_header() {
        let mut buf = Vec::new();
        write_fit_csv(&RateFit { slope: -1.0, intercept: 0.5, residual: 0.0 }, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "slope,intercept,residual\n-1.0,0.5,0.0\n");
    }
}
