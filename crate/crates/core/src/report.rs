//! Scan reports: per-cell records, sups, growth flags, exponent fits, and the
//! CSV/JSON encodings used by the command-line front end.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};

/// Relative excess of the last-decade sup over the earlier sup that counts as
/// growth.
pub const DEFAULT_GROWTH_TOL: f64 = 0.1;
/// Grids ending below this radius get no growth verdict: the earlier part
/// would not yet contain the pre-asymptotic bulk of the kernel.
pub const GROWTH_MIN_RADIUS: f64 = 100.0;

pub const CSV_HEADER: [&str; 7] = ["z", "theta", "re", "im", "abs", "err", "method"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub z: f64,
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub err: f64,
    pub method: String,
    /// Audited quantity (|K| divided by the family bound, or the
    /// module-specific normalization).
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub z: f64,
    pub theta: f64,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub stderr: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub z: f64,
    pub theta: f64,
    pub value: f64,
    pub bound: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: serde_json::Value,
    pub cells: Vec<Cell>,
    pub sup: f64,
    pub sup_normalized: f64,
    pub exponent_fit: Option<ExponentFit>,
    pub growth_flag: bool,
    pub violations: Vec<Violation>,
    pub failures: Vec<CellFailure>,
    pub runtime_ms: f64,
}

impl ScanReport {
    /// Assemble a report from evaluated cells; the growth flag is computed on
    /// the normalized column against the radial coordinate `z`.
    pub fn assemble(config: serde_json::Value, cells: Vec<Cell>, failures: Vec<CellFailure>, growth_tol: f64) -> Self {
        let sup = cells.iter().map(|c| c.abs).fold(0.0, f64::max);
        let sup_normalized = cells.iter().map(|c| c.normalized).fold(0.0, f64::max);
        let pts: Vec<(f64, f64)> = cells.iter().map(|c| (c.z, c.normalized)).collect();
        let mut violations = Vec::new();
        let growth = growth_check(&pts, growth_tol);
        if let Some(g) = &growth {
            if g.flagged {
                let worst = cells
                    .iter()
                    .filter(|c| c.z > g.split)
                    .max_by(|a, b| a.normalized.total_cmp(&b.normalized));
                if let Some(w) = worst {
                    violations.push(Violation {
                        z: w.z,
                        theta: w.theta,
                        value: w.normalized,
                        bound: g.earlier_sup * (1.0 + growth_tol),
                        reason: "growth in the last decade of the radial grid".into(),
                    });
                }
            }
        }
        ScanReport {
            config,
            cells,
            sup,
            sup_normalized,
            exponent_fit: None,
            growth_flag: growth.map(|g| g.flagged).unwrap_or(false),
            violations,
            failures,
            runtime_ms: 0.0,
        }
    }

    /// Exit-code style verdict: true when nothing was flagged.
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && !self.growth_flag
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| KernelError::Usage(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GrowthCheck {
    pub flagged: bool,
    pub split: f64,
    pub last_sup: f64,
    pub earlier_sup: f64,
}

/// Compares the sup over the last decade of the radial coordinate,
/// (r_max/10, r_max], with the sup over everything below it.  `None` when
/// either part is empty or r_max < [`GROWTH_MIN_RADIUS`].
pub fn growth_check(points: &[(f64, f64)], rel_tol: f64) -> Option<GrowthCheck> {
    let r_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !r_max.is_finite() || r_max < GROWTH_MIN_RADIUS {
        return None;
    }
    let split = r_max / 10.0;
    let mut last = f64::NEG_INFINITY;
    let mut earlier = f64::NEG_INFINITY;
    for &(r, v) in points {
        if !v.is_finite() {
            continue;
        }
        if r > split {
            last = last.max(v);
        } else {
            earlier = earlier.max(v);
        }
    }
    if last == f64::NEG_INFINITY || earlier == f64::NEG_INFINITY {
        return None;
    }
    Some(GrowthCheck { flagged: last > (1.0 + rel_tol) * earlier, split, last_sup: last, earlier_sup: earlier })
}

/// Least-squares slope of log y against log x with its standard error.
pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = data.len();
    if n < 3 {
        return Err(KernelError::Usage(format!("exponent fit needs at least 3 positive points, got {n}")));
    }
    let nf = n as f64;
    let mx = data.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = data.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = data.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = data.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(KernelError::Usage("exponent fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let rss: f64 = data.iter().map(|p| (p.1 - icept - slope * p.0).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(ExponentFit { slope, stderr, points: n })
}

fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// Writes the fixed-schema CSV.
pub fn write_csv<W: Write>(cells: &[Cell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| KernelError::Usage(format!("csv write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for c in cells {
        w.write_record([
            fmt_f64(c.z),
            fmt_f64(c.theta),
            fmt_f64(c.re),
            fmt_f64(c.im),
            fmt_f64(c.abs),
            fmt_f64(c.err),
            c.method.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| KernelError::Usage(format!("csv flush failed: {e}")))?;
    Ok(())
}

/// Parses a CSV written by [`write_csv`].  The normalized column is not
/// part of the schema and comes back as `abs`.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Cell>> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |msg: String| KernelError::Usage(format!("csv parse failed: {msg}"));
    let header = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(bad(format!("unexpected header {:?}", header)));
    }
    let mut cells = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i).unwrap_or("").parse::<f64>().map_err(|e| bad(format!("column {}: {e}", CSV_HEADER[i])))
        };
        let abs = num(4)?;
        cells.push(Cell {
            z: num(0)?,
            theta: num(1)?,
            re: num(2)?,
            im: num(3)?,
            abs,
            err: num(5)?,
            method: rec.get(6).unwrap_or("").to_string(),
            normalized: abs,
        });
    }
    Ok(cells)
}
