//! Method dispatch, grid scans against the bound families, growth-exponent
//! fits and pairwise method cross-checks.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closed_forms::{closed_form_kind, kernel_closed, kernel_even_dim2};
use crate::error::{KernelError, Result};
use crate::eval::ComplexEval;
use crate::integral_rep::kernel_via_integral;
use crate::kernel_core::{kernel_dimension_lift_with, kernel_series, GeomPoint, KernelParams};
use crate::laplace::ilt_kernel;
use crate::mittag_leffler::{lin_grid, log_grid};
use crate::report::{fit_log_slope, Cell, CellFailure, ExponentFit, ScanReport, Violation, DEFAULT_GROWTH_TOL};

/// Step of the finite difference in the dimension lift.
pub const LIFT_STEP: f64 = 1e-4;

/// Evaluation route requested by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMethod {
    Auto,
    Series,
    Closed,
    Laplace,
    Integral,
    Lift,
    Neumann,
}

impl EvalMethod {
    pub const ALL: [EvalMethod; 6] =
        [EvalMethod::Series, EvalMethod::Closed, EvalMethod::Laplace, EvalMethod::Integral, EvalMethod::Lift, EvalMethod::Neumann];

    pub fn as_str(&self) -> &'static str {
        match self {
            EvalMethod::Auto => "auto",
            EvalMethod::Series => "series",
            EvalMethod::Closed => "closed",
            EvalMethod::Laplace => "laplace",
            EvalMethod::Integral => "integral",
            EvalMethod::Lift => "lift",
            EvalMethod::Neumann => "neumann",
        }
    }
}

impl fmt::Display for EvalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalMethod {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(EvalMethod::Auto),
            "series" => Ok(EvalMethod::Series),
            "closed" => Ok(EvalMethod::Closed),
            "laplace" | "ilt" => Ok(EvalMethod::Laplace),
            "integral" => Ok(EvalMethod::Integral),
            "lift" => Ok(EvalMethod::Lift),
            "neumann" => Ok(EvalMethod::Neumann),
            other => Err(KernelError::Usage(format!("unknown method '{other}'"))),
        }
    }
}

/// N when a = 2N with N a positive integer.
pub fn even_half(a: f64) -> Option<usize> {
    let n = a / 2.0;
    (n >= 1.0 && n == n.round() && n < 1e6).then_some(n as usize)
}

/// Methods that apply to (a, m) somewhere in the (z, ξ) domain.  Pointwise
/// limits (z_a cap of the Laplace route, the sector of the integral route)
/// surface as domain errors at evaluation time.
pub fn available_methods(p: &KernelParams) -> Vec<EvalMethod> {
    EvalMethod::ALL
        .into_iter()
        .filter(|m| match m {
            EvalMethod::Closed => closed_form_kind(p).is_some(),
            EvalMethod::Integral => p.a > 2.0,
            EvalMethod::Lift => p.m >= 4,
            EvalMethod::Neumann => p.m == 2 && even_half(p.a).is_some(),
            _ => true,
        })
        .collect()
}

fn unavailable(p: &KernelParams, method: EvalMethod) -> KernelError {
    let list: Vec<&str> = available_methods(p).iter().map(|m| m.as_str()).collect();
    KernelError::Usage(format!(
        "method '{method}' is not available for a = {}, m = {}; available: auto, {}",
        p.a,
        p.m,
        list.join(", ")
    ))
}

/// Preferred route: Neumann for m = 2, a = 2N with N ≥ 3 (reaches large z),
/// the closed forms where they exist, the series otherwise.  A failing
/// preferred route falls back to the series.
pub fn kernel_auto(p: &KernelParams, g: &GeomPoint, tol: f64) -> Result<ComplexEval> {
    let preferred = match even_half(p.a) {
        Some(n) if p.m == 2 && n >= 3 => Some(kernel_even_dim2(n, g)),
        _ if closed_form_kind(p).is_some() => Some(kernel_closed(p, g, tol)),
        _ => None,
    };
    match preferred {
        Some(Ok(v)) => Ok(v),
        Some(Err(e)) => kernel_series(p, g, tol).map_err(|_| e),
        None => kernel_series(p, g, tol),
    }
}

/// Kernel value by the requested route.
pub fn kernel_eval(p: &KernelParams, g: &GeomPoint, method: EvalMethod, tol: f64) -> Result<ComplexEval> {
    if method != EvalMethod::Auto && !available_methods(p).contains(&method) {
        return Err(unavailable(p, method));
    }
    match method {
        EvalMethod::Auto => kernel_auto(p, g, tol),
        EvalMethod::Series => kernel_series(p, g, tol),
        EvalMethod::Closed => kernel_closed(p, g, tol),
        EvalMethod::Laplace => ilt_kernel(p, g, tol),
        EvalMethod::Integral => kernel_via_integral(p, g, tol),
        EvalMethod::Lift => {
            let lower = KernelParams::new(p.a, p.m - 2)?;
            kernel_dimension_lift_with(&lower, g, LIFT_STEP, |q| kernel_auto(&lower, q, 1e-14))
        }
        EvalMethod::Neumann => kernel_even_dim2(even_half(p.a).expect("checked by available_methods"), g),
    }
}

/// Bound family of a scan: |K| ≤ C or |K| ≤ C(1+z)^β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundFamily {
    Const,
    Poly(f64),
}

impl BoundFamily {
    pub fn exponent(&self) -> f64 {
        match *self {
            BoundFamily::Const => 0.0,
            BoundFamily::Poly(e) => e,
        }
    }

    pub fn weight(&self, z: f64) -> f64 {
        (1.0 + z).powf(self.exponent())
    }
}

impl fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundFamily::Const => f.write_str("CONST"),
            BoundFamily::Poly(e) => write!(f, "POLY({e})"),
        }
    }
}

impl FromStr for BoundFamily {
    type Err = KernelError;

    /// `CONST`, `POLY(β)`, or `POLY` (exponent supplied separately, 0 here).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        if t == "CONST" || t == "C" {
            return Ok(BoundFamily::Const);
        }
        if t == "POLY" {
            return Ok(BoundFamily::Poly(0.0));
        }
        if let Some(inner) = t.strip_prefix("POLY(").and_then(|r| r.strip_suffix(')')) {
            let e: f64 = inner.trim().parse().map_err(|_| KernelError::Usage(format!("bad exponent in '{s}'")))?;
            if !(e >= 0.0) || !e.is_finite() {
                return Err(KernelError::Usage(format!("family exponent must be >= 0, got {e}")));
            }
            return Ok(BoundFamily::Poly(e));
        }
        Err(KernelError::Usage(format!("unknown bound family '{s}' (CONST or POLY(β))")))
    }
}

/// Grid, methods and bound family of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub a: f64,
    pub m: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub z_count: usize,
    pub z_log: bool,
    /// θ samples on [0, π]; ignored when `theta` is set.
    pub theta_count: usize,
    /// Single ray θ = const.
    pub theta: Option<f64>,
    pub methods: Vec<EvalMethod>,
    pub family: BoundFamily,
    /// Constant C to test the normalized values against.
    pub bound: Option<f64>,
    pub tol: f64,
    pub out: Option<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            a: 2.0,
            m: 2,
            z_min: 0.0,
            z_max: 10.0,
            z_count: 21,
            z_log: false,
            theta_count: 9,
            theta: None,
            methods: vec![EvalMethod::Auto],
            family: BoundFamily::Const,
            bound: None,
            tol: 1e-10,
            out: None,
        }
    }
}

impl ScanConfig {
    pub fn params(&self) -> Result<KernelParams> {
        KernelParams::new(self.a, self.m).map_err(|e| KernelError::Usage(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KernelError::Usage(m));
        self.params()?;
        if !(self.z_min >= 0.0) || !(self.z_max >= self.z_min) || !self.z_max.is_finite() || self.z_count == 0 {
            return bad(format!("empty z range [{}, {}] x {}", self.z_min, self.z_max, self.z_count));
        }
        if self.z_log && !(self.z_min > 0.0) {
            return bad("a log z grid needs z_min > 0".into());
        }
        if self.theta.is_none() && self.theta_count == 0 {
            return bad("theta_count must be >= 1".into());
        }
        if let Some(th) = self.theta {
            if !(0.0..=PI).contains(&th) {
                return bad(format!("theta = {th} outside [0, pi]"));
            }
        }
        if self.methods.is_empty() {
            return bad("no methods requested".into());
        }
        if !(self.family.exponent() >= 0.0) {
            return bad("family exponent must be >= 0".into());
        }
        if !(self.tol > 0.0) {
            return bad("tol must be > 0".into());
        }
        Ok(())
    }

    pub fn z_grid(&self) -> Vec<f64> {
        if self.z_log {
            log_grid(self.z_min, self.z_max, self.z_count)
        } else {
            lin_grid(self.z_min, self.z_max, self.z_count)
        }
    }

    pub fn theta_grid(&self) -> Vec<f64> {
        match self.theta {
            Some(t) => vec![t],
            None => lin_grid(0.0, PI, self.theta_count),
        }
    }

    fn json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).unwrap_or(serde_json::Value::Null);
        if let Some(o) = v.as_object_mut() {
            o.insert("family".into(), serde_json::Value::String(self.family.to_string()));
        }
        v
    }
}

fn cell_of(z: f64, theta: f64, v: &ComplexEval, normalized: f64) -> Cell {
    Cell {
        z,
        theta,
        re: v.value.re,
        im: v.value.im,
        abs: v.value.norm(),
        err: v.err,
        method: v.method.to_string(),
        normalized,
    }
}

type Evaluated = Vec<(f64, f64, EvalMethod, Result<ComplexEval>)>;

fn evaluate_grid(cfg: &ScanConfig, p: &KernelParams) -> Evaluated {
    let thetas = cfg.theta_grid();
    let pts: Vec<(f64, f64, EvalMethod)> = cfg
        .z_grid()
        .into_iter()
        .flat_map(|z| thetas.iter().flat_map(move |&t| cfg.methods.iter().map(move |&m| (z, t, m))))
        .collect();
    pts.par_iter()
        .map(|&(z, t, m)| (z, t, m, GeomPoint::from_theta(z, t).and_then(|g| kernel_eval(p, &g, m, cfg.tol))))
        .collect()
}

/// Evaluates the grid and audits |K|/(1+z)^β.  Cell failures are recorded,
/// not fatal; a usage error (unavailable method) aborts.  Violations of an
/// explicit bound count only beyond the cell's error field.
pub fn run_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let p = cfg.params()?;
    for &m in &cfg.methods {
        if m != EvalMethod::Auto && !available_methods(&p).contains(&m) {
            return Err(unavailable(&p, m));
        }
    }
    let start = Instant::now();
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (z, t, m, r) in evaluate_grid(cfg, &p) {
        match r {
            Ok(v) => cells.push(cell_of(z, t, &v, v.value.norm() / cfg.family.weight(z))),
            Err(e) => failures.push(CellFailure { z, theta: t, error: format!("{m}: {e}") }),
        }
    }
    let mut bound_hits = Vec::new();
    if let Some(c) = cfg.bound {
        for cell in &cells {
            let w = cfg.family.weight(cell.z);
            if cell.normalized - cell.err / w > c {
                bound_hits.push(Violation {
                    z: cell.z,
                    theta: cell.theta,
                    value: cell.normalized,
                    bound: c,
                    reason: format!("|K|/(1+z)^{} above the bound beyond the error field", cfg.family.exponent()),
                });
            }
        }
    }
    let mut report = ScanReport::assemble(cfg.json(), cells, failures, DEFAULT_GROWTH_TOL);
    report.violations.extend(bound_hits);
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

/// Least-squares slope of log sup_θ |K| against log z.  Requires a log grid
/// window starting at z ≥ 10.
pub fn fit_exponent(cfg: &ScanConfig) -> Result<(ExponentFit, ScanReport)> {
    if !(cfg.z_min >= 10.0) {
        return Err(KernelError::Usage(format!("fit window must start at z >= 10, got {}", cfg.z_min)));
    }
    let mut c = cfg.clone();
    c.family = BoundFamily::Const;
    c.bound = None;
    let mut report = run_scan(&c)?;
    let mut sups: Vec<(f64, f64)> = Vec::new();
    for cell in &report.cells {
        match sups.iter_mut().find(|s| s.0 == cell.z) {
            Some(s) => s.1 = s.1.max(cell.abs),
            None => sups.push((cell.z, cell.abs)),
        }
    }
    let fit = fit_log_slope(&sups)?;
    report.exponent_fit = Some(fit);
    // slope fits are informational; the growth flag has no meaning here
    report.growth_flag = false;
    report.violations.clear();
    Ok((fit, report))
}

/// Outcome for one pair of methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairResult {
    pub first: EvalMethod,
    pub second: EvalMethod,
    /// Points where both methods returned a value.
    pub compared: usize,
    pub max_deviation: f64,
    /// Largest deviation minus the combined error fields (≤ 0 when consistent).
    pub max_excess: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub config: serde_json::Value,
    pub pairs: Vec<PairResult>,
    /// Per method: points where it returned an error.
    pub unavailable: Vec<(EvalMethod, usize)>,
    pub failures: Vec<CellFailure>,
    pub cells: Vec<Cell>,
    pub runtime_ms: f64,
}

impl CrosscheckReport {
    /// True when every compared pair is consistent and at least one pair was
    /// compared somewhere.
    pub fn passed(&self) -> bool {
        self.pairs.iter().any(|p| p.compared > 0) && self.pairs.iter().all(|p| p.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| KernelError::Usage(e.to_string()))
    }
}

/// Evaluates every method on the grid and compares all pairs:
/// |v₁ − v₂| ≤ err₁ + err₂ + tol·max(1, |v|).
pub fn crosscheck(cfg: &ScanConfig) -> Result<CrosscheckReport> {
    cfg.validate()?;
    let p = cfg.params()?;
    let methods: Vec<EvalMethod> = if cfg.methods.iter().all(|&m| m == EvalMethod::Auto) {
        available_methods(&p)
    } else {
        cfg.methods.iter().copied().filter(|&m| m != EvalMethod::Auto).collect()
    };
    if methods.len() < 2 {
        return Err(KernelError::Usage(format!("crosscheck needs two or more methods, have {}", methods.len())));
    }
    for &m in &methods {
        if !available_methods(&p).contains(&m) {
            return Err(unavailable(&p, m));
        }
    }
    let start = Instant::now();
    let mut c = cfg.clone();
    c.methods = methods.clone();
    let results = evaluate_grid(&c, &p);
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    let mut unavailable_counts: Vec<(EvalMethod, usize)> = methods.iter().map(|&m| (m, 0)).collect();
    for (z, t, m, r) in &results {
        match r {
            Ok(v) => cells.push(cell_of(*z, *t, v, v.value.norm())),
            Err(e) => {
                failures.push(CellFailure { z: *z, theta: *t, error: format!("{m}: {e}") });
                if let Some(u) = unavailable_counts.iter_mut().find(|u| u.0 == *m) {
                    u.1 += 1;
                }
            }
        }
    }
    let k = methods.len();
    let mut pairs = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let mut pr = PairResult {
                first: methods[i],
                second: methods[j],
                compared: 0,
                max_deviation: 0.0,
                max_excess: f64::NEG_INFINITY,
                pass: true,
            };
            // results are grouped per (z, θ) in method order
            for chunk in results.chunks(k) {
                if let (Ok(u), Ok(v)) = (&chunk[i].3, &chunk[j].3) {
                    let dev = (u.value - v.value).norm();
                    let allowed = u.err + v.err + cfg.tol * u.value.norm().max(1.0);
                    pr.compared += 1;
                    pr.max_deviation = pr.max_deviation.max(dev);
                    pr.max_excess = pr.max_excess.max(dev - allowed);
                    if dev > allowed {
                        pr.pass = false;
                    }
                }
            }
            if pr.compared == 0 {
                pr.max_excess = 0.0;
            }
            pairs.push(pr);
        }
    }
    Ok(CrosscheckReport {
        config: c.json(),
        pairs,
        unavailable: unavailable_counts,
        failures,
        cells,
        runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
