//! Subcommand bodies.  Each returns the exit code on success; errors are
//! mapped to exit codes by the caller.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, Write};

use num_complex::Complex64;
use radkernel::integral_rep::{h_bound_audit, sector_kernel_audit, KernelSectorGrid};
use radkernel::kernel_core::{transform_apply, GeomPoint, KernelParams, SampledFunction, TransformGrid};
use radkernel::laplace::{factorization_audit, lemma31_audit, MultiPole};
use radkernel::mittag_leffler::{sector_bound_audit, PrabhakarParams, SectorGrid};
use radkernel::report::{write_csv, ScanReport};
use radkernel::scan::{crosscheck as run_crosscheck, fit_exponent, kernel_auto, kernel_eval, run_scan, BoundFamily, EvalMethod, ScanConfig};
use radkernel::KernelError;

use crate::settings::{parse_list, parse_real};
use crate::{AuditTarget, Ctx, Format, EXIT_ACCURACY, EXIT_PASS, EXIT_VIOLATION};

fn sink(ctx: &Ctx) -> Result<Box<dyn Write>, KernelError> {
    match &ctx.out {
        Some(path) => File::create(path)
            .map(|f| Box::new(io::BufWriter::new(f)) as Box<dyn Write>)
            .map_err(|e| KernelError::Usage(format!("cannot create {}: {e}", path.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn io_err(e: io::Error) -> KernelError {
    KernelError::Usage(format!("write failed: {e}"))
}

fn params(ctx: &Ctx) -> Result<KernelParams, KernelError> {
    let a = ctx.require("a")?;
    let m = ctx.count_or("m", 2)?;
    KernelParams::new(a, m).map_err(|e| KernelError::Usage(e.to_string()))
}

fn methods(ctx: &Ctx) -> Result<Vec<EvalMethod>, KernelError> {
    match ctx.raw("method") {
        None => Ok(vec![EvalMethod::Auto]),
        Some(s) => parse_list(s, |t| t.parse()),
    }
}

/// θ from --theta or --xi, if either is set.
fn ray(ctx: &Ctx) -> Result<Option<f64>, KernelError> {
    match (ctx.real("theta")?, ctx.real("xi")?) {
        (Some(_), Some(_)) => Err(KernelError::Usage("give --xi or --theta, not both".into())),
        (Some(t), None) => Ok(Some(t)),
        (None, Some(x)) if (-1.0..=1.0).contains(&x) => Ok(Some(x.acos())),
        (None, Some(x)) => Err(KernelError::Usage(format!("xi = {x} outside [-1, 1]"))),
        (None, None) => Ok(None),
    }
}

fn family(ctx: &Ctx) -> Result<BoundFamily, KernelError> {
    let exp = ctx.real("exponent")?;
    let fam = match ctx.raw("family") {
        Some(s) => s.parse::<BoundFamily>()?,
        None if exp.is_some() => BoundFamily::Poly(0.0),
        None => BoundFamily::Const,
    };
    match (fam, exp) {
        (BoundFamily::Poly(_), Some(e)) if e >= 0.0 => Ok(BoundFamily::Poly(e)),
        (_, Some(e)) if e < 0.0 => Err(KernelError::Usage(format!("exponent must be >= 0, got {e}"))),
        (f, _) => Ok(f),
    }
}

fn scan_config(ctx: &Ctx, defaults: ScanConfig) -> Result<ScanConfig, KernelError> {
    let p = params(ctx)?;
    Ok(ScanConfig {
        a: p.a,
        m: p.m,
        z_min: ctx.real_or("z-min", defaults.z_min)?,
        z_max: ctx.real_or("z-max", defaults.z_max)?,
        z_count: ctx.count_or("z-count", defaults.z_count)?,
        z_log: ctx.flag("z-log")? || defaults.z_log,
        theta_count: ctx.count_or("theta-count", defaults.theta_count)?,
        theta: ray(ctx)?.or(defaults.theta),
        methods: methods(ctx)?,
        family: family(ctx)?,
        bound: ctx.real("bound")?,
        tol: ctx.real_or("tol", defaults.tol)?,
        out: ctx.out.as_ref().map(|p| p.display().to_string()),
    })
}

fn summary(r: &ScanReport) {
    eprintln!(
        "sup={:e} sup_normalized={:e} growth_flag={} violations={} failures={} cells={} runtime_ms={:.0}",
        r.sup,
        r.sup_normalized,
        r.growth_flag,
        r.violations.len(),
        r.failures.len(),
        r.cells.len(),
        r.runtime_ms
    );
}

fn emit_report(ctx: &Ctx, r: &ScanReport) -> Result<u8, KernelError> {
    let mut w = sink(ctx)?;
    match ctx.format {
        Format::Csv => write_csv(&r.cells, &mut w)?,
        Format::Json => writeln!(w, "{}", r.to_json()?).map_err(io_err)?,
    }
    w.flush().map_err(io_err)?;
    summary(r);
    for v in &r.violations {
        eprintln!("violation: z={:e} theta={:.6} value={:e} bound={:e} ({})", v.z, v.theta, v.value, v.bound, v.reason);
    }
    Ok(if !r.passed() {
        EXIT_VIOLATION
    } else if r.cells.is_empty() && !r.failures.is_empty() {
        EXIT_ACCURACY
    } else {
        EXIT_PASS
    })
}

pub fn eval(ctx: &Ctx) -> Result<u8, KernelError> {
    let p = params(ctx)?;
    let z = ctx.require("z")?;
    let theta = ray(ctx)?.unwrap_or(PI / 2.0);
    let method: EvalMethod = ctx.raw("method").unwrap_or("auto").parse()?;
    let tol = ctx.real_or("tol", 1e-12)?;
    let g = GeomPoint::from_theta(z, theta)?;
    let v = kernel_eval(&p, &g, method, tol)?;
    let mut w = sink(ctx)?;
    match ctx.format {
        Format::Csv => {
            let cell = radkernel::report::Cell {
                z,
                theta: g.theta,
                re: v.value.re,
                im: v.value.im,
                abs: v.value.norm(),
                err: v.err,
                method: v.method.to_string(),
                normalized: v.value.norm(),
            };
            write_csv(&[cell], &mut w)?;
        }
        Format::Json => {
            let rec = serde_json::json!({
                "a": p.a, "m": p.m, "z": z, "xi": g.xi, "theta": g.theta,
                "re": v.value.re, "im": v.value.im, "abs": v.value.norm(), "err": v.err,
                "method": v.method.to_string(),
            });
            writeln!(w, "{rec}").map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    Ok(EXIT_PASS)
}

pub fn scan(ctx: &Ctx) -> Result<u8, KernelError> {
    let cfg = scan_config(ctx, ScanConfig::default())?;
    let r = run_scan(&cfg)?;
    emit_report(ctx, &r)
}

pub fn fit(ctx: &Ctx) -> Result<u8, KernelError> {
    let defaults = ScanConfig { z_min: 10.0, z_max: 100.0, z_count: 19, z_log: true, ..ScanConfig::default() };
    let mut cfg = scan_config(ctx, defaults)?;
    cfg.z_log = true;
    let (f, r) = fit_exponent(&cfg)?;
    let code = emit_report(ctx, &r)?;
    eprintln!("slope={:.6} stderr={:.3e} points={}", f.slope, f.stderr, f.points);
    if let Some(e) = ctx.real("expect")? {
        let tol = ctx.real_or("expect-tol", 0.05)?;
        if (f.slope - e).abs() > tol {
            eprintln!("slope {:.4} differs from expected {e} by more than {tol}", f.slope);
            return Ok(EXIT_VIOLATION);
        }
    }
    Ok(code)
}

pub fn crosscheck(ctx: &Ctx) -> Result<u8, KernelError> {
    let defaults = ScanConfig { z_min: 0.1, z_max: 3.0, z_count: 6, theta_count: 5, tol: 1e-8, ..ScanConfig::default() };
    let cfg = scan_config(ctx, defaults)?;
    let r = run_crosscheck(&cfg)?;
    let mut w = sink(ctx)?;
    match ctx.format {
        Format::Csv => {
            writeln!(w, "first,second,compared,max_deviation,max_excess,pass").map_err(io_err)?;
            for p in &r.pairs {
                writeln!(w, "{},{},{},{:e},{:e},{}", p.first, p.second, p.compared, p.max_deviation, p.max_excess, p.pass)
                    .map_err(io_err)?;
            }
        }
        Format::Json => writeln!(w, "{}", r.to_json()?).map_err(io_err)?,
    }
    w.flush().map_err(io_err)?;
    for (m, n) in &r.unavailable {
        if *n > 0 {
            eprintln!("{m}: no value at {n} points");
        }
    }
    if r.pairs.iter().all(|p| p.compared == 0) {
        eprintln!("no pair of methods produced values at a common point");
        return Ok(EXIT_ACCURACY);
    }
    Ok(if r.passed() { EXIT_PASS } else { EXIT_VIOLATION })
}

fn sector_grid(ctx: &Ctx) -> Result<KernelSectorGrid, KernelError> {
    let d = KernelSectorGrid::default();
    Ok(KernelSectorGrid {
        z_min: ctx.real_or("z-min", d.z_min)?,
        z_max: ctx.real_or("z-max", d.z_max)?,
        z_count: ctx.count_or("z-count", d.z_count)?,
        theta_count: ctx.count_or("theta-count", d.theta_count)?,
    })
}

pub fn audit(target: AuditTarget, ctx: &Ctx) -> Result<u8, KernelError> {
    let start = std::time::Instant::now();
    let mut report = match target {
        AuditTarget::PrabhakarSector => {
            let p = PrabhakarParams::new(ctx.require("alpha")?, ctx.real_or("beta", 1.0)?, ctx.real_or("delta", 1.0)?)?;
            let d = SectorGrid::default();
            let grid = SectorGrid {
                r_min: ctx.real_or("z-min", d.r_min)?,
                r_max: ctx.real_or("z-max", d.r_max)?,
                r_count: ctx.count_or("z-count", d.r_count)?,
                angle_count: ctx.count_or("theta-count", d.angle_count)?,
            };
            sector_bound_audit(p, ctx.require("mu")?, grid, ctx.real_or("tol", 1e-10)?)?
        }
        AuditTarget::HBound => {
            let p = params(ctx)?;
            let mut grid = sector_grid(ctx)?;
            if ctx.raw("z-max").is_none() {
                grid.z_max = 30.0;
            }
            h_bound_audit(&p, ctx.require("mu")?, grid, ctx.count_or("t-count", 8)?, ctx.real_or("tol", 1e-8)?)?
        }
        AuditTarget::KernelSector => {
            let p = params(ctx)?;
            let tol = ctx.real_or("tol", 1e-10)?;
            sector_kernel_audit(&p, ctx.require("mu")?, sector_grid(ctx)?, |g| kernel_auto(&p, g, tol))?
        }
        AuditTarget::Lemma31 => {
            let poles = parse_list(ctx.raw("poles").unwrap_or("0"), parse_real)?;
            let mult = parse_list(ctx.raw("mult").unwrap_or("1"), |t| {
                t.parse::<u32>().map_err(|_| KernelError::Usage(format!("bad multiplicity '{t}'")))
            })?;
            let mp = MultiPole::new(poles, mult).map_err(|e| KernelError::Usage(e.to_string()))?;
            lemma31_audit(&mp, ctx.count_or("t-count", 100)?)?
        }
        AuditTarget::Factorization => {
            let p = ctx.count_or("p", 3)? as u32;
            let q = ctx.count_or("q", 2)? as u32;
            let zn = ctx.count_or("z-count", 13)?;
            let (lo, hi) = (ctx.real_or("z-min", 0.0)?, ctx.real_or("z-max", 3.0)?);
            let zs: Vec<f64> = (0..zn).map(|i| lo + (hi - lo) * i as f64 / (zn.max(2) - 1) as f64).collect();
            let tn = ctx.count_or("theta-count", 9)?;
            let thetas: Vec<f64> = (0..tn).map(|i| PI * i as f64 / (tn.max(2) - 1) as f64).collect();
            factorization_audit(p, q, &zs, &thetas)?
        }
    };
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    emit_report(ctx, &report)
}

/// Gaussian-type fixed point e^{−r^a/a} pushed through the transform on a
/// ray of targets |y| ∈ [z-min, z-max].
pub fn transform(ctx: &Ctx) -> Result<u8, KernelError> {
    let p = params(ctx)?;
    let tol = ctx.real_or("tol", 1e-6)?;
    let (lo, hi) = (ctx.real_or("z-min", 0.0)?, ctx.real_or("z-max", 3.0)?);
    let n = ctx.count_or("z-count", 13)?;
    if !(hi >= lo && lo >= 0.0) || n == 0 {
        return Err(KernelError::Usage("transform needs 0 <= z-min <= z-max and z-count >= 1".into()));
    }
    let a = p.a;
    let profile = move |r: f64| (-r.powf(a) / a).exp();
    let r_max = (40.0 * a).powf(1.0 / a);
    let tail_bound = (-40.0f64).exp() * r_max.powf(p.m as f64 + a);
    let grid = TransformGrid {
        r_max,
        r_panels: ((r_max / 1.25).ceil() as usize).max(8),
        r_nodes: 24,
        angle_nodes: 96,
        tail_bound,
    };
    let radii: Vec<f64> = (0..n).map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect();
    let ys: Vec<Vec<f64>> = radii
        .iter()
        .map(|&r| {
            let mut y = vec![0.0; p.m];
            y[0] = r;
            y
        })
        .collect();
    let f = |r: f64| Complex64::new(profile(r), 0.0);
    let ktol = (tol * 1e-3).max(1e-14);
    let vals = transform_apply(&p, SampledFunction::Radial(&f), &ys, &grid, tol, |g| kernel_auto(&p, g, ktol))?;
    let rows: Vec<serde_json::Value> = radii
        .iter()
        .zip(&vals)
        .map(|(&r, v)| {
            let want = profile(r);
            serde_json::json!({ "y": r, "re": v.re, "im": v.im, "abs": v.norm(), "reference": want, "deviation": (v - want).norm() })
        })
        .collect();
    let max_dev = radii.iter().zip(&vals).map(|(&r, v)| (v - profile(r)).norm()).fold(0.0, f64::max);
    let mut w = sink(ctx)?;
    match ctx.format {
        Format::Csv => {
            writeln!(w, "y,re,im,abs,reference,deviation").map_err(io_err)?;
            for (&r, v) in radii.iter().zip(&vals) {
                let want = profile(r);
                writeln!(w, "{r:e},{:e},{:e},{:e},{want:e},{:e}", v.re, v.im, v.norm(), (v - want).norm()).map_err(io_err)?;
            }
        }
        Format::Json => {
            let doc = serde_json::json!({
                "config": { "a": p.a, "m": p.m, "grid": grid, "tol": tol },
                "rows": rows,
                "max_deviation": max_dev,
            });
            writeln!(w, "{doc}").map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    eprintln!("max_deviation={max_dev:e}");
    Ok(if max_dev <= tol { EXIT_PASS } else { EXIT_VIOLATION })
}
