//! Prabhakar (three-parameter Mittag-Leffler) function
//! E^δ_{α,β}(z) = Σ (δ)_n z^n / (n! Γ(αn+β)).
//!
//! Two independent routes: the power series with a ratio majorant for the
//! tail, and the Hankel-type contour integral over γ(ε, μ) with the residue
//! correction on the right of the contour.  [`prabhakar`] picks between them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{KernelError, Result};
use crate::eval::{ComplexEval, Method};
use crate::quadrature::adaptive;
use crate::report::{Cell, CellFailure, ScanReport, DEFAULT_GROWTH_TOL};
use crate::special_functions::gamma::{ln_gamma, ln_rgamma_signed, rgamma};

/// Term cap of [`prabhakar_series`].
pub const SERIES_TERM_CAP: usize = 20_000;
/// Terms tried before the automatic evaluator turns to the contour.
pub const AUTO_SERIES_TERMS: usize = 400;
/// Largest integer δ for which the residue correction is expanded.
pub const MAX_CORRECTION_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PrabhakarParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl PrabhakarParams {
    pub fn new(alpha: f64, beta: f64, delta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(KernelError::domain(format!("alpha must be positive, got {alpha}")));
        }
        if !beta.is_finite() {
            return Err(KernelError::domain(format!("beta must be finite, got {beta}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(KernelError::domain(format!("delta must be positive, got {delta}")));
        }
        Ok(PrabhakarParams { alpha, beta, delta })
    }

    fn integer_delta(&self) -> Option<usize> {
        let r = self.delta.round();
        if (self.delta - r).abs() < 1e-12 && r >= 1.0 {
            Some(r as usize)
        } else {
            None
        }
    }
}

/// The admissible open interval (πα/2, min(π, πα)) for the ray angle μ.
pub fn admissible_window(alpha: f64) -> (f64, f64) {
    (0.5 * PI * alpha, PI.min(PI * alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ContourSpec {
    pub epsilon: f64,
    pub mu: f64,
}

impl ContourSpec {
    pub fn new(epsilon: f64, mu: f64, alpha: f64) -> Result<Self> {
        let c = ContourSpec { epsilon, mu };
        c.validate(alpha)?;
        Ok(c)
    }

    pub fn validate(&self, alpha: f64) -> Result<()> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(KernelError::domain(format!("contour representation needs 0 < alpha < 2, got {alpha}")));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(KernelError::domain(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        let (lo, hi) = admissible_window(alpha);
        if !(self.mu > lo && self.mu < hi) {
            return Err(KernelError::domain(format!("mu = {} outside the window ({lo}, {hi})", self.mu)));
        }
        Ok(())
    }

    /// True when z lies to the right of γ(ε, μ).
    pub fn in_right_region(&self, z: Complex64) -> bool {
        z.norm() > self.epsilon && z.arg().abs() < self.mu
    }

    /// Euclidean distance from z to the contour.
    pub fn distance(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let th = z.arg();
        let mut d = f64::INFINITY;
        // arc
        if th.abs() <= self.mu {
            d = d.min((r - self.epsilon).abs());
        } else {
            for s in [-1.0, 1.0] {
                d = d.min((z - Complex64::from_polar(self.epsilon, s * self.mu)).norm());
            }
        }
        // rays
        for s in [-1.0, 1.0] {
            let dir = Complex64::from_polar(1.0, s * self.mu);
            let proj = (z * dir.conj()).re.max(self.epsilon);
            d = d.min((z - dir * proj).norm());
        }
        d
    }
}

fn tolerance_target(tol: f64, value: f64) -> f64 {
    tol * value.max(1.0)
}

/// Partial sum of the defining series.  The tail is bounded by a geometric
/// majorant built from the term ratio, which is non-increasing once
/// αn+β > 0.  The error field holds tail bound plus a rounding estimate.
/// `tol` is absolute for |E| ≤ 1 and relative above.
pub fn prabhakar_series(p: PrabhakarParams, z: Complex64, tol: f64) -> Result<ComplexEval> {
    prabhakar_series_capped(p, z, tol, SERIES_TERM_CAP)
}

pub(crate) fn prabhakar_series_capped(p: PrabhakarParams, z: Complex64, tol: f64, cap: usize) -> Result<ComplexEval> {
    if !(tol > 0.0) {
        return Err(KernelError::domain(format!("tol must be positive, got {tol}")));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(KernelError::domain(format!("argument must be finite, got {z}")));
    }
    let r0 = rgamma(p.beta);
    if z.norm() == 0.0 {
        return Ok(ComplexEval::exact(Complex64::new(r0, 0.0), Method::Series));
    }
    let lnz = z.norm().ln();
    // a_n = (δ)_n z^n / n! by recurrence, renormalized (log scale kept apart)
    // when it leaves [1e-150, 1e150]; 1/Γ(αn+β) directly while representable
    let mut a = Complex64::new(1.0, 0.0);
    let mut a_log_scale = 0.0f64;
    let mut sum = Neumaier::default();
    let mut abs_sum = 0.0;
    for n in 0..cap {
        let nf = n as f64;
        if n > 0 {
            a *= z * ((p.delta + nf - 1.0) / nf);
            let m = a.norm();
            if m > 1e150 || (m < 1e-150 && m > 0.0) {
                a_log_scale += m.ln();
                a /= m;
            }
        }
        let x = p.alpha * nf + p.beta;
        let term = if x < 160.0 && a_log_scale == 0.0 {
            a * rgamma(x)
        } else {
            let (lrg, sign) = ln_rgamma_signed(x);
            let l = a_log_scale + lrg;
            if l > 709.0 {
                return Err(KernelError::Range(format!("series term {n} overflows at z = {z}")));
            }
            a * (sign * l.exp())
        };
        let mag = term.norm();
        sum.add(term);
        abs_sum += mag;
        if x > 0.0 && mag > 0.0 {
            let growth = ((p.delta + nf) / (nf + 1.0)).max(1.0);
            let ratio = growth * (lnz + ln_gamma(x) - ln_gamma(x + p.alpha)).exp();
            if ratio < 1.0 {
                let tail = mag * ratio / (1.0 - ratio);
                let total = sum.value();
                let rounding = 4.0 * f64::EPSILON * abs_sum;
                if tail <= tolerance_target(tol, total.norm()) {
                    return Ok(ComplexEval::new(total, tail + rounding, Method::Series));
                }
            }
        }
    }
    Err(KernelError::accuracy(
        format!("series for E^{}_{{{},{}}}({z}) did not certify within {cap} terms", p.delta, p.alpha, p.beta),
        f64::INFINITY,
    ))
}

/// Compensated complex summation.
#[derive(Default)]
struct Neumaier {
    re: (f64, f64),
    im: (f64, f64),
}

impl Neumaier {
    fn add_part(acc: &mut (f64, f64), x: f64) {
        let t = acc.0 + x;
        if acc.0.abs() >= x.abs() {
            acc.1 += (acc.0 - t) + x;
        } else {
            acc.1 += (x - t) + acc.0;
        }
        acc.0 = t;
    }

    fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.re, z.re);
        Self::add_part(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// g^{(k)}(z) for g(z) = exp(z^{1/α}) z^q, via g^{(k)} = z^{q−k} e^u P_k(u),
/// u = z^{1/α}, P_0 = 1, P_{k+1}(u) = Σ c_j[(q−k+j/α)u^j + u^{j+1}/α].
fn residue_derivative(alpha: f64, q: f64, k: usize, z: Complex64) -> Complex64 {
    let mut poly = vec![1.0f64];
    for step in 0..k {
        let mut next = vec![0.0; poly.len() + 1];
        for (j, &c) in poly.iter().enumerate() {
            next[j] += c * (q - step as f64 + j as f64 / alpha);
            next[j + 1] += c / alpha;
        }
        poly = next;
    }
    let u = (z.ln() / alpha).exp();
    let mut pu = Complex64::new(0.0, 0.0);
    for &c in poly.iter().rev() {
        pu = pu * u + c;
    }
    (u + z.ln() * (q - k as f64)).exp() * pu
}

/// E^δ_{α,β}(z) from the contour integral over γ(ε, μ), adding the residue
/// correction when z lies right of the contour (integer δ only).
pub fn prabhakar_contour(p: PrabhakarParams, z: Complex64, c: ContourSpec, tol: f64) -> Result<ComplexEval> {
    c.validate(p.alpha)?;
    if !(tol > 0.0) {
        return Err(KernelError::domain(format!("tol must be positive, got {tol}")));
    }
    let dist = c.distance(z);
    if dist <= tol {
        return Err(KernelError::Geometry(format!("z = {z} lies within {dist:.2e} of the contour")));
    }
    let right = c.in_right_region(z);
    let int_delta = p.integer_delta();
    if right {
        match int_delta {
            None => {
                return Err(KernelError::domain(format!(
                    "z = {z} is right of the contour and delta = {} is not an integer",
                    p.delta
                )))
            }
            Some(d) if d > MAX_CORRECTION_ORDER => {
                return Err(KernelError::domain(format!("residue correction limited to delta <= {MAX_CORRECTION_ORDER}")))
            }
            _ => {}
        }
    }
    let alpha = p.alpha;
    let pw = (1.0 - p.beta) / alpha - 1.0;
    let delta = p.delta;
    // exp(ζ^{1/α}) ζ^{(1−β)/α−1} (1 − z/ζ)^{−δ}
    let f = |zeta: Complex64| -> Complex64 {
        let lz = zeta.ln();
        ((lz / alpha).exp() + lz * pw - (Complex64::new(1.0, 0.0) - z / zeta).ln() * delta).exp()
    };
    let decay = -(c.mu / alpha).cos();
    // ray length: exp(−decay r^{1/α}) below e^{−45} with room for the power
    let mut big_r = (45.0 / decay).powf(alpha);
    for _ in 0..3 {
        let extra = (pw.max(0.0) + 1.0) * big_r.max(1.0).ln();
        big_r = ((45.0 + extra) / decay).powf(alpha);
    }
    big_r = big_r.max(2.0 * z.norm() + 2.0 * c.epsilon);
    let scale = 2.0 * PI * alpha;
    let qtol = tol * scale * 0.25;
    let arc = adaptive(
        |phi| {
            let zeta = Complex64::from_polar(c.epsilon, phi);
            f(zeta) * zeta * Complex64::i()
        },
        -c.mu,
        c.mu,
        qtol,
        0.0,
        4000,
    );
    let mut total = arc.value;
    let mut err = arc.err;
    let mut converged = arc.converged;
    for s in [-1.0, 1.0] {
        let dir = Complex64::from_polar(1.0, s * c.mu);
        // split at the foot of the perpendicular from z to keep pieces tame
        let foot = (z * dir.conj()).re.clamp(c.epsilon, big_r);
        let mut knots = vec![c.epsilon];
        let mut r = c.epsilon;
        while r * 4.0 < big_r {
            r *= 4.0;
            knots.push(r);
        }
        knots.push(foot);
        knots.push(big_r);
        knots.sort_by(|a, b| a.total_cmp(b));
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-14 * b.abs().max(1.0));
        for w in knots.windows(2) {
            let piece = adaptive(|r| f(dir * r) * dir, w[0], w[1], qtol / knots.len() as f64, 0.0, 4000);
            // lower ray runs inward
            total += if s < 0.0 { -piece.value } else { piece.value };
            err += piece.err;
            converged &= piece.converged;
        }
    }
    let mut value = total / (Complex64::i() * scale);
    err /= scale;
    if right {
        let k = int_delta.expect("checked above") - 1;
        let q = (1.0 - p.beta) / alpha + delta - 1.0;
        let corr = residue_derivative(alpha, q, k, z) * (rgamma(delta) / alpha);
        value += corr;
        err += 8.0 * f64::EPSILON * corr.norm();
    }
    if !converged && err > tolerance_target(tol, value.norm()) {
        return Err(KernelError::accuracy(format!("contour quadrature for z = {z} did not converge"), err));
    }
    Ok(ComplexEval::new(value, err, Method::Contour))
}

/// Contour parameters keeping z well away from γ: z goes left of the contour
/// whenever |arg z| exceeds the lower edge of the window.
pub fn choose_contour(alpha: f64, z: Complex64) -> ContourSpec {
    let (lo, hi) = admissible_window(alpha);
    let th = z.arg().abs();
    let mu = if th > lo + 1e-3 * (hi - lo) { 0.5 * (lo + th.min(hi)) } else { 0.5 * (th.max(lo) + hi) };
    let mut eps = 1.0;
    let r = z.norm();
    if th <= mu && (r - eps).abs() < 0.25 {
        eps = if r < 1.0 { r + 0.3 } else { r - 0.3 };
    }
    ContourSpec { epsilon: eps, mu }
}

/// Automatic evaluation: short series, then the contour (when α < 2 and the
/// region allows it), then the long series.
pub fn prabhakar(p: PrabhakarParams, z: Complex64, tol: f64) -> Result<ComplexEval> {
    if let Ok(v) = prabhakar_series_capped(p, z, tol, AUTO_SERIES_TERMS) {
        if v.err <= tolerance_target(tol, v.value.norm()) {
            return Ok(v);
        }
    }
    let mut last_err = None;
    if p.alpha < 2.0 {
        let c = choose_contour(p.alpha, z);
        let usable = !c.in_right_region(z) || p.integer_delta().is_some_and(|d| d <= MAX_CORRECTION_ORDER);
        if usable {
            match prabhakar_contour(p, z, c, tol) {
                Ok(v) => return Ok(v),
                Err(e) => last_err = Some(e),
            }
        }
    }
    match prabhakar_series(p, z, tol) {
        Ok(v) if v.err <= tolerance_target(tol, v.value.norm()) => Ok(v),
        Ok(v) => Err(KernelError::accuracy(format!("no route certified E at z = {z}"), v.err)),
        Err(e) => Err(last_err.unwrap_or(e)),
    }
}

/// Integer δ ≥ 2 via E^{d}_{α,b} = [E^{d−1}_{α,b−1} + (1−b+α(d−1))E^{d−1}_{α,b}]/(α(d−1)),
/// bottoming out in two-parameter values E_{α,β−j}.
pub fn prabhakar_reduce(p: PrabhakarParams, z: Complex64) -> Result<ComplexEval> {
    let d = match p.integer_delta() {
        Some(d) if d >= 2 => d,
        _ => return Err(KernelError::domain(format!("reduction needs integer delta >= 2, got {}", p.delta))),
    };
    let tol = 1e-14;
    let mut method = Method::Series;
    let mut row: Vec<(Complex64, f64)> = Vec::with_capacity(d);
    for j in 0..d {
        let q = PrabhakarParams { alpha: p.alpha, beta: p.beta - j as f64, delta: 1.0 };
        let v = prabhakar(q, z, tol)?;
        if v.method != Method::Series {
            method = v.method;
        }
        row.push((v.value, v.err));
    }
    for level in 2..=d {
        let lm = (level - 1) as f64;
        let denom = p.alpha * lm;
        let mut next = Vec::with_capacity(row.len() - 1);
        for j in 0..row.len() - 1 {
            let b = p.beta - j as f64;
            let coef = 1.0 - b + p.alpha * lm;
            let v = (row[j + 1].0 + row[j].0 * coef) / denom;
            let e = (row[j + 1].1 + coef.abs() * row[j].1) / denom;
            next.push((v, e));
        }
        row = next;
    }
    Ok(ComplexEval::new(row[0].0, row[0].1, method))
}

/// Radial × angular sample of the sector μ ≤ arg z ≤ π.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SectorGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub r_count: usize,
    pub angle_count: usize,
}

impl Default for SectorGrid {
    fn default() -> Self {
        SectorGrid { r_min: 0.01, r_max: 1e3, r_count: 61, angle_count: 9 }
    }
}

pub(crate) fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect()
}

pub(crate) fn lin_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Audits sup |E^δ_{α,β}(z)|(1+|z|^δ) over the sector μ ≤ |arg z| ≤ π.
/// Conjugate symmetry (real parameters) lets the lower half be skipped.
pub fn sector_bound_audit(p: PrabhakarParams, mu: f64, grid: SectorGrid, tol: f64) -> Result<ScanReport> {
    ContourSpec::new(1.0, mu, p.alpha)?;
    if !(grid.r_min > 0.0 && grid.r_max > grid.r_min && grid.r_count >= 2 && grid.angle_count >= 1) {
        return Err(KernelError::Usage("sector grid must have 0 < r_min < r_max and at least two radii".into()));
    }
    let radii = log_grid(grid.r_min, grid.r_max, grid.r_count);
    let angles = lin_grid(mu, PI, grid.angle_count);
    let points: Vec<(f64, f64)> = radii.iter().flat_map(|&r| angles.iter().map(move |&a| (r, a))).collect();
    let results: Vec<(f64, f64, Result<ComplexEval>)> = points
        .par_iter()
        .map(|&(r, a)| (r, a, prabhakar(p, Complex64::from_polar(r, a), tol)))
        .collect();
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (r, a, res) in results {
        match res {
            Ok(v) => cells.push(Cell {
                z: r,
                theta: a,
                re: v.value.re,
                im: v.value.im,
                abs: v.value.norm(),
                err: v.err,
                method: v.method.to_string(),
                normalized: v.value.norm() * (1.0 + r.powf(p.delta)),
            }),
            Err(e) => failures.push(CellFailure { z: r, theta: a, error: e.to_string() }),
        }
    }
    let config = serde_json::json!({
        "audit": "prabhakar-sector",
        "alpha": p.alpha, "beta": p.beta, "delta": p.delta, "mu": mu,
        "grid": grid, "tol": tol,
    });
    Ok(ScanReport::assemble(config, cells, failures, DEFAULT_GROWTH_TOL))
}

/// Numerical Laplace transform of t^{β−1}E^δ_{α,β}(z t^α) at real s, next to
/// the closed form s^{−β}(1 − z s^{−α})^{−δ}.  Returns (numeric, exact, err).
pub fn laplace_pair_check(p: PrabhakarParams, z: Complex64, s: f64, tol: f64) -> Result<(Complex64, Complex64, f64)> {
    if !(p.beta > 0.0) {
        return Err(KernelError::domain("Laplace pair needs beta > 0"));
    }
    let rate = z.norm().powf(1.0 / p.alpha);
    if !(s > rate) {
        return Err(KernelError::domain(format!("need s > |z|^(1/alpha) = {rate}, got {s}")));
    }
    let exact = Complex64::new(s, 0.0).powf(-p.beta) * (Complex64::new(1.0, 0.0) - z * s.powf(-p.alpha)).powf(-p.delta);
    let integrand = |t: f64| -> Result<Complex64> {
        let e = prabhakar(p, z * t.powf(p.alpha), tol)?;
        Ok(e.value * ((-s * t).exp() * t.powf(p.beta - 1.0)))
    };
    // e^{−(s−rate)T} small against the E growth
    let upper = (60.0 + p.delta.max(1.0) * 10.0) / (s - rate);
    let mut knots = vec![0.0];
    let mut t = 1e-10;
    while t < 1.0 {
        knots.push(t);
        t *= 10.0;
    }
    let mut t = 1.0;
    while t < upper {
        knots.push(t);
        t *= 2.0;
    }
    knots.push(upper);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut failure = None;
    for w in knots.windows(2) {
        let r = adaptive(
            |t| match integrand(t) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            },
            w[0],
            w[1],
            tol * 1e-2,
            0.0,
            2000,
        );
        total += r.value;
        err += r.err;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    // first knot [0, 1e-10]: ∫ t^{β−1}/Γ(β) ≈ 1e-10β/Γ(β+1), already inside the
    // first adaptive piece; the truncated tail is bounded by the last sample
    let tail = integrand(upper)?.norm() / (s - rate);
    Ok((total, exact, err + tail))
}
