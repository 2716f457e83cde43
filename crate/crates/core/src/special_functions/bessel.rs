//! Bessel functions of the first kind J_ν(x) for real order and x ≥ 0.
//!
//! Three regimes: the ascending series where it has no serious cancellation,
//! the Hankel expansion for large x, and Steed's continued-fraction method
//! (CF1 + recurrence + CF2) in between.  `bessel_j_ladder` produces a whole
//! integer-step family of orders at one argument by Miller's algorithm.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, rgamma};
use crate::error::{check_finite, KernelError, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const RESCALE_AT: f64 = 1e250;

/// Order ν ≥ 0 of J_ν.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        check_finite("Bessel order", nu)?;
        if nu < 0.0 {
            return Err(KernelError::domain(format!("Bessel order must be >= 0, got {nu}")));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// J_ν(x) with an absolute accuracy request.
///
/// The evaluators reach about 1e-15 absolute for moderate x; for large x the
/// phase x − νπ/2 − π/4 carries an unavoidable error of order x·ε, so a
/// tolerance tighter than that is refused.
pub fn bessel_j(order: BesselOrder, x: f64, tol: f64) -> Result<f64> {
    check_finite("x", x)?;
    if x < 0.0 {
        return Err(KernelError::domain(format!("bessel_j needs x >= 0, got {x}")));
    }
    if !(tol > 0.0) {
        return Err(KernelError::domain("tol must be positive"));
    }
    let achievable = 4.0 * EPS * x.max(1.0);
    if tol < achievable {
        return Err(KernelError::accuracy("tolerance below floating-point floor", achievable));
    }
    Ok(jv(order.nu, x))
}

/// J̃_ν(x) = (x/2)^{-ν} J_ν(x), equal to 1/Γ(ν+1) at x = 0.
pub fn bessel_j_tilde(order: BesselOrder, x: f64) -> Result<f64> {
    check_finite("x", x)?;
    if x < 0.0 {
        return Err(KernelError::domain(format!("bessel_j_tilde needs x >= 0, got {x}")));
    }
    Ok(jv_tilde(order.nu, x))
}

fn series_is_safe(nu: f64, x: f64) -> bool {
    x <= 2.0 || 0.25 * x * x <= 0.5 * (nu + 1.0)
}

/// Σ_k (−x²/4)^k Γ(ν+1)/(k! Γ(k+ν+1)); times 1/Γ(ν+1) this is J̃_ν(x).
fn raw_series(nu: f64, x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..500 {
        let kf = k as f64;
        term *= q / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// J_ν(x) for ν > −1 (negative orders are used internally only).
pub(crate) fn jv(nu: f64, x: f64) -> f64 {
    debug_assert!(nu > -1.0);
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if series_is_safe(nu, x) {
        if nu == 0.0 {
            return raw_series(0.0, x);
        }
        // log form keeps (x/2)^ν/Γ(ν+1) finite for large ν
        return raw_series(nu, x) * (nu * (0.5 * x).ln() - ln_gamma(nu + 1.0)).exp();
    }
    if x >= 30.0 && x >= nu * nu {
        if let Some(v) = hankel_asymptotic(nu, x) {
            return v;
        }
    }
    if nu < 0.0 {
        let a = jv(nu + 1.0, x);
        let b = jv(nu + 2.0, x);
        return 2.0 * (nu + 1.0) / x * a - b;
    }
    steed(nu, x)
}

pub(crate) fn jv_tilde(nu: f64, x: f64) -> f64 {
    if series_is_safe(nu, x) {
        return raw_series(nu, x) * rgamma(nu + 1.0);
    }
    jv(nu, x) * (-nu * (0.5 * x).ln()).exp()
}

/// Hankel large-argument expansion; `None` when the terms stop decreasing
/// before reaching double precision.
pub(crate) fn hankel_asymptotic(nu: f64, x: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (8.0 * kf * x);
        let t = term.abs();
        if t > prev && t > 1e-17 {
            return None;
        }
        prev = t;
        // P collects even k with alternating sign, Q odd k likewise
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if t < 1e-17 * (p.abs() + q.abs()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return None;
    }
    let phase = (0.5 * nu + 0.25) * PI;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    Some((2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi))
}

/// Steed's method for x ≥ 2, ν ≥ 0 (CF1 for J'/J, downward recurrence to an
/// order μ ≲ x, CF2 for (J'+iY')/(J+iY) at μ, Wronskian normalization).
fn steed(nu: f64, x: f64) -> f64 {
    let nl = (nu - x + 1.5).floor().max(0.0) as usize;
    let xmu = nu - nl as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let maxit = 20_000 + 4 * x as usize;
    for _ in 0..maxit {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    let mut rjl = isign * 1e-200;
    let mut rjpl = h * rjl;
    let mut rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > RESCALE_AT {
            rjl /= RESCALE_AT;
            rjpl /= RESCALE_AT;
            rjl1 /= RESCALE_AT;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let mut a = 0.25 - xmu * xmu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fct = a * xi / (p * p + q * q);
    let mut cr = br + q * fct;
    let mut ci = bi + p * fct;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..100_000 {
        a += 2.0 * (i as f64 - 1.0);
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fct = a / (cr * cr + ci * ci);
        cr = br + cr * fct;
        ci = bi - ci * fct;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < EPS {
            break;
        }
    }
    let gam = (p - f) / q;
    let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
    rjl1 * (rjmu / rjl)
}

/// J_{μ+j}(x) for j = 0..=n, μ > −1, by downward recurrence from above
/// max(n, x), normalized against directly computed J_μ and J_{μ+1}.
pub fn bessel_j_ladder(mu: f64, x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    if x == 0.0 {
        out[0] = jv(mu, 0.0);
        return out;
    }
    if n == 0 {
        out[0] = jv(mu, x);
        return out;
    }
    let top = (n as f64).max(x).max(1.0);
    let start = (top + (160.0 * top).sqrt() + 10.0).ceil() as usize;
    let mut fkp1 = 0.0;
    let mut fk = 1e-200;
    for k in (1..=start).rev() {
        if k <= n {
            out[k] = fk;
        }
        let fkm1 = 2.0 * (mu + k as f64) / x * fk - fkp1;
        fkp1 = fk;
        fk = fkm1;
        if fk.abs() > RESCALE_AT {
            fk /= RESCALE_AT;
            fkp1 /= RESCALE_AT;
            let hi = n.min(start);
            for v in out[k.min(hi + 1)..=hi].iter_mut() {
                *v /= RESCALE_AT;
            }
        }
    }
    out[0] = fk;
    let j0 = jv(mu, x);
    let j1 = jv(mu + 1.0, x);
    let scale = (out[0] * j0 + out[1] * j1) / (out[0] * out[0] + out[1] * out[1]);
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// J at orders ν0 + k·step, k = 0..count.  Rational steps with small
/// denominators are served from integer-step ladders; other steps fall back
/// to one evaluation per order.
pub fn bessel_j_sequence(nu0: f64, step: f64, count: usize, x: f64) -> Vec<f64> {
    if count == 0 {
        return Vec::new();
    }
    if x <= 2.0 || count < 4 {
        return (0..count).map(|k| jv(nu0 + k as f64 * step, x)).collect();
    }
    if let Some((p, q)) = small_rational(step) {
        let mut out = vec![0.0; count];
        for r in 0..q.min(count) {
            let base = nu0 + r as f64 * step;
            let jmax = (count - 1 - r) / q;
            let ladder = bessel_j_ladder(base, x, jmax * p);
            for j in 0..=jmax {
                out[r + q * j] = ladder[j * p];
            }
        }
        return out;
    }
    (0..count).map(|k| jv(nu0 + k as f64 * step, x)).collect()
}

/// step ≈ p/q with q ≤ 12, p ≥ 1.
fn small_rational(step: f64) -> Option<(usize, usize)> {
    if !(step > 0.0) {
        return None;
    }
    for q in 1..=12usize {
        let pq = step * q as f64;
        let p = pq.round();
        if p >= 1.0 && (pq - p).abs() < 1e-12 * pq.max(1.0) {
            return Some((p as usize, q));
        }
    }
    None
}
