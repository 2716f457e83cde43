//! The kernel as a τ-integral of two Bessel functions against h, a
//! convolution of two Prabhakar functions, and the sector audits that go
//! with it.
//!
//! The τ-integral runs over [0, ∞) and converges only when both Prabhakar
//! arguments b± lie in their decay sector, |arg b±| > π/a.  Outside that
//! region [`kernel_via_integral`] refuses the point.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::eval::{ComplexEval, Method};
use crate::kernel_core::{GeomPoint, KernelParams};
use crate::mittag_leffler::{lin_grid, log_grid, prabhakar, PrabhakarParams};
use crate::quadrature::{jacobi, legendre, wynn_epsilon_complex, Rule};
use crate::report::{Cell, CellFailure, ScanReport, DEFAULT_GROWTH_TOL};
use crate::special_functions::bessel::jv;
use crate::special_functions::gamma::{ln_gamma, rgamma};

/// h is summed from its power series while z_a t stays below this.
pub const SERIES_ZT: f64 = 4.0;
/// Large-τ expansion of h is used once z_a τ exceeds this.
pub const ASYMPTOTIC_ZT: f64 = 36.0;
/// The exponentially small part of h must be below e^{−EXP_CUTOFF} where
/// the expansion takes over.
pub const EXP_CUTOFF: f64 = 34.0;
/// Largest z_a τ the direct part of the τ-integral may need; points closer
/// to the sector edge are refused.
pub const MAX_DIRECT_ZT: f64 = 2000.0;
/// Points with min |arg b±| − π/a below this are treated as outside.
pub const SECTOR_EPS: f64 = 1e-9;

const NODES: usize = 16;
const GRADE: f64 = 0.2;
const GRADE_LEVELS: i32 = 5;
const PANEL_PHASE: f64 = 9.0;
const TAIL_PANELS: usize = 40;
const PRABHAKAR_TOL: f64 = 1e-12;

/// Parameters of h and of the outer integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HInputs {
    /// e^{iθ}e^{iπ/a}(2/a)^{2/a} z
    pub b_plus: Complex64,
    /// e^{−iθ}e^{iπ/a}(2/a)^{2/a} z
    pub b_minus: Complex64,
    /// 2(λ+1)/a
    pub exponent: f64,
    /// 2^{2λ/a}Γ((2λ+a)/a) e^{i2π(λ+1)/a} (2/a)^{2(λ+2)/a}
    pub c_am: Complex64,
}

impl HInputs {
    pub fn new(p: &KernelParams, g: &GeomPoint) -> Self {
        let (a, lam) = (p.a, p.lambda);
        let rot = Complex64::from_polar((2.0 / a).powf(2.0 / a) * g.z, PI / a);
        let c_abs = ((2.0 * lam / a) * 2f64.ln() + ln_gamma((2.0 * lam + a) / a) + (2.0 * (lam + 2.0) / a) * (2.0 / a).ln()).exp();
        HInputs {
            b_plus: rot * Complex64::from_polar(1.0, g.theta),
            b_minus: rot * Complex64::from_polar(1.0, -g.theta),
            exponent: 2.0 * (lam + 1.0) / a,
            c_am: Complex64::from_polar(c_abs, 2.0 * PI * (lam + 1.0) / a),
        }
    }

    fn prabhakar_params(&self, p: &KernelParams) -> Result<PrabhakarParams> {
        PrabhakarParams::new(2.0 / p.a, self.exponent, p.lambda + 1.0)
    }
}

fn principal(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

/// min |arg e^{i(±θ+π/a)}|: the angular position of b± used by the sector
/// conditions.
pub fn sector_angle(p: &KernelParams, theta: f64) -> f64 {
    principal(theta + PI / p.a).abs().min(principal(-theta + PI / p.a).abs())
}

/// [`sector_angle`] minus π/a; positive exactly where both Prabhakar factors
/// of h decay.
pub fn sector_margin(p: &KernelParams, g: &GeomPoint) -> f64 {
    sector_angle(p, g.theta) - PI / p.a
}

/// Singular points p₀ = b^{a/2} of the Laplace transform of h that sit on
/// the principal sheet (|arg b| < 2π/a).  Each contributes a term of size
/// e^{Re p₀ τ}.
fn exponential_poles(p: &KernelParams, g: &GeomPoint) -> Vec<Complex64> {
    let za = p.z_a(g.z);
    [1.0, -1.0]
        .iter()
        .filter_map(|&s| {
            let ang = principal(s * g.theta + PI / p.a);
            (ang.abs() < 2.0 * PI / p.a).then(|| Complex64::from_polar(za, 0.5 * p.a * ang))
        })
        .collect()
}

/// z^{λ+2} t^{2e−1} Σ_N C_N^{λ+1}(ξ) w^N / Γ(αN + 2e), w = e^{iπ/a}(z_a t)^{2/a}:
/// the convolution of the two Prabhakar series taken term by term.
fn h_series(p: &KernelParams, g: &GeomPoint, hi: &HInputs, t: f64) -> (Complex64, f64) {
    let alpha = 2.0 / p.a;
    let delta = p.lambda + 1.0;
    let e2 = 2.0 * hi.exponent;
    let wabs = (p.z_a(g.z) * t).powf(alpha);
    let w = Complex64::from_polar(wabs, PI / p.a);
    let (mut c_prev, mut c) = (0.0, 1.0);
    let mut c_one = 1.0;
    let mut wn = Complex64::new(1.0, 0.0);
    let mut wn_abs = 1.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for n in 0..4000 {
        let nf = n as f64;
        let rg = rgamma(alpha * nf + e2);
        sum += wn * (c * rg);
        let maj = wn_abs * c_one * rg.abs();
        abs_sum += maj;
        if n > 8 && maj < 1e-17 * abs_sum {
            break;
        }
        let next = (2.0 * g.xi * (nf + delta) * c - (nf + 2.0 * delta - 1.0) * c_prev) / (nf + 1.0);
        c_prev = c;
        c = next;
        c_one *= (2.0 * delta + nf) / (nf + 1.0);
        wn *= w;
        wn_abs *= wabs;
    }
    let pref = g.z.powf(p.lambda + 2.0) * t.powf(e2 - 1.0);
    (sum * pref, 8.0 * f64::EPSILON * abs_sum * pref)
}

/// Large-τ expansion z^{λ+2} K Σ_{N≥1} C_N^{λ+1}(ξ) q^N / (τ Γ(−αN)),
/// q = e^{−iπ/a}(z_a τ)^{−2/a}, K = (−b₊)^{−δ}(−b₋)^{−δ}, truncated at its
/// smallest term.  The exponentially small part is not included.
fn h_asymptotic(p: &KernelParams, g: &GeomPoint, hi: &HInputs, t: f64) -> (Complex64, f64) {
    let alpha = 2.0 / p.a;
    let delta = p.lambda + 1.0;
    let qabs = (p.z_a(g.z) * t).powf(-alpha);
    let q = Complex64::from_polar(qabs, -PI / p.a);
    let k = (-((-hi.b_plus).ln() + (-hi.b_minus).ln()) * delta).exp();
    let (mut c_prev, mut c) = (1.0, 2.0 * delta * g.xi);
    let mut c_one = 2.0 * delta;
    let mut qn = q;
    let mut qn_abs = qabs;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = f64::INFINITY;
    for n in 1..400 {
        let nf = n as f64;
        let maj = c_one * qn_abs * (ln_gamma(alpha * nf + 1.0)).exp() / PI;
        if n > 2 && maj > last {
            break;
        }
        sum += qn * (c * rgamma(-alpha * nf));
        last = maj;
        if maj < 1e-17 * sum.norm() {
            break;
        }
        let next = (2.0 * g.xi * (nf + delta) * c - (nf + 2.0 * delta - 1.0) * c_prev) / (nf + 1.0);
        c_prev = c;
        c = next;
        c_one *= (2.0 * delta + nf) / (nf + 1.0);
        qn *= q;
        qn_abs *= qabs;
    }
    let pref = g.z.powf(p.lambda + 2.0) / t;
    let expo: f64 = exponential_poles(p, g).iter().map(|p0| (p0.re * t).exp()).sum();
    let scale = pref * k.norm();
    (sum * k * pref, scale * (last + expo) + 8.0 * f64::EPSILON * scale * sum.norm())
}

/// Chebyshev interpolant on [lo, hi] with a coefficient-tail error estimate.
struct Cheb {
    lo: f64,
    hi: f64,
    coef: Vec<Complex64>,
    err: f64,
}

impl Cheb {
    fn build<F>(lo: f64, hi: f64, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<(Complex64, f64)>,
    {
        let mut vals = Vec::with_capacity(n);
        let mut ferr: f64 = 0.0;
        for j in 0..n {
            let x = (PI * (j as f64 + 0.5) / n as f64).cos();
            let (v, e) = f(0.5 * (hi + lo) + 0.5 * (hi - lo) * x)?;
            vals.push(v);
            ferr = ferr.max(e);
        }
        let coef: Vec<Complex64> = (0..n)
            .map(|k| {
                let s: Complex64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                s * (if k == 0 { 1.0 } else { 2.0 } / n as f64)
            })
            .collect();
        let err = coef[n - 1].norm() + coef[n - 2].norm() + coef[n - 3].norm() + ferr;
        Ok(Cheb { lo, hi, coef, err })
    }

    fn eval(&self, s: f64) -> Complex64 {
        let x = (2.0 * s - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for c in self.coef.iter().skip(1).rev() {
            let b0 = b1 * (2.0 * x) - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        b1 * x - b2 + self.coef[0]
    }
}

/// s^{e−1} E^{δ}_{α,e}(b s^α)
fn prabhakar_factor(pp: PrabhakarParams, b: Complex64, s: f64) -> Result<(Complex64, f64)> {
    let v = prabhakar(pp, b * s.powf(pp.alpha), PRABHAKAR_TOL)?;
    let sc = s.powf(pp.beta - 1.0);
    Ok((v.value * sc, (v.err + PRABHAKAR_TOL * v.value.norm()) * sc))
}

/// Running sums of a panel quadrature: value, propagated error, ∫|·|.
#[derive(Default, Clone, Copy)]
struct Acc {
    value: Complex64,
    err: f64,
    abs: f64,
}

impl Acc {
    fn add(&mut self, other: Acc) {
        self.value += other.value;
        self.err += other.err;
        self.abs += other.abs;
    }
}

/// ∫_lo^hi w(x) f(x) dx with a rule mapped from [−1, 1]; `scale` multiplies
/// the rule weights (used for Jacobi rules whose weight was factored out).
fn panel<F>(rule: &Rule, lo: f64, hi: f64, scale: f64, mut f: F) -> Result<Acc>
where
    F: FnMut(f64) -> Result<(Complex64, f64)>,
{
    let h = 0.5 * (hi - lo);
    let c = 0.5 * (hi + lo);
    let mut acc = Acc::default();
    for &(x, w) in rule.iter() {
        let (v, e) = f(c + h * x)?;
        let wt = w * h * scale;
        acc.value += v * wt;
        acc.err += e * wt.abs();
        acc.abs += v.norm() * wt.abs();
    }
    Ok(acc)
}

/// ∫_0^L u^{p} g(u) du on a Jacobi rule.
fn left_power_panel<F>(n: usize, p: f64, len: f64, mut f: F) -> Result<Acc>
where
    F: FnMut(f64) -> Result<(Complex64, f64)>,
{
    let rule = jacobi(n, 0.0, p);
    let h = 0.5 * len;
    let scale = h.powf(p + 1.0);
    let mut acc = Acc::default();
    for &(x, w) in rule.iter() {
        let (v, e) = f(h * (1.0 + x))?;
        acc.value += v * (w * scale);
        acc.err += e * w * scale;
        acc.abs += v.norm() * w * scale;
    }
    Ok(acc)
}

/// One half of the convolution, ∫_0^{t/2} f₁(ζ) f₂(t−ζ) dζ, in u = ζ^α so
/// that f₁ becomes u^{δ−1} times an entire function of u.  f₂ is smooth on
/// [t/2, t] and is replaced by a Chebyshev interpolant there.
fn half_convolution(pp: PrabhakarParams, b1: Complex64, b2: Complex64, t: f64, cheb_nodes: usize) -> Result<Acc> {
    let alpha = pp.alpha;
    let delta = pp.delta;
    let smooth = Cheb::build(0.5 * t, t, cheb_nodes, |s| prabhakar_factor(pp, b2, s))?;
    let big_u = (0.5 * t).powf(alpha);
    let us = big_u.min(1.0 / b1.norm());
    let integrand = |u: f64| -> Result<(Complex64, f64)> {
        let e1 = prabhakar(pp, b1 * u, PRABHAKAR_TOL)?;
        let f2 = smooth.eval(t - u.powf(1.0 / alpha));
        let v = e1.value * f2 / alpha;
        Ok((v, ((e1.err + PRABHAKAR_TOL * e1.value.norm()) * f2.norm() + e1.value.norm() * smooth.err) / alpha))
    };
    let leg = legendre(NODES);
    let mut acc = left_power_panel(NODES, delta - 1.0, us * GRADE.powi(GRADE_LEVELS), integrand)?;
    let weighted = |u: f64| integrand(u).map(|(v, e)| (v * u.powf(delta - 1.0), e * u.powf(delta - 1.0)));
    for k in (0..GRADE_LEVELS).rev() {
        acc.add(panel(&leg, us * GRADE.powi(k + 1), us * GRADE.powi(k), 1.0, weighted)?);
    }
    let mut lo = us;
    while lo < big_u * (1.0 - 1e-12) {
        let hi = (lo * 3.0).min(big_u);
        acc.add(panel(&leg, lo, hi, 1.0, weighted)?);
        lo = hi;
    }
    Ok(acc)
}

fn h_convolution(p: &KernelParams, g: &GeomPoint, hi: &HInputs, t: f64) -> Result<(Complex64, f64)> {
    let pp = hi.prabhakar_params(p)?;
    // oscillation of the decaying exponential part across [t/2, t]
    let phase: f64 = exponential_poles(p, g)
        .iter()
        .map(|p0| if p0.re * 0.5 * t > -40.0 { p0.im.abs() * 0.5 * t } else { 0.0 })
        .fold(0.0, f64::max);
    let cheb_nodes = (20.0 + 1.5 * phase).min(96.0) as usize;
    let mut acc = half_convolution(pp, hi.b_plus, hi.b_minus, t, cheb_nodes)?;
    acc.add(half_convolution(pp, hi.b_minus, hi.b_plus, t, cheb_nodes)?);
    let pref = g.z.powf(p.lambda + 2.0);
    Ok((acc.value * pref, (acc.err + 1e-13 * acc.abs) * pref))
}

/// h(z, ξ, t) = z^{λ+2} ∫_0^t ζ^{e−1}E^{λ+1}_{2/a,e}(b₊ζ^{2/a})
/// (t−ζ)^{e−1}E^{λ+1}_{2/a,e}(b₋(t−ζ)^{2/a}) dζ with e = 2(λ+1)/a.
///
/// Small z_a t: the double power series.  Otherwise: the convolution with
/// Prabhakar values from [`prabhakar`].
pub fn h_function(p: &KernelParams, g: &GeomPoint, t: f64, tol: f64) -> Result<ComplexEval> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(KernelError::domain(format!("h needs t > 0, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(KernelError::domain("tol must be positive"));
    }
    if g.z == 0.0 {
        return Ok(ComplexEval::exact(Complex64::new(0.0, 0.0), Method::Series));
    }
    let hi = HInputs::new(p, g);
    let (v, e, m) = if p.z_a(g.z) * t <= SERIES_ZT {
        let (v, e) = h_series(p, g, &hi, t);
        (v, e, Method::Series)
    } else {
        let (v, e) = h_convolution(p, g, &hi, t)?;
        (v, e, Method::Integral)
    };
    if e > tol * v.norm().max(1.0) {
        return Err(KernelError::accuracy(format!("h at t = {t} not certified"), e));
    }
    Ok(ComplexEval::new(v, e, m))
}

/// The Bessel bracket in v = √(1+2τ):
/// v^{−2λ/a}J_{2λ/a}(z_a v) − e^{−2iπ/a} v^{−2(λ+2)/a}J_{(2λ+4)/a}(z_a v).
fn bracket(p: &KernelParams, za: f64, v: f64) -> Complex64 {
    let n1 = 2.0 * p.lambda / p.a;
    let n2 = (2.0 * p.lambda + 4.0) / p.a;
    Complex64::new(v.powf(-n1) * jv(n1, za * v), 0.0) - Complex64::from_polar(v.powf(-n2) * jv(n2, za * v), -2.0 * PI / p.a)
}

/// ∫_0^{τ₁} bracket(√(1+2τ)) h(τ) dτ with h expanded in its power series;
/// the bracket is analytic in τ, so every term gets an exact Jacobi weight.
fn series_region(p: &KernelParams, g: &GeomPoint, hi: &HInputs, za: f64, tau1: f64) -> Acc {
    let alpha = 2.0 / p.a;
    let delta = p.lambda + 1.0;
    let e2 = 2.0 * hi.exponent;
    let w0abs = za.powf(alpha);
    let w0 = Complex64::from_polar(w0abs, PI / p.a);
    let half = 0.5 * tau1;
    let moment = |pw: f64| -> (Complex64, f64) {
        let scale = half.powf(pw + 1.0);
        let mut m = Complex64::new(0.0, 0.0);
        let mut ma = 0.0;
        for &(x, w) in jacobi(NODES, 0.0, pw).iter() {
            let tau = half * (1.0 + x);
            let b = bracket(p, za, (1.0 + 2.0 * tau).sqrt());
            m += b * (w * scale);
            ma += b.norm() * w * scale;
        }
        (m, ma)
    };
    let (mut c_prev, mut c) = (0.0, 1.0);
    let mut c_one = 1.0;
    let mut wn = Complex64::new(1.0, 0.0);
    let mut wn_abs = 1.0;
    let mut acc = Acc::default();
    for n in 0..4000 {
        let nf = n as f64;
        let pw = alpha * nf + e2 - 1.0;
        let rg = rgamma(pw + 1.0);
        let (m, ma) = moment(pw);
        acc.value += wn * m * (c * rg);
        let maj = wn_abs * c_one * rg.abs() * ma;
        acc.abs += maj;
        if n > 8 && maj < 1e-17 * acc.abs {
            break;
        }
        let next = (2.0 * g.xi * (nf + delta) * c - (nf + 2.0 * delta - 1.0) * c_prev) / (nf + 1.0);
        c_prev = c;
        c = next;
        c_one *= (2.0 * delta + nf) / (nf + 1.0);
        wn *= w0;
        wn_abs *= w0abs;
    }
    let pref = g.z.powf(p.lambda + 2.0);
    acc.value *= pref;
    acc.abs *= pref;
    acc.err = 8.0 * f64::EPSILON * acc.abs;
    acc
}

/// K_a^m(z, ξ) = c_{a,m} ∫_0^∞ [bracket at √(1+2τ)] h(z, ξ, τ) dτ.
///
/// Only defined inside the decay sector (both |arg b±| > π/a); other points
/// get a domain error.  The integral is taken in v = √(1+2τ): graded panels
/// at v = 1, fixed panels up to the point where the large-τ expansion of h
/// is accurate, and Wynn-accelerated half-periods beyond.
pub fn kernel_via_integral(p: &KernelParams, g: &GeomPoint, tol: f64) -> Result<ComplexEval> {
    if !(tol > 0.0) {
        return Err(KernelError::domain("tol must be positive"));
    }
    if g.z == 0.0 {
        return Ok(ComplexEval::exact(Complex64::new(1.0, 0.0), Method::Integral));
    }
    let margin = sector_margin(p, g);
    if margin <= SECTOR_EPS {
        return Err(KernelError::domain(format!(
            "θ = {:.4} is outside the decay sector for a = {} (min |arg b±| − π/a = {margin:.3e}); the τ-integral diverges",
            g.theta, p.a
        )));
    }
    let za = p.z_a(g.z);
    let hi = HInputs::new(p, g);
    let poles = exponential_poles(p, g);
    let mut t_cut = ASYMPTOTIC_ZT / za;
    for p0 in &poles {
        t_cut = t_cut.max(EXP_CUTOFF / -p0.re);
    }
    if t_cut * za > MAX_DIRECT_ZT {
        return Err(KernelError::accuracy(
            format!("θ = {:.4} is too close to the sector edge for the direct part of the τ-integral", g.theta),
            f64::NAN,
        ));
    }
    let im_max = poles.iter().map(|p0| p0.im.abs()).fold(0.0, f64::max);
    let v_cut = (1.0 + 2.0 * t_cut).sqrt();

    let mut fail: Option<KernelError> = None;
    let mut h_at = |v: f64, asymptotic: bool| -> (Complex64, f64) {
        let tau = 0.5 * (v - 1.0) * (v + 1.0);
        if asymptotic {
            return h_asymptotic(p, g, &hi, tau);
        }
        let r = if za * tau <= SERIES_ZT { Ok(h_series(p, g, &hi, tau)) } else { h_convolution(p, g, &hi, tau) };
        r.unwrap_or_else(|e| {
            fail.get_or_insert(e);
            (Complex64::new(0.0, 0.0), 0.0)
        })
    };
    let leg = legendre(NODES);

    // τ ≤ τ₁: h by its power series, each power integrated against the
    // bracket with a matching Jacobi weight
    let tau1 = (SERIES_ZT / za).min(t_cut);
    let mut core = series_region(p, g, &hi, za, tau1);
    let mut regular = |lo: f64, hi_: f64, asym: bool, acc: &mut Acc| {
        let h = 0.5 * (hi_ - lo);
        let c = 0.5 * (hi_ + lo);
        for &(x, w) in leg.iter() {
            let v = c + h * x;
            let (hv, he) = h_at(v, asym);
            let b = bracket(p, za, v);
            let wt = w * h * v;
            acc.value += b * hv * wt;
            acc.err += b.norm() * he * wt;
            acc.abs += (b * hv).norm() * wt;
        }
    };
    let v1 = (1.0 + 2.0 * tau1).sqrt();
    let mut lo = v1;
    while lo < v_cut * (1.0 - 1e-14) {
        let omega = za + im_max * lo + 1.0;
        let len = (PANEL_PHASE / omega).min(lo - 1.0).min(v_cut - lo);
        regular(lo, lo + len, false, &mut core);
        lo += len;
    }

    // tail: half periods of the Bessel oscillation
    let step = PI / za;
    let mut partial = Vec::with_capacity(TAIL_PANELS + 1);
    let mut tail = Acc::default();
    partial.push(tail.value);
    let mut lo = v_cut;
    for _ in 0..TAIL_PANELS {
        regular(lo, lo + step, true, &mut tail);
        partial.push(tail.value);
        lo += step;
    }
    if let Some(e) = fail {
        return Err(e);
    }
    let (tail_value, tail_extrap_err) = wynn_epsilon_complex(&partial);
    let value = hi.c_am * (core.value + tail_value);
    let cabs = hi.c_am.norm();
    let err = cabs * (core.err + tail.err + tail_extrap_err + 1e-13 * core.abs);
    if err > tol.max(1e-12) * value.norm().max(1.0) * 1e3 {
        return Err(KernelError::accuracy("τ-integral not certified", err));
    }
    Ok(ComplexEval::new(value, err, Method::Integral))
}

/// Sample of the kernel sector: log-spaced z, θ spread over the part of
/// [0, π] where μ ≤ min |arg e^{i(±θ+π/a)}|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSectorGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub z_count: usize,
    pub theta_count: usize,
}

impl Default for KernelSectorGrid {
    fn default() -> Self {
        KernelSectorGrid { z_min: 0.1, z_max: 1e3, z_count: 31, theta_count: 7 }
    }
}

/// The admissible window (π/a, min(π, 2π/a)) for μ.
pub fn kernel_mu_window(a: f64) -> (f64, f64) {
    (PI / a, PI.min(2.0 * PI / a))
}

fn check_mu(a: f64, mu: f64) -> Result<()> {
    if !(a > 1.0) {
        return Err(KernelError::domain(format!("sector audits need a > 1, got {a}")));
    }
    let (lo, hi) = kernel_mu_window(a);
    if !(mu > lo && mu < hi) {
        return Err(KernelError::domain(format!("mu = {mu} outside ({lo:.4}, {hi:.4})")));
    }
    Ok(())
}

/// θ values in [0, π] with sector_angle(θ) ≥ μ, spread evenly over the
/// admissible interval.
pub fn sector_thetas(p: &KernelParams, mu: f64, count: usize) -> Vec<f64> {
    let fine = 20_000;
    let ok: Vec<f64> = (0..=fine)
        .map(|j| PI * j as f64 / fine as f64)
        .filter(|&th| sector_angle(p, th) >= mu)
        .collect();
    match (ok.first(), ok.last()) {
        (Some(&lo), Some(&hi)) if count > 1 => lin_grid(lo, hi, count),
        (Some(&lo), Some(&hi)) => vec![0.5 * (lo + hi)],
        _ => Vec::new(),
    }
}

fn to_cell(z: f64, theta: f64, v: &ComplexEval, normalized: f64) -> Cell {
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

/// sup |K| over the sector grid, with the kernel from `eval` (normally the
/// best available method per point).  Growth flag: last z-decade sup above
/// the earlier sup by more than the default tolerance.
pub fn sector_kernel_audit<F>(p: &KernelParams, mu: f64, grid: KernelSectorGrid, eval: F) -> Result<ScanReport>
where
    F: Fn(&GeomPoint) -> Result<ComplexEval> + Sync,
{
    check_mu(p.a, mu)?;
    if !(grid.z_min > 0.0 && grid.z_max > grid.z_min && grid.z_count >= 2 && grid.theta_count >= 1) {
        return Err(KernelError::Usage("kernel sector grid needs 0 < z_min < z_max and two or more radii".into()));
    }
    let thetas = sector_thetas(p, mu, grid.theta_count);
    let zs = log_grid(grid.z_min, grid.z_max, grid.z_count);
    let pts: Vec<(f64, f64)> = zs.iter().flat_map(|&z| thetas.iter().map(move |&t| (z, t))).collect();
    let res: Vec<(f64, f64, Result<ComplexEval>)> = pts
        .par_iter()
        .map(|&(z, th)| (z, th, GeomPoint::from_theta(z, th).and_then(|g| eval(&g))))
        .collect();
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (z, th, r) in res {
        match r {
            Ok(v) => cells.push(to_cell(z, th, &v, v.value.norm())),
            Err(e) => failures.push(CellFailure { z, theta: th, error: e.to_string() }),
        }
    }
    let config = serde_json::json!({
        "audit": "kernel-sector", "a": p.a, "m": p.m, "mu": mu, "grid": grid,
    });
    Ok(ScanReport::assemble(config, cells, failures, DEFAULT_GROWTH_TOL))
}

/// Audits |h(z, ξ, t)| / (z^{1/6} t^{2λ/a + 1/(3a) − 1}) over the sector
/// grid and `t_count` log-spaced t in (0, 1].  Each cell keeps the largest
/// ratio over t.
pub fn h_bound_audit(p: &KernelParams, mu: f64, grid: KernelSectorGrid, t_count: usize, tol: f64) -> Result<ScanReport> {
    check_mu(p.a, mu)?;
    if !(grid.z_min > 0.0 && grid.z_max > grid.z_min && grid.z_count >= 2 && t_count >= 1) {
        return Err(KernelError::Usage("h audit grid needs 0 < z_min < z_max, two or more radii and t samples".into()));
    }
    let thetas = sector_thetas(p, mu, grid.theta_count);
    let zs = log_grid(grid.z_min, grid.z_max, grid.z_count);
    let ts = log_grid(1e-3, 1.0, t_count);
    let pw = 2.0 * p.lambda / p.a + 1.0 / (3.0 * p.a) - 1.0;
    let pts: Vec<(f64, f64)> = zs.iter().flat_map(|&z| thetas.iter().map(move |&t| (z, t))).collect();
    let res: Vec<(f64, f64, Result<(ComplexEval, f64)>)> = pts
        .par_iter()
        .map(|&(z, th)| {
            let r = GeomPoint::from_theta(z, th).and_then(|g| {
                let mut best: Option<(ComplexEval, f64)> = None;
                for &t in &ts {
                    let h = h_function(p, &g, t, tol)?;
                    let ratio = h.value.norm() / (z.powf(1.0 / 6.0) * t.powf(pw));
                    if best.map_or(true, |b| ratio > b.1) {
                        best = Some((h, ratio));
                    }
                }
                Ok(best.expect("t grid is non-empty"))
            });
            (z, th, r)
        })
        .collect();
    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (z, th, r) in res {
        match r {
            Ok((h, ratio)) => cells.push(to_cell(z, th, &h, ratio)),
            Err(e) => failures.push(CellFailure { z, theta: th, error: e.to_string() }),
        }
    }
    let config = serde_json::json!({
        "audit": "h-bound", "a": p.a, "m": p.m, "mu": mu, "grid": grid, "t_count": t_count, "tol": tol,
    });
    Ok(ScanReport::assemble(config, cells, failures, DEFAULT_GROWTH_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_forms::kernel_a4_dim2;
    use crate::kernel_core::kernel_series;

    fn kp(a: f64, m: usize) -> KernelParams {
        KernelParams::new(a, m).unwrap()
    }

    #[test]
    fn constant_at_a2_m2() {
        let hi = HInputs::new(&kp(2.0, 2), &GeomPoint::new(1.0, 0.3).unwrap());
        let direct = 2f64.powf(0.0) * crate::special_functions::gamma::gamma(1.0) * Complex64::from_polar(1.0, PI) * 1f64.powf(2.0);
        assert!((hi.c_am - direct).norm() < 1e-15);
        assert!((hi.b_plus.norm() - hi.b_minus.norm()).abs() < 1e-15);
        assert_eq!(hi.exponent, 1.0);
    }

    #[test]
    fn h_plane_wave_case() {
        // a = 2, m = 2: both Prabhakar factors are exponentials
        let p = kp(2.0, 2);
        let g = GeomPoint::from_theta(1.0, 0.5).unwrap();
        let hi = HInputs::new(&p, &g);
        let want = ((hi.b_plus).exp() - (hi.b_minus).exp()) / (hi.b_plus - hi.b_minus);
        let got = h_function(&p, &g, 1.0, 1e-12).unwrap();
        assert!((got.value - want).norm() < 1e-13);
    }

    #[test]
    fn h_series_and_convolution_agree() {
        for &(a, m, z, th, t) in &[(3.0, 3, 1.5, 2.5, 1.0), (4.0, 2, 2.0, 2.2, 0.9), (8.0, 2, 1.2, 1.5, 3.0), (4.0, 5, 1.8, 2.9, 2.0)] {
            let p = kp(a, m);
            let g = GeomPoint::from_theta(z, th).unwrap();
            let hi = HInputs::new(&p, &g);
            assert!(p.z_a(z) * t < 8.0);
            let (s, se) = h_series(&p, &g, &hi, t);
            let (c, ce) = h_convolution(&p, &g, &hi, t).unwrap();
            assert!((s - c).norm() <= se + ce + 1e-12, "a={a} m={m}: {s} vs {c} ({se:e}, {ce:e})");
        }
    }

    #[test]
    fn h_small_t_scaling() {
        // h ~ t^{2e−1} as t → 0
        let p = kp(3.0, 3);
        let g = GeomPoint::from_theta(1.0, 2.4).unwrap();
        let e2 = 2.0 * HInputs::new(&p, &g).exponent;
        let h1 = h_function(&p, &g, 1e-6, 1e-10).unwrap().value;
        let h2 = h_function(&p, &g, 2e-6, 1e-10).unwrap().value;
        assert!(((h2 / h1).norm() - 2f64.powf(e2 - 1.0)).abs() < 1e-4);
    }

    #[test]
    fn large_t_expansion_matches_convolution() {
        for &(a, m, z, th) in &[(4.0, 2, 1.0, 2.8), (3.0, 3, 1.2, 2.7), (8.0, 2, 1.0, 2.0)] {
            let p = kp(a, m);
            let g = GeomPoint::from_theta(z, th).unwrap();
            let hi = HInputs::new(&p, &g);
            let za = p.z_a(z);
            let mut t = ASYMPTOTIC_ZT / za;
            for p0 in exponential_poles(&p, &g) {
                t = t.max(EXP_CUTOFF / -p0.re);
            }
            let (s, se) = h_asymptotic(&p, &g, &hi, t);
            let (c, ce) = h_convolution(&p, &g, &hi, t).unwrap();
            assert!((s - c).norm() <= 2.0 * (se + ce) + 1e-12 * c.norm(), "a={a}: {s} vs {c} ({se:e}, {ce:e})");
        }
    }

    #[test]
    fn matches_series_inside_sector() {
        for &(a, m, z, th) in &[(4.0, 2, 1.0, 2.8), (3.0, 3, 0.9, 2.3), (8.0, 2, 1.3, 2.0), (4.0, 4, 2.0, 2.5)] {
            let p = kp(a, m);
            let g = GeomPoint::from_theta(z, th).unwrap();
            let iv = kernel_via_integral(&p, &g, 1e-8).unwrap();
            let sv = kernel_series(&p, &g, 1e-13).unwrap();
            assert!(iv.agrees_with(&sv, 0.0), "a={a} m={m}: {} vs {} (err {:e})", iv.value, sv.value, iv.err);
            assert!(iv.err < 1e-7);
        }
    }

    #[test]
    fn matches_a4_closed_form() {
        let p = kp(4.0, 2);
        let g = GeomPoint::new(1.0, -0.5).unwrap();
        let iv = kernel_via_integral(&p, &g, 1e-8).unwrap();
        let cf = kernel_a4_dim2(&g).unwrap();
        assert!(iv.agrees_with(&cf, 0.0), "{} vs {}", iv.value, cf.value);
    }

    #[test]
    fn refuses_points_outside_the_sector() {
        // a = 2 has no interior sector points; a = 3 needs θ > 2π/3
        let r = kernel_via_integral(&kp(2.0, 2), &GeomPoint::new(1.0, 0.4).unwrap(), 1e-8);
        assert!(matches!(r, Err(KernelError::Domain(_))));
        let r = kernel_via_integral(&kp(3.0, 3), &GeomPoint::new(0.9, 0.2).unwrap(), 1e-8);
        assert!(matches!(r, Err(KernelError::Domain(_))));
    }

    #[test]
    fn sector_geometry() {
        let p = kp(8.0, 2);
        assert!(sector_margin(&p, &GeomPoint::from_theta(1.0, PI / 2.0).unwrap()) > 0.0);
        assert!(sector_margin(&p, &GeomPoint::from_theta(1.0, 0.5).unwrap()) < 0.0);
        let th = sector_thetas(&p, 0.5, 5);
        assert_eq!(th.len(), 5);
        assert!(th.iter().all(|&t| sector_angle(&p, t) >= 0.5));
        assert!(th[0] < PI / 2.0);
        assert!(sector_thetas(&kp(2.0, 2), 1.6, 3).is_empty());
        assert!(check_mu(8.0, 0.3).is_err());
        assert!(check_mu(4.0, 1.0).is_ok());
    }
}
