//! Parameters, reduced coordinates, and the Bessel–Gegenbauer series
//!
//! K_a^m(z, ξ) = a^{2λ/a} Γ((2λ+a)/a) Σ_k e^{−iπk/a} ((λ+k)/λ) z^{−λ} J_{2(k+λ)/a}(z_a) C_k^{(λ)}(ξ)
//!
//! with λ = (m−2)/2 and z_a = (2/a) z^{a/2}; for m = 2 the Gegenbauer factor
//! becomes 2 cos kθ (k ≥ 1).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_finite, KernelError, Result};
use crate::eval::{ComplexEval, Method};
use crate::special_functions::bessel::bessel_j_sequence;
use crate::special_functions::gamma::{gamma, ln_gamma};
use crate::special_functions::gegenbauer::{gegenbauer_at_one, gegenbauer_table};

/// Largest series index the evaluator will sum to.
pub const K_MAX: usize = 10_000;
/// ξ values this far outside [−1, 1] are clamped; further out is an error.
pub const XI_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelParams {
    pub a: f64,
    pub m: usize,
    pub lambda: f64,
    /// a^{2λ/a} Γ((2λ+a)/a)
    pub prefactor: f64,
}

impl KernelParams {
    pub fn new(a: f64, m: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(KernelError::domain(format!("a must be positive and finite, got {a}")));
        }
        if m < 2 {
            return Err(KernelError::domain(format!("dimension m must be >= 2, got {m}")));
        }
        let lambda = (m as f64 - 2.0) / 2.0;
        let prefactor = (2.0 * lambda / a * a.ln() + ln_gamma((2.0 * lambda + a) / a)).exp();
        Ok(KernelParams { a, m, lambda, prefactor })
    }

    /// z_a = (2/a) z^{a/2}.
    pub fn z_a(&self, z: f64) -> f64 {
        2.0 / self.a * z.powf(self.a / 2.0)
    }

    /// Order of the k-th Bessel factor, 2(k+λ)/a.
    pub fn order(&self, k: usize) -> f64 {
        2.0 * (k as f64 + self.lambda) / self.a
    }

    /// Normalization of the integral transform,
    /// Γ(m/2) / (Γ((2λ+a)/a) · 2 a^{2λ/a} π^{m/2}).
    pub fn transform_constant(&self) -> f64 {
        gamma(self.m as f64 / 2.0) / (2.0 * self.prefactor * PI.powf(self.m as f64 / 2.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GeomPoint {
    pub z: f64,
    pub xi: f64,
    pub theta: f64,
}

impl GeomPoint {
    pub fn new(z: f64, xi: f64) -> Result<Self> {
        check_finite("z", z)?;
        check_finite("xi", xi)?;
        if z < 0.0 {
            return Err(KernelError::domain(format!("z must be >= 0, got {z}")));
        }
        if xi.abs() > 1.0 + XI_CLAMP {
            return Err(KernelError::domain(format!("xi must lie in [-1, 1], got {xi}")));
        }
        let xi = xi.clamp(-1.0, 1.0);
        Ok(GeomPoint { z, xi, theta: xi.acos() })
    }

    /// Point from z and θ ∈ [0, π]; keeps θ exactly rather than round-tripping
    /// through arccos.
    pub fn from_theta(z: f64, theta: f64) -> Result<Self> {
        check_finite("theta", theta)?;
        let mut g = GeomPoint::new(z, theta.cos())?;
        if (0.0..=PI).contains(&theta) {
            g.theta = theta;
        }
        Ok(g)
    }

    pub fn z_a(&self, a: f64) -> f64 {
        2.0 / a * self.z.powf(a / 2.0)
    }
}

/// z = |x||y| and ξ = ⟨x,y⟩/z (0 when z = 0), clamped against rounding.
pub fn geom_from_cartesian(x: &[f64], y: &[f64]) -> Result<GeomPoint> {
    if x.len() != y.len() {
        return Err(KernelError::domain(format!("dimension mismatch: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(KernelError::domain(format!("vectors need dimension >= 2, got {}", x.len())));
    }
    let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let z = nx * ny;
    if z == 0.0 {
        return GeomPoint::new(0.0, 0.0);
    }
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    GeomPoint::new(z, (dot / z).clamp(-1.0, 1.0))
}

/// Majorant of the k-th term: P ((λ+k)/λ) z^k a^{−ν_k}/Γ(ν_k+1) C_k^{(λ)}(1),
/// in logs; for m = 2 it is 2 (z_a/2)^{ν_k}/Γ(ν_k+1).
fn log_majorant(p: &KernelParams, z: f64, k: usize) -> f64 {
    let nu = p.order(k);
    if p.m == 2 {
        let w = if k == 0 { 1.0f64 } else { 2.0 };
        return w.ln() + nu * (0.5 * p.z_a(z)).ln() - ln_gamma(nu + 1.0);
    }
    let kf = k as f64;
    p.prefactor.ln() + ((p.lambda + kf) / p.lambda).ln() + kf * z.ln() - nu * p.a.ln() - ln_gamma(nu + 1.0)
        + gegenbauer_at_one(k, p.lambda).ln()
}

/// Number of terms after which the majorant tail is below `tol`, and that
/// tail bound.
fn truncation_index(p: &KernelParams, z: f64, tol: f64) -> Result<(usize, f64)> {
    let za = p.z_a(z);
    let step = 2.0 / p.a;
    for k in 0..=K_MAX {
        let nu = p.order(k);
        let kf = k as f64;
        // ratio of consecutive majorants, bounded for all later indices
        let gam = (ln_gamma(nu + 1.0) - ln_gamma(nu + step + 1.0)).exp();
        let ratio = if p.m == 2 {
            let w = if k == 0 { 2.0 } else { 1.0 };
            w * (0.5 * za).powf(step) * gam
        } else {
            let lam = p.lambda;
            ((lam + kf + 1.0) / (lam + kf)) * ((2.0 * lam + kf) / (kf + 1.0)).max(1.0) * z * p.a.powf(-step) * gam
        };
        if ratio < 1.0 && k as f64 > 0.5 * za {
            let tail = log_majorant(p, z, k).exp() * ratio / (1.0 - ratio);
            if tail <= tol {
                return Ok((k, tail));
            }
        }
    }
    Err(KernelError::accuracy(
        format!("series needs more than {K_MAX} terms at z = {z} (z_a = {za:.3e})"),
        f64::INFINITY,
    ))
}

/// The Bessel–Gegenbauer series with a rigorous truncation bound.
pub fn kernel_series(p: &KernelParams, g: &GeomPoint, tol: f64) -> Result<ComplexEval> {
    if !(tol > 0.0) {
        return Err(KernelError::domain(format!("tol must be positive, got {tol}")));
    }
    if g.z == 0.0 {
        return Ok(ComplexEval::new(Complex64::new(1.0, 0.0), 0.0, Method::Series));
    }
    let (n, tail) = truncation_index(p, g.z, tol)?;
    let za = p.z_a(g.z);
    let js = bessel_j_sequence(p.order(0), 2.0 / p.a, n + 1, za);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    if p.m == 2 {
        for (k, j) in js.iter().enumerate() {
            let w = if k == 0 { 1.0 } else { 2.0 * (k as f64 * g.theta).cos() };
            let t = Complex64::from_polar(w * j, -PI * k as f64 / p.a);
            sum += t;
            abs_sum += t.norm();
        }
    } else {
        let lam = p.lambda;
        let cs = gegenbauer_table(n, lam, g.xi);
        // z^{−λ} J_ν(z_a) computed as J_ν(z_a) · exp(−λ ln z)
        let zl = (-lam * g.z.ln()).exp() * p.prefactor;
        for (k, (j, c)) in js.iter().zip(&cs).enumerate() {
            let kf = k as f64;
            let w = (lam + kf) / lam * c * j * zl;
            let t = Complex64::from_polar(w, -PI * kf / p.a);
            sum += t;
            abs_sum += t.norm();
        }
    }
    let err = tail + 32.0 * f64::EPSILON * abs_sum;
    Ok(ComplexEval::new(sum, err, Method::Series))
}

/// Constant of the m → m+2 recursion,
/// e^{iπ/a} a^{2/a} Γ((2λ+a+2)/a) / (2(λ+1) Γ((2λ+a)/a)).
pub fn lift_constant(p: &KernelParams) -> Complex64 {
    let lam = p.lambda;
    let a = p.a;
    let mag = ((2.0 / a) * a.ln() + ln_gamma((2.0 * lam + a + 2.0) / a) - ln_gamma((2.0 * lam + a) / a)).exp()
        / (2.0 * (lam + 1.0));
    Complex64::from_polar(mag, PI / a)
}

/// K_a^{m+2}(z, ξ) from a central difference in ξ of K_a^m, using the
/// supplied evaluator for the dimension-m kernel.
pub fn kernel_dimension_lift_with<F>(p: &KernelParams, g: &GeomPoint, h: f64, eval: F) -> Result<ComplexEval>
where
    F: Fn(&GeomPoint) -> Result<ComplexEval>,
{
    if g.z == 0.0 {
        return Err(KernelError::Singular("dimension lift divides by z; z = 0".into()));
    }
    if !(h > 0.0) || g.xi.abs() >= 1.0 - 2.0 * h {
        return Err(KernelError::domain(format!("need 0 < h and |xi| < 1 - 2h (xi = {}, h = {h})", g.xi)));
    }
    let at = |xi: f64| eval(&GeomPoint::new(g.z, xi)?);
    let (p1, m1) = (at(g.xi + h)?, at(g.xi - h)?);
    let (p2, m2) = (at(g.xi + 2.0 * h)?, at(g.xi - 2.0 * h)?);
    let d1 = (p1.value - m1.value) / (2.0 * h);
    let d2 = (p2.value - m2.value) / (4.0 * h);
    let c = lift_constant(p) / g.z;
    let value = c * d1;
    // D(2h) − D(h) ≈ 3ch²
    let trunc = (d2 - d1).norm() / 3.0;
    let noise = (p1.err + m1.err) / (2.0 * h);
    Ok(ComplexEval::new(value, c.norm() * (trunc + noise), Method::Lift))
}

/// K_a^{m+2} from the series at dimension m (p describes dimension m).
pub fn kernel_dimension_lift(p: &KernelParams, g: &GeomPoint, h: f64) -> Result<ComplexEval> {
    kernel_dimension_lift_with(p, g, h, |q| kernel_series(p, q, 1e-14))
}

/// Function to be transformed, sampled through a callback.
#[derive(Clone, Copy)]
pub enum SampledFunction<'f> {
    /// f(x) = g(|x|) in any dimension.
    Radial(&'f (dyn Fn(f64) -> Complex64 + Sync)),
    /// f(r cos φ, r sin φ) = g(r, φ); dimension 2 only.
    Polar2D(&'f (dyn Fn(f64, f64) -> Complex64 + Sync)),
}

/// Discretization of the transform integral.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TransformGrid {
    /// Radial cutoff R.
    pub r_max: f64,
    /// Equal radial panels on [0, R].
    pub r_panels: usize,
    /// Gauss nodes per radial panel.
    pub r_nodes: usize,
    /// Gauss nodes in the angular variable.
    pub angle_nodes: usize,
    /// Caller's bound on the part of the integral beyond R.
    pub tail_bound: f64,
}

impl Default for TransformGrid {
    fn default() -> Self {
        TransformGrid { r_max: 10.0, r_panels: 8, r_nodes: 24, angle_nodes: 96, tail_bound: 0.0 }
    }
}

fn sphere_area(dim: usize) -> f64 {
    // |S^{dim}| = 2π^{(dim+1)/2}/Γ((dim+1)/2)
    let h = (dim as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// ∫ K_a^m(x, y) f(x) |x|^{a−2} dx times the transform constant, at each
/// target y.  `kernel` evaluates K_a^m at reduced coordinates.
pub fn transform_apply<K>(
    p: &KernelParams,
    f: SampledFunction<'_>,
    ys: &[Vec<f64>],
    grid: &TransformGrid,
    tol: f64,
    kernel: K,
) -> Result<Vec<Complex64>>
where
    K: Fn(&GeomPoint) -> Result<ComplexEval> + Sync,
{
    use rayon::prelude::*;

    if !(grid.r_max > 0.0) || grid.r_panels == 0 || grid.r_nodes == 0 || grid.angle_nodes == 0 {
        return Err(KernelError::domain("transform grid needs R > 0 and nonzero node counts"));
    }
    if grid.tail_bound > tol {
        return Err(KernelError::accuracy(
            format!("radial tail bound {:e} beyond R = {} exceeds tol {tol:e}", grid.tail_bound, grid.r_max),
            grid.tail_bound,
        ));
    }
    for y in ys {
        if y.len() != p.m {
            return Err(KernelError::domain(format!("target has dimension {}, expected {}", y.len(), p.m)));
        }
    }
    if matches!(f, SampledFunction::Polar2D(_)) && p.m != 2 {
        return Err(KernelError::domain("polar samples need m = 2"));
    }
    let power = p.a + p.m as f64 - 3.0;
    let panel = grid.r_max / grid.r_panels as f64;
    let legendre = crate::quadrature::legendre(grid.r_nodes);
    let angle_rule = crate::quadrature::legendre(grid.angle_nodes);
    let gegen_rule = crate::quadrature::jacobi(grid.angle_nodes, (p.m as f64 - 3.0) / 2.0, (p.m as f64 - 3.0) / 2.0);
    let constant = p.transform_constant();

    let one = |y: &Vec<f64>| -> Result<Complex64> {
        let rho = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let phi_y = if p.m == 2 { y[1].atan2(y[0]) } else { 0.0 };
        let mut failure = None;
        // angular integral at radius r
        let mut angular = |r: f64| -> Complex64 {
            let z = r * rho;
            let mut eval = |xi: f64| match GeomPoint::new(z, xi).and_then(|g| kernel(&g)) {
                Ok(v) => v.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            };
            match f {
                SampledFunction::Radial(g) if p.m == 2 => {
                    crate::quadrature::apply_rule(&angle_rule, 0.0, PI, |phi| eval(phi.cos())) * 2.0 * g(r)
                }
                SampledFunction::Radial(g) => {
                    let mut s = Complex64::new(0.0, 0.0);
                    for &(xi, w) in gegen_rule.iter() {
                        s += eval(xi) * w;
                    }
                    s * sphere_area(p.m - 2) * g(r)
                }
                SampledFunction::Polar2D(g) => crate::quadrature::apply_rule(&angle_rule, 0.0, 2.0 * PI, |phi| {
                    eval((phi - phi_y).cos()) * g(r, phi)
                }),
            }
        };
        let mut total = crate::quadrature::apply_left_power(grid.r_nodes, power, panel, &mut angular);
        for j in 1..grid.r_panels {
            let (lo, hi) = (j as f64 * panel, (j + 1) as f64 * panel);
            total += crate::quadrature::apply_rule(&legendre, lo, hi, |r| angular(r) * r.powf(power));
        }
        match failure {
            Some(e) => Err(e),
            None => Ok(total * constant),
        }
    };
    ys.par_iter().map(one).collect()
}
