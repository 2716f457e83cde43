//! K_{2N}^2 for integer N through the shifted Neumann sums
//! S_ν(x, φ) = Σ_{j≥0} J_{j+ν}(x) e^{ijφ}.
//!
//! Grouping the dimension-two series by k mod N gives
//!
//!   K = e^{−ix cos Nθ} + Σ_{r=1}^{N−1} e^{−iπr/2N} [e^{irθ} S_{r/N}(x, Nθ−π/2) + e^{−irθ} S_{r/N}(x, −Nθ−π/2)]
//!
//! with x = z^N/N.  Each S solves F' = i sinφ F + (J_{ν−1} + e^{−iφ}J_ν)/2,
//! F(0) = 0, so S_ν(x, φ) = ∫_0^x e^{i sinφ (x−s)} g(s) ds.  The integral is
//! done by Gauss rules on [0, 25] and by the Hankel expansion of J with
//! incomplete gamma functions beyond.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{KernelError, Result};
use crate::eval::{ComplexEval, Method};
use crate::kernel_core::GeomPoint;
use crate::quadrature::{jacobi, legendre};
use crate::special_functions::bessel::{jv, jv_tilde};
use crate::special_functions::gamma::gamma;
use crate::special_functions::incgamma::{lower_scaled_series, upper_scaled_cf, CF_FROM};

/// Split point between the quadrature and the asymptotic part.
pub const NEAR_LIMIT: f64 = 25.0;
/// Hankel terms kept in the far part.
const HANKEL_TERMS: usize = 24;
const FINE: usize = 20;
const COARSE: usize = 14;

/// Node of the near rule: the integrand is w (g0 + e^{−iφ} g1) e^{−i sinφ s}.
#[derive(Debug, Clone, Copy)]
struct Node {
    s: f64,
    w: f64,
    g0: f64,
    g1: f64,
}

fn build_rule(nu: f64, len: f64, n: usize) -> Vec<Node> {
    let mut out = Vec::new();
    let first = len.min(1.0);
    // s^{ν−1} is carried by the Jacobi weight on [0, first]
    let h = 0.5 * first;
    let scale = h.powf(nu);
    let two_nu = 2f64.powf(-nu);
    for &(x, w) in jacobi(n, 0.0, nu - 1.0).iter() {
        let s = h * (1.0 + x);
        let jt = jv_tilde(nu, s);
        let jt1 = jv_tilde(nu + 1.0, s);
        // s^{1−ν} times (2ν/s)J_ν, J_{ν+1}, J_ν
        let g0 = 0.5 * (2.0 * nu * two_nu * jt - s * s * 0.5 * two_nu * jt1);
        let g1 = 0.5 * s * two_nu * jt;
        out.push(Node { s, w: w * scale, g0, g1 });
    }
    if len > 1.0 {
        let panels = (len - 1.0).ceil() as usize;
        let width = (len - 1.0) / panels as f64;
        let rule = legendre(n);
        for p in 0..panels {
            let lo = 1.0 + p as f64 * width;
            let c = lo + 0.5 * width;
            for &(x, w) in rule.iter() {
                let s = c + 0.5 * width * x;
                let j = jv(nu, s);
                let g0 = 0.5 * (2.0 * nu / s * j - jv(nu + 1.0, s));
                out.push(Node { s, w: 0.5 * width * w, g0, g1: 0.5 * j });
            }
        }
    }
    out
}

fn cached_rule(nu: f64, n: usize) -> Arc<Vec<Node>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<Vec<Node>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().expect("rule cache poisoned").get(&(nu.to_bits(), n)) {
        return r.clone();
    }
    let rule = Arc::new(build_rule(nu, NEAR_LIMIT, n));
    cache.lock().expect("rule cache poisoned").insert((nu.to_bits(), n), rule.clone());
    rule
}

fn near_part(nu: f64, len: f64, phi: f64) -> (Complex64, f64) {
    let sin_phi = phi.sin();
    let tw = Complex64::from_polar(1.0, -phi);
    let apply = |rule: &[Node]| -> Complex64 {
        rule.iter()
            .map(|nd| Complex64::from_polar(nd.w, -sin_phi * nd.s) * (tw * nd.g1 + nd.g0))
            .sum()
    };
    let (fine, coarse) = if len == NEAR_LIMIT {
        (apply(&cached_rule(nu, FINE)), apply(&cached_rule(nu, COARSE)))
    } else {
        (apply(&build_rule(nu, len, FINE)), apply(&build_rule(nu, len, COARSE)))
    };
    (fine, (fine - coarse).norm() + 1e-15 * len)
}

/// a_j(μ) of the Hankel expansion, j = 0..n.
fn hankel_coefficients(mu: f64, n: usize) -> Vec<f64> {
    let m4 = 4.0 * mu * mu;
    let mut a = vec![1.0; n + 1];
    for j in 1..=n {
        let odd = (2 * j - 1) as f64;
        a[j] = a[j - 1] * (m4 - odd * odd) / (8.0 * j as f64);
    }
    a
}

/// ∫_lo^hi e^{ics} s^{−p} ds for half-integer p and 0 < lo < hi.
fn oscillatory_power(c: f64, p: f64, lo: f64, hi: f64) -> Complex64 {
    let alpha = 1.0 - p;
    if c.abs() * hi <= 4.0 {
        let ic = Complex64::new(0.0, c);
        let mut coef = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..400 {
            let e = n as f64 + alpha;
            let term = coef * ((hi.powf(e) - lo.powf(e)) / e);
            sum += term;
            if n > 2 && term.norm() < 1e-17 * sum.norm().max(1e-300) {
                break;
            }
            coef *= ic / (n as f64 + 1.0);
        }
        return sum;
    }
    let b = Complex64::new(0.0, -c);
    // G(X) = ∫_X^∞ e^{ics}s^{−p} ds = b^{−α} Γ(α, bX)
    let tail = |x: f64| -> Complex64 {
        let w = b * x;
        let lead = Complex64::from_polar(x.powf(alpha), c * x);
        if w.norm() >= CF_FROM {
            lead * upper_scaled_cf(alpha, w).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
        } else {
            (b.ln() * -alpha).exp() * gamma(alpha) - lead * lower_scaled_series(alpha, w)
        }
    };
    tail(lo) - tail(hi)
}

/// ∫_lo^x e^{−i sinφ s} g(s) ds from the Hankel expansion, with a bound on
/// the truncation remainder.
fn far_part(nu: f64, lo: f64, x: f64, phi: f64) -> (Complex64, f64) {
    let n = HANKEL_TERMS;
    let a0 = hankel_coefficients(nu, n + 1);
    let a1 = hankel_coefficients(nu + 1.0, n + 1);
    let tw = Complex64::from_polar(1.0, -phi);
    let norm = 1.0 / (2.0 * (2.0 * PI).sqrt());
    let mut total = Complex64::new(0.0, 0.0);
    for sigma in [1.0f64, -1.0] {
        let ph0 = Complex64::from_polar(1.0, -sigma * (nu * PI / 2.0 + PI / 4.0));
        let ph1 = Complex64::from_polar(1.0, -sigma * ((nu + 1.0) * PI / 2.0 + PI / 4.0));
        let si = Complex64::new(0.0, sigma);
        // coefficient of e^{iσs} s^{−k−1/2}
        let mut d = vec![Complex64::new(0.0, 0.0); n + 2];
        let mut pw = Complex64::new(1.0, 0.0);
        for j in 0..=n {
            d[j] += pw * (ph0 * tw * a0[j] - ph1 * a1[j]);
            d[j + 1] += pw * ph0 * (2.0 * nu * a0[j]);
            pw *= si;
        }
        let c = sigma - phi.sin();
        for (k, dk) in d.iter().enumerate() {
            if dk.norm() == 0.0 {
                continue;
            }
            total += dk * oscillatory_power(c, k as f64 + 0.5, lo, x);
        }
    }
    // first omitted Hankel terms, integrated in absolute value
    let omitted = a0[n + 1].abs().max(a1[n + 1].abs()) * (2.0 + 2.0 * nu / lo);
    let pe = n as f64 + 0.5;
    let rem = 2.0 * norm * 2.0 * omitted * lo.powf(-pe) / pe;
    (total * norm, rem)
}

/// S_ν(x, φ) = Σ_{j≥0} J_{j+ν}(x) e^{ijφ} for 0 < ν < 1 and x ≥ 0.
pub fn neumann_sum(nu: f64, x: f64, phi: f64) -> Result<ComplexEval> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(KernelError::domain(format!("neumann_sum needs 0 < nu < 1, got {nu}")));
    }
    if !(x >= 0.0 && x.is_finite() && phi.is_finite()) {
        return Err(KernelError::domain("neumann_sum needs finite x >= 0 and phi"));
    }
    if x == 0.0 {
        return Ok(ComplexEval::new(Complex64::new(0.0, 0.0), 0.0, Method::Neumann));
    }
    let near_len = x.min(NEAR_LIMIT);
    let (mut inner, mut err) = near_part(nu, near_len, phi);
    if x > NEAR_LIMIT {
        let (far, rem) = far_part(nu, NEAR_LIMIT, x, phi);
        inner += far;
        err += rem + 1e-15 * far.norm();
    }
    let value = Complex64::from_polar(1.0, phi.sin() * x) * inner;
    // the phase x sinφ is only known to about x·ε
    err += 4.0 * f64::EPSILON * x * value.norm();
    Ok(ComplexEval::new(value, err, Method::Neumann))
}

/// K_{2N}^2(z, ξ).
pub fn kernel_even_dim2(half_a: usize, g: &GeomPoint) -> Result<ComplexEval> {
    if half_a == 0 {
        return Err(KernelError::domain("a = 2N needs N >= 1"));
    }
    let nn = half_a as f64;
    let x = g.z.powi(half_a as i32) / nn;
    if !x.is_finite() {
        return Err(KernelError::Range(format!("z_a = z^{half_a}/{half_a} overflows at z = {}", g.z)));
    }
    let theta = g.theta;
    let lead = Complex64::from_polar(1.0, -x * (nn * theta).cos());
    let mut value = lead;
    let mut err = 4.0 * f64::EPSILON * (1.0 + x);
    for r in 1..half_a {
        let rf = r as f64;
        let nu = rf / nn;
        let s1 = neumann_sum(nu, x, nn * theta - PI / 2.0)?;
        let s2 = neumann_sum(nu, x, -nn * theta - PI / 2.0)?;
        let pre = Complex64::from_polar(1.0, -PI * rf / (2.0 * nn));
        value += pre * (Complex64::from_polar(1.0, rf * theta) * s1.value + Complex64::from_polar(1.0, -rf * theta) * s2.value);
        err += s1.err + s2.err;
    }
    Ok(ComplexEval::new(value, err, Method::Neumann))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::{kernel_series, KernelParams};

    fn direct_sum(nu: f64, x: f64, phi: f64) -> Complex64 {
        let terms = (x + 12.0 * x.cbrt() + 60.0) as usize;
        (0..terms).map(|j| Complex64::from_polar(jv(j as f64 + nu, x), j as f64 * phi)).sum()
    }

    #[test]
    fn neumann_sum_against_direct_summation() {
        for &nu in &[0.25, 0.5, 2.0 / 3.0] {
            for &x in &[0.3, 4.0, 24.0, 25.0, 31.0, 80.0, 300.0] {
                for &phi in &[-2.8, -PI / 2.0, -0.4, 0.0, 1.1, PI / 2.0] {
                    let got = neumann_sum(nu, x, phi).unwrap();
                    let want = direct_sum(nu, x, phi);
                    assert!(
                        (got.value - want).norm() <= got.err + 1e-11 * (1.0 + want.norm()),
                        "nu={nu} x={x} phi={phi}: {} vs {want} (err {})",
                        got.value,
                        got.err
                    );
                }
            }
        }
    }

    #[test]
    fn resonant_direction_at_large_x() {
        // sinφ = −1 makes one far-field frequency vanish; the s^{−1/2} term
        // then integrates to √x growth that must cancel against the rest
        let x = 1000.0;
        let got = neumann_sum(0.5, x, -PI / 2.0).unwrap();
        let want = direct_sum(0.5, x, -PI / 2.0);
        assert!((got.value - want).norm() < 1e-11, "{} vs {want} err {}", got.value, got.err);
        // reference from 30-digit summation
        assert!((got.value - Complex64::new(0.496_392_023_214_643_6, -0.097_063_731_576_543_13)).norm() < 1e-13);
    }

    #[test]
    fn agrees_with_series_for_several_n() {
        for &nh in &[2usize, 3, 4, 5] {
            let p = KernelParams::new(2.0 * nh as f64, 2).unwrap();
            for &z in &[0.0, 0.4, 1.1, 1.7, 2.3] {
                for &th in &[0.0, 0.5, 1.4, 2.2, PI] {
                    let g = GeomPoint::from_theta(z, th).unwrap();
                    let a = kernel_even_dim2(nh, &g).unwrap();
                    let b = kernel_series(&p, &g, 1e-14).unwrap();
                    assert!(a.agrees_with(&b, 1e-12), "N={nh} z={z} th={th}: {} vs {}", a.value, b.value);
                }
            }
        }
    }

    #[test]
    fn plane_wave_for_n_one() {
        let g = GeomPoint::new(3.0, 0.4).unwrap();
        let v = kernel_even_dim2(1, &g).unwrap();
        assert!((v.value - Complex64::from_polar(1.0, -1.2)).norm() < 1e-15);
    }
}
