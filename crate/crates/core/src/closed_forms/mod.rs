//! Explicit kernels for a ∈ {1, 2, 4, 6}, the subsampling construction, and
//! the Neumann-sum evaluator for m = 2 with even a.

pub mod neumann;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};
use crate::eval::{ComplexEval, Method};
use crate::kernel_core::{GeomPoint, KernelParams};
use crate::quadrature::adaptive;
use crate::special_functions::bessel::{jv, jv_tilde};
use crate::special_functions::erf::erfc_complex;
use crate::special_functions::fresnel::fresnel_from_minus_infinity;
use crate::special_functions::gamma::gamma;
use crate::special_functions::parabolic::{parabolic_d_capped, CylinderOrder};

pub use neumann::{kernel_even_dim2, neumann_sum};

/// Dimension cap for the parabolic-cylinder route, m ≤ 2·cap.
pub const A4_MAX_HALF_DIM: usize = 20;
/// |sin φ| below which the cosecant factor in f₁ takes its limit.
pub const COSEC_LIMIT: f64 = 1e-6;
/// Agreement required between the two routes of a dual formula.
pub const RECONCILE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClosedFormKind {
    A1,
    A2,
    A4Dim2,
    A4Even,
    A6Dim2,
    /// K²_{base/n} from K²_base.
    Subsample { base: f64, n: usize },
}

/// The explicit formula available for (a, m), if any.
pub fn closed_form_kind(p: &KernelParams) -> Option<ClosedFormKind> {
    let a = p.a;
    if a == 2.0 {
        return Some(ClosedFormKind::A2);
    }
    if a == 1.0 {
        return Some(ClosedFormKind::A1);
    }
    if a == 4.0 && p.m == 2 {
        return Some(ClosedFormKind::A4Dim2);
    }
    if a == 4.0 && p.m % 2 == 0 && p.m / 2 <= A4_MAX_HALF_DIM {
        return Some(ClosedFormKind::A4Even);
    }
    if a == 6.0 && p.m == 2 {
        return Some(ClosedFormKind::A6Dim2);
    }
    if p.m == 2 {
        for base in [2.0, 4.0] {
            let n = base / a;
            if n >= 2.0 && n == n.round() && n < 1e6 {
                return Some(ClosedFormKind::Subsample { base, n: n as usize });
            }
        }
    }
    None
}

/// Evaluate the closed form for `p`, or a usage error when none exists.
pub fn kernel_closed(p: &KernelParams, g: &GeomPoint, tol: f64) -> Result<ComplexEval> {
    match closed_form_kind(p) {
        Some(ClosedFormKind::A1) => kernel_a1(p.m, g),
        Some(ClosedFormKind::A2) => Ok(kernel_a2(g)),
        Some(ClosedFormKind::A4Dim2) => kernel_a4_dim2(g),
        Some(ClosedFormKind::A4Even) => kernel_a4_even(p.m, g),
        Some(ClosedFormKind::A6Dim2) => kernel_a6_dim2(g, tol),
        Some(ClosedFormKind::Subsample { base, n }) => {
            let bp = KernelParams::new(base, 2)?;
            kernel_subsample(base, n, g, |q| kernel_closed(&bp, q, tol))
        }
        None => Err(KernelError::Usage(format!("no closed form for a = {}, m = {}", p.a, p.m))),
    }
}

/// K_2^m = e^{−izξ}.
pub fn kernel_a2(g: &GeomPoint) -> ComplexEval {
    let arg = g.z * g.xi;
    let v = Complex64::from_polar(1.0, -arg);
    ComplexEval::new(v, 4.0 * f64::EPSILON * (1.0 + arg.abs()), Method::Closed)
}

/// K_1^m = Γ((m−1)/2) J̃_{(m−3)/2}(√(2z(1+ξ))).
pub fn kernel_a1(m: usize, g: &GeomPoint) -> Result<ComplexEval> {
    if m < 2 {
        return Err(KernelError::domain(format!("m must be >= 2, got {m}")));
    }
    let w = (2.0 * g.z * (1.0 + g.xi)).sqrt();
    let v = if m == 2 {
        // Γ(1/2) J̃_{−1/2}(w) = cos w
        w.cos()
    } else {
        let nu = (m as f64 - 3.0) / 2.0;
        gamma(nu + 1.0) * jv_tilde(nu, w)
    };
    Ok(ComplexEval::new(Complex64::new(v, 0.0), 8.0 * f64::EPSILON * (1.0 + w), Method::Closed))
}

fn a4_phase_err(z: f64, v: Complex64) -> f64 {
    // e^{iz²…} carries z²·ε phase error; erfc about 1e−13 relative
    4.0 * f64::EPSILON * z * z * v.norm() + 1e-13 * (1.0 + v.norm())
}

/// K_4^2 = e^{−iz²(ξ²−1/2)} erfc(−e^{−iπ/4} z ξ).
pub fn kernel_a4_dim2(g: &GeomPoint) -> Result<ComplexEval> {
    let z = g.z;
    let w = Complex64::from_polar(-z * g.xi, -PI / 4.0);
    let v = Complex64::from_polar(1.0, -z * z * (g.xi * g.xi - 0.5)) * erfc_complex(w)?;
    Ok(ComplexEval::new(v, a4_phase_err(z, v), Method::Closed))
}

/// K_4^2 = (1−i)√(2/π) e^{−(i/2)z² cos 2θ} ∫_{−∞}^{zξ} e^{it²} dt, the
/// Fresnel-integral route.
pub fn kernel_a4_dim2_fresnel(g: &GeomPoint) -> Result<ComplexEval> {
    let z = g.z;
    let cos2 = 2.0 * g.xi * g.xi - 1.0;
    let pre = Complex64::new(1.0, -1.0) * (2.0 / PI).sqrt();
    let v = pre * Complex64::from_polar(1.0, -0.5 * z * z * cos2) * fresnel_from_minus_infinity(z * g.xi);
    Ok(ComplexEval::new(v, 4e-12 + a4_phase_err(z, v), Method::Closed))
}

/// c_n = 2^{n/2} Γ((n+1)/2)/√π.
pub fn a4_constant(n: usize) -> f64 {
    let nf = n as f64;
    2f64.powf(nf / 2.0) * gamma((nf + 1.0) / 2.0) / PI.sqrt()
}

/// K_4^{2n} = c_n e^{(i/2)z² sin²θ} D_{−n}((i−1) z cos θ).
pub fn kernel_a4_even(m: usize, g: &GeomPoint) -> Result<ComplexEval> {
    if m < 2 || m % 2 == 1 {
        return Err(KernelError::domain(format!("the a = 4 formula needs even m >= 2, got {m}")));
    }
    let n = m / 2;
    let z = g.z;
    let sin2 = 1.0 - g.xi * g.xi;
    let w = Complex64::new(-1.0, 1.0) * (z * g.xi);
    let d = parabolic_d_capped(CylinderOrder::new(n), w, A4_MAX_HALF_DIM)?;
    let v = Complex64::from_polar(a4_constant(n), 0.5 * z * z * sin2) * d;
    let err = a4_phase_err(z, v) * n as f64;
    Ok(ComplexEval::new(v, err, Method::Closed))
}

/// K_4^4 = e^{iz²/2} − 2iz cosθ e^{−(i/2)z² cos 2θ} ∫_{−∞}^{z cosθ} e^{it²} dt.
pub fn kernel_a4_dim4_explicit(g: &GeomPoint) -> Result<ComplexEval> {
    let z = g.z;
    let u = z * g.xi;
    let cos2 = 2.0 * g.xi * g.xi - 1.0;
    let fr = fresnel_from_minus_infinity(u);
    let v = Complex64::from_polar(1.0, 0.5 * z * z)
        - Complex64::new(0.0, 2.0 * u) * Complex64::from_polar(1.0, -0.5 * z * z * cos2) * fr;
    Ok(ComplexEval::new(v, 4e-12 * (1.0 + 2.0 * u.abs()) + a4_phase_err(z, v), Method::Closed))
}

/// sin[(z−t) sinφ]/sinφ with the limit z − t when sinφ → 0.
fn sin_ratio(z: f64, t: f64, phi: f64) -> f64 {
    let s = phi.sin();
    if s.abs() < COSEC_LIMIT {
        z - t
    } else {
        ((z - t) * s).sin() / s
    }
}

/// ∫_0^z h(t) dt with t = u³, which smooths the t^{ν−1} endpoint behavior.
fn cube_substituted<F>(z: f64, tol: f64, h: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if z == 0.0 {
        return Ok((0.0, 0.0));
    }
    let r = adaptive(|u| Complex64::new(h(u), 0.0), 0.0, z.cbrt(), tol, 1e-14, 4000);
    if !r.converged {
        return Err(KernelError::accuracy(format!("f integral did not converge on [0, {z}]"), r.err));
    }
    Ok((r.value.re, r.err))
}

/// f₁(ν, z, φ) = (1/4) cosec φ ∫_0^z sin[(z−t) sinφ][cos 2φ J_ν + 2cos φ J'_ν − J_{ν+2}] dt.
pub fn f1(nu: f64, z: f64, phi: f64, tol: f64) -> Result<(f64, f64)> {
    let two_nu = 2f64.powf(-nu);
    let (c1, c2) = ((2.0 * phi).cos(), phi.cos());
    let (v, e) = cube_substituted(z, tol, |u| {
        let t = u * u * u;
        // 3u² J'_ν(u³) = 3ν 2^{−ν} u^{3ν−1} J̃_ν − 3u² J_{ν+1}
        let dj = 3.0 * nu * two_nu * u.powf(3.0 * nu - 1.0) * jv_tilde(nu, t) - 3.0 * u * u * jv(nu + 1.0, t);
        let rest = 3.0 * u * u * (c1 * jv(nu, t) - jv(nu + 2.0, t));
        sin_ratio(z, t, phi) * (rest + 2.0 * c2 * dj)
    })?;
    Ok((0.25 * v, 0.25 * e))
}

/// f₂(ν, z, φ) = (1/2) ∫_0^z (ν/t + cos φ) sin[(z−t) sinφ] J_ν(t) dt.
pub fn f2(nu: f64, z: f64, phi: f64, tol: f64) -> Result<(f64, f64)> {
    let two_nu = 2f64.powf(-nu);
    let c = phi.cos();
    let s = phi.sin();
    if s == 0.0 {
        return Ok((0.0, 0.0));
    }
    let (v, e) = cube_substituted(z, tol, |u| {
        let t = u * u * u;
        // 3u² (ν/t) J_ν(u³) = 3ν 2^{−ν} u^{3ν−1} J̃_ν
        let a = 3.0 * nu * two_nu * u.powf(3.0 * nu - 1.0) * jv_tilde(nu, t);
        let b = 3.0 * u * u * c * jv(nu, t);
        ((z - t) * s).sin() * (a + b)
    })?;
    Ok((0.5 * v, 0.5 * e))
}

/// K_6^2 from the f₁/f₂ integrals, z₆ = z³/3.  The single-Bessel terms carry
/// cos θ and cos 2θ (the k = 1, 2 terms of the dimension-two series).
pub fn kernel_a6_dim2(g: &GeomPoint, tol: f64) -> Result<ComplexEval> {
    if !(tol > 0.0) {
        return Err(KernelError::domain("tol must be positive"));
    }
    let z6 = g.z.powi(3) / 3.0;
    let th = g.theta;
    let sub = tol / 16.0;
    let mut v = Complex64::from_polar(1.0, -z6 * (3.0 * th).cos());
    let mut err = 4.0 * f64::EPSILON * (1.0 + z6);
    for k in 1..=2 {
        let kf = k as f64;
        let nu = kf / 3.0;
        v += Complex64::from_polar(2.0 * jv(nu, z6) * (kf * th).cos(), -PI * kf / 6.0);
        let (pa, pb) = (3.0 * th - PI / 2.0, 3.0 * th + PI / 2.0);
        let (a1, e1) = f1(nu, z6, pa, sub)?;
        let (a2, e2) = f2(nu, z6, pa, sub)?;
        let (b1, e3) = f1(nu, z6, pb, sub)?;
        let (b2, e4) = f2(nu, z6, pb, sub)?;
        v += Complex64::from_polar(1.0, kf * (th - PI / 6.0)) * Complex64::new(a1, a2);
        v += Complex64::from_polar(1.0, -kf * (th + PI / 6.0)) * Complex64::new(b1, -b2);
        err += e1 + e2 + e3 + e4;
    }
    Ok(ComplexEval::new(v, err, Method::Closed))
}

/// K²_{base/n}(z, cos θ) = (1/n) Σ_j K²_base(n^{2/base} z^{1/n}, cos((θ+2πj)/n)).
pub fn kernel_subsample<F>(base: f64, n: usize, g: &GeomPoint, base_eval: F) -> Result<ComplexEval>
where
    F: Fn(&GeomPoint) -> Result<ComplexEval>,
{
    if n == 0 {
        return Err(KernelError::domain("subsampling factor must be >= 1"));
    }
    if n == 1 {
        return base_eval(g);
    }
    let nf = n as f64;
    let zb = nf.powf(2.0 / base) * g.z.powf(1.0 / nf);
    let mut v = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for j in 0..n {
        let xi = ((g.theta + 2.0 * PI * j as f64) / nf).cos();
        let e = base_eval(&GeomPoint::new(zb, xi)?)?;
        v += e.value;
        err += e.err;
    }
    Ok(ComplexEval::new(v / nf, err / nf, Method::Closed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel_core::{kernel_dimension_lift_with, kernel_series};

    fn kp(a: f64, m: usize) -> KernelParams {
        KernelParams::new(a, m).unwrap()
    }

    fn grid(zmax: f64, n: usize) -> Vec<GeomPoint> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let z = zmax * i as f64 / (n - 1) as f64;
                let th = PI * j as f64 / (n - 1) as f64;
                out.push(GeomPoint::from_theta(z, th).unwrap());
            }
        }
        out
    }

    #[test]
    fn simple_values() {
        let g = GeomPoint::new(PI, 1.0).unwrap();
        assert!((kernel_a2(&g).value + 1.0).norm() < 1e-15);
        assert_eq!(kernel_a1(3, &GeomPoint::new(0.0, 0.2).unwrap()).unwrap().value, Complex64::new(1.0, 0.0));
        assert!((kernel_a1(3, &GeomPoint::new(7.0, -1.0).unwrap()).unwrap().value - 1.0).norm() < 1e-15);
        // (m = 2, z = 2, ξ = 1/2): √π J̃_{−1/2}(√6) with J_{−1/2}(w) = √(2/(πw)) cos w
        let w = 6f64.sqrt();
        let want = PI.sqrt() * (w / 2.0).sqrt() * (2.0 / (PI * w)).sqrt() * w.cos();
        assert!((kernel_a1(2, &GeomPoint::new(2.0, 0.5).unwrap()).unwrap().value.re - want).abs() < 1e-15);
        for m in [2, 4, 6] {
            assert!((kernel_a4_even(m, &GeomPoint::new(0.0, 0.3).unwrap()).unwrap().value - 1.0).norm() < 1e-15);
        }
        assert!(kernel_a4_even(3, &GeomPoint::new(1.0, 0.3).unwrap()).is_err());
        assert!((kernel_a6_dim2(&GeomPoint::new(0.0, 0.3).unwrap(), 1e-10).unwrap().value - 1.0).norm() < 1e-15);
    }

    #[test]
    fn closed_forms_match_series_on_a_grid() {
        let cases: Vec<(f64, usize, Box<dyn Fn(&GeomPoint) -> ComplexEval>)> = vec![
            (2.0, 3, Box::new(kernel_a2)),
            (1.0, 3, Box::new(|g| kernel_a1(3, g).unwrap())),
            (1.0, 2, Box::new(|g| kernel_a1(2, g).unwrap())),
            (1.0, 5, Box::new(|g| kernel_a1(5, g).unwrap())),
            (4.0, 2, Box::new(|g| kernel_a4_dim2(g).unwrap())),
            (4.0, 4, Box::new(|g| kernel_a4_even(4, g).unwrap())),
            (4.0, 6, Box::new(|g| kernel_a4_even(6, g).unwrap())),
        ];
        for (a, m, f) in cases {
            let p = kp(a, m);
            for g in grid(6.0, 20) {
                let c = f(&g);
                let s = kernel_series(&p, &g, 1e-13).unwrap();
                assert!(c.agrees_with(&s, 1e-11 * (1.0 + s.value.norm())), "a={a} m={m} {g:?}: {} vs {}", c.value, s.value);
            }
        }
    }

    #[test]
    fn a4_dim2_routes_reconcile() {
        for g in grid(8.0, 15) {
            let a = kernel_a4_dim2(&g).unwrap();
            let b = kernel_a4_dim2_fresnel(&g).unwrap();
            assert!((a.value - b.value).norm() < RECONCILE_TOL, "{g:?}");
        }
    }

    #[test]
    fn a4_dim4_routes_reconcile() {
        for g in grid(8.0, 15) {
            let a = kernel_a4_even(4, &g).unwrap();
            let b = kernel_a4_dim4_explicit(&g).unwrap();
            assert!((a.value - b.value).norm() < RECONCILE_TOL * (1.0 + a.value.norm()), "{g:?}");
        }
    }

    #[test]
    fn a4_dim2_is_the_first_even_case() {
        for g in grid(6.0, 12) {
            let a = kernel_a4_dim2(&g).unwrap();
            let b = kernel_a4_even(2, &g).unwrap();
            assert!((a.value - b.value).norm() < 1e-10);
        }
    }

    #[test]
    fn a4_even_against_dimension_lift() {
        for m in [2usize, 4, 6] {
            let p = kp(4.0, m);
            let g = GeomPoint::new(1.5, 0.4).unwrap();
            let lifted = kernel_dimension_lift_with(&p, &g, 1e-4, |q| kernel_a4_even(m, q)).unwrap();
            let direct = kernel_a4_even(m + 2, &g).unwrap();
            assert!((lifted.value - direct.value).norm() < 1e-6 * (1.0 + direct.value.norm()), "m={m}: {} vs {}", lifted.value, direct.value);
        }
    }

    #[test]
    fn a4_limit_two_on_the_diagonal() {
        let v = kernel_a4_dim2(&GeomPoint::new(50.0, 1.0).unwrap()).unwrap();
        assert!((v.value.norm() - 2.0).abs() < 0.02);
    }

    #[test]
    fn a6_matches_series() {
        let p = kp(6.0, 2);
        for &(z, th) in &[(1.2, 0.7), (0.5, 0.0), (1.9, 1.3), (2.4, 2.9), (1.0, PI / 6.0), (1.4, PI / 2.0)] {
            let g = GeomPoint::from_theta(z, th).unwrap();
            let c = kernel_a6_dim2(&g, 1e-11).unwrap();
            let s = kernel_series(&p, &g, 1e-13).unwrap();
            assert!(c.agrees_with(&s, 1e-10), "z={z} th={th}: {} vs {}", c.value, s.value);
        }
    }

    #[test]
    fn printed_a6_form_disagrees_with_the_series() {
        // as printed, the single-Bessel terms lack cos θ and cos 2θ
        let g = GeomPoint::from_theta(1.2, 0.7).unwrap();
        let corrected = kernel_a6_dim2(&g, 1e-11).unwrap().value;
        let z6 = g.z.powi(3) / 3.0;
        let printed = corrected
            + (1..=2)
                .map(|k| {
                    let kf = k as f64;
                    Complex64::from_polar(2.0 * jv(kf / 3.0, z6) * (1.0 - (kf * g.theta).cos()), -PI * kf / 6.0)
                })
                .sum::<Complex64>();
        let s = kernel_series(&kp(6.0, 2), &g, 1e-13).unwrap().value;
        assert!((printed - s).norm() > 0.1);
        assert!((corrected - s).norm() < 1e-9);
    }

    #[test]
    fn f2_vanishes_at_theta_pi() {
        // sin φ = 0
        assert_eq!(f2(1.0 / 3.0, 2.0, PI, 1e-12).unwrap().0.abs() < 1e-15, true);
        assert_eq!(f2(1.0 / 3.0, 2.0, 0.0, 1e-12).unwrap().0, 0.0);
    }

    #[test]
    fn removable_cosecant_limit_matches_series() {
        // φ = 3θ − π/2 vanishes at θ = π/6; both sides of the 1e−6 switch
        let p = kp(6.0, 2);
        for d in [0.0, 1e-7, -2e-7, 1e-6, 1e-4] {
            let g = GeomPoint::from_theta(1.3, PI / 6.0 + d).unwrap();
            let c = kernel_a6_dim2(&g, 1e-12).unwrap();
            let s = kernel_series(&p, &g, 1e-14).unwrap();
            assert!(c.agrees_with(&s, 1e-10), "d={d}: {} vs {}", c.value, s.value);
        }
    }

    #[test]
    fn subsample_identity() {
        for g in grid(5.0, 15) {
            let target = kernel_a1(2, &g).unwrap();
            let sub = kernel_subsample(2.0, 2, &g, |q| Ok(kernel_a2(q))).unwrap();
            assert!((sub.value - target.value).norm() < 1e-10, "{g:?}");
            let back = kernel_subsample(4.0, 2, &g, kernel_a4_dim2).unwrap();
            assert!((back.value - kernel_a2(&g).value).norm() < 1e-10, "{g:?}");
        }
        let g = GeomPoint::from_theta(1.3, 0.6).unwrap();
        assert_eq!(kernel_subsample(2.0, 1, &g, |q| Ok(kernel_a2(q))).unwrap().value, kernel_a2(&g).value);
    }

    #[test]
    fn printed_subsample_argument_only_fits_base_two() {
        // with base 4 the printed argument n z^{1/n} misses by n^{2/base}/n
        let g = GeomPoint::from_theta(1.7, 0.9).unwrap();
        let printed: Complex64 = (0..2)
            .map(|j| {
                let xi = ((g.theta + 2.0 * PI * j as f64) / 2.0).cos();
                kernel_a4_dim2(&GeomPoint::new(2.0 * g.z.sqrt(), xi).unwrap()).unwrap().value
            })
            .sum::<Complex64>()
            / 2.0;
        assert!((printed - kernel_a2(&g).value).norm() > 0.05);
    }

    #[test]
    fn a8_even_part_is_a4_kernel() {
        let p = kp(8.0, 2);
        for &(z, th) in &[(0.7, 0.3), (1.3, 1.0), (1.6, 2.5)] {
            let g = GeomPoint::from_theta(z, th).unwrap();
            let gm = GeomPoint::from_theta(z, PI - th).unwrap();
            let even = (kernel_series(&p, &g, 1e-14).unwrap().value + kernel_series(&p, &gm, 1e-14).unwrap().value) * 0.5;
            let k4 = kernel_a4_dim2(&GeomPoint::from_theta(z * z / 2f64.sqrt(), 2.0 * th).unwrap()).unwrap().value;
            assert!((even - k4).norm() < 1e-11, "z={z}: {even} vs {k4}");
        }
    }

    #[test]
    fn a8_even_part_at_large_z_through_neumann_sums() {
        for &z in &[10.0, 40.0, 300.0] {
            for &th in &[0.05, 0.6, 1.2, 2.0, 2.9] {
                let a = kernel_even_dim2(4, &GeomPoint::from_theta(z, th).unwrap()).unwrap();
                let b = kernel_even_dim2(4, &GeomPoint::from_theta(z, PI - th).unwrap()).unwrap();
                let k4 = kernel_a4_dim2(&GeomPoint::from_theta(z * z / 2f64.sqrt(), 2.0 * th).unwrap()).unwrap();
                let even = (a.value + b.value) * 0.5;
                assert!((even - k4.value).norm() <= 0.5 * (a.err + b.err) + k4.err + 1e-10, "z={z} th={th}");
            }
        }
    }

    #[test]
    fn dispatch_kinds() {
        assert_eq!(closed_form_kind(&kp(4.0, 2)), Some(ClosedFormKind::A4Dim2));
        assert_eq!(closed_form_kind(&kp(4.0, 6)), Some(ClosedFormKind::A4Even));
        assert_eq!(closed_form_kind(&kp(4.0, 5)), None);
        assert_eq!(closed_form_kind(&kp(0.5, 2)), Some(ClosedFormKind::Subsample { base: 2.0, n: 4 }));
        assert_eq!(closed_form_kind(&kp(4.0 / 3.0, 2)), Some(ClosedFormKind::Subsample { base: 4.0, n: 3 }));
        assert_eq!(closed_form_kind(&kp(6.0, 3)), None);
        assert!(matches!(kernel_closed(&kp(3.0, 3), &GeomPoint::new(1.0, 0.0).unwrap(), 1e-10), Err(KernelError::Usage(_))));
    }
}
