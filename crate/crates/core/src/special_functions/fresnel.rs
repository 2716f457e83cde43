//! Fresnel integrals C(u) = ∫₀ᵘ cos t² dt and S(u) = ∫₀ᵘ sin t² dt.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quadrature::adaptive;

/// Switch from quadrature to the asymptotic tail.
const ASYMPTOTIC_FROM: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FresnelPair {
    pub c: f64,
    pub s: f64,
}

impl FresnelPair {
    /// C + iS = ∫₀ᵘ e^{it²} dt.
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.c, self.s)
    }
}

/// ∫_u^∞ e^{it²} dt for u ≥ 6 from the optimally truncated expansion
/// (i e^{iu²} / 2u) Σ (1/2)_k (−i/u²)^k.
fn tail(u: f64) -> Complex64 {
    let x = u * u;
    let step = Complex64::new(0.0, -1.0 / x);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        let next = term * step * (0.5 + k);
        if next.norm() >= term.norm() || next.norm() < 1e-18 {
            break;
        }
        term = next;
        sum += term;
        k += 1.0;
    }
    Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, x) * sum / (2.0 * u)
}

fn integral_from_zero(u: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let au = u.abs();
    let v = if au <= ASYMPTOTIC_FROM {
        adaptive(|t| Complex64::from_polar(1.0, t * t), 0.0, au, 1e-15, 1e-15, 2000).value
    } else {
        let half = 0.5 * (PI / 2.0).sqrt();
        Complex64::new(half, half) - tail(au)
    };
    if u < 0.0 {
        -v
    } else {
        v
    }
}

/// The pair (C(u), S(u)); absolute error ≤ 1e−12.
pub fn fresnel(u: f64) -> FresnelPair {
    if !u.is_finite() {
        let l = 0.5 * (PI / 2.0).sqrt();
        let sgn = if u.is_nan() { f64::NAN } else { u.signum() };
        return FresnelPair { c: sgn * l, s: sgn * l };
    }
    let v = integral_from_zero(u);
    FresnelPair { c: v.re, s: v.im }
}

/// ∫_{−∞}^{u} e^{it²} dt = √(π/2)(1+i)/2 + C(u) + iS(u).
pub fn fresnel_from_minus_infinity(u: f64) -> Complex64 {
    let half = 0.5 * (PI / 2.0).sqrt();
    Complex64::new(half, half) + fresnel(u).as_complex()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn origin_and_limit() {
        let f = fresnel(0.0);
        assert_eq!((f.c, f.s), (0.0, 0.0));
        let lim = 0.5 * (PI / 2.0).sqrt();
        assert!((lim - 0.626_657_1).abs() < 1e-7);
        let far = fresnel(1e4);
        assert!((far.c - lim).abs() < 1e-4 && (far.s - lim).abs() < 1e-4);
        let inf = fresnel(f64::INFINITY);
        assert_eq!(inf.c, lim);
    }

    #[test]
    fn value_at_one() {
        // independent composite Simpson on [0, 1]
        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let t = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * (t * t).cos();
        }
        s *= h / 3.0;
        let f = fresnel(1.0);
        assert!((f.c - s).abs() < 1e-12);
        assert!((f.c - 0.904_524_3).abs() < 1e-7);
    }

    #[test]
    fn branches_meet_at_switch() {
        let below = adaptive(|t| Complex64::from_polar(1.0, t * t), 0.0, 6.5, 1e-15, 1e-15, 4000).value;
        let above = integral_from_zero(6.5);
        assert!((below - above).norm() < 1e-12);
        let u = 8.3;
        let q = adaptive(|t| Complex64::from_polar(1.0, t * t), 0.0, u, 1e-15, 1e-15, 8000).value;
        assert!((q - integral_from_zero(u)).norm() < 1e-12);
    }

    proptest! {
        #[test]
        fn odd_and_bounded(u in -40.0f64..40.0) {
            let a = fresnel(u);
            let b = fresnel(-u);
            prop_assert!((a.c + b.c).abs() < 1e-15 && (a.s + b.s).abs() < 1e-15);
            prop_assert!(a.c.abs() <= 1.0 && a.s.abs() <= 1.0);
        }
    }
}
