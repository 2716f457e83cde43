//! Complex error function.
//!
//! Inside the right half-plane: Maclaurin series when Re w < 1 (the loss is at
//! most e^{2(Re w)^2}), Laplace continued fraction for the scaled function
//! otherwise.  The left half-plane goes through erfc(−w) = 2 − erfc(w).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{KernelError, Result};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// Largest Im² − Re² for which e^{−w²} stays comfortably finite.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

fn check_region(w: Complex64) -> Result<()> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(KernelError::domain(format!("erfc argument must be finite, got {w}")));
    }
    let growth = w.im * w.im - w.re * w.re;
    if growth > OVERFLOW_EXPONENT {
        return Err(KernelError::Range(format!(
            "erfc({w}) overflows: Im^2 - Re^2 = {growth:.1} exceeds {OVERFLOW_EXPONENT}"
        )));
    }
    Ok(())
}

/// erf(w) = 2/√π Σ (−1)^n w^{2n+1} / (n!(2n+1)).
fn erf_maclaurin(w: Complex64) -> Complex64 {
    let w2 = w * w;
    let mut term = w;
    let mut sum = w;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -w2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() || n > 5000.0 {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

/// e^{w²} erfc(w) for Re w > 0 by modified Lentz on
/// 1/(w + (1/2)/(w + 1/(w + (3/2)/(w + …)))).
fn erfcx_cf(w: Complex64) -> Option<Complex64> {
    let tiny = 1e-300;
    let mut f = w;
    if f.norm() < tiny {
        f = Complex64::new(tiny, 0.0);
    }
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..200_000 {
        let an = 0.5 * n as f64;
        d = w + d * an;
        if d.norm() < tiny {
            d = Complex64::new(tiny, 0.0);
        }
        c = w + an / c;
        if c.norm() < tiny {
            c = Complex64::new(tiny, 0.0);
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 2e-16 {
            return Some(1.0 / (f * PI.sqrt()));
        }
    }
    None
}

/// erfc for Re w ≥ 0, returned together with e^{w²}erfc(w) when the continued
/// fraction was used (that form avoids overflow in callers).
fn erfc_right(w: Complex64) -> (Complex64, Option<Complex64>) {
    if w.re >= 1.0 || (w.re > 0.0 && w.norm() > 28.0) {
        if let Some(x) = erfcx_cf(w) {
            return (x * (-w * w).exp(), Some(x));
        }
    }
    (Complex64::new(1.0, 0.0) - erf_maclaurin(w), None)
}

/// Complementary error function at complex argument.
pub fn erfc_complex(w: Complex64) -> Result<Complex64> {
    check_region(w)?;
    if w.re >= 0.0 {
        Ok(erfc_right(w).0)
    } else {
        Ok(Complex64::new(2.0, 0.0) - erfc_right(-w).0)
    }
}

/// Error function at complex argument.
pub fn erf_complex(w: Complex64) -> Result<Complex64> {
    check_region(w)?;
    if w.norm() < 1.0 {
        return Ok(erf_maclaurin(w));
    }
    Ok(Complex64::new(1.0, 0.0) - erfc_complex(w)?)
}

/// Scaled complement e^{w²} erfc(w).  Finite wherever erfc is, and without
/// the overflow check when Re w ≥ 1.
pub fn erfcx_complex(w: Complex64) -> Result<Complex64> {
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(KernelError::domain(format!("erfcx argument must be finite, got {w}")));
    }
    if w.re >= 1.0 {
        if let Some(x) = erfcx_cf(w) {
            return Ok(x);
        }
    }
    if w.re <= -1.0 {
        if let Some(x) = erfcx_cf(-w) {
            // e^{w²}(2 − erfc(−w)) = 2e^{w²} − erfcx(−w)
            let w2 = w * w;
            if w2.re > OVERFLOW_EXPONENT {
                return Err(KernelError::Range(format!("erfcx({w}) overflows")));
            }
            return Ok(w2.exp() * 2.0 - x);
        }
    }
    let w2 = w * w;
    if w2.re.abs() > OVERFLOW_EXPONENT {
        return Err(KernelError::Range(format!("erfcx({w}) not representable")));
    }
    Ok(w2.exp() * erfc_complex(w)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// erf(w) = (2/√π) w ∫_0^1 e^{−w²s²} ds, integrated numerically.
    fn erf_oracle(w: Complex64) -> Complex64 {
        let r = adaptive(|s| (-w * w * s * s).exp(), 0.0, 1.0, 1e-15, 1e-15, 4000);
        r.value * w * FRAC_2_SQRT_PI
    }

    #[test]
    fn erfc_at_zero() {
        assert_eq!(erfc_complex(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn real_axis_values() {
        // reference values of erfc at 0.5, 2, 5
        let cases = [(0.5, 0.479_500_122_186_953_5), (2.0, 0.004_677_734_981_047_266), (5.0, 1.537_459_794_428_034_8e-12)];
        for (x, v) in cases {
            let got = erfc_complex(c(x, 0.0)).unwrap();
            assert!((got.re - v).abs() < 1e-14 * v.max(1e-3), "x={x}: {got}");
            assert!(got.im.abs() < 1e-300 + 1e-16 * v);
        }
    }

    #[test]
    fn oddness_and_conjugation() {
        let w = c(0.3, 0.4);
        let a = erf_complex(w).unwrap();
        let b = erf_complex(-w).unwrap();
        assert!((a + b).norm() < 1e-15);
        let cc = erf_complex(w.conj()).unwrap();
        assert!((cc - a.conj()).norm() < 1e-15);
    }

    #[test]
    fn matches_quadrature_oracle() {
        for &(x, y) in &[(0.3, 0.4), (1.2, -0.7), (-2.0, 1.5), (0.9, 2.5), (3.0, 3.0), (-1.5, -3.2), (0.2, 4.0)] {
            let w = c(x, y);
            let got = erf_complex(w).unwrap();
            let want = erf_oracle(w);
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "w={w}: {got} vs {want}");
        }
    }

    #[test]
    fn diagonal_rays() {
        // the rays e^{±iπ/4}u, e^{±3iπ/4}u keep |e^{−w²}| = 1
        for k in 0..4 {
            let dir = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * (2 * k + 1) as f64);
            for &u in &[0.5, 3.0, 12.0, 60.0] {
                let w = dir * u;
                let v = erfc_complex(w).unwrap();
                let s = erfc_complex(-w).unwrap();
                assert!((v + s - 2.0).norm() < 1e-13);
                assert!(v.norm() < 2.0 + 1e-12 + 1.0 / u);
            }
        }
        let w = Complex64::from_polar(4.0, std::f64::consts::FRAC_PI_4);
        let want = erf_oracle(w);
        assert!((erf_complex(w).unwrap() - want).norm() < 1e-12);
    }

    #[test]
    fn overflow_region_rejected() {
        assert!(matches!(erfc_complex(c(0.0, 30.0)), Err(KernelError::Range(_))));
        assert!(erfc_complex(c(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn scaled_complement() {
        for &(x, y) in &[(1.5, 0.5), (-1.5, 0.5), (0.2, 0.3), (20.0, -20.0), (-30.0, 30.0)] {
            let w = c(x, y);
            let x1 = erfcx_complex(w).unwrap();
            if (w * w).re.abs() < 600.0 {
                let direct = (w * w).exp() * erfc_complex(w).unwrap();
                assert!((x1 - direct).norm() < 1e-12 * direct.norm().max(1.0), "w={w}");
            } else {
                // large |w|: erfcx(w) ≈ 1/(w√π)
                assert!((x1 * w * PI.sqrt() - 1.0).norm() < 1e-3);
            }
        }
    }

    #[test]
    fn fresnel_identity_on_the_diagonal() {
        // C(1) + iS(1) = √(π/2)(1+i)/2 · erf((1−i)/√2)
        let u = 1.0;
        let e = erf_complex(c(1.0, -1.0) * (u / 2f64.sqrt())).unwrap();
        let rhs = c(1.0, 1.0) * e * ((PI / 2.0).sqrt() / 2.0);
        let f = crate::special_functions::fresnel::fresnel(u);
        assert!((rhs - c(f.c, f.s)).norm() < 1e-13);
    }

    #[test]
    fn derivatives_are_hermite_times_gaussian() {
        // k-th derivative by the discrete Cauchy formula on a small circle
        // (an N-point difference stencil)
        let w0 = c(0.4, -0.3);
        let r = 0.5;
        let npts = 64;
        let samples: Vec<Complex64> = (0..npts)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / npts as f64;
                erf_complex(w0 + Complex64::from_polar(r, t)).unwrap()
            })
            .collect();
        for n in 0..=6usize {
            let k = n + 1;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, f) in samples.iter().enumerate() {
                let t = 2.0 * PI * j as f64 / npts as f64;
                acc += f * Complex64::from_polar(1.0, -(k as f64) * t);
            }
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let deriv = acc / npts as f64 * fact / r.powi(k as i32);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let want = crate::special_functions::hermite::hermite(n as i64, w0).unwrap() * (-w0 * w0).exp() * (sign * FRAC_2_SQRT_PI);
            assert!((deriv - want).norm() < 1e-9 * want.norm().max(1.0), "n={n}: {deriv} vs {want}");
        }
    }
}
