//! Parabolic cylinder functions D_{−n}(w) for integer n ≥ 0, and the
//! large-argument expansions of U(ν, z) = D_{−ν−1/2}(z).

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use super::erf::{erfcx_complex, OVERFLOW_EXPONENT};
use super::gamma::rgamma;
use crate::error::{KernelError, Result};

/// Deepest order reached by [`parabolic_d`] unless a larger cap is passed.
pub const DEFAULT_MAX_DEPTH: usize = 20;

/// Order −n of D_{−n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CylinderOrder {
    n: usize,
}

impl CylinderOrder {
    pub fn new(n: usize) -> Self {
        CylinderOrder { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// D_{−n}(w) with the default depth cap.
pub fn parabolic_d(order: CylinderOrder, w: Complex64) -> Result<Complex64> {
    parabolic_d_capped(order, w, DEFAULT_MAX_DEPTH)
}

/// D_{−n}(w): D_0 = e^{−w²/4}, D_{−1} = √(π/2) e^{w²/4} erfc(w/√2), then
/// D_{−k−1} = (D_{−k+1} − w D_{−k}) / k.
pub fn parabolic_d_capped(order: CylinderOrder, w: Complex64, cap: usize) -> Result<Complex64> {
    let n = order.n;
    if n > cap {
        return Err(KernelError::domain(format!("order -{n} exceeds the depth cap -{cap}")));
    }
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(KernelError::domain(format!("argument must be finite, got {w}")));
    }
    let quarter = w * w * 0.25;
    if quarter.re.abs() > OVERFLOW_EXPONENT {
        return Err(KernelError::Range(format!("D_-{n}({w}) not representable")));
    }
    let d0 = (-quarter).exp();
    if n == 0 {
        return Ok(d0);
    }
    // e^{w²/4} erfc(w/√2) = e^{−w²/4} erfcx(w/√2)
    let d1 = d0 * erfcx_complex(w / 2f64.sqrt())? * (PI / 2.0).sqrt();
    let (mut prev, mut cur) = (d0, d1);
    for k in 1..n {
        let next = (prev - w * cur) / k as f64;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Sector half-width margin used to pick between the two expansions.
const SECTOR_MARGIN: f64 = 0.05;

/// Which large-argument expansion applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionBranch {
    /// |arg z| ≤ π/4 + margin: the recessive series alone.
    Single,
    /// π/4 + margin ≤ ±arg z: both series, sign taken from arg z.
    Double,
}

pub fn expansion_branch(z: Complex64) -> ExpansionBranch {
    if z.arg().abs() < FRAC_PI_4 + SECTOR_MARGIN {
        ExpansionBranch::Single
    } else {
        ExpansionBranch::Double
    }
}

/// Partial sum of Σ_s c_s (∓1)^s (p)_{2s} / (s! (2z²)^s) with `terms` terms.
/// Returns (sum, |first omitted term|, |last kept term|).
fn asymptotic_series(p: f64, z: Complex64, alternate: bool, terms: usize) -> (Complex64, f64, f64) {
    let x = 1.0 / (z * z * 2.0);
    let sign = if alternate { -1.0 } else { 1.0 };
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = 0.0;
    for s in 0..terms {
        if s > 0 {
            let sf = s as f64;
            term *= x * (sign * (p + 2.0 * sf - 2.0) * (p + 2.0 * sf - 1.0) / sf);
        }
        sum += term;
        last = term.norm();
    }
    let sf = terms as f64;
    let omitted = if terms == 0 {
        1.0
    } else {
        (term * x * ((p + 2.0 * sf - 2.0) * (p + 2.0 * sf - 1.0) / sf)).norm()
    };
    (sum, omitted, last)
}

/// Large-|z| expansion of U(ν, z) = D_{−ν−1/2}(z) truncated after `terms`
/// terms; returns the value and the magnitude of the first omitted term.
pub fn parabolic_d_asymptotic(nu: f64, z: Complex64, terms: usize) -> Result<(Complex64, f64)> {
    if !nu.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
        return Err(KernelError::domain("asymptotic expansion needs finite inputs"));
    }
    if z.norm() == 0.0 || terms == 0 {
        return Err(KernelError::domain("asymptotic expansion needs z != 0 and at least one term"));
    }
    let (s1, o1, l1) = asymptotic_series(0.5 + nu, z, true, terms);
    if o1 > l1 && l1 > 0.0 {
        return Err(KernelError::domain(format!(
            "|z| = {} too small for {terms} terms: the series is already diverging",
            z.norm()
        )));
    }
    let quarter = z * z * 0.25;
    let pre1 = (-quarter - z.ln() * (nu + 0.5)).exp();
    let mut value = pre1 * s1;
    let mut err = pre1.norm() * o1;
    if expansion_branch(z) == ExpansionBranch::Double {
        let pm = if z.arg() >= 0.0 { 1.0 } else { -1.0 };
        let (s2, o2, _) = asymptotic_series(0.5 - nu, z, false, terms);
        let pre2 = Complex64::new(0.0, pm)
            * ((2.0 * PI).sqrt() * rgamma(0.5 + nu))
            * Complex64::from_polar(1.0, -pm * PI * nu)
            * (quarter + z.ln() * (nu - 0.5)).exp();
        value += pre2 * s2;
        err += pre2.norm() * o2;
    }
    Ok((value, err))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::erf::erfc_complex;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn low_orders() {
        assert!((parabolic_d(CylinderOrder::new(0), c(0.0, 0.0)).unwrap() - 1.0).norm() < 1e-16);
        let d1 = parabolic_d(CylinderOrder::new(1), c(0.0, 0.0)).unwrap();
        assert!((d1 - (PI / 2.0).sqrt()).norm() < 1e-15);
    }

    #[test]
    fn order_minus_two_against_derivative_formula() {
        // d/dw(e^{a²w²}erfc(aw)) = 2a²w e^{a²w²}erfc(aw) − 2a/√π
        //   = (2/√π)(−a) e^{a²w²/2} D_{−2}(√2 a w)
        let a = 0.8;
        let w = c(1.0, 1.0) / (2f64.sqrt() * a);
        let e = (w * w * a * a).exp();
        let deriv = w * e * erfc_complex(w * a).unwrap() * (2.0 * a * a) - 2.0 * a / PI.sqrt();
        let want = deriv / ((w * w * a * a * 0.5).exp() * (-a) * (2.0 / PI.sqrt()));
        let got = parabolic_d(CylinderOrder::new(2), c(1.0, 1.0)).unwrap();
        assert!((got - want).norm() < 1e-13, "{got} vs {want}");
    }

    #[test]
    fn minus_one_matches_erfc_form() {
        for &(x, y) in &[(0.5, 0.2), (-2.0, 2.0), (3.0, -1.0), (-4.0, -4.0), (6.0, 0.0)] {
            let w = c(x, y);
            let direct = (w * w * 0.25).exp() * erfc_complex(w / 2f64.sqrt()).unwrap() * (PI / 2.0).sqrt();
            let got = parabolic_d(CylinderOrder::new(1), w).unwrap();
            assert!((got - direct).norm() < 1e-12 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn depth_cap() {
        assert!(parabolic_d(CylinderOrder::new(21), c(1.0, 0.0)).is_err());
        assert!(parabolic_d_capped(CylinderOrder::new(21), c(1.0, 0.0), 30).is_ok());
    }

    #[test]
    fn asymptotic_single_branch() {
        let z = c(30.0, 0.0);
        assert_eq!(expansion_branch(z), ExpansionBranch::Single);
        let exact = parabolic_d(CylinderOrder::new(1), z).unwrap();
        let (v, err) = parabolic_d_asymptotic(0.5, z, 12).unwrap();
        assert!((v - exact).norm() <= 2.0 * err + 1e-12 * exact.norm(), "{v} vs {exact} err {err}");
        let (lead, _) = parabolic_d_asymptotic(0.5, z, 1).unwrap();
        let want = (-z * z * 0.25).exp() / z;
        assert!((lead - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn asymptotic_double_branch() {
        let z = Complex64::from_polar(30.0, PI / 2.0);
        assert_eq!(expansion_branch(z), ExpansionBranch::Double);
        let exact = parabolic_d(CylinderOrder::new(1), z).unwrap();
        let (v, err) = parabolic_d_asymptotic(0.5, z, 12).unwrap();
        assert!((v - exact).norm() <= 2.0 * err + 1e-13 * exact.norm(), "{v} vs {exact}");
    }

    #[test]
    fn asymptotic_on_the_kernel_ray() {
        // (i−1)z cos θ sits on arg 3π/4 for cos θ > 0
        for n in 1..=3 {
            let w = c(-1.0, 1.0) * 20.0;
            let exact = parabolic_d(CylinderOrder::new(n), w).unwrap();
            let (v, err) = parabolic_d_asymptotic(n as f64 - 0.5, w, 10).unwrap();
            assert!((v - exact).norm() <= 2.0 * err + 1e-10 * exact.norm(), "n={n}: {v} vs {exact}");
        }
    }

    #[test]
    fn asymptotic_rejects_small_argument() {
        assert!(parabolic_d_asymptotic(0.5, c(0.5, 0.0), 20).is_err());
        assert!(parabolic_d_asymptotic(0.5, c(0.0, 0.0), 3).is_err());
    }
}
