//! Thin wrappers over the `libm` gamma routines with the pole handling the
//! series evaluators need.

use std::f64::consts::PI;

pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    libm::tgamma(x)
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// 1/Γ(x), entire; exactly zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        // reflection keeps the argument of Γ positive
        return (PI * x).sin() * gamma(1.0 - x) / PI;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

/// Returns (ln|1/Γ(x)|, sign of 1/Γ(x)); sign 0 at the poles.
pub fn ln_rgamma_signed(x: f64) -> (f64, f64) {
    if x > 0.0 {
        return (-ln_gamma(x), 1.0);
    }
    if x == x.floor() {
        return (f64::NEG_INFINITY, 0.0);
    }
    // 1/Γ(x) = sin(πx) Γ(1-x)/π
    let s = (PI * x).sin();
    ((s.abs() / PI).ln() + ln_gamma(1.0 - x), s.signum())
}

/// Rising factorial (a)_n.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (a + k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        for k in 0..6 {
            assert_eq!(rgamma(-(k as f64)), 0.0);
        }
        assert!((rgamma(3.0) - 0.5).abs() < 1e-15);
        assert!((rgamma(-1.5) - 3.0 / (4.0 * PI.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn signed_log_matches_direct() {
        for &x in &[-2.5, -0.3, 0.7, 4.2] {
            let (l, s) = ln_rgamma_signed(x);
            assert!((s * l.exp() - rgamma(x)).abs() < 1e-13 * rgamma(x).abs().max(1.0));
        }
    }

    #[test]
    fn rising_factorial() {
        assert_eq!(pochhammer(2.0, 3), 24.0);
        assert_eq!(pochhammer(0.5, 0), 1.0);
    }
}
