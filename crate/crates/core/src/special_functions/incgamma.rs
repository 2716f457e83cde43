//! Upper incomplete gamma Γ(α, w) for real α and complex w off the
//! negative real axis.  Small |w|: Γ(α) minus the lower series; otherwise
//! Legendre's continued fraction.

use num_complex::Complex64;

use super::gamma::gamma;
use crate::error::{KernelError, Result};

/// |w| at and above which the continued fraction is used.
pub(crate) const CF_FROM: f64 = 3.0;

/// γ(α, w) e^{w} w^{−α} = Σ_n w^n / (α)_{n+1}.
pub(crate) fn lower_scaled_series(alpha: f64, w: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0 / alpha, 0.0);
    let mut sum = term;
    for n in 1..2000 {
        term *= w / (alpha + n as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum
}

/// Γ(α, w) e^{w} w^{−α} by modified Lentz on
/// 1/(w+1−α− 1(1−α)/(w+3−α− 2(2−α)/(w+5−α− …))).
pub(crate) fn upper_scaled_cf(alpha: f64, w: Complex64) -> Option<Complex64> {
    let tiny = 1e-300;
    let fix = |v: Complex64| if v.norm() < tiny { Complex64::new(tiny, 0.0) } else { v };
    let b1 = w + (1.0 - alpha);
    let mut f = fix(b1);
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    for n in 1..20_000 {
        let nf = n as f64;
        let an = -nf * (nf - alpha);
        let bn = w + (2.0 * nf + 1.0 - alpha);
        d = fix(bn + d * an).inv();
        c = fix(bn + an / c);
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).norm() < 1e-16 {
            return Some(f.inv());
        }
    }
    None
}

/// Γ(α, w).  α must not be a non-positive integer when |w| < 3.
pub fn upper_gamma(alpha: f64, w: Complex64) -> Result<Complex64> {
    if !alpha.is_finite() || !w.re.is_finite() || !w.im.is_finite() {
        return Err(KernelError::domain("incomplete gamma needs finite inputs"));
    }
    if w.im == 0.0 && w.re <= 0.0 {
        return Err(KernelError::domain(format!("Γ(α, w) is cut along w <= 0, got {w}")));
    }
    let lead = (w.ln() * alpha - w).exp();
    if w.norm() >= CF_FROM {
        return upper_scaled_cf(alpha, w)
            .map(|cf| lead * cf)
            .ok_or_else(|| KernelError::accuracy(format!("continued fraction for Γ({alpha}, {w}) stalled"), f64::NAN));
    }
    if alpha <= 0.0 && alpha == alpha.floor() {
        return Err(KernelError::domain(format!("series route undefined at α = {alpha}")));
    }
    Ok(gamma(alpha) - lead * lower_scaled_series(alpha, w))
}
