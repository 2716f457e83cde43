//! Gegenbauer (ultraspherical) polynomials by three-term recurrence.

use crate::error::{check_finite, KernelError, Result};

/// C_k^{(λ)}(ξ).
pub fn gegenbauer(k: i64, lambda: f64, xi: f64) -> Result<f64> {
    if k < 0 {
        return Err(KernelError::domain(format!("degree must be non-negative, got {k}")));
    }
    check_finite("lambda", lambda)?;
    check_finite("xi", xi)?;
    if lambda < 0.0 {
        return Err(KernelError::domain(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(gegenbauer_table(k as usize, lambda, xi)[k as usize])
}

/// All values C_0^{(λ)}(ξ), …, C_n^{(λ)}(ξ).
pub fn gegenbauer_table(n: usize, lambda: f64, xi: f64) -> Vec<f64> {
    let mut c = Vec::with_capacity(n + 1);
    c.push(1.0);
    if n == 0 {
        return c;
    }
    c.push(2.0 * lambda * xi);
    for j in 2..=n {
        let jf = j as f64;
        let next = (2.0 * xi * (jf + lambda - 1.0) * c[j - 1] - (jf + 2.0 * lambda - 2.0) * c[j - 2]) / jf;
        c.push(next);
    }
    c
}

/// C_k^{(λ)}(1) = (2λ)_k / k!, the sup of |C_k^{(λ)}| on [−1, 1] for λ > 0.
pub fn gegenbauer_at_one(k: usize, lambda: f64) -> f64 {
    let mut v = 1.0;
    for j in 0..k {
        v *= (2.0 * lambda + j as f64) / (j as f64 + 1.0);
    }
    v
}
