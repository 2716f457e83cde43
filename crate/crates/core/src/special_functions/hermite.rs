//! Physicists' Hermite polynomials at complex argument.

use num_complex::Complex64;

use crate::error::{KernelError, Result};

/// H_n(w) via H_{n+1} = 2wH_n − 2nH_{n−1}.
pub fn hermite(n: i64, w: Complex64) -> Result<Complex64> {
    if n < 0 {
        return Err(KernelError::domain(format!("degree must be non-negative, got {n}")));
    }
    let mut h0 = Complex64::new(1.0, 0.0);
    if n == 0 {
        return Ok(h0);
    }
    let mut h1 = w * 2.0;
    for k in 1..n {
        let h2 = w * h1 * 2.0 - h0 * (2.0 * k as f64);
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degrees() {
        let w = Complex64::new(2.0, 1.0);
        assert_eq!(hermite(0, w).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(hermite(1, w).unwrap(), Complex64::new(4.0, 2.0));
        assert!((hermite(3, Complex64::new(1.0, 0.0)).unwrap() - Complex64::new(-4.0, 0.0)).norm() < 1e-14);
        assert!(hermite(-2, w).is_err());
    }

    #[test]
    fn explicit_degree_four() {
        let w = Complex64::new(0.3, -0.8);
        let expect = w.powi(4) * 16.0 - w * w * 48.0 + 12.0;
        assert!((hermite(4, w).unwrap() - expect).norm() < 1e-12);
    }
}
