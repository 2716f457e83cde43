//! Value-with-error records shared by every evaluator.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Which route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Closed,
    Laplace,
    Integral,
    Contour,
    Lift,
    Neumann,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Closed => "closed",
            Method::Laplace => "laplace",
            Method::Integral => "integral",
            Method::Contour => "contour",
            Method::Lift => "lift",
            Method::Neumann => "neumann",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "series" => Ok(Method::Series),
            "closed" => Ok(Method::Closed),
            "laplace" => Ok(Method::Laplace),
            "integral" => Ok(Method::Integral),
            "contour" => Ok(Method::Contour),
            "lift" => Ok(Method::Lift),
            "neumann" => Ok(Method::Neumann),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// A complex value with an absolute error bound (rigorous for the series
/// routes, an estimate for quadrature routes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEval {
    pub value: Complex64,
    pub err: f64,
    pub method: Method,
}

impl ComplexEval {
    pub fn new(value: Complex64, err: f64, method: Method) -> Self {
        ComplexEval { value, err, method }
    }

    pub fn exact(value: Complex64, method: Method) -> Self {
        let err = 4.0 * f64::EPSILON * value.norm();
        ComplexEval { value, err, method }
    }

    /// True when the two values agree within the sum of their error fields
    /// plus `slack`.
    pub fn agrees_with(&self, other: &ComplexEval, slack: f64) -> bool {
        (self.value - other.value).norm() <= self.err + other.err + slack
    }
}
