//! Numerical evaluation of the kernel K_a^m of the radially deformed Fourier
//! transform, with several independent evaluation routes and bound audits.

pub mod closed_forms;
pub mod error;
pub mod kernel_core;
pub mod integral_rep;
pub mod laplace;
pub mod eval;
pub mod mittag_leffler;
pub mod quadrature;
pub mod report;
pub mod scan;
pub mod special_functions;

pub use error::{KernelError, Result};
pub use eval::{ComplexEval, Method};
