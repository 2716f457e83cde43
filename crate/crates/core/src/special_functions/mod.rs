//! Classical special functions used by the kernel formulas.

pub mod bessel;
pub mod erf;
pub mod fresnel;
pub mod gamma;
pub mod gegenbauer;
pub mod hermite;
pub mod incgamma;
pub mod parabolic;

pub use bessel::{bessel_j, bessel_j_tilde, BesselOrder};
pub use erf::{erf_complex, erfc_complex, erfcx_complex};
pub use fresnel::{fresnel, FresnelPair};
pub use gegenbauer::gegenbauer;
pub use hermite::hermite;
pub use parabolic::{parabolic_d, parabolic_d_asymptotic, CylinderOrder};
