//! Scalar numerical kernels: quadrature, monotone inversion, golden-section
//! maximization and monotone interpolation.

pub mod golden;
pub mod interp;
pub mod quad;
pub mod root;

pub use golden::golden_max;
pub use interp::MonotoneCubic;
pub use quad::{adaptive_simpson, composite_simpson, Integral};
pub use root::{invert_increasing, Inversion, InvertOptions};
