//! Numerical building blocks: adaptive quadrature, bracketed bisection, and
//! compensated summation helpers.

pub mod quadrature;
pub mod roots;
pub mod summation;

pub use quadrature::{integrate, integrate_to_inf, QuadratureConfig};
pub use roots::{bisect_in, invert_increasing};
pub use summation::pairwise_sum;
