//! Herglotz-Nevanlinna functions on the poly-upper half-plane through their
//! representing measures, and the mirror picture on the poly-torus.

// `!(x > 0.0)` is used on purpose so that NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissibility;
pub mod error;
pub mod figure;
pub mod kernel;
pub mod measure;
pub mod point;
pub mod quadrature;
pub mod region;
pub mod support;
pub mod torus;

pub use error::{Error, Result};
pub use kernel::{evaluate, kernel_k, poisson_p, remainder_r, PoleTerm, RepresentationParams};
pub use measure::{Density, Measure, MeasureComponent};
pub use point::{Axis, DiskPoint, HalfPlanePoint};
pub use quadrature::{IntegrationResult, QuadratureSpec, Truncation};
pub use region::Region;
