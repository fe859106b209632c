//! Exact tensor algebra over Q(sqrt 3) for algebraic curvature tensors:
//! invariants, model spaces, and residual evaluators for curvature identities.

pub mod contract;
pub mod curvature;
pub mod delta;
pub mod exec;
pub mod identities;
pub mod models;
pub mod report;
pub mod scalar;
pub mod tensor;

pub use contract::{contract, ein, einsum, einsum_into, ContractionSpec, Operand, SlotRef, G};
pub use curvature::{CurvatureTensor, InvariantReport, TwoSteinReport};
pub use models::{ModelKind, ModelSpec};
pub use scalar::{Rational, Scalar};
pub use tensor::Tensor;
