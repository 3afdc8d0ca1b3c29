//! l-fractional difference operators `Δ^(a;l)`, the weighted difference
//! sequence spaces they induce, and finite-truncation checks of the matrix
//! conditions describing their α-, β- and γ-duals.
//!
//! All algorithms are generic over [`Scalar`]: exact big rationals or `f64`.

pub mod duals;
pub mod error;
pub mod operator;
pub mod pochhammer;
pub mod scalar;
pub mod spaces;
pub mod transform;
pub mod verdict;
pub mod verify;

pub use duals::{
    build_d, build_e, check_a1, check_a1_kernel, check_a2, check_a2_kernel, check_a3,
    check_a3_kernel, check_a4, check_a4_kernel, check_a5, check_a5_kernel, dual_conditions,
    dual_membership, subset_sup, subset_sup_bounds, subset_sup_brute_force, CheckOptions, DualKind,
    DualReport, DualTestInput, DualVerdict,
};
pub use error::{Error, Result};
pub use operator::{apply, compose, convolve_orders, inverse_apply, SequencePrefix};
pub use pochhammer::{
    coefficient_stream, factorial, l_pochhammer, CoefficientStream, OperatorSpec,
};
pub use scalar::{
    format_rational, parse_rational, parse_scalar, Mode, Rational, Scalar, ScalarRef,
};
pub use spaces::{classify, norm, MembershipJson, MembershipReport};
pub use transform::{
    build_c, forward_transform, reconstruct, LowerTriangularKernel, WeightSequence,
};
pub use verdict::{ConditionId, ConditionVerdict, Report, SpaceTag, Status, Tolerances};
