//! Numerical verification of complex-valued eigenfunctions and their minimal
//! zero fibers on the non-compact matrix symmetric spaces SL(n,R)/SO(n),
//! Sp(n,R)/U(n), SO*(2n)/U(n) and SU*(2n)/Sp(n).
//!
//! The crate certifies, at desk scale and in double precision:
//!
//! - the eigenfunction identities tau(phi) = lambda phi and
//!   kappa(phi, phi) = mu phi^2 for the quadratic trace functions of the
//!   catalog, against closed-form operators cross-checked by a
//!   finite-difference oracle;
//! - the sign-flip duality of the spectra on the compact dual spaces;
//! - existence and regularity of zero-fiber points, by constructive
//!   algorithms and by a generic numeric finder;
//! - minimality of the fibers, through an independent mean-curvature
//!   estimate in symmetric-space normal coordinates.

pub mod catalog;
pub mod error;
pub mod fiber;
pub mod matrix;
pub mod operators;
pub mod spaces;
pub mod verify;

pub use catalog::{
    dual_expectations, example_spec, make_slr, make_sostar, make_spec, make_spr, make_sustar,
    random_valid_params, EigenSpec,
};
pub use error::{Error, Result};
pub use fiber::{
    constructive_zero, fiber_walk, is_regular, numeric_zero, symmetric_mapping, zero_test,
    FiberPoint,
};
pub use matrix::{
    basis_generator, bilinear, format_complex, frobenius_inner, hermitian_trace, mat_exp,
    numerical_rank, parse_complex, Complex64, ComplexMatrix, ComplexVector, Generator,
};
pub use operators::{
    derivative_oracle, eval, first_derivative, kappa, second_derivative, tau, BSymmetry,
    OracleOrder, QuadTraceFn,
};
pub use spaces::{
    build_descriptor, membership_residual, random_point, validate_cartan, Family, GroupPoint,
    SpaceId, SymmetricSpaceDescriptor,
};
pub use verify::{
    duality_sweep, eigen_sweep, find_level_point, mean_curvature_at_level, mean_curvature_estimate,
    regular_value_report, sl3_canonical, sl3_chart, verification_report, SweepOutcome,
    VerificationReport,
};
