#![no_std]
//! Numerical laboratory for weighted multiparameter ergodic averages on
//! finite-dimensional noncommutative `L_p` spaces.

// `!(x > t)` guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod algebra;
pub mod averages;
pub mod bau;
pub mod error;
pub mod contraction;
pub mod index;
pub mod maximal;
pub mod operator;
pub mod sample;
pub mod sum;
pub mod weights;

pub use algebra::{Algebra, Block, Element, Projection, C64};
pub use error::{Error, Result};
pub use index::{lambda_box, IndexBox, MultiIndex};
pub use contraction::{
    apply_power, cesaro_limit_projection, construct_contraction, verify_absolute_contraction,
    AbsoluteContraction, ContractionKind, ContractionSpec, Positivity, VerificationReport,
};
pub use operator::{LinearMap, LinearOperator};
pub use weights::{
    eval_weight, sup_bound, verify_besicovitch, BesicovitchWeight, Perturbation, TrigPolynomial,
    TrigTerm, Weight, WeightFamily,
};
pub use averages::{
    ergodic_average, limit_oracle, split_real_imag, weighted_average, weighted_average_direct,
    weighted_average_factorized, weighted_average_grid, AverageFamily, Evaluator,
};
pub use maximal::{
    dominant_element, interpolation_check, maximal_inequality_report, sup_plus_norm, DominantReport,
    SolverOptions,
};
pub use bau::{certify_bau, verify_certificate, BauCertificate, Threshold};
