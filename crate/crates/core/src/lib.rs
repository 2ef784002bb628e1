//! Certified pointwise decay bounds for real functions on `[0, inf)`.
//!
//! A function is described by a [`FunctionSpec`]. From it the library
//! computes tail suprema `S(t) = sup_{s >= t} |int_t^s f|`, moduli of
//! continuity, Lebesgue and Sobolev norms, and combines them into
//! [`DecayCertificate`]s: grids of rows checking `|f(t)| <= bound(t)`.
//! Bounds are sound upper bounds whenever the certificate is marked `sound`.

pub mod bounds;
pub mod certificates;
pub mod envelope;
pub mod error;
pub mod expr;
pub mod function_model;
pub mod interval;
pub mod modulus;
pub mod norms;
pub mod numeric;
pub mod ode_demo;
pub mod quadrature;
pub mod tail_integral;

pub use certificates::{
    holder_certificate, lemma1_window_certificate, lemma2_certificate, optimized_window_certificate,
    sobolev_certificate, CertificateMethod, CertificateOptions, CertificateRow, DecayCertificate, WindowSearch,
};
pub use error::{Error, Result};
pub use expr::Expr;
pub use function_model::{
    derivative, evaluate, exact_antiderivative_available, make_incomparability_witness,
    CounterexampleParams, FunctionSpec, Segment, TailRule,
};
pub use modulus::{ModulusEstimate, ModulusForm};
pub use norms::{lp_norm, lq_norm_derivative, sobolev_report, NormValue, SobolevReport};
pub use ode_demo::{certify_error_decay, lyapunov_check, simulate, Trajectory};
pub use tail_integral::{improper_integral, tail_supremum, tail_supremum_grid, HorizonPolicy};
