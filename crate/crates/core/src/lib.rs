//! Single-copy local filtering of entangled two-qubit states into Bell
//! diagonal form.
//!
//! The pipeline runs in four steps:
//!
//! 1. [`wootters::wootters_decomposition`] writes `rho = sum_i |x_i><x_i|`
//!    with tilde-orthogonal states `<x_i|x~_j> = lambda_i delta_ij`.
//! 2. [`filtercore::complete_basis`] extends `{x_i}` to four states and
//!    [`filtercore::associated_operator`] builds
//!    `F = sum_i |x~_i><x~_i| / <x_i|x~_i>`.
//! 3. [`filtercore::factorize`] splits `F = G_A (x) G_B` and
//!    [`filtercore::extract_filters`] turns the factors into the filters
//!    `f_A`, `f_B` with largest eigenvalue one.
//! 4. [`transform::apply_filter`] produces `rho'`, which has maximally mixed
//!    marginals, and the success probability `P_f = lambda_min(F) tr R(rho)`.
//!
//! [`family`] holds closed forms for a four-parameter family of states that
//! the numerical pipeline is checked against.

pub mod bell;
pub mod error;
pub mod family;
pub mod filtercore;
pub mod matcore;
pub mod sampling;
pub mod tolerance;
pub mod transform;
pub mod wootters;

pub use error::{Error, Result};
pub use filtercore::{plan, CompletionChoice, Plan};
pub use tolerance::Tolerances;
pub use wootters::{load_density, Classification, DensityMatrix, WoottersSet};
