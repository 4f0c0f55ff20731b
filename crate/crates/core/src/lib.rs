//! One-dimensional compressible Euler solver on a staggered function-space
//! pair: globally continuous velocity, per-element discontinuous density and
//! internal energy, both in Bézier form.
//!
//! The equations are discretised in non-conservative form. An element-level
//! correction adds one constant to the velocity residuals and one to the
//! internal-energy residuals of each element per step, chosen so that
//! density-weighted residual sums equal conservative boundary fluxes of
//! momentum and total energy. With the correction active the scheme
//! conserves mass, momentum and total energy to machine precision on
//! periodic domains, and computed shocks satisfy the correct jump
//! relations.
//!
//! Entry points:
//! - [`driver::run_case`] runs a named benchmark and writes CSV outputs;
//! - [`driver::convergence_study`] measures L¹ orders against the exact
//!   smooth solution;
//! - [`driver::stability_matrix`] reproduces the flux/degree stability
//!   experiment;
//! - the `examples/` directory exercises each capability end to end.

pub mod basis;
pub mod config;
pub mod correction;
pub mod diagnostics;
pub mod driver;
pub mod error;
pub mod mesh;
pub mod reference;
pub mod residual;
pub mod riemann;
pub mod space;
pub mod state;
pub mod stepper;

pub use error::{Error, Result};
pub use mesh::{BoundaryKind, Mesh1d};
pub use riemann::FluxChoice;
pub use space::{FieldVar, Side, StaggeredField, StaggeredLayout};
pub use state::{ConservativeState, GasModel, PrimitiveState};
