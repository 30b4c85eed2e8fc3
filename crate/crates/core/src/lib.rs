//! Exact computation in fibred biset categories and their deformations.
//!
//! The toolkit builds finite groups as explicit multiplication tables,
//! enumerates subgroups of direct products together with their fiber-valued
//! characters, composes them through star products and twisted
//! linearizations, and cross-checks every closed composition formula against
//! a definitional averaging oracle. Everything is exact: coefficients are
//! rationals or multivariate Laurent polynomials over the rationals.
//!
//! Module map:
//! - [`group`]: multiplication tables, subgroups, double cosets, conjugacy.
//! - [`scalar`]: exact coefficients and the deformation parameter.
//! - [`fiber`]: finite abelian fibers and characters of subgroups.
//! - [`subchar`]: the subcharacter partial category and its star product.
//! - [`linear`]: twisted linearization, invariant categories, cocycle audit.
//! - [`fibred`]: the deformed fibred biset category on the `d`-basis.
//! - [`charcat`]: class-function convolution and the pair category.
//! - [`suites`]: batch verification suites with machine-readable reports.

pub mod charcat;
mod error;
pub mod fiber;
pub mod fibred;
pub mod group;
pub mod linear;
pub mod scalar;
pub mod subchar;
pub mod suites;

pub use error::{Error, Result};

/// Default bound on the order of any group whose subgroups get enumerated.
pub const DEFAULT_ORDER_CAP: usize = 64;
