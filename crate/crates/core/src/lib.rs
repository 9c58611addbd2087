//! Null curves and Legendrian curves in PSL(2,C) built from meromorphic data,
//! and the flat fronts in hyperbolic 3-space they project to.
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`]: meromorphic expressions, symbolic derivatives, analytic
//!   continuation, path quadrature and pole analysis.
//! - [`psl2`]: numeric 2x2 complex matrices, Möbius actions.
//! - [`null_curve`]: null curves from a pair of Gauss maps.
//! - [`legendrian`]: Legendrian curves, canonical forms, periods, monodromy.
//! - [`front`]: projection to hyperbolic space, fundamental forms, meshes.
//! - [`c3`]: null curves in C^3.
//! - [`gallery`]: the standard example families.
//! - [`spec`], [`report`], [`json`], [`ply`]: curve specs, verification
//!   reports and the output formats used by the command-line tool.

pub mod c3;
pub mod error;
pub mod expr;
pub mod front;
pub mod gallery;
pub mod json;
pub mod legendrian;
pub mod matrix;
pub mod null_curve;
pub mod ply;
pub mod psl2;
pub mod report;
pub mod sampling;
pub mod spec;

pub use error::{Error, Result};
pub use expr::{MeroExpr, C64};
pub use psl2::{Ext, Mat2C};
