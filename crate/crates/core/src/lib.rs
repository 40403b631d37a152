//! Spectral-Galerkin eigensolver for axisymmetric mean-field dynamos.
//!
//! The toroidal field `B` and poloidal potential `A` are expanded in
//! recombined Legendre polynomials in radius and normalized `P_l^1(cos theta)`
//! in latitude; projecting the induction equation onto the same functions
//! gives a dense generalized eigenproblem. Two benchmark drivers sit on top:
//! free decay in a full sphere, checked against spherical Bessel modes, and
//! the critical alpha-effect amplitude of an alpha-Omega dynamo in a shell.
//!
//! ```no_run
//! use galerkin_dynamo::{DynamoModel, Parity, find_critical_calpha};
//!
//! let model = DynamoModel::model_b();
//! let crit = find_critical_calpha(&model, 16, 16, (0.1, 1.0), Parity::Odd)?;
//! println!("C_alpha = {:.4}, omega = {:.1}", crit.c_alpha_crit, crit.omega);
//! # Ok::<(), galerkin_dynamo::Error>(())
//! ```

// `!(x > t)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod basis;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod orthopoly;
pub mod problems;
pub mod quadrature;

pub use assembly::{FieldKind, GalerkinSystem, QuadratureDensity};
pub use basis::{ModeIndexMap, Parity, ShellMap};
pub use error::{Error, Result};
pub use linalg::{Spectrum, eig_dense, find_root};
pub use model::DynamoModel;
pub use problems::{
    CriticalResult, DecayResult, FieldSnapshot, convergence_table, find_critical_calpha, solve_dynamo,
    solve_free_decay,
};
pub use quadrature::{QuadratureRule, gauss_legendre};
