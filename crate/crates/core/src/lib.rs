//! Position-dependent-mass Dirac fermions with a complex Schrödingerizing potential.
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dirac_system;
pub mod discretization;
pub mod error;
pub mod figures;
pub mod fields;
pub mod foldy_wouthuysen;
pub mod harmonic;
pub mod heun;
pub mod output;
pub mod potentials;
pub mod profiles;
pub mod svg;

pub use error::{PdmError, Result};
pub use profiles::{MassProfile, ProfileSpec};
