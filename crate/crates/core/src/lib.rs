//! Irreversible evolution of a dipolar-coupled pair of identical spin-1/2
//! nuclei driven by a rotating radio-frequency field.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin_model`] builds the Zeeman, dipolar and RF matrices in the
//!   triplet/singlet basis and derives the level scheme.
//! * [`lineshape`] holds the Lorentzian distribution of the driving field,
//!   the decay rate of the `|-1>` state, the transition rate and the
//!   principal-value energy shift.
//! * [`kernel`] assembles the survival element `<-1|rho(t)|-1>` from its
//!   closed form, including the memory kernels `A(t)` and `B(t)`.
//! * [`oracle`] re-derives every closed-form integral by brute-force
//!   quadrature along independent routes. It is slow and meant for tests.
//! * [`figures`] is the configuration / CSV layer behind the command line tool.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod figures;
pub mod kernel;
pub mod lineshape;
pub mod oracle;
pub mod quadrature;
pub mod spin_model;

pub use error::{Error, Result};
