//! Sharp constants, dual certificates and numerical extremizers for the
//! radial Fourier uncertainty functional
//!
//! ```text
//! C(mu) = (sup_t |mu^(t)| t^beta)^alpha * (int |x|^alpha d|mu|)^beta / |mu|^(alpha+beta)
//! ```
//!
//! over finite radial measures on `R^d`.

pub mod certificates;
pub mod cli;
pub mod constants;
pub mod error;
pub mod json;
pub mod lp;
pub mod positivity;
pub mod quadrature;
pub mod radial;
pub mod special;

pub use error::{Error, Result};
