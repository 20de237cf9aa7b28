//! Local zeta functions `Z(s) = ∫ |f|^s φ` of two-variable smooth model
//! functions `f = v(x, y) x^a y^b + flat terms`, their meromorphic
//! continuation, Newton polyhedra and van der Corput-type bounds.

pub mod error;
pub mod funcmodel;
pub mod model1d;
pub mod model2d;
pub mod newton;
pub mod quad;
pub mod series;
pub mod vdc;
pub mod zeta;

pub use error::{Result, ZetaError};

pub type C64 = num_complex::Complex64;
