//! Second-order (Koplienko-type) spectral shift functions for pairs of
//! finite-dimensional contractions, with independent computational routes
//! for every trace formula and bound.

pub mod campaign;
pub mod cayley;
pub mod dilation;
pub mod error;
pub mod opcore;
pub mod par;
pub mod paths;
pub mod quadrature;
pub mod report;
pub mod sample;
pub mod semispectral;
pub mod shift;
pub mod truncate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use opcore::{ComplexMatrix, FourierFunction};
pub use par::Exec;
pub use paths::{PathKind, PathSpec};
pub use report::VerificationReport;
pub use shift::ShiftFunction;
