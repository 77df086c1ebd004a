//! Analytic test functions, certified zero localization and weighted zero
//! sums for growth envelopes with boundary singularities on the disk, the
//! upper half-plane and the slit plane `C \ [0, inf)`.
//!
//! ```
//! use blaschke_core::zerofind::blaschke_product;
//! use num_complex::Complex64;
//!
//! let f = blaschke_product(&[Complex64::new(0.5, 0.0)]).unwrap();
//! assert!(f.eval(Complex64::new(0.5, 0.0)).unwrap().norm() < 1e-15);
//! ```

pub mod conformal;
pub mod error;
pub mod math;
pub mod parallel;
pub mod sums;
pub mod zerofind;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use parallel::Execution;
