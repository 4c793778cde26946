pub mod calderon;
pub mod error;
pub mod field;
pub mod grid;
pub mod io;
pub mod quadrature;
pub mod radial;
pub mod selftest;
pub mod special;
pub mod transform;
pub mod translation;
pub mod wavelet;

pub use error::{Error, Result};
pub use field::{Family, Field, Interpolation, RadialTable};
pub use grid::{Grid, WeinsteinParams};
pub use num_complex::Complex64 as C64;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
