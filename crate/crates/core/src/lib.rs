//! Wave-packet parametrix for `u_tt = a(x) u_xx` on the torus with rough,
//! C^{1,1} coefficient `a`, plus the Volterra correction that turns it into
//! an exact solver and the perturbation-study harness built on top of it.
//!
//! Layout, bottom up: [`field`] (grids, spectra, norms, metrics),
//! [`dyadic`] (Littlewood-Paley bands and band symbols), [`fbi`]
//! (wave packet transform), [`hamflow`] (bicharacteristic flow),
//! [`parametrix`], [`solver`] and [`lab`].

pub mod dyadic;
pub mod error;
pub mod fbi;
pub mod field;
pub mod fit;
pub mod hamflow;
pub mod io;
pub mod lab;
pub mod parametrix;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
