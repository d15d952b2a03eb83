//! Relativistic above-threshold ionization of hydrogenic atoms in intense
//! plane-wave laser fields.
//!
//! Natural units throughout: hbar = c = m = 1, charge `e` with e^2 the fine
//! structure constant. Photon energies and binding energies are in units of
//! the electron rest energy.

pub mod error;
pub mod kinematics;
pub mod numeric;
pub mod rates;
pub mod selftest;
pub mod specfun;
pub mod spectra;
pub mod tolerances;

pub use error::{Error, Result};
pub use kinematics::{Atom, ChannelKinematics, DerivedParams, LaserField, Limits};
pub use rates::{Method, RateSummary, Regime, SaddleInfo};
pub use spectra::{FormulaTag, Mode, NonrelPolarization, SpectrumCalc, SpectrumPoint};
