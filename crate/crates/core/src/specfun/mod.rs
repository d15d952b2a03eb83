//! Special functions: ordinary and generalized Bessel functions, Airy Ai.

pub mod airy;
pub mod bessel;
pub mod genbessel;

pub use airy::{airy_ai, airy_ai_asymptotic, airy_ai_prime, airy_ai_squared_tail, airy_pair, bessel_airy_approx};
pub use bessel::{bessel_j_orders, ordinary_bessel};
pub use genbessel::{
    gen_bessel, gen_bessel_quadrature, gen_bessel_real, gen_bessel_with, quadrature_nodes, GenBesselTable,
    SeriesControl,
};

/// Gamma(2/3).
pub const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_5;
