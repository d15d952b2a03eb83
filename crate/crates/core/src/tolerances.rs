//! Every pass/fail threshold used by the self-test and the acceptance suite.

/// Series vs quadrature: relative tolerance.
pub const ORACLE_REL: f64 = 1e-10;
/// Series vs quadrature: absolute floor.
pub const ORACLE_ABS: f64 = 1e-12;
/// Three-term recurrence residual, scaled by |u| + |v| + |n| + 1.
pub const RECURRENCE_SCALED: f64 = 1e-9;
/// Fourier reconstruction, absolute.
pub const FOURIER_ABS: f64 = 1e-8;
/// Addition theorem, absolute.
pub const ADDITION_ABS: f64 = 1e-8;
/// Reductions J_n(u,0,d) = J_n(u) and J_n(0,v,d), absolute.
pub const SPECIAL_CASE_ABS: f64 = 1e-15;
/// Airy Ai against reference values, relative.
pub const AIRY_REL: f64 = 1e-10;
/// Large-order Airy approximation of J_N, fraction of the scan maximum.
pub const AIRY_APPROX_OF_MAX: f64 = 0.05;
/// Mass shell and k.Pi identities, relative.
pub const KINEMATIC_REL: f64 = 1e-12;
/// The two expressions for y_m, relative.
pub const YM_IDENTITY_REL: f64 = 1e-10;
/// Stationarity of y at the located minimum, relative to y_m.
pub const STATIONARITY_REL: f64 = 1e-6;
/// Rescattering factor at the spectral peak.
pub const RESCATTER_RANGE: (f64, f64) = (0.3, 3.0);
/// General vs linear formula, relative.
pub const LINEAR_REDUCTION_REL: f64 = 1e-9;
/// General vs circular formula: E_B/eps0 plus this, relative.
pub const CIRCULAR_REDUCTION_EXTRA: f64 = 1e-9;
/// Relativistic vs nonrelativistic circular spectra near the peak.
pub const NONREL_REL: f64 = 0.10;
/// Direct channel sum vs Airy surrogate.
pub const DIRECT_VS_AIRY: f64 = 0.30;
/// Laplace evaluation of the Airy surrogate vs the strong-field closed form.
pub const LAPLACE_VS_STRONGFIELD: f64 = 0.25;
/// Tunneling exponent slope.
pub const TUNNELING_SLOPE: f64 = 0.10;
/// Grid error estimate above which a rate carries a warning.
pub const GRID_WARNING_FRACTION: f64 = 0.01;
/// eV round trip, relative.
pub const UNIT_ROUNDTRIP_REL: f64 = 1e-12;
/// Runtime budgets in seconds.
pub const BESSEL_SUITE_BUDGET_S: f64 = 60.0;
pub const SELFTEST_BUDGET_S: f64 = 120.0;
