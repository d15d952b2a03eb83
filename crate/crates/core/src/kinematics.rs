//! Field and atom parameters and per-channel relativistic kinematics.
//!
//! Wave vector along +z, polarization basis e1 = x, e2 = y. The polar angle
//! `theta` is measured from k, the azimuth `phi` from e1.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fine-structure constant.
pub const ALPHA_FS: f64 = 1.0 / 137.035999;
/// Electron rest energy in eV, used to convert CLI inputs.
pub const ELECTRON_REST_ENERGY_EV: f64 = 510_998.95;

/// Elementary charge in natural units, e = sqrt(alpha).
pub fn charge() -> f64 {
    ALPHA_FS.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaserField {
    pub omega: f64,
    pub xi: f64,
    pub zeta: f64,
}

impl LaserField {
    pub fn new(omega: f64, xi: f64, zeta: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::InvalidParameter(format!("xi must be non-negative, got {xi}")));
        }
        if !(zeta.abs() <= 1.0) {
            return Err(Error::InvalidParameter(format!("|zeta| must not exceed 1, got {zeta}")));
        }
        Ok(LaserField { omega, xi, zeta })
    }

    pub fn circular(omega: f64, xi: f64) -> Result<Self> {
        Self::new(omega, xi, 1.0)
    }

    pub fn linear(omega: f64, xi: f64) -> Result<Self> {
        Self::new(omega, xi, 0.0)
    }

    pub fn is_circular(&self) -> bool {
        self.zeta.abs() == 1.0
    }

    pub fn is_linear(&self) -> bool {
        self.zeta == 0.0
    }

    /// m*^2 = 1 + xi^2 (1 + zeta^2) / 2.
    pub fn m_star_sq(&self) -> f64 {
        1.0 + 0.5 * self.xi * self.xi * (1.0 + self.zeta * self.zeta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub z_a: u32,
    pub e_b: f64,
    /// Bound-state radius, 2 e_b a^2 = 1.
    pub a: f64,
    pub epsilon0: f64,
    pub hydrogenic: bool,
}

impl Atom {
    /// Hydrogen-like ion with E_B = Z^2 alpha^2 / 2.
    pub fn hydrogenic(z_a: u32) -> Result<Self> {
        let z = z_a as f64;
        let mut atom = Self::with_binding_energy(z_a, 0.5 * z * z * ALPHA_FS * ALPHA_FS)?;
        atom.hydrogenic = true;
        Ok(atom)
    }

    pub fn with_binding_energy(z_a: u32, e_b: f64) -> Result<Self> {
        if z_a == 0 {
            return Err(Error::InvalidParameter("nuclear charge must be at least 1".into()));
        }
        if !(e_b > 0.0 && e_b < 1.0) {
            return Err(Error::InvalidParameter(format!("binding energy must lie in (0, 1), got {e_b}")));
        }
        Ok(Atom { z_a, e_b, a: 1.0 / (2.0 * e_b).sqrt(), epsilon0: 1.0 - e_b, hydrogenic: false })
    }
}

/// Caps and thresholds applied by `derive_params_with`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    pub born_threshold: f64,
    pub channel_cap: i64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { born_threshold: 0.2, channel_cap: 10_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    pub m_star: f64,
    pub alpha_prime: f64,
    pub n0: i64,
    pub f0: f64,
    pub f_at: f64,
    pub born_ratio: f64,
    pub born_valid: bool,
    pub v_mean: f64,
}

pub fn derive_params(field: &LaserField, atom: &Atom) -> Result<DerivedParams> {
    derive_params_with(field, atom, &Limits::default())
}

pub fn derive_params_with(field: &LaserField, atom: &Atom, limits: &Limits) -> Result<DerivedParams> {
    let (w, xi) = (field.omega, field.xi);
    let m_star = field.m_star_sq().sqrt();
    let approx = ((m_star - atom.epsilon0) / w).ceil();
    if !(approx <= limits.channel_cap as f64) {
        return Err(Error::ChannelExplosion { n0: approx.min(i64::MAX as f64) as i64, cap: limits.channel_cap });
    }
    let n0 = threshold(atom.epsilon0, w, m_star, approx as i64);
    let e = charge();
    let v_mean = xi / (1.0 + xi * xi).sqrt();
    let born_ratio = atom.z_a as f64 * ALPHA_FS / v_mean;
    Ok(DerivedParams {
        m_star,
        alpha_prime: xi * xi / (4.0 * w * atom.epsilon0),
        n0,
        f0: w * xi / e,
        f_at: (atom.z_a as f64).powi(3) * e.powi(5),
        born_ratio,
        born_valid: born_ratio <= limits.born_threshold,
        v_mean,
    })
}

// Smallest N with eps0 + N w >= m*, corrected for rounding in the ceiling.
fn threshold(eps0: f64, w: f64, m_star: f64, guess: i64) -> i64 {
    let mut n = guess.max(0);
    while n > 0 && eps0 + (n - 1) as f64 * w >= m_star {
        n -= 1;
    }
    while eps0 + n as f64 * w < m_star {
        n += 1;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelKinematics {
    pub n: i64,
    pub theta: f64,
    pub phi: f64,
    pub pi0: f64,
    pub pi_abs: f64,
    pub k_dot_pi: f64,
    pub big_z: f64,
    pub g_sq: f64,
    pub alpha_amp: f64,
    pub phase_angle: f64,
}

pub fn channel_kinematics(field: &LaserField, atom: &Atom, n: i64, theta: f64, phi: f64) -> Result<ChannelKinematics> {
    let p = derive_params(field, atom)?;
    ChannelKinematics::compute(field, atom, &p, n, theta, phi)
}

impl ChannelKinematics {
    /// As `channel_kinematics`, reusing already derived parameters.
    pub fn compute(
        field: &LaserField,
        atom: &Atom,
        params: &DerivedParams,
        n: i64,
        theta: f64,
        phi: f64,
    ) -> Result<Self> {
        if n < params.n0 {
            return Err(Error::BelowThreshold { n, n0: params.n0 });
        }
        let w = field.omega;
        let m = params.m_star;
        let pi0 = atom.epsilon0 + n as f64 * w;
        let pi_abs = ((pi0 - m) * (pi0 + m)).max(0.0).sqrt();
        let (sin_t, _) = theta.sin_cos();
        let half = (0.5 * theta).sin();
        let one_minus_cos = 2.0 * half * half;
        // pi0 - |Pi| cos(theta), written without cancellation
        let light_cone = m * m / (pi0 + pi_abs) + pi_abs * one_minus_cos;
        let k_dot_pi = w * light_cone;
        let nw = n as f64 * w;
        let g_sq = (pi_abs - nw).powi(2) + 2.0 * nw * pi_abs * one_minus_cos;
        let (sin_p, cos_p) = phi.sin_cos();
        let z = field.zeta;
        let transverse = pi_abs * sin_t;
        let alpha_amp = field.xi * transverse * (cos_p * cos_p + z * z * sin_p * sin_p).sqrt() / k_dot_pi;
        let phase_angle = (z * transverse * sin_p).atan2(transverse * cos_p);
        Ok(ChannelKinematics {
            n,
            theta,
            phi,
            pi0,
            pi_abs,
            k_dot_pi,
            big_z: field.xi * field.xi / (4.0 * k_dot_pi),
            g_sq,
            alpha_amp,
            phase_angle,
        })
    }

    /// Free-electron four-momentum p = Pi - k Z (1 + zeta^2) as (p0, px, py, pz).
    pub fn free_momentum(&self, field: &LaserField) -> [f64; 4] {
        let shift = field.omega * self.big_z * (1.0 + field.zeta * field.zeta);
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.pi0 - shift, self.pi_abs * st * cp, self.pi_abs * st * sp, self.pi_abs * ct - shift]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk() -> (LaserField, Atom) {
        (LaserField::circular(0.01, 1.0).unwrap(), Atom::hydrogenic(1).unwrap())
    }

    #[test]
    fn field_off_identity() {
        let f = LaserField::circular(0.01, 0.0).unwrap();
        let p = derive_params(&f, &Atom::hydrogenic(1).unwrap()).unwrap();
        assert_eq!(p.m_star, 1.0);
        assert_eq!(p.f0, 0.0);
        assert!(!p.born_valid);
    }

    #[test]
    fn effective_mass_and_mean_speed() {
        let (f, a) = desk();
        let p = derive_params(&f, &a).unwrap();
        assert!((p.m_star - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.v_mean - 0.5f64.sqrt()).abs() < 1e-15);
        let lin = derive_params(&LaserField::linear(0.01, 1.0).unwrap(), &a).unwrap();
        assert!((lin.m_star - 1.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn atom_invariants() {
        let a = Atom::hydrogenic(3).unwrap();
        assert!(a.hydrogenic);
        assert_eq!(a.epsilon0, 1.0 - a.e_b);
        assert!((2.0 * a.e_b * a.a * a.a - 1.0).abs() < 1e-15);
        assert!((a.e_b - 4.5 * ALPHA_FS * ALPHA_FS).abs() < 1e-18);
        assert!(!Atom::with_binding_energy(1, 1e-5).unwrap().hydrogenic);
        assert!(Atom::with_binding_energy(1, 1.5).is_err());
    }

    #[test]
    fn channel_cap() {
        let f = LaserField::circular(1e-9, 1.0).unwrap();
        let r = derive_params(&f, &Atom::hydrogenic(1).unwrap());
        assert!(matches!(r, Err(Error::ChannelExplosion { .. })));
    }

    #[test]
    fn below_threshold_is_an_error() {
        let (f, a) = desk();
        let n0 = derive_params(&f, &a).unwrap().n0;
        assert!(matches!(channel_kinematics(&f, &a, n0 - 1, 0.3, 0.0), Err(Error::BelowThreshold { .. })));
        let ch = channel_kinematics(&f, &a, n0, 0.3, 0.0).unwrap();
        assert!(ch.pi_abs >= 0.0);
    }

    #[test]
    fn forward_direction() {
        let (f, a) = desk();
        let ch = channel_kinematics(&f, &a, 120, 0.0, 1.0).unwrap();
        assert_eq!(ch.alpha_amp, 0.0);
        assert!((ch.g_sq - (ch.pi_abs - 120.0 * 0.01).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn circular_amplitude_is_azimuth_free() {
        let (f, a) = desk();
        let x = channel_kinematics(&f, &a, 110, 0.7, 0.0).unwrap().alpha_amp;
        for phi in [0.5, 2.0, 4.0, 6.0] {
            let y = channel_kinematics(&f, &a, 110, 0.7, phi).unwrap().alpha_amp;
            assert!((x - y).abs() < 1e-13 * x);
        }
    }
}
