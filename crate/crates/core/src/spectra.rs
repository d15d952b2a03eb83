//! Differential ionization probability dW/dOmega for a single channel N and
//! emission direction, with the rescattering amplitude kept separate from
//! the direct (KFR) amplitude.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{derive_params, Atom, ChannelKinematics, DerivedParams, LaserField};
use crate::specfun::bessel::{bessel_j_orders, signed_lookup};
use crate::specfun::genbessel::{cis_multiple, series_cutoff};
use crate::specfun::{ordinary_bessel, GenBesselTable, SeriesControl};

/// Rescattering toggle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormulaTag {
    /// Arbitrary polarization, relativistic.
    General,
    Circular,
    Linear,
    NonrelCircular,
    NonrelLinear,
}

impl FormulaTag {
    pub fn number(self) -> u8 {
        match self {
            FormulaTag::General => 42,
            FormulaTag::Circular => 44,
            FormulaTag::Linear => 55,
            FormulaTag::NonrelCircular => 56,
            FormulaTag::NonrelLinear => 59,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NonrelPolarization {
    Circular,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPoint {
    pub n: i64,
    pub theta: f64,
    pub phi: f64,
    pub dwdo: f64,
    /// dwdo with the rescattering amplitude removed.
    pub kfr_only_dwdo: f64,
    pub prefactor: f64,
    #[serde(skip)]
    pub kfr_amplitude: Complex64,
    #[serde(skip)]
    pub rescatter_amplitude: Complex64,
    /// |rescatter| / |kfr|; for the circular and nonrelativistic formulas
    /// this is the printed bracket correction r in (1 + r).
    pub rescatter_factor: f64,
    pub formula_tag: FormulaTag,
    pub below_threshold: bool,
}

impl SpectrumPoint {
    fn zero(n: i64, theta: f64, phi: f64, tag: FormulaTag) -> Self {
        SpectrumPoint {
            n,
            theta,
            phi,
            dwdo: 0.0,
            kfr_only_dwdo: 0.0,
            prefactor: 0.0,
            kfr_amplitude: Complex64::new(0.0, 0.0),
            rescatter_amplitude: Complex64::new(0.0, 0.0),
            rescatter_factor: 0.0,
            formula_tag: tag,
            below_threshold: true,
        }
    }

    /// Same point with the rescattering amplitude set to zero.
    pub fn with_rescattering_zeroed(&self) -> Self {
        let mut p = *self;
        p.rescatter_amplitude = Complex64::new(0.0, 0.0);
        p.rescatter_factor = 0.0;
        p.dwdo = squared(p.prefactor, p.kfr_amplitude, p.rescatter_amplitude);
        p
    }
}

fn squared(prefactor: f64, kfr: Complex64, resc: Complex64) -> f64 {
    let amp = (kfr + resc).norm_sqr();
    if amp == 0.0 {
        0.0
    } else {
        prefactor * amp
    }
}

fn ratio(resc: Complex64, kfr: Complex64) -> f64 {
    let (r, k) = (resc.norm(), kfr.norm());
    if r == 0.0 {
        0.0
    } else {
        r / k
    }
}

/// Per-field evaluator; holds everything that does not depend on (N, theta, phi).
#[derive(Debug, Clone)]
pub struct SpectrumCalc {
    field: LaserField,
    atom: Atom,
    params: DerivedParams,
    ctrl: SeriesControl,
    // J_n'(-alpha'(1 - zeta^2)/2) for n' = 0..=inner_max
    inner: Vec<f64>,
    inner_max: usize,
}

impl SpectrumCalc {
    pub fn new(field: &LaserField, atom: &Atom) -> Result<Self> {
        Self::with_control(field, atom, &SeriesControl::default())
    }

    pub fn with_control(field: &LaserField, atom: &Atom, ctrl: &SeriesControl) -> Result<Self> {
        ctrl.validate()?;
        let params = derive_params(field, atom)?;
        let x = -0.5 * params.alpha_prime * (1.0 - field.zeta * field.zeta);
        let inner_max = if x == 0.0 { 0 } else { ((x.abs().ceil() as usize) + 40).max(series_cutoff(x)) };
        let inner = bessel_j_orders(inner_max, x)?;
        Ok(SpectrumCalc { field: *field, atom: *atom, params, ctrl: *ctrl, inner, inner_max })
    }

    pub fn params(&self) -> &DerivedParams {
        &self.params
    }

    pub fn field(&self) -> &LaserField {
        &self.field
    }

    pub fn atom(&self) -> &Atom {
        &self.atom
    }

    fn channel(&self, n: i64, theta: f64, phi: f64) -> Result<Option<ChannelKinematics>> {
        match ChannelKinematics::compute(&self.field, &self.atom, &self.params, n, theta, phi) {
            Ok(ch) => Ok(Some(ch)),
            Err(Error::BelowThreshold { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn prefactor(&self, ch: &ChannelKinematics, nz: f64) -> f64 {
        let a5 = self.atom.a.powi(5);
        16.0 / (PI * a5) * nz * nz * ch.k_dot_pi * ch.k_dot_pi * ch.pi_abs / ch.g_sq.powi(4)
    }

    /// Relativistic formula matching the field's polarization.
    pub fn relativistic(&self, n: i64, theta: f64, phi: f64, mode: Mode) -> Result<SpectrumPoint> {
        if self.field.is_circular() {
            self.circular(n, theta, mode).map(|mut p| {
                p.phi = phi;
                p
            })
        } else if self.field.is_linear() {
            self.linear(n, theta, phi, mode)
        } else {
            self.general(n, theta, phi, mode)
        }
    }

    /// Arbitrary polarization.
    pub fn general(&self, n: i64, theta: f64, phi: f64, mode: Mode) -> Result<SpectrumPoint> {
        let tag = FormulaTag::General;
        let Some(ch) = self.channel(n, theta, phi)? else {
            return Ok(SpectrumPoint::zero(n, theta, phi, tag));
        };
        let ctx = |e: Error| Error::InChannel { n, theta, source: Box::new(e) };
        let zeta = self.field.zeta;
        let s = 1.0 - zeta * zeta;
        let nz = n as f64 - ch.big_z * (1.0 + zeta * zeta);
        let prefactor = self.prefactor(&ch, nz);
        let tp = ch.phase_angle;
        let order = n.unsigned_abs() as usize;

        let kfr_table = GenBesselTable::new(ch.alpha_amp, -0.5 * ch.big_z * s, tp, order, &self.ctrl).map_err(ctx)?;
        let kfr = cis_multiple(n, tp) * kfr_table.value(n).map_err(ctx)?;

        let mut resc = Complex64::new(0.0, 0.0);
        if mode == Mode::On {
            let m = self.inner_max as i64;
            let ap = self.params.alpha_prime;
            let c = GenBesselTable::new(
                ch.alpha_amp,
                0.5 * (ch.big_z - ap) * s,
                tp,
                order + 2 * self.inner_max + 2,
                &self.ctrl,
            )
            .map_err(ctx)?;
            let (e_m, e_p) = (cis_multiple(-2, tp), cis_multiple(2, tp));
            let w = self.field.omega;
            let eps0 = self.atom.epsilon0;
            let mut sum = Complex64::new(0.0, 0.0);
            for k in -m..=m {
                let jk = signed_lookup(&self.inner, k);
                if jk == 0.0 {
                    continue;
                }
                let idx = n - 2 * k;
                let cs = c.value(idx).map_err(ctx)?;
                let c2 = 0.5 * (c.value(idx - 2).map_err(ctx)? * e_m + c.value(idx + 2).map_err(ctx)? * e_p);
                let weight = (eps0 + 2.0 * k as f64 * w) * cs.conj() + w * ap * s * c2.conj();
                sum += cis_multiple(n - 2 * k, tp) * jk * weight;
            }
            resc = sum * (ch.g_sq / (2.0 * nz * ch.k_dot_pi));
        }
        Ok(self.point(&ch, tag, prefactor, kfr, resc, ratio(resc, kfr)))
    }

    /// Circular polarization, azimuth independent.
    pub fn circular(&self, n: i64, theta: f64, mode: Mode) -> Result<SpectrumPoint> {
        let tag = FormulaTag::Circular;
        if !self.field.is_circular() {
            return Err(Error::InvalidParameter("circular formula needs |zeta| = 1".into()));
        }
        let Some(ch) = self.channel(n, theta, 0.0)? else {
            return Ok(SpectrumPoint::zero(n, theta, 0.0, tag));
        };
        let nz = n as f64 - 2.0 * ch.big_z;
        let prefactor = self.prefactor(&ch, nz);
        let j = ordinary_bessel(n, ch.alpha_amp).map_err(|e| Error::InChannel { n, theta, source: Box::new(e) })?;
        let r = ch.g_sq / (2.0 * nz * ch.k_dot_pi);
        let kfr = Complex64::new(j, 0.0);
        let resc = if mode == Mode::On { Complex64::new(r * j, 0.0) } else { Complex64::new(0.0, 0.0) };
        let factor = if mode == Mode::On { r } else { 0.0 };
        Ok(self.point(&ch, tag, prefactor, kfr, resc, factor))
    }

    /// Linear polarization along e1; theta from k, phi from e1.
    pub fn linear(&self, n: i64, theta: f64, phi: f64, mode: Mode) -> Result<SpectrumPoint> {
        let tag = FormulaTag::Linear;
        if !self.field.is_linear() {
            return Err(Error::InvalidParameter("linear formula needs zeta = 0".into()));
        }
        let Some(ch) = self.channel(n, theta, phi)? else {
            return Ok(SpectrumPoint::zero(n, theta, phi, tag));
        };
        let ctx = |e: Error| Error::InChannel { n, theta, source: Box::new(e) };
        let nz = n as f64 - ch.big_z;
        let prefactor = self.prefactor(&ch, nz);
        let order = n.unsigned_abs() as usize;
        let kfr = GenBesselTable::new(ch.alpha_amp, -0.5 * ch.big_z, 0.0, order, &self.ctrl)
            .and_then(|t| t.value_real(n))
            .map_err(ctx)?;
        let mut resc = 0.0;
        if mode == Mode::On {
            let ap = self.params.alpha_prime;
            let w = self.field.omega;
            let eps0 = self.atom.epsilon0;
            let c = GenBesselTable::new(
                ch.alpha_amp,
                0.5 * (ch.big_z - ap),
                0.0,
                order + 2 * self.inner_max + 2,
                &self.ctrl,
            )
            .map_err(ctx)?;
            let m = self.inner_max as i64;
            let mut sum = 0.0;
            for k in -m..=m {
                let jk = signed_lookup(&self.inner, k);
                if jk == 0.0 {
                    continue;
                }
                let idx = n - 2 * k;
                let side = c.value_real(idx - 2).map_err(ctx)? + c.value_real(idx + 2).map_err(ctx)?;
                sum += jk * ((eps0 + 2.0 * k as f64 * w) * c.value_real(idx).map_err(ctx)? + 0.5 * w * ap * side);
            }
            resc = sum * ch.g_sq / (2.0 * nz * ch.k_dot_pi);
        }
        let (kfr, resc) = (Complex64::new(kfr, 0.0), Complex64::new(resc, 0.0));
        Ok(self.point(&ch, tag, prefactor, kfr, resc, ratio(resc, kfr)))
    }

    /// Nonrelativistic limit. For `Linear`, theta is measured from the
    /// polarization vector; for `Circular`, from k.
    pub fn nonrel(&self, n: i64, theta: f64, pol: NonrelPolarization, mode: Mode) -> Result<SpectrumPoint> {
        let w = self.field.omega;
        let xi = self.field.xi;
        let e_b = self.atom.e_b;
        let z = xi * xi / (4.0 * w);
        let (shift, tag) = match pol {
            NonrelPolarization::Circular => (2.0 * z, FormulaTag::NonrelCircular),
            NonrelPolarization::Linear => (z, FormulaTag::NonrelLinear),
        };
        let nz = n as f64 - shift;
        let kin = nz - e_b / w;
        if kin < 0.0 {
            return Ok(SpectrumPoint::zero(n, theta, 0.0, tag));
        }
        let ctx = |e: Error| Error::InChannel { n, theta, source: Box::new(e) };
        let prefactor = 8.0 * w / PI * (e_b / w).powf(2.5) * kin.sqrt() / (nz * nz);
        let r = kin / nz;
        let on = mode == Mode::On;
        let (kfr, dwdo, kfr_only) = match pol {
            NonrelPolarization::Circular => {
                let p = (2.0 * w * kin).sqrt();
                let j = ordinary_bessel(n, xi * p * theta.sin() / w).map_err(ctx)?;
                let kfr_only = squared(prefactor, Complex64::new(j, 0.0), Complex64::new(0.0, 0.0));
                let resc = if on { r * j } else { 0.0 };
                (j, squared(prefactor, Complex64::new(j, 0.0), Complex64::new(resc, 0.0)), kfr_only)
            }
            NonrelPolarization::Linear => {
                let chi = 8f64.sqrt() * kin.sqrt() * theta.cos();
                let u = z.sqrt() * chi;
                let order = n.unsigned_abs() as usize;
                let j = GenBesselTable::new(u, -0.5 * z, 0.0, order, &self.ctrl)
                    .and_then(|t| t.value_real(n))
                    .map_err(ctx)?;
                let kfr_only = prefactor * j * j;
                // the printed brace multiplies the probability, not the amplitude
                let dwdo = if on { kfr_only * (1.0 + r) } else { kfr_only };
                (j, dwdo, kfr_only)
            }
        };
        Ok(SpectrumPoint {
            n,
            theta,
            phi: 0.0,
            dwdo,
            kfr_only_dwdo: kfr_only,
            prefactor,
            kfr_amplitude: Complex64::new(kfr, 0.0),
            rescatter_amplitude: Complex64::new(if on { r * kfr } else { 0.0 }, 0.0),
            rescatter_factor: if on { r } else { 0.0 },
            formula_tag: tag,
            below_threshold: false,
        })
    }

    fn point(
        &self,
        ch: &ChannelKinematics,
        tag: FormulaTag,
        prefactor: f64,
        kfr: Complex64,
        resc: Complex64,
        factor: f64,
    ) -> SpectrumPoint {
        SpectrumPoint {
            n: ch.n,
            theta: ch.theta,
            phi: ch.phi,
            dwdo: squared(prefactor, kfr, resc),
            kfr_only_dwdo: squared(prefactor, kfr, Complex64::new(0.0, 0.0)),
            prefactor,
            kfr_amplitude: kfr,
            rescatter_amplitude: resc,
            rescatter_factor: factor,
            formula_tag: tag,
            below_threshold: false,
        }
    }
}

pub fn dwdo_general(
    field: &LaserField,
    atom: &Atom,
    n: i64,
    theta: f64,
    phi: f64,
    mode: Mode,
) -> Result<SpectrumPoint> {
    SpectrumCalc::new(field, atom)?.general(n, theta, phi, mode)
}

pub fn dwdo_circular(field: &LaserField, atom: &Atom, n: i64, theta: f64, mode: Mode) -> Result<SpectrumPoint> {
    SpectrumCalc::new(field, atom)?.circular(n, theta, mode)
}

pub fn dwdo_linear(field: &LaserField, atom: &Atom, n: i64, theta: f64, phi: f64, mode: Mode) -> Result<SpectrumPoint> {
    SpectrumCalc::new(field, atom)?.linear(n, theta, phi, mode)
}

pub fn dwdo_nonrel(
    field: &LaserField,
    atom: &Atom,
    n: i64,
    theta: f64,
    pol: NonrelPolarization,
) -> Result<SpectrumPoint> {
    SpectrumCalc::new(field, atom)?.nonrel(n, theta, pol, Mode::On)
}

/// First channel of the nonrelativistic sum, ceil(z - E_B/omega) at zero
/// final momentum, at least 1. Channels below the physical threshold
/// return zero-probability points.
pub fn nonrel_n0(field: &LaserField, atom: &Atom) -> i64 {
    let z = field.xi * field.xi / (4.0 * field.omega);
    ((z - atom.e_b / field.omega).ceil() as i64).max(1)
}
