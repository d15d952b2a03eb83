//! Two-argument generalized Bessel functions
//!
//!   J_n(u, v, d) = (1/2pi) int_{-pi}^{pi} exp(i[u sin(t + d) + v sin 2t - n(t + d)]) dt
//!
//! or equivalently
//!
//!   J_n(u, v, d) = sum_k exp(-2ikd) J_{n-2k}(u) J_k(v).
//!
//! `GenBesselTable` fixes (u, v, d) and answers many orders from one pair of
//! ordinary Bessel tables; the quadrature form is kept as an oracle.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::{bessel_j_orders, signed_lookup};
use crate::error::{Error, Result};

/// Truncation controls for the series form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Stop once |J_k(v)| falls below `rel_tol` times the running sum.
    pub rel_tol: f64,
    /// Magnitudes below this are treated as zero.
    pub abs_floor: f64,
    pub max_terms: usize,
    /// Minimum node count for the quadrature form.
    pub quad_points: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { rel_tol: 1e-15, abs_floor: 1e-15, max_terms: 200_000, quad_points: 256 }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(Error::InvalidParameter(format!("rel_tol {} not in (0, 1e-6]", self.rel_tol)));
        }
        if !(self.abs_floor >= 0.0) {
            return Err(Error::InvalidParameter("abs_floor must be non-negative".into()));
        }
        if self.quad_points < 64 || self.quad_points % 2 == 1 {
            return Err(Error::InvalidParameter("quad_points must be even and >= 64".into()));
        }
        Ok(())
    }
}

/// Wraps an angle into (-pi, pi].
pub fn reduce_angle(d: f64) -> f64 {
    let mut r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// exp(i k a), exact when a is a multiple of pi/2.
pub fn cis_multiple(k: i64, a: f64) -> Complex64 {
    let q = 2.0 * a / PI;
    if q == q.round() && q.abs() <= 4.0 {
        match (k * q as i64).rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    } else {
        Complex64::from_polar(1.0, k as f64 * a)
    }
}

/// Smallest series cut-off before the adaptive tail test kicks in.
pub fn series_cutoff(v: f64) -> usize {
    let av = v.abs();
    (av + 10.0 * av.cbrt() + 10.0).ceil() as usize
}

/// Node count needed by the trapezoid form.
pub fn quadrature_nodes(n: i64, u: f64, v: f64) -> usize {
    2 * (n.unsigned_abs() as usize + u.abs().ceil() as usize + 2 * v.abs().ceil() as usize) + 64
}

#[derive(Debug, Clone)]
pub struct GenBesselTable {
    u: f64,
    v: f64,
    delta: f64,
    max_order: usize,
    k_start: usize,
    ju: Vec<f64>,
    jv: Vec<f64>,
    // exp(-2ikd) for k = 0..=k_cap
    phase: Vec<Complex64>,
    ctrl: SeriesControl,
}

impl GenBesselTable {
    /// Table valid for |n| <= `max_order`.
    pub fn new(u: f64, v: f64, delta: f64, max_order: usize, ctrl: &SeriesControl) -> Result<Self> {
        ctrl.validate()?;
        if !(u.is_finite() && v.is_finite() && delta.is_finite()) {
            return Err(Error::Range(format!("non-finite argument u={u}, v={v}, delta={delta}")));
        }
        let delta = reduce_angle(delta);
        let k_start = series_cutoff(v);
        let k_cap = 2 * k_start + 64;
        if 2 * k_cap + 1 > ctrl.max_terms {
            return Err(Error::Convergence { terms: ctrl.max_terms, residual: f64::NAN });
        }
        let jv = bessel_j_orders(k_cap, v)?;
        let ju = bessel_j_orders(max_order + 2 * k_cap, u)?;
        let phase = (0..=k_cap as i64).map(|k| cis_multiple(-2 * k, delta)).collect();
        Ok(GenBesselTable { u, v, delta, max_order, k_start, ju, jv, phase, ctrl: *ctrl })
    }

    pub fn args(&self) -> (f64, f64, f64) {
        (self.u, self.v, self.delta)
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// J_n(u, v, d).
    pub fn value(&self, n: i64) -> Result<Complex64> {
        self.check_order(n)?;
        let mut sum = Complex64::new(signed_lookup(&self.ju, n) * self.jv[0], 0.0);
        let k_cap = self.jv.len() - 1;
        for k in 1..=k_cap {
            let jk = self.jv[k];
            let sk = if k % 2 == 1 { -jk } else { jk }; // J_{-k}(v)
            let a = signed_lookup(&self.ju, n - 2 * k as i64) * jk;
            let b = signed_lookup(&self.ju, n + 2 * k as i64) * sk;
            let p = self.phase[k];
            sum += p * a + p.conj() * b;
            if k >= self.k_start && self.converged(jk, sum.norm()) {
                return Ok(sum);
            }
        }
        Err(Error::Convergence { terms: 2 * k_cap + 1, residual: self.jv[k_cap].abs() })
    }

    /// Real value for d = 0, where the function is real.
    pub fn value_real(&self, n: i64) -> Result<f64> {
        if self.delta != 0.0 {
            return Err(Error::InvalidParameter("value_real needs delta = 0".into()));
        }
        self.check_order(n)?;
        let mut sum = signed_lookup(&self.ju, n) * self.jv[0];
        let k_cap = self.jv.len() - 1;
        for k in 1..=k_cap {
            let jk = self.jv[k];
            let sk = if k % 2 == 1 { -jk } else { jk };
            sum += signed_lookup(&self.ju, n - 2 * k as i64) * jk + signed_lookup(&self.ju, n + 2 * k as i64) * sk;
            if k >= self.k_start && self.converged(jk, sum.abs()) {
                return Ok(sum);
            }
        }
        Err(Error::Convergence { terms: 2 * k_cap + 1, residual: self.jv[k_cap].abs() })
    }

    fn converged(&self, jk: f64, sum_abs: f64) -> bool {
        jk.abs() <= self.ctrl.rel_tol * sum_abs.max(self.ctrl.abs_floor)
    }

    fn check_order(&self, n: i64) -> Result<()> {
        if n.unsigned_abs() as usize > self.max_order {
            return Err(Error::Range(format!("order {n} beyond table size {}", self.max_order)));
        }
        Ok(())
    }
}

/// J_n(u, v, d) by the series.
pub fn gen_bessel(n: i64, u: f64, v: f64, delta: f64) -> Result<Complex64> {
    gen_bessel_with(n, u, v, delta, &SeriesControl::default())
}

pub fn gen_bessel_with(n: i64, u: f64, v: f64, delta: f64, ctrl: &SeriesControl) -> Result<Complex64> {
    GenBesselTable::new(u, v, delta, n.unsigned_abs() as usize, ctrl)?.value(n)
}

/// J_n(u, v) = J_n(u, v, 0), real.
pub fn gen_bessel_real(n: i64, u: f64, v: f64) -> Result<f64> {
    GenBesselTable::new(u, v, 0.0, n.unsigned_abs() as usize, &SeriesControl::default())?.value_real(n)
}

/// Trapezoid evaluation of the defining integral with `nodes` equispaced
/// points; spectrally accurate for a periodic integrand once `nodes` is at
/// least `quadrature_nodes(n, u, v)`.
pub fn gen_bessel_quadrature(n: i64, u: f64, v: f64, delta: f64, nodes: usize) -> Result<Complex64> {
    let need = quadrature_nodes(n, u, v);
    if nodes < need {
        return Err(Error::Range(format!("{nodes} quadrature nodes, need at least {need}")));
    }
    let h = 2.0 * PI / nodes as f64;
    let nf = n as f64;
    let mut re = 0.0;
    let mut im = 0.0;
    for j in 0..nodes {
        let t = -PI + h * j as f64;
        let ph = u * (t + delta).sin() + v * (2.0 * t).sin() - nf * (t + delta);
        re += ph.cos();
        im += ph.sin();
    }
    Ok(Complex64::new(re / nodes as f64, im / nodes as f64))
}
