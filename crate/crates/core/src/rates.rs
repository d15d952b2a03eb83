//! Total ionization rates: direct channel summation, numerical integration
//! of the Airy-function surrogate, and the closed-form strong-field and
//! tunneling limits.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{charge, derive_params, Atom, DerivedParams, LaserField};
use crate::numeric::{composite_gauss_legendre, pairwise_sum};
use crate::specfun::{airy_ai, airy_ai_squared_tail, GAMMA_TWO_THIRDS};
use crate::spectra::{Mode, SpectrumCalc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    MultiphotonStrongfield,
    Tunneling,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Direct,
    AiryNumeric,
    StrongfieldClosed,
    TunnelingClosed,
}

/// y_m boundaries between regimes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    pub strongfield_max: f64,
    pub tunneling_min: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds { strongfield_max: 0.1, tunneling_min: 10.0 }
    }
}

impl RegimeThresholds {
    pub fn classify(&self, y_m: f64) -> Regime {
        if y_m <= self.strongfield_max {
            Regime::MultiphotonStrongfield
        } else if y_m >= self.tunneling_min {
            Regime::Tunneling
        } else {
            Regime::Intermediate
        }
    }
}

/// Numerically located minimum of y(N, theta).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryPoint {
    pub n: f64,
    pub theta: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SaddleInfo {
    /// (m*^2 - eps0^2) / (eps0 omega).
    pub n_m: f64,
    /// (m*^2 - 1) / omega, i.e. xi^2/omega for circular polarization.
    pub n_m_asymptotic: f64,
    pub theta_m: f64,
    /// 2^{1/3} E_B / (N_m^{1/3} omega) with the asymptotic N_m.
    pub y_m: f64,
    /// y evaluated at (n_m, theta_m).
    pub y_at_peak: f64,
    pub stationary: Option<StationaryPoint>,
    pub delta_n: f64,
    pub delta_theta: f64,
    pub regime: Regime,
}

/// Continuous-N kinematics on the peak azimuth (phi = 0).
#[derive(Debug, Clone, Copy)]
struct Kin {
    pi_abs: f64,
    k_dot_pi: f64,
    g_sq: f64,
    alpha: f64,
    big_z: f64,
}

fn kin(field: &LaserField, atom: &Atom, m_star: f64, n: f64, theta: f64) -> Option<Kin> {
    let w = field.omega;
    let pi0 = atom.epsilon0 + n * w;
    if pi0 < m_star {
        return None;
    }
    let pi_abs = ((pi0 - m_star) * (pi0 + m_star)).sqrt();
    let half = (0.5 * theta).sin();
    let omc = 2.0 * half * half;
    let k_dot_pi = w * (m_star * m_star / (pi0 + pi_abs) + pi_abs * omc);
    let nw = n * w;
    let g_sq = (pi_abs - nw).powi(2) + 2.0 * nw * pi_abs * omc;
    Some(Kin {
        pi_abs,
        k_dot_pi,
        g_sq,
        alpha: field.xi * pi_abs * theta.sin() / k_dot_pi,
        big_z: field.xi * field.xi / (4.0 * k_dot_pi),
    })
}

/// Airy argument y(N, theta) = (N/2)^{2/3} (1 - alpha^2/N^2), N continuous.
pub fn airy_argument(field: &LaserField, atom: &Atom, n: f64, theta: f64) -> Option<f64> {
    let m = field.m_star_sq().sqrt();
    kin(field, atom, m, n, theta).map(|k| y_of(n, k.alpha))
}

fn y_of(n: f64, alpha: f64) -> f64 {
    let q = alpha / n;
    (0.5 * n).powf(2.0 / 3.0) * (1.0 - q) * (1.0 + q)
}

pub fn saddle_point(field: &LaserField, atom: &Atom) -> Result<SaddleInfo> {
    saddle_point_with(field, atom, &RegimeThresholds::default())
}

pub fn saddle_point_with(field: &LaserField, atom: &Atom, thresholds: &RegimeThresholds) -> Result<SaddleInfo> {
    if !(field.xi > 0.0) {
        return Err(Error::InvalidParameter("saddle point needs xi > 0".into()));
    }
    let params = derive_params(field, atom)?;
    let w = field.omega;
    let eps0 = atom.epsilon0;
    let m2 = field.m_star_sq();
    let n_m = (m2 - eps0 * eps0) / (eps0 * w);
    if n_m < params.n0 as f64 {
        return Err(Error::DegenerateSaddle { n_m, n0: params.n0 });
    }
    let n_m_asymptotic = (m2 - 1.0) / w;
    let pi0 = eps0 + n_m * w;
    let pi_abs = ((pi0 - params.m_star) * (pi0 + params.m_star)).sqrt();
    let theta_m = (pi_abs / pi0).acos();
    let y_m = 2f64.cbrt() * atom.e_b / (n_m_asymptotic.cbrt() * w);
    let y_at_peak = airy_argument(field, atom, n_m, theta_m).unwrap_or(f64::NAN);
    Ok(SaddleInfo {
        n_m,
        n_m_asymptotic,
        theta_m,
        y_m,
        y_at_peak,
        stationary: stationary_point(field, atom, &params, n_m),
        delta_n: 2.0 * (0.5 * n_m).powf(2.0 / 3.0),
        delta_theta: (0.5 * n_m).powf(-1.0 / 3.0) / (1.0 + field.xi * field.xi).sqrt(),
        regime: thresholds.classify(y_m),
    })
}

// At fixed N, y is minimised by cos(theta) = |Pi|/Pi0 where alpha = xi|Pi|/(omega m*).
// Along that ridge dy/dN has the sign of G below, which is negative at
// threshold and positive at n_m whenever an interior minimum exists.
fn stationary_point(field: &LaserField, atom: &Atom, params: &DerivedParams, n_m: f64) -> Option<StationaryPoint> {
    let w = field.omega;
    let eps0 = atom.epsilon0;
    let m = params.m_star;
    let m2 = m * m;
    let xi2 = field.xi * field.xi;
    let g = |n: f64| {
        let p = eps0 + n * w;
        let d = p - eps0;
        let a = xi2 * (p * p - m2) / (m2 * d * d);
        let da = 2.0 * xi2 * (m2 - p * eps0) / (m2 * d * d * d);
        2.0 / 3.0 * (1.0 - a) - n * w * da
    };
    let mut lo = (m - eps0) / w;
    let mut hi = n_m;
    if !(g(lo) < 0.0 && g(hi) > 0.0) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let n = 0.5 * (lo + hi);
    let p = eps0 + n * w;
    let theta = (((p - m) * (p + m)).sqrt() / p).acos();
    let y = airy_argument(field, atom, n, theta)?;
    Some(StationaryPoint { n, theta, y })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridReport {
    pub channels: usize,
    pub n_first: i64,
    pub n_last: i64,
    /// Nodes in the N direction (continuous-N methods).
    pub n_nodes: usize,
    pub theta_nodes: usize,
    pub phi_panels: usize,
    /// |fine - coarse| from one refinement level.
    pub error_estimate: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateSummary {
    pub w_total: f64,
    pub method: Method,
    pub saddle: Option<SaddleInfo>,
    pub regime: Option<Regime>,
    pub grid_report: Option<GridReport>,
    pub warnings: Vec<String>,
}

/// Quadrature controls for `rate_direct`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectGrid {
    /// Gauss-Legendre panels in cos(theta) on the coarse level.
    pub theta_panels: usize,
    pub nodes_per_panel: usize,
    /// Uniform azimuth samples on the coarse level (non-circular only).
    pub phi_panels: usize,
    /// Inclusive channel range; default n0 ..= n_m + 6 delta_n.
    pub n_range: Option<(i64, i64)>,
    pub channel_cap: i64,
}

impl Default for DirectGrid {
    fn default() -> Self {
        DirectGrid { theta_panels: 16, nodes_per_panel: 8, phi_panels: 16, n_range: None, channel_cap: 1_000_000 }
    }
}

pub fn rate_direct(field: &LaserField, atom: &Atom, grid: &DirectGrid, mode: Mode) -> Result<RateSummary> {
    let calc = SpectrumCalc::new(field, atom)?;
    let n0 = calc.params().n0;
    let saddle = if field.xi > 0.0 { saddle_point(field, atom).ok() } else { None };
    let regime = saddle.map(|s| s.regime);
    if field.xi == 0.0 {
        return Ok(RateSummary {
            w_total: 0.0,
            method: Method::Direct,
            saddle,
            regime,
            grid_report: Some(GridReport {
                channels: 0,
                n_first: n0,
                n_last: n0 - 1,
                n_nodes: 0,
                theta_nodes: 0,
                phi_panels: 0,
                error_estimate: 0.0,
                converged: true,
            }),
            warnings: vec!["field off: every channel has zero coupling".into()],
        });
    }
    let (lo, hi) = match (grid.n_range, saddle) {
        (Some((a, b)), _) => (a.max(n0), b),
        (None, Some(s)) => (n0, (s.n_m + 6.0 * s.delta_n).floor() as i64),
        (None, None) => {
            return Err(saddle_point(field, atom).err().unwrap_or(Error::InvalidParameter("no channel range".into())))
        }
    };
    if hi < lo {
        return Err(Error::InvalidParameter(format!("empty channel range [{lo}, {hi}]")));
    }
    if hi - lo + 1 > grid.channel_cap {
        return Err(Error::ChannelExplosion { n0: hi - lo + 1, cap: grid.channel_cap });
    }
    let coarse = direct_sum(&calc, lo, hi, grid, 1, mode)?;
    let fine = direct_sum(&calc, lo, hi, grid, 2, mode)?;
    let error_estimate = (fine - coarse).abs();
    let converged = error_estimate <= 0.01 * fine;
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!("angular grid not converged: estimate {error_estimate:e} exceeds 1% of {fine:e}"));
    }
    Ok(RateSummary {
        w_total: fine,
        method: Method::Direct,
        saddle,
        regime,
        grid_report: Some(GridReport {
            channels: (hi - lo + 1) as usize,
            n_first: lo,
            n_last: hi,
            n_nodes: 0,
            theta_nodes: 2 * grid.theta_panels * grid.nodes_per_panel,
            phi_panels: if field.is_circular() { 0 } else { 2 * grid.phi_panels },
            error_estimate,
            converged,
        }),
        warnings,
    })
}

fn direct_sum(calc: &SpectrumCalc, lo: i64, hi: i64, grid: &DirectGrid, level: usize, mode: Mode) -> Result<f64> {
    let (xs, ws) = composite_gauss_legendre(-1.0, 1.0, grid.theta_panels * level, grid.nodes_per_panel);
    let circular = calc.field().is_circular();
    let nphi = grid.phi_panels * level;
    let per_channel: Vec<f64> = (lo..=hi)
        .into_par_iter()
        .map(|n| {
            let mut terms = Vec::with_capacity(xs.len());
            for (x, w) in xs.iter().zip(&ws) {
                let theta = x.acos();
                if circular {
                    terms.push(2.0 * PI * w * calc.circular(n, theta, mode)?.dwdo);
                } else {
                    let mut ring = Vec::with_capacity(nphi);
                    for k in 0..nphi {
                        let phi = 2.0 * PI * k as f64 / nphi as f64;
                        ring.push(calc.relativistic(n, theta, phi, mode)?.dwdo);
                    }
                    terms.push(2.0 * PI / nphi as f64 * w * pairwise_sum(&ring));
                }
            }
            Ok(pairwise_sum(&terms))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(pairwise_sum(&per_channel))
}

/// Quadrature controls for `rate_airy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryGrid {
    /// N step is delta_n / n_per_width on the coarse level.
    pub n_per_width: usize,
    pub theta_panels: usize,
    pub nodes_per_panel: usize,
    /// Half-width of the theta window in units of delta_theta.
    pub theta_window: f64,
}

impl Default for AiryGrid {
    fn default() -> Self {
        AiryGrid { n_per_width: 64, theta_panels: 16, nodes_per_panel: 8, theta_window: 12.0 }
    }
}

/// Integrand of the Airy surrogate, without the 2^5/a^5 prefactor and
/// including the sin(theta) Jacobian. Zero outside the transition region
/// alpha/N >= 1/2, where the Airy form of J_N does not apply.
pub fn airy_integrand(field: &LaserField, atom: &Atom, n: f64, theta: f64) -> f64 {
    let m = field.m_star_sq().sqrt();
    let Some(k) = kin(field, atom, m, n, theta) else {
        return 0.0;
    };
    if k.alpha < 0.5 * n {
        return 0.0;
    }
    let ai = airy_ai(y_of(n, k.alpha));
    if ai == 0.0 {
        return 0.0;
    }
    let nz = n - 2.0 * k.big_z;
    let r = k.g_sq / (2.0 * nz * k.k_dot_pi);
    let weight = (2.0 / n).powf(2.0 / 3.0) * nz * nz * k.k_dot_pi * k.k_dot_pi * k.pi_abs / k.g_sq.powi(4);
    weight * ai * ai * (1.0 + r).powi(2) * theta.sin()
}

pub fn rate_airy(field: &LaserField, atom: &Atom) -> Result<RateSummary> {
    rate_airy_with(field, atom, &AiryGrid::default())
}

pub fn rate_airy_with(field: &LaserField, atom: &Atom, grid: &AiryGrid) -> Result<RateSummary> {
    if !field.is_circular() {
        return Err(Error::AsymptoticsInvalid("the Airy surrogate is derived for circular polarization".into()));
    }
    let s = saddle_point(field, atom)?;
    if s.n_m < 50.0 {
        return Err(Error::AsymptoticsInvalid(format!("N_m = {} is below 50", s.n_m)));
    }
    let n0 = derive_params(field, atom)?.n0;
    let lo = n0 as f64;
    let hi = s.n_m + 6.0 * s.delta_n;
    let t_lo = (s.theta_m - grid.theta_window * s.delta_theta).max(0.0);
    let t_hi = (s.theta_m + grid.theta_window * s.delta_theta).min(PI);
    let run = |level: usize| -> (f64, usize, usize) {
        let steps = ((hi - lo) / s.delta_n * (grid.n_per_width * level) as f64).ceil().max(1.0) as usize;
        let h = (hi - lo) / steps as f64;
        let (ts, tw) = composite_gauss_legendre(t_lo, t_hi, grid.theta_panels * level, grid.nodes_per_panel);
        let rows: Vec<f64> = (0..=steps)
            .into_par_iter()
            .map(|i| {
                let n = lo + h * i as f64;
                let end = if i == 0 || i == steps { 0.5 } else { 1.0 };
                let vals: Vec<f64> = ts.iter().zip(&tw).map(|(t, w)| w * airy_integrand(field, atom, n, *t)).collect();
                end * h * pairwise_sum(&vals)
            })
            .collect();
        (32.0 / atom.a.powi(5) * pairwise_sum(&rows), steps + 1, ts.len())
    };
    let (coarse, _, _) = run(1);
    let (fine, n_nodes, theta_nodes) = run(2);
    let error_estimate = (fine - coarse).abs();
    let converged = error_estimate <= 0.01 * fine;
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!("Airy-surrogate grid not converged: estimate {error_estimate:e}"));
    }
    Ok(RateSummary {
        w_total: fine,
        method: Method::AiryNumeric,
        saddle: Some(s),
        regime: Some(s.regime),
        grid_report: Some(GridReport {
            channels: 0,
            n_first: n0,
            n_last: hi.floor() as i64,
            n_nodes,
            theta_nodes,
            phi_panels: 0,
            error_estimate,
            converged,
        }),
        warnings,
    })
}

/// Laplace evaluation of the Airy-surrogate integral about the minimum of y:
/// weights frozen at the stationary point, y expanded to second order.
pub fn rate_laplace(field: &LaserField, atom: &Atom) -> Result<f64> {
    let s = saddle_point(field, atom)?;
    let st = s.stationary.ok_or_else(|| Error::AsymptoticsInvalid("y(N, theta) has no interior minimum".into()))?;
    let y = |n: f64, t: f64| airy_argument(field, atom, n, t).unwrap_or(f64::NAN);
    let hn = 0.02 * s.delta_n;
    let ht = 0.02 * s.delta_theta;
    let (n, t) = (st.n, st.theta);
    let y0 = y(n, t);
    let ynn = (y(n + hn, t) - 2.0 * y0 + y(n - hn, t)) / (hn * hn);
    let ytt = (y(n, t + ht) - 2.0 * y0 + y(n, t - ht)) / (ht * ht);
    let ynt = (y(n + hn, t + ht) - y(n + hn, t - ht) - y(n - hn, t + ht) + y(n - hn, t - ht)) / (4.0 * hn * ht);
    let det = ynn * ytt - ynt * ynt;
    if !(det > 0.0) {
        return Err(Error::AsymptoticsInvalid("Hessian of y is not positive definite".into()));
    }
    let m = field.m_star_sq().sqrt();
    let k = kin(field, atom, m, n, t)
        .ok_or_else(|| Error::AsymptoticsInvalid("stationary point below threshold".into()))?;
    let nz = n - 2.0 * k.big_z;
    let r = k.g_sq / (2.0 * nz * k.k_dot_pi);
    let weight = (2.0 / n).powf(2.0 / 3.0) * nz * nz * k.k_dot_pi * k.k_dot_pi * k.pi_abs / k.g_sq.powi(4)
        * (1.0 + r).powi(2)
        * t.sin();
    Ok(32.0 / atom.a.powi(5) * weight * 2.0 * PI / det.sqrt() * airy_ai_squared_tail(st.y))
}

/// 2^{7/3} / (3^{4/3} Gamma(2/3)^2) * pi.
pub fn strongfield_prefactor() -> f64 {
    2f64.powf(7.0 / 3.0) / (3f64.powf(4.0 / 3.0) * GAMMA_TWO_THIRDS * GAMMA_TWO_THIRDS) * PI
}

/// Strong-field (y_m << 1) closed form.
pub fn w_strongfield(omega: f64, e_b: f64, f0: f64, f_at: f64) -> f64 {
    strongfield_prefactor() * omega * (omega / e_b).powi(3) * (f_at / f0).powf(11.0 / 3.0)
}

/// Tunneling (y_m >> 1) closed form.
pub fn w_tunneling(omega: f64, e_b: f64, f0: f64, f_at: f64) -> f64 {
    let q = f_at / f0;
    2.0 * omega * (omega / e_b).powi(3) * q.powi(3) * (-2.0 / 3.0 * q).exp()
}

/// Closed form for the detected regime, or for `force` when given.
pub fn rate_closed(field: &LaserField, atom: &Atom, force: Option<Regime>) -> Result<RateSummary> {
    let s = saddle_point(field, atom)?;
    let p = derive_params(field, atom)?;
    let regime = force.unwrap_or(s.regime);
    let (w_total, method) = match regime {
        Regime::MultiphotonStrongfield => {
            (w_strongfield(field.omega, atom.e_b, p.f0, p.f_at), Method::StrongfieldClosed)
        }
        Regime::Tunneling => (w_tunneling(field.omega, atom.e_b, p.f0, p.f_at), Method::TunnelingClosed),
        Regime::Intermediate => return Err(Error::IntermediateRegime { y_m: s.y_m }),
    };
    let mut warnings = Vec::new();
    if force.is_some() && regime != s.regime {
        warnings.push(format!("closed form forced outside its regime (y_m = {})", s.y_m));
    }
    if !field.is_circular() {
        warnings.push("closed forms are derived for circular polarization".into());
    }
    Ok(RateSummary { w_total, method, saddle: Some(s), regime: Some(s.regime), grid_report: None, warnings })
}

/// F0 for a given field; convenience for scans at fixed omega.
pub fn field_strength(field: &LaserField) -> f64 {
    field.omega * field.xi / charge()
}
