//! Identity suites shared by `ati selftest` and the acceptance tests.
//!
//! The generalized-Bessel checks take the evaluator as a parameter so a
//! deliberately corrupted one can be swapped in.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::kinematics::{derive_params, Atom, ChannelKinematics, LaserField};
use crate::rates::saddle_point;
use crate::specfun::{self, airy_pair, bessel_airy_approx, gen_bessel_quadrature, ordinary_bessel, quadrature_nodes};
use crate::spectra::{Mode, SpectrumCalc};
use crate::tolerances as tol;

/// J_n(u, v, d) evaluator under test.
pub type Evaluator<'a> = &'a (dyn Fn(i64, f64, f64, f64) -> Result<Complex64> + Sync);

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub seconds: f64,
    pub records: Vec<CheckRecord>,
}

pub const U_GRID: [f64; 5] = [0.0, 0.5, 2.0, 8.0, 25.0];
pub const V_GRID: [f64; 4] = [0.0, 0.3, 2.0, 10.0];
pub const D_GRID: [f64; 3] = [0.0, 0.3, PI / 2.0];
pub const N_MAX: i64 = 40;

fn record(name: &str, worst: f64, tolerance: f64, detail: String, start: Instant) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        passed: worst <= tolerance,
        worst,
        tolerance,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn failed(name: &str, err: crate::Error, start: Instant) -> CheckRecord {
    CheckRecord {
        name: name.into(),
        passed: false,
        worst: f64::INFINITY,
        tolerance: 0.0,
        detail: format!("error: {err}"),
        seconds: start.elapsed().as_secs_f64(),
    }
}

macro_rules! try_check {
    ($name:expr, $start:expr, $body:expr) => {
        match (|| -> Result<CheckRecord> { $body })() {
            Ok(r) => r,
            Err(e) => failed($name, e, $start),
        }
    };
}

fn grid() -> impl Iterator<Item = (f64, f64, f64)> {
    U_GRID.into_iter().flat_map(|u| V_GRID.into_iter().flat_map(move |v| D_GRID.into_iter().map(move |d| (u, v, d))))
}

/// Series vs trapezoid quadrature; worst excess over the allowed error (<= 1 passes).
pub fn check_oracle(eval: Evaluator) -> CheckRecord {
    let name = "genbessel_vs_quadrature";
    let start = Instant::now();
    try_check!(name, start, {
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (u, v, d) in grid() {
            for n in -N_MAX..=N_MAX {
                let nodes = quadrature_nodes(n, u, v).max(256).next_multiple_of(2);
                let q = gen_bessel_quadrature(n, u, v, d, nodes)?;
                let s = eval(n, u, v, d)?;
                let allowed = (tol::ORACLE_REL * q.norm()).max(tol::ORACLE_ABS);
                let excess = (s - q).norm() / allowed;
                if excess > worst {
                    worst = excess;
                    at = format!("n={n} u={u} v={v} d={d:.4}: |diff|={:e}", (s - q).norm());
                }
            }
        }
        Ok(record(name, worst, 1.0, format!("worst diff / allowed at {at}"), start))
    })
}

/// Three-term recurrence from integration by parts, scaled residual.
pub fn check_recurrence(eval: Evaluator) -> CheckRecord {
    let name = "genbessel_recurrence";
    let start = Instant::now();
    try_check!(name, start, {
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (u, v, d) in grid() {
            let j = |n: i64| eval(n, u, v, d);
            let (em, ep) = (Complex64::from_polar(1.0, -2.0 * d), Complex64::from_polar(1.0, 2.0 * d));
            for n in -N_MAX..=N_MAX {
                let lhs = 2.0 * n as f64 * j(n)?;
                let rhs = u * (j(n - 1)? + j(n + 1)?) + 2.0 * v * (em * j(n - 2)? + ep * j(n + 2)?);
                let r = (lhs - rhs).norm() / (u.abs() + v.abs() + n.abs() as f64 + 1.0);
                if r > worst {
                    worst = r;
                    at = format!("n={n} u={u} v={v} d={d:.4}");
                }
            }
        }
        Ok(record(name, worst, tol::RECURRENCE_SCALED, format!("worst scaled residual at {at}"), start))
    })
}

// Deterministic low-discrepancy angles in [0, 2pi).
fn angles(count: usize) -> impl Iterator<Item = f64> {
    let g = 0.618_033_988_749_894_9;
    (1..=count).map(move |j| 2.0 * PI * (j as f64 * g).fract())
}

/// Partial-sum reconstruction of exp{i[u sin(phi + d) + v sin 2phi]}.
pub fn check_fourier(eval: Evaluator) -> CheckRecord {
    let name = "genbessel_fourier_theorem";
    let start = Instant::now();
    try_check!(name, start, {
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (u, v, d) in grid() {
            let k = (u.abs() + 2.0 * v.abs()).ceil() as i64 + 40;
            let vals: Vec<Complex64> = (-k..=k).map(|n| eval(n, u, v, d)).collect::<Result<_>>()?;
            for phi in angles(100) {
                let mut s = Complex64::new(0.0, 0.0);
                for (i, jn) in vals.iter().enumerate() {
                    let n = i as i64 - k;
                    s += Complex64::from_polar(1.0, n as f64 * (phi + d)) * jn;
                }
                let want = Complex64::from_polar(1.0, u * (phi + d).sin() + v * (2.0 * phi).sin());
                let e = (s - want).norm();
                if e > worst {
                    worst = e;
                    at = format!("u={u} v={v} d={d:.4} phi={phi:.4}");
                }
            }
        }
        Ok(record(name, worst, tol::FOURIER_ABS, format!("worst |error| at {at}"), start))
    })
}

/// Addition theorem sum_k J_{n-k}(u,v,d) J_k(u',v',d) = J_n(u+u', v+v', d).
pub fn check_addition(eval: Evaluator) -> CheckRecord {
    let name = "genbessel_addition_theorem";
    let start = Instant::now();
    try_check!(name, start, {
        let primes: [(f64, f64); 3] = [(0.5, 0.3), (2.0, 0.0), (1.5, 2.0)];
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (u, v, d) in grid() {
            for (up, vp) in primes {
                let k = (up + 2.0 * vp).ceil() as i64 + 40;
                let second: Vec<Complex64> = (-k..=k).map(|i| eval(i, up, vp, d)).collect::<Result<_>>()?;
                for n in (-N_MAX..=N_MAX).step_by(4) {
                    let mut s = Complex64::new(0.0, 0.0);
                    for (i, b) in second.iter().enumerate() {
                        let kk = i as i64 - k;
                        s += eval(n - kk, u, v, d)? * b;
                    }
                    let want = eval(n, u + up, v + vp, d)?;
                    let e = (s - want).norm();
                    if e > worst {
                        worst = e;
                        at = format!("n={n} u={u}+{up} v={v}+{vp} d={d:.4}");
                    }
                }
            }
        }
        Ok(record(name, worst, tol::ADDITION_ABS, format!("worst |error| at {at}"), start))
    })
}

/// J_n(u, 0, d) = J_n(u); J_n(0, v, d) = e^{-ind} J_{n/2}(v) or 0.
pub fn check_special_cases(eval: Evaluator) -> CheckRecord {
    let name = "genbessel_special_cases";
    let start = Instant::now();
    try_check!(name, start, {
        let mut worst = 0.0f64;
        let mut at = String::new();
        for d in D_GRID {
            for n in -N_MAX..=N_MAX {
                for u in U_GRID {
                    let e = (eval(n, u, 0.0, d)? - ordinary_bessel(n, u)?).norm();
                    if e > worst {
                        worst = e;
                        at = format!("J_{n}({u}, 0, {d:.4})");
                    }
                }
                for v in V_GRID {
                    let want = if n % 2 == 0 {
                        Complex64::from_polar(1.0, -(n as f64) * d) * ordinary_bessel(n / 2, v)?
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    let e = (eval(n, 0.0, v, d)? - want).norm();
                    if e > worst {
                        worst = e;
                        at = format!("J_{n}(0, {v}, {d:.4})");
                    }
                }
            }
        }
        Ok(record(name, worst, tol::SPECIAL_CASE_ABS, format!("worst |error| at {at}"), start))
    })
}

/// Generalized Bessel identities for one evaluator.
pub fn bessel_identities(eval: Evaluator) -> Vec<CheckRecord> {
    vec![
        check_oracle(eval),
        check_recurrence(eval),
        check_fourier(eval),
        check_addition(eval),
        check_special_cases(eval),
    ]
}

/// Reference Ai, Ai' values (mpmath).
pub const AIRY_REFERENCE: [(f64, f64, f64); 8] = [
    (0.0, 0.35502805388781723926, -0.25881940379280679841),
    (1.0, 0.13529241631288141552, -0.15914744129679321279),
    (-5.0, 0.35076100902411431979, 0.32719281855444313679),
    (-20.0, -0.17640612707798468959, 0.8928628567364712384),
    (3.7, 0.0017455720006099791368, -0.0034669407490276282174),
    (8.0, 4.6922076160992316256e-8, -1.3414392979067865743e-7),
    (25.0, 8.1160268246913866838e-38, -4.0660893372432810053e-37),
    (100.0, 2.6344821520881844896e-291, -2.6351403616044099336e-290),
];

pub fn check_airy() -> CheckRecord {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (x, ai, aip) in AIRY_REFERENCE {
        let (a, ap) = airy_pair(x);
        worst = worst.max(((a - ai) / ai).abs()).max(((ap - aip) / aip).abs());
    }
    record("airy_reference_values", worst, tol::AIRY_REL, "worst relative error".into(), start)
}

/// Worst max|approx - J_N| / max|J_N| over x/N in [0.80, 0.999], N in {50, 100, 200}.
pub fn check_airy_approximation() -> CheckRecord {
    let name = "airy_approximation_of_bessel";
    let start = Instant::now();
    try_check!(name, start, {
        let mut worst = 0.0f64;
        let mut at = String::new();
        for n in [50u32, 100, 200] {
            let (mut dmax, mut jmax) = (0.0f64, 0.0f64);
            for i in 0..=400 {
                let x = n as f64 * (0.80 + 0.199 * i as f64 / 400.0);
                let j = ordinary_bessel(n as i64, x)?;
                dmax = dmax.max((bessel_airy_approx(n, x) - j).abs());
                jmax = jmax.max(j.abs());
            }
            if dmax / jmax > worst {
                worst = dmax / jmax;
                at = format!("N={n}");
            }
        }
        Ok(record(name, worst, tol::AIRY_APPROX_OF_MAX, format!("worst at {at}"), start))
    })
}

/// Mass shell, free-momentum mass shell and k.p = k.Pi over a channel grid,
/// plus exact threshold minimality.
pub fn check_kinematics() -> CheckRecord {
    let name = "kinematic_identities";
    let start = Instant::now();
    try_check!(name, start, {
        let atom = Atom::hydrogenic(1)?;
        let mut worst = 0.0f64;
        for (w, xi, zeta) in [(0.01, 1.0, 1.0), (0.005, 0.3, 0.0), (0.002, 3.0, 0.5), (0.05, 0.7, -1.0)] {
            let field = LaserField::new(w, xi, zeta)?;
            let p = derive_params(&field, &atom)?;
            let m2 = p.m_star * p.m_star;
            if !(atom.epsilon0 + p.n0 as f64 * w >= p.m_star && atom.epsilon0 + (p.n0 - 1) as f64 * w < p.m_star) {
                return Ok(record(
                    name,
                    f64::INFINITY,
                    tol::KINEMATIC_REL,
                    format!("threshold not minimal at w={w}"),
                    start,
                ));
            }
            for dn in [0, 1, 7, 50, 400] {
                for theta in [0.0, 0.2, 1.0, 2.0, PI] {
                    for phi in [0.0, 1.3, 4.0] {
                        let ch = ChannelKinematics::compute(&field, &atom, &p, p.n0 + dn, theta, phi)?;
                        worst = worst.max(((ch.pi0 * ch.pi0 - ch.pi_abs * ch.pi_abs) / m2 - 1.0).abs());
                        let q = ch.free_momentum(&field);
                        let kp = w * (q[0] - q[3]);
                        worst = worst.max((kp / ch.k_dot_pi - 1.0).abs());
                        let p2 = (q[0] - q[3]) * (q[0] + q[3]) - q[1] * q[1] - q[2] * q[2];
                        worst = worst.max((p2 - 1.0).abs() / (q[0] * q[0]));
                    }
                }
            }
        }
        Ok(record(name, worst, tol::KINEMATIC_REL, "worst relative residual".into(), start))
    })
}

/// 2^{1/3} E_B / (N_m^{1/3} omega) = (F_at / 2F0)^{2/3}.
pub fn check_ym_identity() -> CheckRecord {
    let name = "ym_two_expressions";
    let start = Instant::now();
    try_check!(name, start, {
        let atom = Atom::hydrogenic(1)?;
        let mut worst = 0.0f64;
        for xi in [0.3, 1.0, 3.0] {
            for w in [0.002, 0.01] {
                let f = LaserField::circular(w, xi)?;
                let s = saddle_point(&f, &atom)?;
                let p = derive_params(&f, &atom)?;
                let other = (p.f_at / (2.0 * p.f0)).powf(2.0 / 3.0);
                worst = worst.max((s.y_m / other - 1.0).abs());
            }
        }
        Ok(record(name, worst, tol::YM_IDENTITY_REL, "worst relative difference".into(), start))
    })
}

/// General formula against the circular and linear specialisations.
pub fn check_reductions() -> Vec<CheckRecord> {
    let start = Instant::now();
    let circ = try_check!("reduction_circular", start, {
        let atom = Atom::hydrogenic(1)?;
        let field = LaserField::circular(0.01, 1.0)?;
        let calc = SpectrumCalc::new(&field, &atom)?;
        let n0 = calc.params().n0;
        let bound = atom.e_b / atom.epsilon0 + tol::CIRCULAR_REDUCTION_EXTRA;
        let mut worst = 0.0f64;
        for dn in (0..200).step_by(13) {
            for theta in [0.3, 0.7, 0.785, 1.2, 2.5] {
                let g = calc.general(n0 + dn, theta, 0.9, Mode::On)?.dwdo;
                let c = calc.circular(n0 + dn, theta, Mode::On)?.dwdo;
                if c > 0.0 {
                    worst = worst.max((g - c).abs() / c / bound);
                }
            }
        }
        Ok(record("reduction_circular", worst, 1.0, "worst relative gap / (E_B/eps0 + 1e-9)".into(), start))
    });
    let start = Instant::now();
    let lin = try_check!("reduction_linear", start, {
        let atom = Atom::hydrogenic(1)?;
        let field = LaserField::linear(0.01, 0.7)?;
        let calc = SpectrumCalc::new(&field, &atom)?;
        let n0 = calc.params().n0;
        let mut worst = 0.0f64;
        for dn in (0..120).step_by(17) {
            for theta in [0.4, 1.0, 2.0] {
                for phi in [0.0, 1.0, 2.5, 4.0] {
                    let g = calc.general(n0 + dn, theta, phi, Mode::On)?.dwdo;
                    let l = calc.linear(n0 + dn, theta, phi, Mode::On)?.dwdo;
                    if l > 1e-300 {
                        worst = worst.max((g - l).abs() / l);
                    }
                }
            }
        }
        Ok(record("reduction_linear", worst, tol::LINEAR_REDUCTION_REL, "worst relative gap".into(), start))
    });
    vec![circ, lin]
}

/// Rescattering factor at the spectral peak, xi in [0.5, 2].
pub fn check_rescattering_magnitude() -> CheckRecord {
    let name = "rescattering_factor_at_peak";
    let start = Instant::now();
    try_check!(name, start, {
        let atom = Atom::hydrogenic(1)?;
        let (lo, hi) = tol::RESCATTER_RANGE;
        let mut worst = 0.0f64;
        let mut span = (f64::INFINITY, 0.0f64);
        for xi in [0.5, 0.75, 1.0, 1.5, 2.0] {
            let field = LaserField::circular(0.01, xi)?;
            let s = saddle_point(&field, &atom)?;
            let calc = SpectrumCalc::new(&field, &atom)?;
            let r = calc.circular(s.n_m.round() as i64, s.theta_m, Mode::On)?.rescatter_factor;
            span = (span.0.min(r), span.1.max(r));
            // distance outside [lo, hi] in units of the interval, 0 inside
            worst = worst.max((lo - r).max(r - hi).max(0.0));
        }
        Ok(record(name, worst, 0.0, format!("r in [{:.4}, {:.4}]", span.0, span.1), start))
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    /// Added to every generalized Bessel value seen by the identity checks.
    pub bessel_perturbation: f64,
}

pub fn run_selftest(opts: &SelftestOptions) -> SelftestReport {
    let start = Instant::now();
    let eps = opts.bessel_perturbation;
    let eval = move |n: i64, u: f64, v: f64, d: f64| -> Result<Complex64> {
        Ok(specfun::gen_bessel(n, u, v, d)? + Complex64::new(eps, 0.0))
    };
    let mut records = bessel_identities(&eval);
    records.push(check_airy());
    records.push(check_airy_approximation());
    records.push(check_kinematics());
    records.push(check_ym_identity());
    records.extend(check_reductions());
    records.push(check_rescattering_magnitude());
    let passed = records.iter().all(|r| r.passed);
    SelftestReport { passed, seconds: start.elapsed().as_secs_f64(), records }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_suite_passes_and_corrupted_recurrence_fails() {
        let clean = |n: i64, u: f64, v: f64, d: f64| specfun::gen_bessel(n, u, v, d);
        assert!(check_recurrence(&clean).passed);
        let bad = |n: i64, u: f64, v: f64, d: f64| Ok(specfun::gen_bessel(n, u, v, d)? + Complex64::new(1e-6, 0.0));
        assert!(!check_recurrence(&bad).passed);
    }
}
