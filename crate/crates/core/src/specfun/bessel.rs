//! Ordinary Bessel functions J_n(x) of integer order.
//!
//! Miller's downward recurrence, normalised with J_0 + 2 sum J_2k = 1, gives
//! every order 0..=n at once with relative accuracy even deep in the
//! evanescent region n >> x. Small arguments use the power series.

use crate::error::{Error, Result};

/// Largest order accepted.
pub const MAX_ORDER: i64 = 200_000;
/// Largest |x| accepted.
pub const MAX_ARG: f64 = 200_000.0;

const SERIES_BELOW: f64 = 1.0;
const RESCALE_ABOVE: f64 = 1e250;

/// J_0(x), J_1(x), ..., J_nmax(x).
pub fn bessel_j_orders(nmax: usize, x: f64) -> Result<Vec<f64>> {
    if !x.is_finite() || x.abs() > MAX_ARG {
        return Err(Error::Range(format!("|x| = {x} exceeds {MAX_ARG}")));
    }
    if nmax as i64 > MAX_ORDER {
        return Err(Error::Range(format!("order {nmax} exceeds {MAX_ORDER}")));
    }
    let ax = x.abs();
    let mut out = if ax == 0.0 {
        let mut v = vec![0.0; nmax + 1];
        v[0] = 1.0;
        v
    } else if ax < SERIES_BELOW {
        series(nmax, ax)
    } else {
        miller(nmax, ax)
    };
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    Ok(out)
}

/// J_n(x) for any integer order.
pub fn ordinary_bessel(n: i64, x: f64) -> Result<f64> {
    let m = n.unsigned_abs() as usize;
    if m as i64 > MAX_ORDER {
        return Err(Error::Range(format!("order {n} exceeds {MAX_ORDER}")));
    }
    let v = bessel_j_orders(m, x)?[m];
    Ok(if n < 0 && m % 2 == 1 { -v } else { v })
}

/// Looks up J_n from a table of non-negative orders, using J_{-n} = (-1)^n J_n.
#[inline]
pub(crate) fn signed_lookup(table: &[f64], n: i64) -> f64 {
    let m = n.unsigned_abs() as usize;
    let v = table.get(m).copied().unwrap_or(0.0);
    if n < 0 && m % 2 == 1 {
        -v
    } else {
        v
    }
}

fn series(nmax: usize, x: f64) -> Vec<f64> {
    let h = 0.5 * x;
    let q = -h * h;
    let mut out = Vec::with_capacity(nmax + 1);
    let mut lead = 1.0; // (x/2)^n / n!
    for n in 0..=nmax {
        if n > 0 {
            lead *= h / n as f64;
        }
        let mut term = lead;
        let mut sum = lead;
        for j in 1..40 {
            term *= q / (j as f64 * (n + j) as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        out.push(sum);
    }
    out
}

fn miller(nmax: usize, x: f64) -> Vec<f64> {
    let top = (nmax as f64).max(x);
    let mut start = (top + 40.0 + 15.0 * top.cbrt()).ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; nmax + 1];
    let two_over_x = 2.0 / x;
    let mut jp1 = 0.0;
    let mut j = 1e-280;
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        // j holds J_k (unnormalised), jp1 holds J_{k+1}.
        if k <= nmax {
            out[k] = j;
        }
        if k % 2 == 0 {
            norm += 2.0 * j;
        }
        let jm1 = k as f64 * two_over_x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            j *= s;
            jp1 *= s;
            norm *= s;
            let lo = k.saturating_sub(1).min(nmax + 1);
            for v in &mut out[lo..] {
                *v *= s;
            }
        }
    }
    out[0] = j;
    norm += j;
    let inv = 1.0 / norm;
    for v in &mut out {
        *v *= inv;
    }
    out
}
