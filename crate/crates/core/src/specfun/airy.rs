//! Airy function Ai and its derivative.
//!
//! |x| <= 2: Maclaurin series. |x| >= 10: asymptotic expansions with
//! optimal truncation. In between: Taylor expansion of Ai'' = x Ai about the
//! nearest node of a table spaced 0.25 apart. The positive-x part of the
//! table is stepped backwards from x = 10, the direction in which Ai grows,
//! so relative accuracy carries over from the asymptotic value.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Ai(0).
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// -Ai'(0).
pub const AIP0_NEG: f64 = 0.258_819_403_792_806_8;

const TABLE_LO: f64 = -10.0;
const TABLE_HI: f64 = 10.0;
const STEP: f64 = 0.25;
const NODES: usize = 81;

/// Ai(x).
pub fn airy_ai(x: f64) -> f64 {
    airy_pair(x).0
}

/// Ai'(x).
pub fn airy_ai_prime(x: f64) -> f64 {
    airy_pair(x).1
}

/// (Ai(x), Ai'(x)).
pub fn airy_pair(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x.abs() <= 2.0 {
        maclaurin(x)
    } else if x >= TABLE_HI {
        asymptotic_positive(x)
    } else if x <= TABLE_LO {
        asymptotic_negative(-x)
    } else {
        let t = table();
        let j = ((x - TABLE_LO) / STEP).round() as usize;
        let x0 = TABLE_LO + STEP * j as f64;
        taylor_step(x0, t[j], x - x0)
    }
}

/// Leading asymptotic form x^{-1/4} exp(-2x^{3/2}/3) / (2 sqrt(pi)), x > 0.
pub fn airy_ai_asymptotic(x: f64) -> f64 {
    (-2.0 / 3.0 * x.powf(1.5)).exp() / (2.0 * PI.sqrt() * x.powf(0.25))
}

/// int_y^inf Ai(s)^2 ds = Ai'(y)^2 - y Ai(y)^2.
pub fn airy_ai_squared_tail(y: f64) -> f64 {
    let (a, ap) = airy_pair(y);
    ap * ap - y * a * a
}

/// Large-order Airy approximation J_N(x) ~ (2/N)^{1/3} Ai[(N/2)^{2/3}(1 - x^2/N^2)].
pub fn bessel_airy_approx(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let y = (0.5 * nf).powf(2.0 / 3.0) * (1.0 - (x / nf).powi(2));
    (2.0 / nf).cbrt() * airy_ai(y)
}

fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}
    let (mut a, mut b) = (1.0, 1.0);
    let (mut f, mut g) = (1.0, x);
    let (mut fp, mut gp) = (0.0, 1.0);
    let mut pw = 1.0; // x^{3k}
    for k in 1..60 {
        let kf = k as f64;
        a /= (3.0 * kf - 1.0) * (3.0 * kf);
        b /= (3.0 * kf) * (3.0 * kf + 1.0);
        let pw_prev = pw;
        pw *= x3;
        let tf = a * pw;
        let tg = b * pw * x;
        f += tf;
        g += tg;
        fp += 3.0 * kf * a * pw_prev * x * x;
        gp += (3.0 * kf + 1.0) * b * pw;
        if tf.abs() < 1e-18 * f.abs().max(1e-300) && tg.abs() < 1e-18 * g.abs().max(1e-300) {
            break;
        }
    }
    (AI0 * f - AIP0_NEG * g, AI0 * fp - AIP0_NEG * gp)
}

fn asymptotic_coeffs() -> &'static [(f64, f64)] {
    static C: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    C.get_or_init(|| {
        let mut c = vec![(1.0, 1.0)];
        let mut u = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
            c.push((u, -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u));
        }
        c
    })
}

fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let c = asymptotic_coeffs();
    let (mut su, mut sv) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    let mut zk = 1.0;
    for (k, &(u, v)) in c.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let tu = sign * u * zk;
        if tu.abs() > last {
            break;
        }
        su += tu;
        sv += sign * v * zk;
        last = tu.abs();
        if last < 1e-18 {
            break;
        }
        zk /= zeta;
    }
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let q = x.powf(0.25);
    (e / q * su, -e * q * sv)
}

fn asymptotic_negative(x: f64) -> (f64, f64) {
    // Ai(-x), Ai'(-x) for x > 0
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let c = asymptotic_coeffs();
    let (mut ue, mut uo, mut ve, mut vo) = (0.0, 0.0, 0.0, 0.0);
    let mut last = f64::INFINITY;
    let mut zk = 1.0;
    for (k, &(u, v)) in c.iter().enumerate() {
        let t = u * zk;
        if t.abs() > last {
            break;
        }
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            ue += sign * t;
            ve += sign * v * zk;
        } else {
            uo += sign * t;
            vo += sign * v * zk;
        }
        last = t.abs();
        if last < 1e-18 {
            break;
        }
        zk /= zeta;
    }
    let (s, co) = (zeta - 0.25 * PI).sin_cos();
    let q = x.powf(0.25);
    let rp = 1.0 / PI.sqrt();
    (rp / q * (co * ue + s * uo), rp * q * (s * ve - co * vo))
}

fn taylor_step(x0: f64, (y, yp): (f64, f64), h: f64) -> (f64, f64) {
    // y = sum a_k h^k with (k+2)(k+1) a_{k+2} = x0 a_k + a_{k-1}
    let mut a = [0.0f64; 64];
    a[0] = y;
    a[1] = yp;
    a[2] = 0.5 * x0 * y;
    let mut val = a[0] + h * (a[1] + h * a[2]);
    let mut der = a[1] + 2.0 * a[2] * h;
    let mut hk = h * h; // h^{k}, tracks k = 2
    for k in 3..64 {
        a[k] = (x0 * a[k - 2] + a[k - 3]) / (k as f64 * (k - 1) as f64);
        der += k as f64 * a[k] * hk;
        hk *= h;
        val += a[k] * hk;
        if (a[k] * hk).abs() < 1e-18 * val.abs().max(1e-300) && k > 8 {
            break;
        }
    }
    (val, der)
}

fn table() -> &'static [(f64, f64)] {
    static T: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = vec![(0.0, 0.0); NODES];
        let node = |j: usize| TABLE_LO + STEP * j as f64;
        let j_m2 = 32; // x = -2
        let j_p2 = 48; // x = +2
        for j in j_m2..=j_p2 {
            t[j] = maclaurin(node(j));
        }
        for j in (0..j_m2).rev() {
            t[j] = taylor_step(node(j + 1), t[j + 1], -STEP);
        }
        t[NODES - 1] = asymptotic_positive(TABLE_HI);
        for j in (j_p2 + 1..NODES - 1).rev() {
            t[j] = taylor_step(node(j + 1), t[j + 1], -STEP);
        }
        t
    })
}
