//! Airy function Ai(x) for real arguments, |x| <= 30.
//!
//! Three regimes, stitched so that no regime is used where it loses accuracy:
//! - |x| <= 5.5: Maclaurin series (both independent solutions, summed with
//!   the exact values of Ai(0), Ai'(0)).
//! - x <= -9 or x >= 12: standard asymptotic expansions in
//!   zeta = (2/3)|x|^{3/2}, truncated at the smallest term.
//! - the gaps (-9, -5.5) and (5.5, 12): Taylor-series marching of the Airy
//!   ODE y'' = x y from an accurately known anchor point. On the positive
//!   axis the march runs downward from x = 12 so the growing solution Bi is
//!   suppressed rather than amplified.

use crate::error::{Error, Result};
use libm::{cos, exp, log, sin, sqrt};

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Ai(0) = 3^{-2/3} / Gamma(2/3).
const AI0: f64 = 0.355_028_053_887_817_24;
/// Ai'(0) = -3^{-1/3} / Gamma(1/3).
const AIP0: f64 = -0.258_819_403_792_806_8;

const SERIES_EDGE: f64 = 5.5;
const NEG_ASYMPT_EDGE: f64 = -9.0;
const POS_ANCHOR: f64 = 12.0;
const SUPPORTED: f64 = 30.0;

/// Ai(x). Absolute error below ~1e-12 for |x| <= 10, relative error below
/// ~1e-10 (away from zeros) up to |x| = 30.
pub fn airy_ai(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidInput("airy_ai: non-finite argument"));
    }
    if x.abs() > SUPPORTED {
        return Err(Error::OutOfRange {
            value: x,
            limit: SUPPORTED,
        });
    }
    if x.abs() <= SERIES_EDGE {
        return Ok(maclaurin_pair(x).0);
    }
    if x >= POS_ANCHOR {
        return Ok(asymptotic_positive(x).0);
    }
    if x > 0.0 {
        let (ai, aip) = asymptotic_positive(POS_ANCHOR);
        return Ok(taylor_march(POS_ANCHOR, ai, aip, x).0);
    }
    if x <= NEG_ASYMPT_EDGE {
        return Ok(asymptotic_negative(-x));
    }
    let (ai, aip) = maclaurin_pair(-SERIES_EDGE);
    Ok(taylor_march(-SERIES_EDGE, ai, aip, x).0)
}

/// ln Ai(x) for x >= 5.5, evaluated without underflow. Supports arbitrarily
/// large x (the asymptotic series only gains accuracy with x).
pub fn airy_ai_ln(x: f64) -> Result<f64> {
    if !(x >= SERIES_EDGE) {
        return Err(Error::InvalidInput("airy_ai_ln: requires x >= 5.5"));
    }
    let zeta = (2.0 / 3.0) * x * sqrt(x);
    let s = decay_series(zeta).0;
    Ok(-zeta - log(2.0 * SQRT_PI) - 0.25 * log(x) + log(s))
}

/// Maclaurin evaluation of (Ai, Ai'). Both auxiliary series f, g and their
/// derivatives are summed term by term.
fn maclaurin_pair(x: f64) -> (f64, f64) {
    let c1 = AI0;
    let c2 = -AIP0;
    let x3 = x * x * x;

    // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}
    let mut tf = 1.0;
    let mut f = 1.0;
    let mut tg = x;
    let mut g = x;
    // f' = sum d_k, d_1 = x^2/2; g' = sum e_k, e_0 = 1
    let mut td = x * x / 2.0;
    let mut fp = 0.0;
    let mut te = 1.0;
    let mut gp = 1.0;

    for k in 1..80usize {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf - 1.0) * (3.0 * kf));
        f += tf;
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        g += tg;
        if k >= 2 {
            // d_k / d_{k-1} = x^3 k / ((k-1)(3k-1)(3k))
            td *= x3 * kf / ((kf - 1.0) * (3.0 * kf - 1.0) * (3.0 * kf));
        }
        fp += td;
        te *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        gp += te;
        if tf.abs() < 1e-18 && tg.abs() < 1e-18 && td.abs() < 1e-18 && te.abs() < 1e-18 {
            break;
        }
    }
    (c1 * f - c2 * g, c1 * fp - c2 * gp)
}

/// Coefficients u_k of the Airy asymptotic series, consumed as running
/// products. Returns (sum of (-1)^k u_k zeta^-k, sum for the derivative).
fn decay_series(zeta: f64) -> (f64, f64) {
    let mut u = 1.0;
    let mut term = 1.0;
    let mut su = 1.0;
    let mut sv = 1.0;
    let mut smallest = f64::INFINITY;
    for k in 0..60usize {
        let kf = k as f64;
        u *= (6.0 * kf + 5.0) * (6.0 * kf + 3.0) * (6.0 * kf + 1.0)
            / (216.0 * (kf + 1.0) * (2.0 * kf + 1.0));
        term *= -1.0 / zeta;
        let tu = u * term;
        if tu.abs() >= smallest {
            break; // divergent tail of the asymptotic series
        }
        smallest = tu.abs();
        su += tu;
        let v = -u * (6.0 * (kf + 1.0) + 1.0) / (6.0 * (kf + 1.0) - 1.0);
        sv += v * term;
        if tu.abs() < 1e-18 {
            break;
        }
    }
    (su, sv)
}

/// (Ai, Ai') for large positive x.
fn asymptotic_positive(x: f64) -> (f64, f64) {
    let zeta = (2.0 / 3.0) * x * sqrt(x);
    let (su, sv) = decay_series(zeta);
    let root4 = sqrt(sqrt(x));
    let e = exp(-zeta);
    let ai = e * su / (2.0 * SQRT_PI * root4);
    let aip = -e * root4 * sv / (2.0 * SQRT_PI);
    (ai, aip)
}

/// Ai(-w) for large positive w: oscillatory asymptotics.
fn asymptotic_negative(w: f64) -> f64 {
    let zeta = (2.0 / 3.0) * w * sqrt(w);
    // Even/odd splits of the u_k series.
    let mut u = 1.0;
    let mut s_even = 1.0;
    let mut s_odd = 0.0;
    let mut pow = 1.0;
    let mut smallest = f64::INFINITY;
    for k in 1..60usize {
        let kf = (k - 1) as f64;
        u *= (6.0 * kf + 5.0) * (6.0 * kf + 3.0) * (6.0 * kf + 1.0)
            / (216.0 * (kf + 1.0) * (2.0 * kf + 1.0));
        pow /= zeta;
        let t = u * pow;
        if t.abs() >= smallest {
            break;
        }
        smallest = t.abs();
        // (-1)^m with u_{2m} even-index, u_{2m+1} odd-index
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            s_odd += sign * t;
        } else {
            s_even += sign * t;
        }
        if t.abs() < 1e-18 {
            break;
        }
    }
    let phase = zeta + core::f64::consts::FRAC_PI_4;
    (sin(phase) * s_even - cos(phase) * s_odd) / (SQRT_PI * sqrt(sqrt(w)))
}

/// March (Ai, Ai') from x0 to target by local Taylor expansion of y'' = x y.
fn taylor_march(mut x: f64, mut y: f64, mut yp: f64, target: f64) -> (f64, f64) {
    let dir = if target > x { 1.0 } else { -1.0 };
    const MAX_STEP: f64 = 0.375;
    const TERMS: usize = 26;
    while (target - x) * dir > 1e-15 * (1.0 + target.abs()) {
        let h = dir * MAX_STEP.min((target - x).abs());
        let mut a = [0.0f64; TERMS];
        a[0] = y;
        a[1] = yp;
        a[2] = x * a[0] / 2.0;
        for n in 1..TERMS - 2 {
            a[n + 2] = (x * a[n] + a[n - 1]) / (((n + 1) * (n + 2)) as f64);
        }
        let mut ynew = 0.0;
        for n in (0..TERMS).rev() {
            ynew = ynew * h + a[n];
        }
        let mut yp2 = 0.0;
        for n in (1..TERMS).rev() {
            yp2 = yp2 * h + (n as f64) * a[n];
        }
        y = ynew;
        yp = yp2;
        x += h;
    }
    (y, yp)
}
