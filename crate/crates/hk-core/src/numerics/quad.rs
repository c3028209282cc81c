//! Adaptive composite Gauss-Legendre quadrature for complex-valued
//! integrands of one and two real variables.
//!
//! A 15-point panel is compared against its two half-panels; panels whose
//! discrepancy exceeds their width-allocated share of the tolerance are
//! bisected. Deterministic by construction.

use crate::error::{Error, Result};
use alloc::vec::Vec;
use libm::{cos, fabs, sqrt};
use num_complex::Complex64;

/// Tolerances and budget for the adaptive quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evals: u32,
    /// Integrand-magnitude cutoff used by callers to size truncated windows.
    pub truncation_threshold: f64,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_evals: u32, truncation_threshold: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0 && truncation_threshold > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive"));
        }
        if max_evals < 100 {
            return Err(Error::InvalidInput("max_evals must be at least 100"));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_evals,
            truncation_threshold,
        })
    }

    fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_evals: 4_000_000,
            truncation_threshold: 1e-16,
        }
    }
}

/// Axis-aligned rectangle for 2D integration windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

const N_GL: usize = 15;

/// Nodes and weights of the 15-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
fn gauss_legendre_15() -> ([f64; N_GL], [f64; N_GL]) {
    let mut nodes = [0.0; N_GL];
    let mut weights = [0.0; N_GL];
    let n = N_GL as f64;
    for i in 0..(N_GL + 1) / 2 {
        let mut z = cos(core::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5));
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = z;
            for j in 2..=N_GL {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (z * p1 - p0) / (z * z - 1.0);
            let dz = -p1 / pp;
            z += dz;
            if fabs(dz) < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[N_GL - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[N_GL - 1 - i] = w;
    }
    (nodes, weights)
}

struct Adaptive<'a, F> {
    f: F,
    nodes: [f64; N_GL],
    weights: [f64; N_GL],
    evals: u32,
    max_evals: u32,
    exhausted: bool,
    err_accum: f64,
    _marker: core::marker::PhantomData<&'a ()>,
}

impl<'a, F: FnMut(f64) -> Complex64> Adaptive<'a, F> {
    fn panel(&mut self, a: f64, b: f64) -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..N_GL {
            acc += self.weights[i] * (self.f)(c + h * self.nodes[i]);
        }
        self.evals += N_GL as u32;
        acc * h
    }

    fn refine(&mut self, a: f64, b: f64, whole: Complex64, tol: f64, depth: u32) -> Complex64 {
        if self.evals > self.max_evals {
            self.exhausted = true;
            return whole;
        }
        let mid = 0.5 * (a + b);
        let left = self.panel(a, mid);
        let right = self.panel(mid, b);
        let refined = left + right;
        let err = (whole - refined).norm();
        if err <= tol || depth >= 52 {
            self.err_accum += err / 10.0;
            return refined;
        }
        self.refine(a, mid, left, 0.5 * tol, depth + 1)
            + self.refine(mid, b, right, 0.5 * tol, depth + 1)
    }
}

/// Adaptive integral of a complex-valued function over [a, b].
pub fn integrate_1d<F: FnMut(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput("integrate_1d: requires finite a < b"));
    }
    let (nodes, weights) = gauss_legendre_15();
    let mut state = Adaptive {
        f,
        nodes,
        weights,
        evals: 0,
        max_evals: spec.max_evals,
        exhausted: false,
        err_accum: 0.0,
        _marker: core::marker::PhantomData,
    };
    // Seed with a 4-panel composite so the initial scale estimate is not
    // fooled by oscillation cancelling over the full interval.
    let mut seeds = Vec::with_capacity(4);
    let mut coarse = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        let pa = a + (b - a) * (k as f64) / 4.0;
        let pb = a + (b - a) * ((k + 1) as f64) / 4.0;
        let v = state.panel(pa, pb);
        coarse += v;
        seeds.push((pa, pb, v));
    }
    let scale = coarse.norm();
    let tol = spec.abs_tol.max(spec.rel_tol * scale);
    let mut total = Complex64::new(0.0, 0.0);
    for (pa, pb, v) in seeds {
        total += state.refine(pa, pb, v, 0.25 * tol, 0);
    }
    if !total.re.is_finite() || !total.im.is_finite() {
        return Err(Error::InvalidInput("integrate_1d: integrand produced non-finite values"));
    }
    if state.exhausted {
        return Err(Error::QuadratureNoConvergence {
            best: total,
            error_estimate: state.err_accum,
        });
    }
    Ok(total)
}

/// Tensor-product integral over a rectangle: adaptive outer integral in y of
/// adaptive inner integrals in x (inner tolerances tightened).
pub fn integrate_2d<F: FnMut(f64, f64) -> Complex64>(
    mut f: F,
    window: &Rect,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    if !(window.x_min < window.x_max && window.y_min < window.y_max) {
        return Err(Error::InvalidInput("integrate_2d: degenerate window"));
    }
    let inner_spec = spec.scaled(1.0 / (8.0 * sqrt(window.y_max - window.y_min).max(1.0)));
    let mut inner_failure: Option<Error> = None;
    let outer = integrate_1d(
        |y| match integrate_1d(|x| f(x, y), window.x_min, window.x_max, &inner_spec) {
            Ok(v) => v,
            Err(Error::QuadratureNoConvergence { best, error_estimate }) => {
                if inner_failure.is_none() {
                    inner_failure = Some(Error::QuadratureNoConvergence { best, error_estimate });
                }
                best
            }
            Err(e) => {
                if inner_failure.is_none() {
                    inner_failure = Some(e);
                }
                Complex64::new(0.0, 0.0)
            }
        },
        window.y_min,
        window.y_max,
        spec,
    );
    match (outer, inner_failure) {
        (Ok(v), None) => Ok(v),
        (Ok(v), Some(Error::QuadratureNoConvergence { error_estimate, .. })) => {
            Err(Error::QuadratureNoConvergence {
                best: v,
                error_estimate,
            })
        }
        (_, Some(e)) => Err(e),
        (Err(e), None) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    use libm::{exp, sqrt};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gaussian_integral() {
        let spec = QuadratureSpec::default();
        let v = integrate_1d(|x| c(exp(-x * x), 0.0), -10.0, 10.0, &spec).unwrap();
        assert!((v.re - sqrt(PI)).abs() < 1e-12);
        assert!(v.im.abs() < 1e-13);
    }

    #[test]
    fn arctangent_pi() {
        let spec = QuadratureSpec::default();
        let v = integrate_1d(|x| c(4.0 / (1.0 + x * x), 0.0), 0.0, 1.0, &spec).unwrap();
        assert!((v.re - PI).abs() < 1e-12);
    }

    #[test]
    fn fresnel_with_tail_correction() {
        // int_{-inf}^{inf} e^{i x^2} dx = sqrt(pi) e^{i pi/4}; truncate at
        // X and add the integration-by-parts tail
        // e^{iX^2} (i/(2X) + 1/(4X^3) - 3i/(8X^5)) per side.
        let spec = QuadratureSpec {
            max_evals: 8_000_000,
            ..QuadratureSpec::default()
        };
        let x_cut = 40.0;
        let body = integrate_1d(
            |x| Complex64::new(0.0, x * x).exp(),
            -x_cut,
            x_cut,
            &spec,
        )
        .unwrap();
        let tail = Complex64::new(0.0, x_cut * x_cut).exp()
            * c(
                1.0 / (4.0 * x_cut * x_cut * x_cut),
                1.0 / (2.0 * x_cut) - 3.0 / (8.0 * libm::pow(x_cut, 5.0)),
            );
        let total = body + 2.0 * tail;
        let want = sqrt(PI) * Complex64::new(0.0, PI / 4.0).exp();
        assert!((total - want).norm() < 1e-6, "got {total}, want {want}");
    }

    #[test]
    fn conjugate_symmetric_integrand_is_real() {
        // f(-x) = conj(f(x)) over a symmetric range => imaginary part ~ 0.
        let spec = QuadratureSpec::default();
        let v = integrate_1d(
            |x| Complex64::new(-x * x, 3.0 * x).exp(),
            -6.0,
            6.0,
            &spec,
        )
        .unwrap();
        assert!(v.im.abs() < spec.abs_tol * 10.0);
    }

    #[test]
    fn two_dimensional_gaussian() {
        let spec = QuadratureSpec::default();
        let w = Rect {
            x_min: -7.0,
            x_max: 7.0,
            y_min: -7.0,
            y_max: 7.0,
        };
        let v = integrate_2d(|x, y| c(exp(-x * x - y * y), 0.0), &w, &spec).unwrap();
        assert!((v.re - PI).abs() < 1e-10);
    }

    #[test]
    fn odd_integrand_vanishes() {
        let spec = QuadratureSpec::default();
        let w = Rect {
            x_min: -6.0,
            x_max: 6.0,
            y_min: -6.0,
            y_max: 6.0,
        };
        let v = integrate_2d(|x, y| c(x * exp(-x * x - y * y), 0.0), &w, &spec).unwrap();
        assert!(v.re.abs() < spec.abs_tol * 10.0);
    }

    #[test]
    fn separable_matches_product_of_1d() {
        let spec = QuadratureSpec::default();
        let g = |x: f64| exp(-0.5 * x * x) * (1.0 + 0.3 * x);
        let h = |y: f64| exp(-y * y) * cos(y);
        let w = Rect {
            x_min: -8.0,
            x_max: 8.0,
            y_min: -8.0,
            y_max: 8.0,
        };
        let v2 = integrate_2d(|x, y| c(g(x) * h(y), 0.0), &w, &spec).unwrap();
        let vx = integrate_1d(|x| c(g(x), 0.0), -8.0, 8.0, &spec).unwrap();
        let vy = integrate_1d(|y| c(h(y), 0.0), -8.0, 8.0, &spec).unwrap();
        let prod = vx * vy;
        assert!((v2 - prod).norm() < 1e-10 * prod.norm());
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let spec = QuadratureSpec::new(1e-14, 1e-14, 200, 1e-16).unwrap();
        // Oscillatory integrand that cannot converge in 200 evals.
        let r = integrate_1d(|x| c(cos(50.0 * x * x), 0.0), -5.0, 5.0, &spec);
        match r {
            Err(Error::QuadratureNoConvergence { best, .. }) => {
                assert!(best.re.is_finite());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(0.0, 1e-10, 1000, 1e-16).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-10, 50, 1e-16).is_err());
        assert!(QuadratureSpec::new(1e-10, 1e-10, 100, 1e-16).is_ok());
    }
}
