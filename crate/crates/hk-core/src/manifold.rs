//! Phase-space manifold evolution and caustic detection: a vertical line of
//! initial conditions is propagated pointwise and fold caustics are located
//! as sign changes of ∂q_t/∂p₀ along the momentum parameterization.

use crate::error::{Error, Result};
use crate::model::PhasePoint;
use crate::propagator::{evolve, Hamiltonian1D, TrajectoryResult};
use alloc::vec::Vec;
use libm::{exp, fabs, sqrt};

/// Parameters of the Morse-like oscillator
/// V(q) = D{(1 − e^{−λq})² − 1} + (1 − ε)q²/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub d: f64,
}

impl MorseParams {
    /// D = ε/(2λ²), which makes the quadratic terms of the two wells sum to
    /// a unit-frequency harmonic piece near the origin.
    pub fn from_recipe(epsilon: f64, lambda: f64) -> Self {
        Self {
            epsilon,
            lambda,
            d: epsilon / (2.0 * lambda * lambda),
        }
    }

    /// ε = 0.975, λ = 1/√12 (D = 5.85).
    pub fn reference() -> Self {
        Self::from_recipe(0.975, 1.0 / sqrt(12.0))
    }
}

/// H = p²/2 + V(q) with the Morse-like potential above.
#[derive(Debug, Clone, Copy)]
pub struct MorseOscillator {
    pub params: MorseParams,
}

impl MorseOscillator {
    fn v(&self, q: f64) -> f64 {
        let m = &self.params;
        let u = exp(-m.lambda * q);
        let w = 1.0 - u;
        m.d * (w * w - 1.0) + 0.5 * (1.0 - m.epsilon) * q * q
    }

    fn v1(&self, q: f64) -> f64 {
        let m = &self.params;
        let u = exp(-m.lambda * q);
        2.0 * m.d * m.lambda * (1.0 - u) * u + (1.0 - m.epsilon) * q
    }

    fn v2(&self, q: f64) -> f64 {
        let m = &self.params;
        let u = exp(-m.lambda * q);
        2.0 * m.d * m.lambda * m.lambda * u * (2.0 * u - 1.0) + (1.0 - m.epsilon)
    }
}

impl Hamiltonian1D for MorseOscillator {
    fn h(&self, q: f64, p: f64) -> f64 {
        0.5 * p * p + self.v(q)
    }
    fn dq(&self, q: f64, _p: f64) -> f64 {
        self.v1(q)
    }
    fn dp(&self, _q: f64, p: f64) -> f64 {
        p
    }
    fn dqq(&self, q: f64, _p: f64) -> f64 {
        self.v2(q)
    }
    fn dqp(&self, _q: f64, _p: f64) -> f64 {
        0.0
    }
    fn dpp(&self, _q: f64, _p: f64) -> f64 {
        1.0
    }
}

/// An ordered curve in phase space with a strictly increasing parameter
/// (initial momentum for line manifolds).
#[derive(Debug, Clone, PartialEq)]
pub struct Manifold {
    pub points: Vec<PhasePoint>,
    pub parameter: Vec<f64>,
}

impl Manifold {
    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 2 || self.points.len() != self.parameter.len() {
            return Err(Error::InvalidInput("manifold needs >= 2 parameterized points"));
        }
        if !self.parameter.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput("manifold parameter must strictly increase"));
        }
        Ok(())
    }
}

/// `n` uniformly spaced points on the vertical line {(q, p) : p_min ≤ p ≤ p_max}.
pub fn build_line_manifold(q: f64, p_min: f64, p_max: f64, n: usize) -> Result<Manifold> {
    if !(p_min < p_max) || n < 2 {
        return Err(Error::InvalidInput("build_line_manifold: need p_min < p_max, n >= 2"));
    }
    let mut points = Vec::with_capacity(n);
    let mut parameter = Vec::with_capacity(n);
    for k in 0..n {
        let p = p_min + (p_max - p_min) * k as f64 / (n - 1) as f64;
        points.push(PhasePoint { q, p });
        parameter.push(p);
    }
    Ok(Manifold { points, parameter })
}

/// A manifold after pointwise propagation, keeping the initial curve and the
/// per-point trajectory data (monodromy included) for caustic detection.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedManifold {
    pub initial: Manifold,
    pub evolved: Manifold,
    pub trajectories: Vec<TrajectoryResult>,
}

pub fn evolve_manifold<H: Hamiltonian1D>(
    ham: &H,
    m: &Manifold,
    t: f64,
    dt: f64,
) -> Result<EvolvedManifold> {
    m.validate()?;
    let mut evolved_points = Vec::with_capacity(m.points.len());
    let mut trajectories = Vec::with_capacity(m.points.len());
    for (i, &x0) in m.points.iter().enumerate() {
        let traj = evolve(ham, x0, t, dt).map_err(|e| match e {
            Error::Divergence { t, .. } => Error::Divergence { t, point_index: Some(i) },
            other => other,
        })?;
        evolved_points.push(PhasePoint { q: traj.q_t, p: traj.p_t });
        trajectories.push(traj);
    }
    Ok(EvolvedManifold {
        initial: m.clone(),
        evolved: Manifold {
            points: evolved_points,
            parameter: m.parameter.clone(),
        },
        trajectories,
    })
}

/// Caustic positions (final q) plus intervals where M₁₂ sits on a plateau
/// within 1e-12 of zero and the sign-change test cannot resolve anything.
#[derive(Debug, Clone, PartialEq)]
pub struct CausticReport {
    pub positions: Vec<f64>,
    pub unresolved: Vec<(f64, f64)>,
}

const PLATEAU: f64 = 1e-12;

/// Find fold caustics as strict sign changes of M₁₂ = ∂q_t/∂p₀ along the
/// parameter, refined by bisection on re-evolved interpolated initial
/// points. Plateau intervals (|M₁₂| ≤ 1e-12, e.g. t = 0 or linear dynamics)
/// are reported unresolved rather than as caustics.
pub fn detect_caustics<H: Hamiltonian1D>(
    ham: &H,
    em: &EvolvedManifold,
    t: f64,
    dt: f64,
) -> Result<CausticReport> {
    let n = em.trajectories.len();
    if n < 2 || em.initial.points.len() != n {
        return Err(Error::InvalidInput("detect_caustics: malformed evolved manifold"));
    }
    let m12_of = |s: f64| -> Result<(f64, f64)> {
        // interpolate the initial point linearly in the parameter
        let q0 = {
            let a = &em.initial;
            let j = match a.parameter.iter().position(|&v| v >= s) {
                Some(0) => 1,
                Some(j) => j,
                None => n - 1,
            };
            let w = (s - a.parameter[j - 1]) / (a.parameter[j] - a.parameter[j - 1]);
            a.points[j - 1].q * (1.0 - w) + a.points[j].q * w
        };
        let p0 = s; // line manifolds are parameterized by momentum
        let traj = evolve(ham, PhasePoint { q: q0, p: p0 }, t, dt)?;
        Ok((traj.m[0][1], traj.q_t))
    };
    let mut positions = Vec::new();
    let mut unresolved = Vec::new();
    let mut k = 0;
    while k + 1 < n {
        let a = em.trajectories[k].m[0][1];
        if fabs(a) <= PLATEAU {
            // walk the plateau: an exact grid zero bracketed by opposite
            // signs is a resolved caustic at that node, anything wider (or
            // touching an endpoint, or same-signed neighbors) is not
            let start = em.initial.parameter[k];
            let mut j = k;
            while j + 1 < n && fabs(em.trajectories[j + 1].m[0][1]) <= PLATEAU {
                j += 1;
            }
            let left = k.checked_sub(1).map(|i| em.trajectories[i].m[0][1]);
            let right = (j + 1 < n).then(|| em.trajectories[j + 1].m[0][1]);
            match (left, right) {
                (Some(l), Some(r)) if j == k && l * r < 0.0 => {
                    positions.push(em.trajectories[k].q_t);
                }
                _ => unresolved.push((start, em.initial.parameter[j])),
            }
            k = j + 1;
            continue;
        }
        let b = em.trajectories[k + 1].m[0][1];
        if fabs(b) > PLATEAU && a * b < 0.0 {
            // strict sign change: bisect in the parameter
            let mut lo = em.initial.parameter[k];
            let mut hi = em.initial.parameter[k + 1];
            let mut f_lo = a;
            let mut q_at = em.trajectories[k].q_t;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let (f_mid, q_mid) = m12_of(mid)?;
                q_at = q_mid;
                if fabs(f_mid) <= PLATEAU {
                    break;
                }
                if f_lo * f_mid < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    f_lo = f_mid;
                }
                if hi - lo < 1e-13 * (1.0 + fabs(hi)) {
                    break;
                }
            }
            positions.push(q_at);
        }
        k += 1;
    }
    Ok(CausticReport { positions, unresolved })
}
