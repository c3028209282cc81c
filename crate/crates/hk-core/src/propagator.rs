//! The general Herman-Kluk kernel for one-degree-of-freedom Hamiltonians:
//! trajectory + monodromy + action integration as one augmented system, a
//! branch-continuous HK prefactor, and the 2D phase-space quadrature between
//! position eigenstates.

use crate::error::{Error, Result};
use crate::model::{ModelParams, PhasePoint};
use crate::numerics::quad::{integrate_2d, QuadratureSpec, Rect};
use libm::{atan2, exp, fabs, log, sqrt};
use num_complex::Complex64;

/// A classical Hamiltonian with the second partials needed by the
/// variational (monodromy) equations.
pub trait Hamiltonian1D {
    fn h(&self, q: f64, p: f64) -> f64;
    fn dq(&self, q: f64, p: f64) -> f64;
    fn dp(&self, q: f64, p: f64) -> f64;
    fn dqq(&self, q: f64, p: f64) -> f64;
    fn dqp(&self, q: f64, p: f64) -> f64;
    fn dpp(&self, q: f64, p: f64) -> f64;
}

/// H = -g p^3 / 3. The right-hand sides depend on p only, so fixed-step
/// Runge-Kutta integrates it exactly.
#[derive(Debug, Clone, Copy)]
pub struct FoldingHamiltonian {
    pub g: f64,
}

impl Hamiltonian1D for FoldingHamiltonian {
    fn h(&self, _q: f64, p: f64) -> f64 {
        -self.g * p * p * p / 3.0
    }
    fn dq(&self, _q: f64, _p: f64) -> f64 {
        0.0
    }
    fn dp(&self, _q: f64, p: f64) -> f64 {
        -self.g * p * p
    }
    fn dqq(&self, _q: f64, _p: f64) -> f64 {
        0.0
    }
    fn dqp(&self, _q: f64, _p: f64) -> f64 {
        0.0
    }
    fn dpp(&self, _q: f64, p: f64) -> f64 {
        -2.0 * self.g * p
    }
}

/// Endpoint, action, and monodromy of one classical trajectory.
/// M = [[∂q_t/∂q₀, ∂q_t/∂p₀], [∂p_t/∂q₀, ∂p_t/∂p₀]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryResult {
    pub q_t: f64,
    pub p_t: f64,
    pub action: f64,
    pub m: [[f64; 2]; 2],
}

/// HK prefactor with its branch tracked continuously in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HkPrefactorState {
    /// C(q₀,p₀,t): square root of half the radicand, branch continuous from
    /// C(0) = 1.
    pub value: Complex64,
    /// Continuously unwrapped argument of the radicand (radians).
    pub accumulated_phase: f64,
}

/// Augmented state: (q, p, M11, M12, M21, M22, S).
type State = [f64; 7];

fn rhs<H: Hamiltonian1D>(ham: &H, y: &State) -> State {
    let (q, p) = (y[0], y[1]);
    let hq = ham.dq(q, p);
    let hp = ham.dp(q, p);
    let hqq = ham.dqq(q, p);
    let hqp = ham.dqp(q, p);
    let hpp = ham.dpp(q, p);
    [
        hp,
        -hq,
        hqp * y[2] + hpp * y[4],
        hqp * y[3] + hpp * y[5],
        -hqq * y[2] - hqp * y[4],
        -hqq * y[3] - hqp * y[5],
        p * hp - ham.h(q, p),
    ]
}

fn rk4_step<H: Hamiltonian1D>(ham: &H, y: &State, h: f64) -> State {
    let k1 = rhs(ham, y);
    let mut y2 = *y;
    for i in 0..7 {
        y2[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = rhs(ham, &y2);
    for i in 0..7 {
        y2[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = rhs(ham, &y2);
    for i in 0..7 {
        y2[i] = y[i] + h * k3[i];
    }
    let k4 = rhs(ham, &y2);
    let mut out = *y;
    for i in 0..7 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn check_finite(y: &State, t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergence { t, point_index: None })
    }
}

fn unpack(y: &State) -> TrajectoryResult {
    TrajectoryResult {
        q_t: y[0],
        p_t: y[1],
        action: y[6],
        m: [[y[2], y[3]], [y[4], y[5]]],
    }
}

/// Fixed-step 4th-order integration of Hamilton's equations, the variational
/// equations for M, and dS/dt = p·q̇ − H. Global error O(dt⁴).
pub fn evolve<H: Hamiltonian1D>(ham: &H, x0: PhasePoint, t: f64, dt: f64) -> Result<TrajectoryResult> {
    if !(t > 0.0 && dt > 0.0 && dt <= t) {
        return Err(Error::InvalidInput("evolve: requires 0 < dt <= t"));
    }
    let n = (t / dt + 0.5) as usize;
    let n = n.max(1);
    let h = t / n as f64;
    let mut y: State = [x0.q, x0.p, 1.0, 0.0, 0.0, 1.0, 0.0];
    for k in 0..n {
        y = rk4_step(ham, &y, h);
        check_finite(&y, (k + 1) as f64 * h)?;
    }
    Ok(unpack(&y))
}

fn radicand(m: &[[f64; 2]; 2], gamma: f64, hbar: f64) -> Complex64 {
    let two_i_hg = Complex64::new(0.0, 2.0 * hbar * gamma);
    Complex64::new(m[0][0] + m[1][1], 0.0) - two_i_hg * m[0][1] - m[1][0] / two_i_hg
}

/// Evolve a trajectory while tracking the HK radicand's argument
/// continuously; returns the endpoint data and the branch-correct prefactor.
pub fn evolve_tracked<H: Hamiltonian1D>(
    ham: &H,
    x0: PhasePoint,
    t: f64,
    dt: f64,
    gamma: f64,
    hbar: f64,
) -> Result<(TrajectoryResult, HkPrefactorState)> {
    if !(t > 0.0 && dt > 0.0 && dt <= t) {
        return Err(Error::InvalidInput("evolve: requires 0 < dt <= t"));
    }
    if !(gamma > 0.0 && hbar > 0.0) {
        return Err(Error::InvalidInput("evolve_tracked: gamma, hbar must be positive"));
    }
    let n = ((t / dt + 0.5) as usize).max(1);
    let h = t / n as f64;
    let mut y: State = [x0.q, x0.p, 1.0, 0.0, 0.0, 1.0, 0.0];
    let mut theta = 0.0; // radicand starts at 2 (arg 0)
    for k in 0..n {
        y = rk4_step(ham, &y, h);
        let tk = (k + 1) as f64 * h;
        check_finite(&y, tk)?;
        let traj = unpack(&y);
        let r = radicand(&traj.m, gamma, hbar);
        if r.norm() < 1e-12 {
            return Err(Error::BranchDegeneracy { t: tk });
        }
        let raw = atan2(r.im, r.re);
        // unwrap onto the previous value
        let mut d = raw - theta;
        while d > core::f64::consts::PI {
            d -= 2.0 * core::f64::consts::PI;
        }
        while d < -core::f64::consts::PI {
            d += 2.0 * core::f64::consts::PI;
        }
        theta += d;
    }
    let traj = unpack(&y);
    let r = radicand(&traj.m, gamma, hbar);
    let value = Complex64::from_polar(sqrt(0.5 * r.norm()), 0.5 * theta);
    Ok((traj, HkPrefactorState { value, accumulated_phase: theta }))
}

/// Integration window in the (q₀, p₀) plane; `x` is momentum, `y` position.
pub type PhaseSpaceWindow = Rect;

/// Window sized for the folding model with the initial state at q_initial:
/// the initial Gaussian confines q₀, and p₀ is bounded by the requirement
/// that the final Gaussian overlap q_final somewhere in the q₀ slice.
pub fn folding_window(
    q_final: f64,
    q_initial: f64,
    params: &ModelParams,
    truncation_threshold: f64,
) -> PhaseSpaceWindow {
    let big_l = log(1.0 / truncation_threshold) + 5.0;
    let dq = sqrt(big_l / params.gamma);
    let p_max = sqrt((sqrt(2.0 * big_l / params.gamma) + fabs(q_final - q_initial)) / (params.tau * params.g));
    Rect {
        x_min: -p_max,
        x_max: p_max,
        y_min: q_initial - dq,
        y_max: q_initial + dq,
    }
}

/// The 2D HK kernel between position eigenstates:
/// (1/2πħ)∬ dq₀ dp₀ ⟨q_f|φ(q_t,p_t)⟩ C e^{iS/ħ} ⟨φ(q₀,p₀)|q_i⟩,
/// with ⟨q|φ(q₀,p₀)⟩ = (2γ/π)^{1/4} e^{−γ(q−q₀)² + ip₀(q−q₀)/ħ}.
#[allow(clippy::too_many_arguments)]
pub fn hk_kernel_full<H: Hamiltonian1D + Sync>(
    ham: &H,
    q_final: f64,
    q_initial: f64,
    t: f64,
    dt: f64,
    gamma: f64,
    hbar: f64,
    window: &PhaseSpaceWindow,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let norm = sqrt(sqrt(2.0 * gamma / core::f64::consts::PI)); // (2γ/π)^{1/4}
    let mut traj_err: Option<Error> = None;
    let integral = integrate_2d(
        |p0, q0| {
            let res = evolve_tracked(ham, PhasePoint { q: q0, p: p0 }, t, dt, gamma, hbar);
            let (traj, pref) = match res {
                Ok(v) => v,
                Err(e) => {
                    if traj_err.is_none() {
                        traj_err = Some(e);
                    }
                    return Complex64::new(0.0, 0.0);
                }
            };
            let dqf = q_final - traj.q_t;
            let dqi = q_initial - q0;
            let bra = norm * exp(-gamma * dqf * dqf) * Complex64::new(0.0, traj.p_t * dqf / hbar).exp();
            let ket = norm * exp(-gamma * dqi * dqi) * Complex64::new(0.0, -p0 * dqi / hbar).exp();
            bra * pref.value * Complex64::new(0.0, traj.action / hbar).exp() * ket
        },
        window,
        spec,
    )?;
    if let Some(e) = traj_err {
        return Err(e);
    }
    Ok(integral / (2.0 * core::f64::consts::PI * hbar))
}
