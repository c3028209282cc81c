//! Saddle-point machinery for the reduced HK integral: the three saddles of
//! φ_τ', region-dependent contributing sets, stationary evaluation, the
//! deep-tail closed form, the shallow/deep border, and the ħ-scaling study.

use crate::error::{Error, Result};
use crate::model::{
    classify_region, derived_scales, exact_kernel, hk_kernel_reduced, hk_prefactor_analytic,
    phi_tau, phi_tau_d1, phi_tau_d2, ModelParams, RegionClass,
};
use crate::numerics::airy::{airy_ai, airy_ai_ln};
use crate::numerics::newton::polish_root;
use crate::numerics::quad::QuadratureSpec;
use crate::numerics::GAMMA_THREE_QUARTERS;
use alloc::vec;
use alloc::vec::Vec;
use libm::{atan2, exp, fabs, log, sqrt};
use num_complex::Complex64;

/// Which saddle of φ_τ' a point is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleKind {
    /// p₊ = +√(|q|/(τg)), q < 0.
    OutgoingReal,
    /// p₋ = −√(|q|/(τg)), q < 0.
    IncomingReal,
    /// p₀ = ±i√(q/(τg)), q > 0; only the upper root ever contributes.
    Tunneling,
    /// p_I = i/(2ħγτg), present for every q.
    Artifact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddlePoint {
    pub p: Complex64,
    pub kind: SaddleKind,
    pub contributing: bool,
    /// φ_τ at the saddle.
    pub phi: Complex64,
    /// φ_τ'' at the saddle.
    pub phi2: Complex64,
}

/// Degeneracies of the saddle configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleDegeneracy {
    /// q ≈ 0: p₊ and p₋ merge into a double root.
    ConventionalCaustic,
    /// q ≈ l_γ: the tunneling saddle collides with the branch point.
    HkCaustic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSet {
    pub saddles: Vec<SaddlePoint>,
    pub degeneracy: Option<SaddleDegeneracy>,
}

/// Shallow/deep border found by collision of the tunneling saddle with p_I.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BorderResult {
    pub q_border: f64,
    pub collision_residual: f64,
}

fn make_saddle(p: Complex64, kind: SaddleKind, q: f64, params: &ModelParams) -> SaddlePoint {
    SaddlePoint {
        p,
        kind,
        contributing: false,
        phi: phi_tau(p, q, params),
        phi2: phi_tau_d2(p, q, params),
    }
}

/// All saddles of φ_τ'(p) = (q + τgp²)(2γτgp − i/ħ): the pair p² = −q/(τg)
/// and the branch-linked p_I. Analytic roots are polished by damped Newton.
/// Degenerate configurations (q ≈ 0 or q ≈ l_γ) return 2 points with a flag.
pub fn find_saddles(q: f64, params: &ModelParams) -> Result<SaddleSet> {
    params.validate()?;
    let scales = derived_scales(params);
    let tol = 1e-9 * scales.l;
    let tg = params.tau * params.g;
    let polish = |guess: Complex64| -> Result<Complex64> {
        polish_root(
            |p| phi_tau_d1(p, q, params),
            |p| phi_tau_d2(p, q, params),
            guess,
        )
    };
    let artifact = make_saddle(scales.p_i, SaddleKind::Artifact, q, params);

    if fabs(q) <= tol {
        // double root at p = 0
        let s = make_saddle(Complex64::new(0.0, 0.0), SaddleKind::Tunneling, q, params);
        return Ok(SaddleSet {
            saddles: vec![s, artifact],
            degeneracy: Some(SaddleDegeneracy::ConventionalCaustic),
        });
    }
    if q < 0.0 {
        let pr = sqrt(-q / tg);
        let plus = polish(Complex64::new(pr, 0.0))?;
        let minus = polish(Complex64::new(-pr, 0.0))?;
        Ok(SaddleSet {
            saddles: vec![
                make_saddle(plus, SaddleKind::OutgoingReal, q, params),
                make_saddle(minus, SaddleKind::IncomingReal, q, params),
                artifact,
            ],
            degeneracy: None,
        })
    } else {
        let s = sqrt(q / tg);
        if fabs(q - scales.l_gamma) <= tol {
            let upper = make_saddle(Complex64::new(0.0, s), SaddleKind::Tunneling, q, params);
            let lower = make_saddle(Complex64::new(0.0, -s), SaddleKind::Tunneling, q, params);
            return Ok(SaddleSet {
                saddles: vec![upper, lower],
                degeneracy: Some(SaddleDegeneracy::HkCaustic),
            });
        }
        let upper = polish(Complex64::new(0.0, s))?;
        let lower = polish(Complex64::new(0.0, -s))?;
        Ok(SaddleSet {
            saddles: vec![
                make_saddle(upper, SaddleKind::Tunneling, q, params),
                make_saddle(lower, SaddleKind::Tunneling, q, params),
                artifact,
            ],
            degeneracy: None,
        })
    }
}

/// Saddles with contributing flags set by region: Allowed → {p₊, p₋},
/// Shallow → {upper p₀}, Deep → {p_I}. Boundary bands are caustic errors.
pub fn contributing_set(q: f64, params: &ModelParams) -> Result<SaddleSet> {
    let scales = derived_scales(params);
    let tol = 1e-6 * scales.l;
    let region = classify_region(q, &scales, tol);
    if matches!(region, RegionClass::ConventionalCaustic | RegionClass::HkCaustic) {
        return Err(Error::Caustic { q });
    }
    let mut set = find_saddles(q, params)?;
    for s in &mut set.saddles {
        s.contributing = match (region, s.kind) {
            (RegionClass::Allowed, SaddleKind::OutgoingReal | SaddleKind::IncomingReal) => true,
            (RegionClass::Shallow, SaddleKind::Tunneling) => s.p.im > 0.0,
            (RegionClass::Deep, SaddleKind::Artifact) => true,
            _ => false,
        };
    }
    Ok(set)
}

/// Stationary-phase weight of one simple saddle:
/// (1/2πħ)·C(p_s)·e^{−φ(p_s)}·e^{iθ}·√(2π/|φ₂|), with the descent angle
/// θ = −arg(φ₂)/2 folded into (−π/2, π/2] so Re(φ₂e^{2iθ}) > 0 and the
/// orientation follows the real-axis traversal.
pub fn saddle_contribution(s: &SaddlePoint, params: &ModelParams) -> Result<Complex64> {
    if s.kind == SaddleKind::Artifact {
        return Err(Error::InvalidInput(
            "saddle_contribution: the branch point is not a simple saddle",
        ));
    }
    let scale = 1.0 + s.phi.norm();
    if s.phi2.norm() < 1e-10 * scale {
        return Err(Error::Caustic { q: f64::NAN });
    }
    let mut theta = -0.5 * atan2(s.phi2.im, s.phi2.re);
    if theta <= -core::f64::consts::FRAC_PI_2 {
        theta += core::f64::consts::PI;
    } else if theta > core::f64::consts::FRAC_PI_2 {
        theta -= core::f64::consts::PI;
    }
    let c = hk_prefactor_analytic(s.p, params)?;
    let amp = sqrt(2.0 * core::f64::consts::PI / s.phi2.norm());
    Ok(c * (-s.phi).exp() * Complex64::from_polar(amp, theta)
        / (2.0 * core::f64::consts::PI * params.hbar))
}

/// Deep-tail closed form (q > l_γ): branch-point contribution
/// [Γ(3/4)/(2πl(γl²)^{1/4})]·(l/(q−l_γ))^{3/4}·e^{−(γ/2)(q+l_γ)² + (2/3)γl_γ²}.
/// The exponent constant is fixed by φ_τ(p_I) = γ(q+l_γ)²/2 − (2/3)γl_γ²,
/// arbitrated against the quadrature of the reduced integral.
pub fn hksc_deep(q: f64, params: &ModelParams) -> Result<f64> {
    Ok(exp(hksc_deep_ln(q, params)?))
}

/// ln of [`hksc_deep`], usable when the tail underflows f64.
pub fn hksc_deep_ln(q: f64, params: &ModelParams) -> Result<f64> {
    params.validate()?;
    let scales = derived_scales(params);
    let (l, lg) = (scales.l, scales.l_gamma);
    if q <= lg + 1e-6 * l {
        return Err(Error::Caustic { q });
    }
    let g = params.gamma;
    Ok(log(GAMMA_THREE_QUARTERS / (2.0 * core::f64::consts::PI * l))
        - 0.25 * log(g * l * l)
        + 0.75 * log(l / (q - lg))
        - 0.5 * g * (q + lg) * (q + lg)
        + 2.0 / 3.0 * g * lg * lg)
}

/// Region-dispatched semiclassical kernel: interfering real saddles in the
/// allowed region, the tunneling saddle in the shallow region, and the
/// branch-point tail in the deep region.
pub fn hk_semiclassical(q: f64, params: &ModelParams) -> Result<f64> {
    let scales = derived_scales(params);
    let region = classify_region(q, &scales, 1e-6 * scales.l);
    match region {
        RegionClass::ConventionalCaustic | RegionClass::HkCaustic => Err(Error::Caustic { q }),
        RegionClass::Deep => hksc_deep(q, params),
        RegionClass::Allowed | RegionClass::Shallow => {
            let set = contributing_set(q, params)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for s in set.saddles.iter().filter(|s| s.contributing) {
                acc += saddle_contribution(s, params)?;
            }
            Ok(acc.re)
        }
    }
}

/// Locate the shallow/deep border by bisection on Im p₀(q) − Im p_I
/// (monotone in q); at the solution the tunneling saddle hits p_I.
pub fn find_border(params: &ModelParams) -> Result<BorderResult> {
    params.validate()?;
    let scales = derived_scales(params);
    let tg = params.tau * params.g;
    let target = scales.p_i.im;
    let f = |q: f64| sqrt(q / tg) - target;
    let mut lo = 0.0;
    let mut hi = tg * target * target * 4.0;
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi {
            break;
        }
    }
    let q_border = 0.5 * (lo + hi);
    let p0 = Complex64::new(0.0, sqrt(q_border / tg));
    Ok(BorderResult {
        q_border,
        collision_residual: (p0 - scales.p_i).norm(),
    })
}

/// One rung of the ħ ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub hbar: f64,
    /// Physical q at this rung (the dimensionless target times the rung's
    /// l or l_γ).
    pub q: f64,
    /// Allowed/Shallow: |K^HK − K|/|K|. Deep: |ln(K^HK/K)|.
    pub deviation: f64,
    /// Deep rungs only: the quadrature was infeasible in double precision
    /// and the closed-form tail was used for K^HK instead.
    pub asymptotic_fallback: bool,
}

/// Largest exponent budget for which the deep-region quadrature still
/// resolves the tail in f64: the integrand peak is ~e^{γ l_γ q/3}-fold
/// larger than the answer, so beyond ~e^30 of cancellation we fall back to
/// the closed form.
fn deep_quadrature_feasible(q: f64, params: &ModelParams) -> bool {
    let lg = derived_scales(params).l_gamma;
    params.gamma * lg * (q - lg / 6.0) < 30.0
}

/// ħ → 0 study at a fixed dimensionless target: q/l for Allowed/Shallow,
/// q/l_γ for Deep; γ, g, τ are held fixed so the coherent-state width is an
/// ħ-independent instrument parameter.
pub fn hbar_scaling_study(
    target: f64,
    region: RegionClass,
    hbar_list: &[f64],
    base: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<Vec<ScalingRow>> {
    base.validate()?;
    if hbar_list.is_empty() {
        return Err(Error::InvalidInput("hbar_scaling_study: empty ladder"));
    }
    match region {
        RegionClass::Allowed if target >= 0.0 => {
            return Err(Error::InvalidInput("allowed target must have q/l < 0"))
        }
        RegionClass::Shallow if target <= 0.0 => {
            return Err(Error::InvalidInput("shallow target must have q/l > 0"))
        }
        RegionClass::Deep if target <= 1.0 => {
            return Err(Error::InvalidInput("deep target must have q/l_gamma > 1"))
        }
        RegionClass::ConventionalCaustic | RegionClass::HkCaustic => {
            return Err(Error::InvalidInput("caustic bands have no scaling ladder"))
        }
        _ => {}
    }
    let mut rows = Vec::with_capacity(hbar_list.len());
    for &hbar in hbar_list {
        let params = ModelParams { hbar, ..*base };
        params.validate()?;
        let scales = derived_scales(&params);
        match region {
            RegionClass::Allowed | RegionClass::Shallow => {
                let q = target * scales.l;
                let k_hk = hk_kernel_reduced(q, &params, spec)?.re;
                let k = exact_kernel(q, &params)?;
                rows.push(ScalingRow {
                    hbar,
                    q,
                    deviation: fabs(k_hk - k) / fabs(k),
                    asymptotic_fallback: false,
                });
            }
            RegionClass::Deep => {
                let q = target * scales.l_gamma;
                let fallback = !deep_quadrature_feasible(q, &params);
                let ln_hk = if fallback {
                    hksc_deep_ln(q, &params)?
                } else {
                    log(hk_kernel_reduced(q, &params, spec)?.re)
                };
                let x = q / scales.l;
                let ln_exact = if x <= 30.0 {
                    log(airy_ai(x)?) - log(scales.l)
                } else {
                    airy_ai_ln(x)? - log(scales.l)
                };
                rows.push(ScalingRow {
                    hbar,
                    q,
                    deviation: fabs(ln_hk - ln_exact),
                    asymptotic_fallback: fallback,
                });
            }
            _ => unreachable!(),
        }
    }
    Ok(rows)
}
