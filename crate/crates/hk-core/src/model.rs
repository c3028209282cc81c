//! The exactly solvable folding model `H = -g p^3 / 3`: parameters, derived
//! scales, exact and semiclassical kernels, the analytic classical map, and
//! the reduced one-dimensional HK integral.

use crate::error::{Error, Result};
use crate::numerics::airy::airy_ai;
use crate::numerics::quad::{integrate_1d, QuadratureSpec};
use libm::{cbrt, cos, exp, fabs, log, pow, sqrt};
use num_complex::Complex64;

/// Physical parameters of the folding model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Folding strength (positive).
    pub g: f64,
    /// Evolution interval.
    pub tau: f64,
    /// Planck constant.
    pub hbar: f64,
    /// Coherent-state width parameter.
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(g: f64, tau: f64, hbar: f64, gamma: f64) -> Result<Self> {
        let p = Self { g, tau, hbar, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.g, self.tau, self.hbar, self.gamma] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput("model parameters must be positive and finite"));
            }
        }
        Ok(())
    }
}

impl Default for ModelParams {
    /// The nondimensionalization g = τ = ħ = 1, γ = 1/2 (l = l_γ = 1).
    fn default() -> Self {
        Self { g: 1.0, tau: 1.0, hbar: 1.0, gamma: 0.5 }
    }
}

/// Length and momentum scales fixed by the parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScales {
    /// Penetration length l = (ħ²gτ)^{1/3}.
    pub l: f64,
    /// Shallow/deep border l_γ = 1/(4γ²l³) = 1/(4γ²ħ²gτ).
    pub l_gamma: f64,
    /// Artifact branch-point momentum p_I = i/(2ħγτg); pure imaginary.
    pub p_i: Complex64,
}

/// A point of the classical phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
}

/// Partition of the real q line by the tunneling structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionClass {
    /// q < 0: two real saddles, oscillatory kernel.
    Allowed,
    /// 0 < q < l_γ: the conventional tunneling saddle dominates.
    Shallow,
    /// q > l_γ: the artifact branch point takes over.
    Deep,
    /// q ≈ 0: fold caustic of the classical map.
    ConventionalCaustic,
    /// q ≈ l_γ: collision of the tunneling saddle with the branch point.
    HkCaustic,
}

pub fn derived_scales(params: &ModelParams) -> DerivedScales {
    let l = cbrt(params.hbar * params.hbar * params.g * params.tau);
    let l_gamma = 1.0 / (4.0 * params.gamma * params.gamma * l * l * l);
    let p_i = Complex64::new(0.0, 1.0 / (2.0 * params.hbar * params.gamma * params.tau * params.g));
    DerivedScales { l, l_gamma, p_i }
}

/// Exact kernel K(q) = Ai(q/l)/l.
pub fn exact_kernel(q: f64, params: &ModelParams) -> Result<f64> {
    let l = derived_scales(params).l;
    Ok(airy_ai(q / l)? / l)
}

/// Conventional stationary-phase kernel: two interfering real saddles for
/// q < 0, the single tunneling saddle for q > 0. Diverges at the q = 0
/// caustic like |q|^{-1/4}.
pub fn sc_kernel(q: f64, params: &ModelParams) -> Result<f64> {
    let l = derived_scales(params).l;
    let tol = 1e-6 * l;
    if fabs(q) <= tol {
        return Err(Error::Caustic { q });
    }
    let x = fabs(q) / l;
    let zeta = 2.0 / 3.0 * pow(x, 1.5);
    let root_pi = sqrt(core::f64::consts::PI);
    if q < 0.0 {
        Ok(cos(zeta - core::f64::consts::FRAC_PI_4) / (root_pi * l * pow(x, 0.25)))
    } else {
        Ok(exp(-zeta) / (2.0 * root_pi * l * pow(x, 0.25)))
    }
}

/// One step of the analytic flow of H = -g p^3/3: p is conserved and
/// q advances by -g p² t.
pub fn classical_map(x: PhasePoint, t: f64, params: &ModelParams) -> PhasePoint {
    PhasePoint {
        q: x.q - params.g * x.p * x.p * t,
        p: x.p,
    }
}

/// Classical action S_t(p0) = -(2/3) g p0³ t accumulated along the flow.
pub fn action(p0: f64, t: f64, params: &ModelParams) -> f64 {
    -2.0 / 3.0 * params.g * p0 * p0 * p0 * t
}

/// Exponent of the reduced HK integrand:
/// φ_τ(p) = γ(q + τg p²)²/2 − i p q/ħ − i τ g p³/(3ħ).
pub fn phi_tau(p: Complex64, q: f64, params: &ModelParams) -> Complex64 {
    let tg = params.tau * params.g;
    let w = q + tg * p * p;
    0.5 * params.gamma * w * w
        - Complex64::i() * p * q / params.hbar
        - Complex64::i() * tg * p * p * p / (3.0 * params.hbar)
}

/// First derivative, in the factorized form (q + τg p²)(2γτg p − i/ħ).
pub fn phi_tau_d1(p: Complex64, q: f64, params: &ModelParams) -> Complex64 {
    let tg = params.tau * params.g;
    (q + tg * p * p) * (2.0 * params.gamma * tg * p - Complex64::i() / params.hbar)
}

/// Second derivative of φ_τ.
pub fn phi_tau_d2(p: Complex64, q: f64, params: &ModelParams) -> Complex64 {
    let tg = params.tau * params.g;
    2.0 * tg * p * (2.0 * params.gamma * tg * p - Complex64::i() / params.hbar)
        + (q + tg * p * p) * 2.0 * params.gamma * tg
}

/// Closed-form HK prefactor C(p, τ) = (1 − p/p_I)^{1/2} = (1 + 2iħγτg p)^{1/2}
/// (principal branch). The cut is the vertical ray above p_I; for real p the
/// radicand stays on the line 1 + i·ℝ and never meets it.
pub fn hk_prefactor_analytic(p: Complex64, params: &ModelParams) -> Result<Complex64> {
    let w = Complex64::new(1.0, 0.0)
        + Complex64::i() * 2.0 * params.hbar * params.gamma * params.tau * params.g * p;
    if w.re < 0.0 && fabs(w.im) < 1e-14 * (1.0 + w.re.abs()) {
        return Err(Error::BranchCut);
    }
    Ok(w.sqrt())
}

/// Momentum window for the reduced integral: Re φ_τ grows like γτ²g²p⁴/2, so
/// |p| beyond this bound contributes less than the truncation threshold.
pub fn reduced_window(q: f64, params: &ModelParams, truncation_threshold: f64) -> f64 {
    let big_l = log(1.0 / truncation_threshold) + 5.0;
    sqrt((sqrt(2.0 * big_l / params.gamma) + fabs(q)) / (params.tau * params.g))
}

/// Reduced HK kernel: (1/2πħ) ∫ dp C(p,τ) e^{−φ_τ(p)} over real p.
/// Real up to quadrature tolerance by conjugate symmetry of the integrand.
pub fn hk_kernel_reduced(q: f64, params: &ModelParams, spec: &QuadratureSpec) -> Result<Complex64> {
    params.validate()?;
    let p_max = reduced_window(q, params, spec.truncation_threshold);
    let mut prefactor_err = None;
    let integral = integrate_1d(
        |p| {
            let pc = Complex64::new(p, 0.0);
            match hk_prefactor_analytic(pc, params) {
                Ok(c) => c * (-phi_tau(pc, q, params)).exp(),
                Err(e) => {
                    prefactor_err = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            }
        },
        -p_max,
        p_max,
        spec,
    )?;
    if let Some(e) = prefactor_err {
        return Err(e);
    }
    Ok(integral / (2.0 * core::f64::consts::PI * params.hbar))
}

/// Partition q into the five regions; bands of half-width `boundary_tol`
/// around 0 and l_γ map to the caustic variants.
pub fn classify_region(q: f64, scales: &DerivedScales, boundary_tol: f64) -> RegionClass {
    if fabs(q) <= boundary_tol {
        RegionClass::ConventionalCaustic
    } else if fabs(q - scales.l_gamma) <= boundary_tol {
        RegionClass::HkCaustic
    } else if q < 0.0 {
        RegionClass::Allowed
    } else if q < scales.l_gamma {
        RegionClass::Shallow
    } else {
        RegionClass::Deep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AI0: f64 = 0.355_028_053_887_817_24;

    fn default_spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn scales_at_reference_params() {
        let s = derived_scales(&ModelParams::default());
        assert!((s.l - 1.0).abs() < 1e-15);
        assert!((s.l_gamma - 1.0).abs() < 1e-15);
        assert!((s.p_i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn scales_at_gamma_one() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let s = derived_scales(&p);
        assert!((s.l - 1.0).abs() < 1e-15);
        assert!((s.l_gamma - 0.25).abs() < 1e-15);
        assert!((s.p_i - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn scale_identity_im_pi() {
        // Im p_I = sqrt(l_gamma / (tau g)) across a parameter sweep.
        let mut k = 0u32;
        for &g in &[0.5, 1.0, 2.0] {
            for &tau in &[0.7, 1.0, 1.9] {
                for &hbar in &[0.25, 1.0] {
                    for &gamma in &[0.3, 0.5, 1.4] {
                        let p = ModelParams::new(g, tau, hbar, gamma).unwrap();
                        let s = derived_scales(&p);
                        let want = sqrt(s.l_gamma / (tau * g));
                        assert!(
                            (s.p_i.im - want).abs() < 1e-13 * want,
                            "identity broken at g={g} tau={tau} hbar={hbar} gamma={gamma}"
                        );
                        k += 1;
                    }
                }
            }
        }
        assert_eq!(k, 54);
    }

    #[test]
    fn exact_kernel_at_origin() {
        let v = exact_kernel(0.0, &ModelParams::default()).unwrap();
        assert!((v - AI0).abs() < 1e-14);
    }

    #[test]
    fn exact_kernel_positive_tail_decays() {
        let p = ModelParams::default();
        let mut prev = exact_kernel(1.0, &p).unwrap();
        for k in 2..=5 {
            let v = exact_kernel(k as f64, &p).unwrap();
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn sc_kernel_plugin_value() {
        // q/l = 9: (1/(2 sqrt(pi) l sqrt(3))) e^{-18}.
        let v = sc_kernel(9.0, &ModelParams::default()).unwrap();
        let want = exp(-18.0) / (2.0 * sqrt(core::f64::consts::PI) * sqrt(3.0));
        assert!((v - want).abs() < 1e-15 * want.abs().max(1.0));
        assert!((v - 2.480_468_786_5e-9).abs() < 1e-19);
    }

    #[test]
    fn sc_kernel_matches_exact_far_allowed() {
        let p = ModelParams::default();
        let v = sc_kernel(-25.0, &p).unwrap();
        let e = exact_kernel(-25.0, &p).unwrap();
        assert!((v - e).abs() < 0.01 * e.abs());
    }

    #[test]
    fn sc_kernel_caustic_error() {
        assert!(matches!(
            sc_kernel(0.0, &ModelParams::default()),
            Err(Error::Caustic { .. })
        ));
    }

    #[test]
    fn classical_map_examples() {
        let p = ModelParams::default();
        let a = classical_map(PhasePoint { q: 0.0, p: 1.0 }, 1.0, &p);
        assert_eq!(a, PhasePoint { q: -1.0, p: 1.0 });
        let b = classical_map(PhasePoint { q: 0.0, p: 0.0 }, 7.0, &p);
        assert_eq!(b, PhasePoint { q: 0.0, p: 0.0 });
        let c = classical_map(PhasePoint { q: 0.0, p: -1.0 }, 1.0, &p);
        assert_eq!(c, PhasePoint { q: -1.0, p: -1.0 });
    }

    #[test]
    fn classical_map_flow_property() {
        let p = ModelParams::default();
        let x = PhasePoint { q: 0.4, p: -1.3 };
        let ab = classical_map(classical_map(x, 0.6, &p), 1.1, &p);
        let whole = classical_map(x, 1.7, &p);
        assert!((ab.q - whole.q).abs() < 1e-14 && ab.p == whole.p);
    }

    #[test]
    fn action_values() {
        let p = ModelParams::default();
        assert_eq!(action(0.0, 3.0, &p), 0.0);
        assert!((action(1.0, 1.0, &p) + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(action(-1.7, 2.0, &p), -action(1.7, 2.0, &p));
    }

    #[test]
    fn phi_tau_basics() {
        let p = ModelParams::default();
        let at0 = phi_tau(Complex64::new(0.0, 0.0), 2.0, &p);
        assert!((at0 - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // phi'(p_I) = 0 via the factorized derivative.
        let s = derived_scales(&p);
        assert!(phi_tau_d1(s.p_i, 0.7, &p).norm() < 1e-14);
        // conjugate symmetry for real p.
        let z = phi_tau(Complex64::new(1.2, 0.0), -0.5, &p);
        let zm = phi_tau(Complex64::new(-1.2, 0.0), -0.5, &p);
        assert!((zm - z.conj()).norm() < 1e-14);
    }

    #[test]
    fn phi_tau_derivatives_consistent() {
        // Central differences against the closed forms at a complex point.
        let p = ModelParams::new(1.3, 0.8, 0.9, 0.6).unwrap();
        let z = Complex64::new(0.7, 0.4);
        let q = -1.1;
        let h = 1e-5;
        let d1 = (phi_tau(z + h, q, &p) - phi_tau(z - h, q, &p)) / (2.0 * h);
        assert!((d1 - phi_tau_d1(z, q, &p)).norm() < 1e-8);
        let d2 = (phi_tau_d1(z + h, q, &p) - phi_tau_d1(z - h, q, &p)) / (2.0 * h);
        assert!((d2 - phi_tau_d2(z, q, &p)).norm() < 1e-8);
    }

    #[test]
    fn prefactor_values() {
        let p = ModelParams::default();
        let s = derived_scales(&p);
        let one = hk_prefactor_analytic(Complex64::new(0.0, 0.0), &p).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let at_branch = hk_prefactor_analytic(s.p_i, &p).unwrap();
        assert!(at_branch.norm() < 1e-7);
        // |C(p)|^4 = |w|^2 = 1 + (2 hbar gamma tau g p)^2 for real p.
        for &pr in &[-2.0, -0.3, 0.9, 4.0] {
            let c = hk_prefactor_analytic(Complex64::new(pr, 0.0), &p).unwrap();
            let want = 1.0 + (2.0 * p.hbar * p.gamma * p.tau * p.g * pr).powi(2);
            assert!((c.norm_sqr().powi(2) - want).abs() < 1e-12 * want);
        }
    }

    #[test]
    fn prefactor_branch_cut_detected() {
        let p = ModelParams::default();
        // Above p_I on the imaginary axis the radicand is real negative.
        let r = hk_prefactor_analytic(Complex64::new(0.0, 2.0), &p);
        assert!(matches!(r, Err(Error::BranchCut)));
    }

    #[test]
    fn reduced_kernel_is_real() {
        let p = ModelParams::default();
        let spec = default_spec();
        for &q in &[-2.0, -0.5, 0.0, 0.3, 1.5, 3.0] {
            let v = hk_kernel_reduced(q, &p, &spec).unwrap();
            assert!(v.im.abs() < 10.0 * spec.abs_tol, "Im = {} at q = {q}", v.im);
        }
    }

    #[test]
    fn reduced_kernel_against_frozen_quadrature() {
        // Reference values from an independent high-precision evaluation of
        // the same integral.
        let p = ModelParams::default();
        let spec = default_spec();
        let cases = [
            (2.0, 0.024_744_402_528_8),
            (2.5, 0.009_545_909_732_598),
            (3.0, 0.003_286_022_295_72),
            (3.5, 0.001_009_112_671_756_8),
            (4.0, 0.000_276_267_797_432),
        ];
        for (q, want) in cases {
            let v = hk_kernel_reduced(q, &p, &spec).unwrap().re;
            assert!(
                (v - want).abs() < 1e-9 * want.abs().max(1e-3),
                "q = {q}: got {v}, want {want}"
            );
        }
    }

    #[test]
    fn reduced_kernel_tracks_exact_in_allowed_region() {
        let p = ModelParams::default();
        let spec = default_spec();
        let v = hk_kernel_reduced(-2.0, &p, &spec).unwrap().re;
        let e = exact_kernel(-2.0, &p).unwrap();
        assert!((v - e).abs() < 0.05 * e.abs(), "hk {v} vs exact {e}");
    }

    #[test]
    fn region_partition() {
        let s = derived_scales(&ModelParams::default());
        let tol = 1e-6;
        assert_eq!(classify_region(-3.0, &s, tol), RegionClass::Allowed);
        assert_eq!(classify_region(0.5, &s, tol), RegionClass::Shallow);
        assert_eq!(classify_region(2.0, &s, tol), RegionClass::Deep);
        assert_eq!(classify_region(0.0, &s, tol), RegionClass::ConventionalCaustic);
        assert_eq!(classify_region(1.0 + 1e-9, &s, tol), RegionClass::HkCaustic);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(ModelParams::new(-1.0, 1.0, 1.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, 0.0, 1.0, 0.5).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 0.5).is_err());
    }
}
