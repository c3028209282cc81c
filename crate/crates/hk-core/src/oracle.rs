//! Independent exact-quantum references: direct quadrature of the
//! momentum-representation kernel with its oscillatory tails rotated into
//! decay wedges, and a unitary split-step grid propagator for generic
//! H = p²/2 + V(q).

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::quad::{integrate_1d, QuadratureSpec};
use alloc::vec::Vec;
use libm::{cbrt, exp, fabs, sqrt};
use num_complex::Complex64;

fn kernel_integrand(p: Complex64, q: f64, params: &ModelParams) -> Complex64 {
    let h = params.hbar;
    (Complex64::i() * (p * q / h + params.g * params.tau * p * p * p / (3.0 * h))).exp()
}

/// Rotation point: beyond every saddle so the deformation crosses nothing.
fn rotation_point(q: f64, params: &ModelParams) -> f64 {
    let tg = params.tau * params.g;
    let p_saddle = 4.0 * sqrt(fabs(q) / tg);
    let p_scale = 8.0 * cbrt(params.hbar / tg);
    p_saddle.max(p_scale)
}

/// Tail length in the rotated direction, grown until the integrand is dead.
fn tail_length(q: f64, big_p: f64, dir: Complex64, params: &ModelParams, eps: f64) -> f64 {
    let anchor = if dir.re > 0.0 {
        Complex64::new(big_p, 0.0)
    } else {
        Complex64::new(-big_p, 0.0)
    };
    let mut t = 1.0;
    for _ in 0..60 {
        if kernel_integrand(anchor + t * dir, q, params).norm() < eps {
            return t;
        }
        t *= 2.0;
    }
    t
}

/// Eq.-(2) style kernel: (1/2πħ)∫dp e^{ipq/ħ + igτp³/(3ħ)} with the tails of
/// the real-axis contour rotated to e^{iπ/6} (right) and e^{i5π/6} (left),
/// both inside wedges where the cubic phase decays. Matches Ai(q/l)/l.
pub fn exact_kernel_quadrature(
    q: f64,
    params: &ModelParams,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    exact_kernel_quadrature_shaped(q, params, spec, 1.0, core::f64::consts::FRAC_PI_6)
}

/// As [`exact_kernel_quadrature`] but with the rotation point scaled by
/// `p_factor` and the rotation angle chosen freely inside the decay wedges,
/// for contour-invariance checks.
pub fn exact_kernel_quadrature_shaped(
    q: f64,
    params: &ModelParams,
    spec: &QuadratureSpec,
    p_factor: f64,
    angle: f64,
) -> Result<Complex64> {
    params.validate()?;
    if !(angle > 0.0 && angle < core::f64::consts::FRAC_PI_3) {
        return Err(Error::InvalidInput("rotation angle must lie inside the decay wedge"));
    }
    let big_p = p_factor * rotation_point(q, params);
    let eps = spec.truncation_threshold;
    let dir_r = Complex64::from_polar(1.0, angle);
    let dir_l = Complex64::from_polar(1.0, core::f64::consts::PI - angle);
    let t_r = tail_length(q, big_p, dir_r, params, eps);
    let t_l = tail_length(q, big_p, dir_l, params, eps);

    let body = integrate_1d(
        |p| kernel_integrand(Complex64::new(p, 0.0), q, params),
        -big_p,
        big_p,
        spec,
    )?;
    let right = integrate_1d(
        |s| kernel_integrand(Complex64::new(big_p, 0.0) + s * dir_r, q, params),
        0.0,
        t_r,
        spec,
    )? * dir_r;
    let left = integrate_1d(
        |s| kernel_integrand(Complex64::new(-big_p, 0.0) + s * dir_l, q, params),
        0.0,
        t_l,
        spec,
    )? * dir_l;
    // the left tail runs outward from -P, i.e. against the contour direction
    Ok((body + right - left) / (2.0 * core::f64::consts::PI * params.hbar))
}

/// Uniform position grid with a power-of-two point count (for the radix-2
/// transform).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub q_min: f64,
    pub q_max: f64,
    pub n: usize,
}

impl Grid1D {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_min < self.q_max) || self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::InvalidInput(
                "grid needs q_min < q_max and a power-of-two n >= 8",
            ));
        }
        Ok(())
    }

    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / self.n as f64
    }

    pub fn q(&self, j: usize) -> f64 {
        self.q_min + self.dq() * j as f64
    }

    /// Momentum of FFT bin j (standard wraparound ordering).
    pub fn p(&self, j: usize, hbar: f64) -> f64 {
        let len = self.q_max - self.q_min;
        let k = if j < self.n / 2 {
            j as f64
        } else {
            j as f64 - self.n as f64
        };
        2.0 * core::f64::consts::PI * hbar * k / len
    }
}

/// In-place radix-2 Cooley-Tukey; `inverse` flips the twiddle sign and
/// applies the 1/n normalization.
fn fft(data: &mut [Complex64], inverse: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        // direct twiddles (no running product) keep the transform unitary
        // to ~1e-15 even over long stages
        let half = len / 2;
        let mut twiddle = Vec::with_capacity(half);
        for k in 0..half {
            twiddle.push(Complex64::from_polar(1.0, ang * k as f64));
        }
        let mut i = 0;
        while i < n {
            for k in 0..half {
                let u = data[i + k];
                let v = data[i + k + half] * twiddle[k];
                data[i + k] = u + v;
                data[i + k + half] = u - v;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let scale = 1.0 / n as f64;
        for z in data.iter_mut() {
            *z *= scale;
        }
    }
}

/// Normalized Gaussian packet e^{−γ(q−q₀)² + ip₀(q−q₀)/ħ} sampled on the grid.
pub fn gaussian_packet(grid: &Grid1D, q0: f64, p0: f64, gamma: f64, hbar: f64) -> Result<Vec<Complex64>> {
    grid.validate()?;
    let mut psi = Vec::with_capacity(grid.n);
    for j in 0..grid.n {
        let d = grid.q(j) - q0;
        psi.push(exp(-gamma * d * d) * Complex64::new(0.0, p0 * d / hbar).exp());
    }
    let norm = sqrt(psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dq());
    for z in &mut psi {
        *z /= norm;
    }
    Ok(psi)
}

fn boundary_amplitude(psi: &[Complex64]) -> f64 {
    let margin = (psi.len() / 32).max(2);
    psi[..margin]
        .iter()
        .chain(&psi[psi.len() - margin..])
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Strang-split unitary propagation of iħ∂ψ = (p²/2 + V)ψ on a periodic
/// grid. Negative `t` propagates backwards. Errors if amplitude reaches the
/// grid margin (periodic wraparound would silently corrupt the result).
pub fn grid_propagate<V: Fn(f64) -> f64>(
    v: V,
    psi0: &[Complex64],
    t: f64,
    steps: usize,
    grid: &Grid1D,
    hbar: f64,
) -> Result<Vec<Complex64>> {
    grid.validate()?;
    if psi0.len() != grid.n {
        return Err(Error::InvalidInput("grid_propagate: psi0 length != grid.n"));
    }
    if steps < 100 || t == 0.0 || !(hbar > 0.0) {
        return Err(Error::InvalidInput("grid_propagate: need steps >= 100, t != 0, hbar > 0"));
    }
    let leak0 = boundary_amplitude(psi0);
    if leak0 > 1e-12 {
        return Err(Error::DomainTooSmall { boundary_amplitude: leak0 });
    }
    let dt = t / steps as f64;
    let half_v: Vec<Complex64> = (0..grid.n)
        .map(|j| Complex64::new(0.0, -v(grid.q(j)) * 0.5 * dt / hbar).exp())
        .collect();
    let kinetic: Vec<Complex64> = (0..grid.n)
        .map(|j| {
            let p = grid.p(j, hbar);
            Complex64::new(0.0, -0.5 * p * p * dt / hbar).exp()
        })
        .collect();
    let mut psi = psi0.to_vec();
    for _ in 0..steps {
        for (z, ph) in psi.iter_mut().zip(&half_v) {
            *z *= ph;
        }
        fft(&mut psi, false);
        for (z, ph) in psi.iter_mut().zip(&kinetic) {
            *z *= ph;
        }
        fft(&mut psi, true);
        for (z, ph) in psi.iter_mut().zip(&half_v) {
            *z *= ph;
        }
    }
    let leak = boundary_amplitude(&psi);
    if leak > 1e-8 {
        return Err(Error::DomainTooSmall { boundary_amplitude: leak });
    }
    Ok(psi)
}

/// ⟨ψ|p²/2 + V|ψ⟩ via the momentum representation for the kinetic part.
pub fn energy_expectation<V: Fn(f64) -> f64>(
    v: V,
    psi: &[Complex64],
    grid: &Grid1D,
    hbar: f64,
) -> Result<f64> {
    grid.validate()?;
    if psi.len() != grid.n {
        return Err(Error::InvalidInput("energy_expectation: psi length != grid.n"));
    }
    let dq = grid.dq();
    let pot: f64 = psi
        .iter()
        .enumerate()
        .map(|(j, z)| v(grid.q(j)) * z.norm_sqr())
        .sum::<f64>()
        * dq;
    let mut phi = psi.to_vec();
    fft(&mut phi, false);
    // Parseval with this normalization: sum |phi|^2 / n = sum |psi|^2
    let denom: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
    let kin_num: f64 = phi
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let p = grid.p(j, hbar);
            0.5 * p * p * z.norm_sqr()
        })
        .sum();
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * dq;
    Ok(pot / norm + kin_num / denom)
}

pub fn norm_l2(psi: &[Complex64], grid: &Grid1D) -> f64 {
    sqrt(psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.dq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{MorseOscillator, MorseParams};
    use crate::model::{derived_scales, exact_kernel};
    use alloc::vec;
    use crate::propagator::Hamiltonian1D;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn kernel_quadrature_at_origin() {
        let v = exact_kernel_quadrature(0.0, &ModelParams::default(), &spec()).unwrap();
        assert!((v.re - 0.355_028_053_887_817_24).abs() < 1e-10);
        assert!(v.im.abs() < 1e-9);
    }

    #[test]
    fn kernel_quadrature_matches_airy_on_grid() {
        let p = ModelParams::default();
        let s = spec();
        let mut x = -6.0;
        while x <= 6.0 {
            let v = exact_kernel_quadrature(x, &p, &s).unwrap();
            let want = exact_kernel(x, &p).unwrap();
            assert!(
                (v.re - want).abs() < 1e-8 && v.im.abs() < 1e-8,
                "q = {x}: got {v}, want {want}"
            );
            x += 0.75;
        }
    }

    #[test]
    fn kernel_quadrature_scale_cover() {
        // Non-reference parameters: l != 1 exercises the scale plumbing.
        let p = ModelParams::new(2.0, 0.7, 0.5, 0.9).unwrap();
        let s = spec();
        let scales = derived_scales(&p);
        for &x in &[-2.0, 0.0, 1.3] {
            let q = x * scales.l;
            let v = exact_kernel_quadrature(q, &p, &s).unwrap();
            let want = exact_kernel(q, &p).unwrap();
            assert!((v.re - want).abs() < 1e-8, "q/l = {x}");
        }
    }

    #[test]
    fn kernel_quadrature_contour_invariance() {
        let p = ModelParams::default();
        let s = spec();
        let base = exact_kernel_quadrature(-2.5, &p, &s).unwrap();
        let doubled = exact_kernel_quadrature_shaped(-2.5, &p, &s, 2.0, core::f64::consts::FRAC_PI_6)
            .unwrap();
        assert!((base - doubled).norm() < 10.0 * s.abs_tol);
        for angle_scale in [0.9, 1.1] {
            let tilted = exact_kernel_quadrature_shaped(
                -2.5,
                &p,
                &s,
                1.0,
                angle_scale * core::f64::consts::FRAC_PI_6,
            )
            .unwrap();
            assert!((base - tilted).norm() < 10.0 * s.abs_tol);
        }
    }

    #[test]
    fn fft_round_trip_and_delta() {
        let mut data: Vec<Complex64> = (0..64)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let orig = data.clone();
        fft(&mut data, false);
        fft(&mut data, true);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
        // transform of a delta is flat
        let mut delta = vec![Complex64::new(0.0, 0.0); 16];
        delta[0] = Complex64::new(1.0, 0.0);
        fft(&mut delta, false);
        for z in &delta {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn free_gaussian_spreads_at_the_analytic_rate() {
        let grid = Grid1D { q_min: -25.0, q_max: 25.0, n: 1024 };
        let gamma = 0.5;
        let hbar = 1.0;
        let psi0 = gaussian_packet(&grid, 0.0, 0.0, gamma, hbar).unwrap();
        let t = 2.0;
        let psi = grid_propagate(|_| 0.0, &psi0, t, 200, &grid, hbar).unwrap();
        let second_moment = |f: &[Complex64]| -> f64 {
            f.iter()
                .enumerate()
                .map(|(j, z)| grid.q(j).powi(2) * z.norm_sqr())
                .sum::<f64>()
                * grid.dq()
        };
        // <q^2>(t) = 1/(4 gamma) + hbar^2 gamma t^2 for a free real Gaussian
        let want = 1.0 / (4.0 * gamma) + hbar * hbar * gamma * t * t;
        let got = second_moment(&psi);
        assert!((got - want).abs() < 1e-8 * want, "got {got}, want {want}");
        assert!((second_moment(&psi0) - 1.0 / (4.0 * gamma)).abs() < 1e-10);
    }

    #[test]
    fn norm_preserved_and_time_reversible() {
        let morse = MorseOscillator { params: MorseParams::reference() };
        let grid = Grid1D { q_min: -15.0, q_max: 40.0, n: 1024 };
        let psi0 = gaussian_packet(&grid, 9.0, 0.5, 0.5, 1.0).unwrap();
        let fwd = grid_propagate(|q| morse.h(q, 0.0), &psi0, 3.0, 300, &grid, 1.0).unwrap();
        assert!((norm_l2(&fwd, &grid) - 1.0).abs() < 1e-12);
        let back = grid_propagate(|q| morse.h(q, 0.0), &fwd, -3.0, 300, &grid, 1.0).unwrap();
        let max_err = psi0
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-10, "round trip error {max_err:e}");
    }

    #[test]
    fn morse_energy_expectation_constant() {
        let morse = MorseOscillator { params: MorseParams::reference() };
        let v = |q: f64| morse.h(q, 0.0);
        let grid = Grid1D { q_min: -15.0, q_max: 45.0, n: 2048 };
        let psi0 = gaussian_packet(&grid, 9.0, 0.0, 0.5, 1.0).unwrap();
        let e0 = energy_expectation(v, &psi0, &grid, 1.0).unwrap();
        let psi = grid_propagate(v, &psi0, 2.0, 400, &grid, 1.0).unwrap();
        let e1 = energy_expectation(v, &psi, &grid, 1.0).unwrap();
        assert!((e1 - e0).abs() < 1e-6 * e0.abs(), "E0 {e0}, E1 {e1}");
    }

    #[test]
    fn boundary_leak_detected() {
        let grid = Grid1D { q_min: -4.0, q_max: 4.0, n: 256 };
        let psi0 = gaussian_packet(&grid, 0.0, 0.0, 0.5, 1.0).unwrap();
        // free spreading will hit the +-4 boundary quickly
        let r = grid_propagate(|_| 0.0, &psi0, 20.0, 400, &grid, 1.0);
        assert!(matches!(r, Err(Error::DomainTooSmall { .. })));
    }
}
