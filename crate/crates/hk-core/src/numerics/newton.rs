//! Damped Newton iteration for polishing complex roots from good guesses.

use crate::error::{Error, Result};
use num_complex::Complex64;

const MAX_ITERS: usize = 50;
const MAX_HALVINGS: usize = 10;

fn converged(fz: Complex64, z: Complex64) -> bool {
    fz.norm() < 1e-12 * z.norm().max(1.0)
}

/// Polish a root of `f` starting from `guess`. Steps are halved while they
/// fail to decrease |f|; already-converged guesses return unchanged.
pub fn polish_root<F, D>(mut f: F, mut df: D, guess: Complex64) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
    D: FnMut(Complex64) -> Complex64,
{
    let mut z = guess;
    let mut fz = f(z);
    if converged(fz, z) {
        return Ok(z);
    }
    for _ in 0..MAX_ITERS {
        let dz = df(z);
        if dz.norm() == 0.0 {
            return Err(Error::RootNoConvergence {
                last: z,
                residual: fz.norm(),
            });
        }
        let mut step = fz / dz;
        let mut z_next = z - step;
        let mut f_next = f(z_next);
        let mut halvings = 0;
        while f_next.norm() >= fz.norm() && halvings < MAX_HALVINGS {
            step *= 0.5;
            z_next = z - step;
            f_next = f(z_next);
            halvings += 1;
        }
        z = z_next;
        fz = f_next;
        if converged(fz, z) {
            return Ok(z);
        }
    }
    Err(Error::RootNoConvergence {
        last: z,
        residual: fz.norm(),
    })
}
