//! CSV formatting helpers: 17-significant-digit floats and parameter
//! comment headers shared by every subcommand.

use hk_core::model::{derived_scales, ModelParams};
use hk_core::QuadratureSpec;

/// 17 significant digits round-trips f64 exactly.
pub fn f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn param_header(params: &ModelParams, spec: &QuadratureSpec) -> String {
    let s = derived_scales(params);
    format!(
        "# g={} tau={} hbar={} gamma={} l={} l_gamma={} abs_tol={} rel_tol={}",
        f(params.g),
        f(params.tau),
        f(params.hbar),
        f(params.gamma),
        f(s.l),
        f(s.l_gamma),
        f(spec.abs_tol),
        f(spec.rel_tol),
    )
}
