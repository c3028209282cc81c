//! Subcommand implementations. Grid points are evaluated in parallel and
//! emitted in sorted order so identical flags always produce byte-identical
//! output.

use crate::output::{f, param_header};
use hk_core::asymptotics::{
    find_border, find_saddles, hbar_scaling_study, hk_semiclassical, SaddleKind,
};
use hk_core::manifold::{
    build_line_manifold, detect_caustics, evolve_manifold, MorseOscillator, MorseParams,
};
use hk_core::model::{
    classify_region, derived_scales, exact_kernel, hk_kernel_reduced, sc_kernel, ModelParams,
    RegionClass,
};
use hk_core::propagator::{folding_window, hk_kernel_full, FoldingHamiltonian};
use hk_core::{Complex, Error, QuadratureSpec};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

#[derive(Debug)]
pub enum CmdError {
    Usage(String),
    Numerical(String),
}

type CmdResult = Result<(), CmdError>;

fn usage(msg: impl Into<String>) -> CmdError {
    CmdError::Usage(msg.into())
}

/// Merge precedence: explicit flag > config file > default.
pub fn resolve_params(
    g: Option<f64>,
    tau: Option<f64>,
    hbar: Option<f64>,
    gamma: Option<f64>,
    config: Option<&Path>,
) -> Result<ModelParams, String> {
    let mut file = std::collections::HashMap::new();
    if let Some(path) = config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| format!("config line {}: bad number {value:?}", lineno + 1))?;
            file.insert(key.trim().to_string(), v);
        }
        for key in file.keys() {
            if !matches!(key.as_str(), "g" | "tau" | "hbar" | "gamma") {
                return Err(format!("config: unknown key {key:?}"));
            }
        }
    }
    let defaults = ModelParams::default();
    let pick = |flag: Option<f64>, key: &str, default: f64| {
        flag.or_else(|| file.get(key).copied()).unwrap_or(default)
    };
    let params = ModelParams {
        g: pick(g, "g", defaults.g),
        tau: pick(tau, "tau", defaults.tau),
        hbar: pick(hbar, "hbar", defaults.hbar),
        gamma: pick(gamma, "gamma", defaults.gamma),
    };
    params.validate().map_err(|e| e.to_string())?;
    Ok(params)
}

/// `min:max:count` (inclusive endpoints) or a single value.
fn parse_grid(text: &str) -> Result<Vec<f64>, CmdError> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => {
            let v: f64 = single
                .parse()
                .map_err(|_| usage(format!("bad q value {single:?}")))?;
            Ok(vec![v])
        }
        [min, max, count] => {
            let a: f64 = min.parse().map_err(|_| usage(format!("bad grid min {min:?}")))?;
            let b: f64 = max.parse().map_err(|_| usage(format!("bad grid max {max:?}")))?;
            let n: usize = count
                .parse()
                .map_err(|_| usage(format!("bad grid count {count:?}")))?;
            if !(a < b) || n < 2 {
                return Err(usage("grid needs min < max and count >= 2"));
            }
            Ok((0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect())
        }
        _ => Err(usage(format!("bad grid syntax {text:?}; use value or min:max:count"))),
    }
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>, CmdError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("bad {what} entry {s:?}")))
        })
        .collect()
}

fn print_all(lines: &[String]) -> CmdResult {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in lines {
        writeln!(out, "{line}").map_err(|e| CmdError::Numerical(e.to_string()))?;
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Method {
    Exact,
    Sc,
    Hk,
    Hk2d,
    Hksc,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Sc => "sc",
            Method::Hk => "hk",
            Method::Hk2d => "hk2d",
            Method::Hksc => "hksc",
        }
    }

    fn parse(s: &str) -> Result<Self, CmdError> {
        match s {
            "exact" => Ok(Method::Exact),
            "sc" => Ok(Method::Sc),
            "hk" => Ok(Method::Hk),
            "hk2d" => Ok(Method::Hk2d),
            "hksc" => Ok(Method::Hksc),
            other => Err(usage(format!("unknown method {other:?}"))),
        }
    }
}

fn eval_method(
    method: Method,
    q: f64,
    params: &ModelParams,
    spec: &QuadratureSpec,
    dt: f64,
) -> Result<Complex, Error> {
    match method {
        Method::Exact => exact_kernel(q, params).map(|v| Complex::new(v, 0.0)),
        Method::Sc => sc_kernel(q, params).map(|v| Complex::new(v, 0.0)),
        Method::Hk => hk_kernel_reduced(q, params, spec),
        Method::Hksc => hk_semiclassical(q, params).map(|v| Complex::new(v, 0.0)),
        Method::Hk2d => {
            let ham = FoldingHamiltonian { g: params.g };
            let window = folding_window(q, 0.0, params, spec.truncation_threshold);
            hk_kernel_full(
                &ham,
                q,
                0.0,
                params.tau,
                dt,
                params.gamma,
                params.hbar,
                &window,
                spec,
            )
        }
    }
}

pub fn cmd_kernel(params: &ModelParams, q: &str, methods: &str, dt: f64) -> CmdResult {
    let grid = parse_grid(q)?;
    let mut methods: Vec<Method> = methods
        .split(',')
        .map(|s| Method::parse(s.trim()))
        .collect::<Result<_, _>>()?;
    methods.sort();
    methods.dedup();
    if methods.is_empty() {
        return Err(usage("no methods selected"));
    }
    let spec = QuadratureSpec::default();

    struct Cell {
        q: f64,
        method: Method,
        value: Result<Complex, Error>,
    }
    let cells: Vec<Cell> = grid
        .par_iter()
        .flat_map_iter(|&qv| {
            methods.iter().map(move |&m| (qv, m))
        })
        .map(|(qv, m)| Cell {
            q: qv,
            method: m,
            value: eval_method(m, qv, params, &spec, dt),
        })
        .collect();

    let mut skipped = Vec::new();
    let mut rows = Vec::new();
    for cell in &cells {
        match &cell.value {
            Ok(v) => {
                let mut line = String::new();
                write!(
                    line,
                    "{},{},{},{},{}",
                    f(cell.q),
                    cell.method.name(),
                    f(v.re),
                    f(v.im),
                    f(v.norm())
                )
                .unwrap();
                rows.push(line);
            }
            Err(Error::Caustic { .. }) => {
                skipped.push(format!(
                    "# skipped: q={} method={} (caustic band)",
                    f(cell.q),
                    cell.method.name()
                ));
            }
            Err(e) => {
                return Err(CmdError::Numerical(format!(
                    "q={} method={}: {e}",
                    f(cell.q),
                    cell.method.name()
                )));
            }
        }
    }

    let mut lines = vec![param_header(params, &spec), "q,method,re,im,abs".to_string()];
    lines.extend(skipped);
    lines.extend(rows);
    print_all(&lines)
}

pub fn cmd_sweep_gamma(params: &ModelParams, q: &str, lgamma: &str) -> CmdResult {
    let grid = parse_grid(q)?;
    let targets = parse_list(lgamma, "lgamma")?;
    if targets.iter().any(|&t| !(t > 0.0)) {
        return Err(usage("lgamma targets must be positive"));
    }
    let spec = QuadratureSpec::default();
    let l = derived_scales(params).l;

    let mut lines = vec![
        param_header(params, &spec),
        "# gamma column overrides the header gamma per row".to_string(),
        "l_gamma,gamma,q,method,re,im,abs".to_string(),
    ];
    for &lg in &targets {
        // invert l_gamma = 1/(4 gamma^2 l^3)
        let gamma = 1.0 / (4.0 * lg * l * l * l).sqrt();
        let row_params = ModelParams { gamma, ..*params };
        let results: Vec<(f64, Result<Complex, Error>, Result<f64, Error>)> = grid
            .par_iter()
            .map(|&qv| {
                (
                    qv,
                    hk_kernel_reduced(qv, &row_params, &spec),
                    exact_kernel(qv, &row_params),
                )
            })
            .collect();
        for (qv, hk, exact) in results {
            let e = exact.map_err(|e| CmdError::Numerical(format!("q={} method=exact: {e}", f(qv))))?;
            let h = hk.map_err(|e| CmdError::Numerical(format!("q={} method=hk: {e}", f(qv))))?;
            lines.push(format!(
                "{},{},{},exact,{},{},{}",
                f(lg),
                f(gamma),
                f(qv),
                f(e),
                f(0.0),
                f(e.abs())
            ));
            lines.push(format!(
                "{},{},{},hk,{},{},{}",
                f(lg),
                f(gamma),
                f(qv),
                f(h.re),
                f(h.im),
                f(h.norm())
            ));
        }
    }
    print_all(&lines)
}

pub fn cmd_border(params: &ModelParams) -> CmdResult {
    let spec = QuadratureSpec::default();
    let analytic = derived_scales(params).l_gamma;
    let found = find_border(params).map_err(|e| CmdError::Numerical(e.to_string()))?;
    print_all(&[
        param_header(params, &spec),
        "analytic,numeric,residual".to_string(),
        format!(
            "{},{},{}",
            f(analytic),
            f(found.q_border),
            f(found.collision_residual)
        ),
    ])
}

pub fn cmd_saddles(params: &ModelParams, q: &str) -> CmdResult {
    let qs = parse_list(q, "q")?;
    let spec = QuadratureSpec::default();
    let scales = derived_scales(params);
    let tol = 1e-6 * scales.l;
    let mut lines = vec![
        param_header(params, &spec),
        "q,kind,re,im,contributing,status".to_string(),
    ];
    for &qv in &qs {
        let region = classify_region(qv, &scales, tol);
        let status = match region {
            RegionClass::ConventionalCaustic => "conventional-caustic",
            RegionClass::HkCaustic => "hk-caustic",
            _ => "ok",
        };
        let set = find_saddles(qv, params).map_err(|e| {
            CmdError::Numerical(format!("q={} method=saddles: {e}", f(qv)))
        })?;
        let contributing: Vec<bool> = if status == "ok" {
            hk_core::asymptotics::contributing_set(qv, params)
                .map(|s| s.saddles.iter().map(|x| x.contributing).collect())
                .unwrap_or_else(|_| vec![false; set.saddles.len()])
        } else {
            vec![false; set.saddles.len()]
        };
        for (s, c) in set.saddles.iter().zip(contributing) {
            let kind = match s.kind {
                SaddleKind::OutgoingReal => "outgoing",
                SaddleKind::IncomingReal => "incoming",
                SaddleKind::Tunneling => "tunneling",
                SaddleKind::Artifact => "artifact",
            };
            lines.push(format!(
                "{},{kind},{},{},{},{status}",
                f(qv),
                f(s.p.re),
                f(s.p.im),
                c
            ));
        }
    }
    print_all(&lines)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_manifold(
    params: &ModelParams,
    model: &str,
    q0: Option<f64>,
    p_min: Option<f64>,
    p_max: Option<f64>,
    n: Option<usize>,
    t: Option<f64>,
    dt: Option<f64>,
) -> CmdResult {
    let spec = QuadratureSpec::default();
    let run = |lines: &mut Vec<String>,
               ham: &dyn ObjectSafeHam,
               q0: f64,
               p_min: f64,
               p_max: f64,
               n: usize,
               t: f64,
               dt: f64|
     -> Result<(), CmdError> {
        let m = build_line_manifold(q0, p_min, p_max, n)
            .map_err(|e| usage(e.to_string()))?;
        let em = ham.evolve(&m, t, dt).map_err(|e| match e {
            Error::Divergence { t, point_index } => CmdError::Numerical(format!(
                "trajectory diverged at t={} (point {:?})",
                f(t),
                point_index
            )),
            other => CmdError::Numerical(other.to_string()),
        })?;
        let report = ham
            .caustics(&em, t, dt)
            .map_err(|e| CmdError::Numerical(e.to_string()))?;
        lines.push("kind,parameter,q,p,m11,m12,m21,m22".to_string());
        for (k, (x, traj)) in em.evolved.points.iter().zip(&em.trajectories).enumerate() {
            lines.push(format!(
                "point,{},{},{},{},{},{},{}",
                f(em.initial.parameter[k]),
                f(x.q),
                f(x.p),
                f(traj.m[0][0]),
                f(traj.m[0][1]),
                f(traj.m[1][0]),
                f(traj.m[1][1])
            ));
        }
        for pos in &report.positions {
            lines.push(format!(
                "caustic,{},{},{},{},{},{},{}",
                f(f64::NAN),
                f(*pos),
                f(f64::NAN),
                f(f64::NAN),
                f(f64::NAN),
                f(f64::NAN),
                f(f64::NAN)
            ));
        }
        for (a, b) in &report.unresolved {
            lines.push(format!("# unresolved plateau parameter in [{}, {}]", f(*a), f(*b)));
        }
        Ok(())
    };

    let mut lines = vec![param_header(params, &spec)];
    match model {
        "folding" => {
            let ham = FoldingWrap(FoldingHamiltonian { g: params.g });
            run(
                &mut lines,
                &ham,
                q0.unwrap_or(0.0),
                p_min.unwrap_or(-2.0),
                p_max.unwrap_or(2.0),
                n.unwrap_or(41),
                t.unwrap_or(params.tau),
                dt.unwrap_or(0.05),
            )?;
        }
        "morse" => {
            let ham = MorseWrap(MorseOscillator {
                params: MorseParams::reference(),
            });
            run(
                &mut lines,
                &ham,
                q0.unwrap_or(9.0),
                p_min.unwrap_or(-2.995),
                p_max.unwrap_or(2.995),
                n.unwrap_or(121),
                t.unwrap_or(18.0),
                dt.unwrap_or(1e-3),
            )?;
        }
        other => return Err(usage(format!("unknown model {other:?}; use folding|morse"))),
    }
    print_all(&lines)
}

// Manifold evolution is generic over the Hamiltonian; a tiny object-safe
// shim keeps cmd_manifold monomorphic.
trait ObjectSafeHam {
    fn evolve(
        &self,
        m: &hk_core::manifold::Manifold,
        t: f64,
        dt: f64,
    ) -> Result<hk_core::manifold::EvolvedManifold, Error>;
    fn caustics(
        &self,
        em: &hk_core::manifold::EvolvedManifold,
        t: f64,
        dt: f64,
    ) -> Result<hk_core::manifold::CausticReport, Error>;
}

struct FoldingWrap(FoldingHamiltonian);
struct MorseWrap(MorseOscillator);

impl ObjectSafeHam for FoldingWrap {
    fn evolve(
        &self,
        m: &hk_core::manifold::Manifold,
        t: f64,
        dt: f64,
    ) -> Result<hk_core::manifold::EvolvedManifold, Error> {
        evolve_manifold(&self.0, m, t, dt)
    }
    fn caustics(
        &self,
        em: &hk_core::manifold::EvolvedManifold,
        t: f64,
        dt: f64,
    ) -> Result<hk_core::manifold::CausticReport, Error> {
        detect_caustics(&self.0, em, t, dt)
    }
}

impl ObjectSafeHam for MorseWrap {
    fn evolve(
        &self,
        m: &hk_core::manifold::Manifold,
        t: f64,
        dt: f64,
    ) -> Result<hk_core::manifold::EvolvedManifold, Error> {
        evolve_manifold(&self.0, m, t, dt)
    }
    fn caustics(
        &self,
        em: &hk_core::manifold::EvolvedManifold,
        t: f64,
        dt: f64,
    ) -> Result<hk_core::manifold::CausticReport, Error> {
        detect_caustics(&self.0, em, t, dt)
    }
}

pub fn cmd_scaling(params: &ModelParams, region: &str, target: f64, ladder: &str) -> CmdResult {
    let region = match region {
        "allowed" => RegionClass::Allowed,
        "shallow" => RegionClass::Shallow,
        "deep" => RegionClass::Deep,
        other => return Err(usage(format!("unknown region {other:?}; use allowed|shallow|deep"))),
    };
    let hbars = parse_list(ladder, "hbar-ladder")?;
    let spec = QuadratureSpec::default();
    let rows = hbar_scaling_study(target, region, &hbars, params, &spec).map_err(|e| match e {
        Error::InvalidInput(msg) => usage(msg),
        other => CmdError::Numerical(other.to_string()),
    })?;
    let mut lines = vec![
        param_header(params, &spec),
        "hbar,q,deviation,asymptotic_fallback".to_string(),
    ];
    for row in rows {
        lines.push(format!(
            "{},{},{},{}",
            f(row.hbar),
            f(row.q),
            f(row.deviation),
            row.asymptotic_fallback
        ));
    }
    print_all(&lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("1.5").unwrap(), vec![1.5]);
        let g = parse_grid("-1:1:5").unwrap();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(parse_grid("1:0:5").is_err());
        assert!(parse_grid("a:b:c").is_err());
        assert!(parse_grid("1:2").is_err());
    }

    #[test]
    fn config_merging() {
        let dir = std::env::temp_dir().join("hk-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("params.conf");
        std::fs::write(&path, "gamma = 0.25\nhbar=2.0\n# comment\n").unwrap();
        let p = resolve_params(None, None, Some(0.5), None, Some(&path)).unwrap();
        assert_eq!(p.gamma, 0.25); // from file
        assert_eq!(p.hbar, 0.5); // flag wins
        assert_eq!(p.g, 1.0); // default
        std::fs::write(&path, "bogus=1\n").unwrap();
        assert!(resolve_params(None, None, None, None, Some(&path)).is_err());
    }

    #[test]
    fn method_ordering_is_canonical() {
        let mut ms = vec![Method::Hksc, Method::Exact, Method::Hk];
        ms.sort();
        assert_eq!(
            ms.iter().map(|m| m.name()).collect::<Vec<_>>(),
            vec!["exact", "hk", "hksc"]
        );
    }
}
