use serde::Serialize;
use serde_json::{json, Value};
use ssflab::asymptotics::{self, ssf_predict, Boundary, Side};
use ssflab::capacity::{capacity as estimate_capacity, CapacityEstimate, FeketeConfig};
use ssflab::counting::{RandomSuite, SuiteReport};
use ssflab::effective::{
    check_double_step, check_level_shift, check_single_step, m6_vs_m7, mu_q_max, shadow_field, upsilon_q, weight_fields, BasisTable,
    CutoffField, FormCheckConfig, Grid2, GridSpec, ShadowConfig,
};
use ssflab::geometry::PlanarSet;
use ssflab::resolvent::{hs_norm, random_bound_suite, Cutoff1D, HsConfig, KernelSpec, KernelVariant};
use ssflab::toeplitz::{fipu_residuals, radial_oracle, spectrum_with, toeplitz_matrix, QuadConfig, SpectrumConfig};
use ssflab::Complex64;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use crate::config::{self, CapacityConfig, EffectiveConfig, ResolventConfig, SsfConfig, ToeplitzConfig, VerifyConfig};
use crate::{CliError, Common};

fn load_or_default<T: serde::de::DeserializeOwned + Default>(common: &Common) -> Result<T, CliError> {
    match &common.config {
        Some(p) => config::load(p),
        None => Ok(T::default()),
    }
}

/// Shortest round-trip form, switching to exponent notation for very
/// small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e16).contains(&a) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

/// Write `# <json header>` followed by the CSV body.
fn emit<C: Serialize>(common: &Common, command: &str, cfg: &C, result: Value, warnings: &[String], body: &str) -> Result<(), CliError> {
    let header = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "config_sha256": config::content_hash(cfg),
        "result": result,
        "warnings": warnings,
    });
    let text = format!("# {}\n{}", serde_json::to_string(&header).expect("header serializes"), body);
    match &common.out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn fekete_cfg(seed: u64) -> FeketeConfig {
    FeketeConfig { seed, ..FeketeConfig::default() }
}

pub fn capacity(common: &Common, geometry: Option<PathBuf>, n: Option<Vec<usize>>) -> Result<(), CliError> {
    let mut cfg: CapacityConfig = load_or_default(common)?;
    if let Some(p) = geometry {
        cfg.geometry = Some(config::load(&p)?);
    }
    if let Some(n) = n {
        cfg.n_schedule = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    let set = cfg.geometry.clone().ok_or_else(|| CliError::Usage("capacity needs a geometry (--geometry or config)".into()))?;
    set.validate()?;
    let fk = FeketeConfig { seed: cfg.seed, starts: cfg.starts, max_iter: cfg.max_iter, tol: cfg.tol };
    let est = estimate_capacity(&set, &cfg.n_schedule, &fk)?;
    let mut warnings = est.warnings.clone();
    let mut result = json!({ "estimate": est, "descriptor": set.descriptor() });
    if let PlanarSet::Union { sets } = &set {
        let mut members = Vec::new();
        let mut monotone = true;
        for m in sets {
            let e: CapacityEstimate = estimate_capacity(m, &cfg.n_schedule, &fk)?;
            monotone &= est.value >= e.value * (1.0 - 1e-3);
            members.push(json!({ "descriptor": m.descriptor(), "value": e.value }));
        }
        if !monotone {
            warnings.push("union capacity is below a member's capacity".into());
        }
        result["members"] = Value::Array(members);
        result["monotone_vs_members"] = Value::Bool(monotone);
    }
    let mut body = String::from("n,d_n\n");
    for (n, d) in &est.diameters {
        writeln!(body, "{n},{}", num(*d)).unwrap();
    }
    emit(common, "capacity", &cfg, result, &warnings, &body)
}

fn centered_disk_radius(set: &PlanarSet) -> Option<f64> {
    match set {
        PlanarSet::Disk { center, radius } if center[0] == 0.0 && center[1] == 0.0 => Some(*radius),
        _ => None,
    }
}

pub fn toeplitz(
    common: &Common,
    geometry: Option<PathBuf>,
    q: Option<usize>,
    b: Option<f64>,
    k: Option<usize>,
    cap: Option<f64>,
) -> Result<(), CliError> {
    let mut cfg: ToeplitzConfig = load_or_default(common)?;
    if let Some(p) = geometry {
        cfg.geometry = Some(config::load(&p)?);
    }
    cfg.q = q.unwrap_or(cfg.q);
    cfg.b = b.unwrap_or(cfg.b);
    cfg.k_max = k.unwrap_or(cfg.k_max);
    cfg.cap = cap.or(cfg.cap);
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.abs_tol = common.tol.unwrap_or(cfg.abs_tol);
    let set = cfg.geometry.clone().ok_or_else(|| CliError::Usage("toeplitz needs a geometry (--geometry or config)".into()))?;
    set.validate()?;
    let qc = QuadConfig { abs_tol: cfg.abs_tol, ..QuadConfig::default() };
    let op = toeplitz_matrix(&set, cfg.q, cfg.b, cfg.k_max, &qc)?;
    let seq = spectrum_with(&op, &SpectrumConfig { margin: cfg.margin, ..SpectrumConfig::default() })?;
    let mut warnings = op.warnings.clone();
    if !op.converged {
        warnings.push("matrix quadrature did not reach the tolerance".into());
    }
    let disk = centered_disk_radius(&set);
    let (cap_value, cap_source) = match (cfg.cap, disk) {
        (Some(c), _) => (c, "user"),
        (None, Some(r)) => (r, "disk radius"),
        (None, None) => {
            let est = estimate_capacity(&set, &cfg.cap_schedule, &fekete_cfg(cfg.seed))?;
            warnings.extend(est.warnings.iter().map(|w| format!("capacity: {w}")));
            (est.value, "fekete")
        }
    };
    let frak = asymptotics::frak_c(cfg.b, cap_value)?;
    let resid: Vec<Option<f64>> = {
        let mut v = vec![None; seq.len()];
        for (k, r) in fipu_residuals(&seq, frak) {
            if k < v.len() {
                v[k] = Some(r);
            }
        }
        v
    };
    let oracle: Option<Vec<f64>> = disk.map(|r| {
        let mut o: Vec<f64> = (0..seq.len()).map(|k| radial_oracle(r, cfg.q, cfg.b, k)).collect();
        o.sort_by(|a, b| b.total_cmp(a));
        o
    });
    let mut body = String::from("k,nu,ln_nu,certified,rel_error,fipu_residual");
    if oracle.is_some() {
        body.push_str(",oracle_abs_diff");
    }
    body.push('\n');
    let mut worst_oracle = 0.0f64;
    for k in 0..seq.len() {
        let r = resid[k].map(num).unwrap_or_default();
        write!(body, "{k},{},{},{},{},{r}", num(seq.nu[k]), num(seq.log_nu[k]), seq.certified[k], num(seq.rel_error[k])).unwrap();
        if let Some(o) = &oracle {
            let d = (seq.nu[k] - o[k]).abs();
            if seq.certified[k] {
                worst_oracle = worst_oracle.max(d);
            }
            write!(body, ",{}", num(d)).unwrap();
        }
        body.push('\n');
    }
    let certified_resid: Vec<f64> = (0..seq.len()).filter(|&k| seq.certified[k]).filter_map(|k| resid[k]).collect();
    let mut result = json!({
        "descriptor": set.descriptor(),
        "dim": op.dim(),
        "entry_rel_tol": op.entry_rel_tol,
        "off_diagonal_ratio": op.off_diagonal_ratio(),
        "diagonal": op.off_diagonal_ratio() < 1e-12,
        "certified": seq.certified_len(),
        "cap": cap_value,
        "cap_source": cap_source,
        "frak_c": frak,
        "residual_trend_decreasing": decreasing_trend(&certified_resid),
    });
    if oracle.is_some() {
        result["oracle_max_abs_diff_certified"] = json!(worst_oracle);
    }
    emit(common, "toeplitz", &cfg, result, &warnings, &body)
}

/// Negative least-squares slope and last value below the first.
pub fn decreasing_trend(v: &[f64]) -> bool {
    if v.len() < 3 {
        return false;
    }
    let n = v.len() as f64;
    let mx = (n - 1.0) / 2.0;
    let my = v.iter().sum::<f64>() / n;
    let slope: f64 = v.iter().enumerate().map(|(i, y)| (i as f64 - mx) * (y - my)).sum();
    slope < 0.0 && v[v.len() - 1] < v[0]
}

pub fn ssf(
    common: &Common,
    obstacle: Option<PathBuf>,
    cap: Option<f64>,
    q: Option<usize>,
    b: Option<f64>,
    boundary: Option<String>,
    ln_lambda: Option<Vec<f64>>,
) -> Result<(), CliError> {
    let mut cfg: SsfConfig = load_or_default(common)?;
    if let Some(p) = obstacle {
        cfg.obstacle = Some(config::load(&p)?);
    }
    cfg.cap = cap.or(cfg.cap);
    cfg.q = q.unwrap_or(cfg.q);
    cfg.b = b.unwrap_or(cfg.b);
    if let Some(bd) = boundary {
        cfg.boundary = if bd == "neumann" { Boundary::Neumann } else { Boundary::Dirichlet };
    }
    if let Some(l) = ln_lambda {
        cfg.ln_lambda = l;
    }
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    if cfg.ln_lambda.is_empty() {
        return Err(CliError::Usage("empty ln lambda schedule".into()));
    }
    let mut warnings = Vec::new();
    let (cap_value, source) = match (cfg.cap, &cfg.obstacle) {
        (Some(c), _) => (c, "user"),
        (None, Some(dom)) => {
            dom.validate()?;
            let est = estimate_capacity(&dom.projection(), &cfg.n_schedule, &fekete_cfg(cfg.seed))?;
            warnings.extend(est.warnings.iter().map(|w| format!("capacity: {w}")));
            (est.value, "caplib")
        }
        (None, None) => return Err(CliError::Usage("ssf needs an obstacle or a capacity".into())),
    };
    let mut body = String::from("ln_lambda,below,above,below_over_above,bounded_below\n");
    let mut constant = f64::NAN;
    for &l in &cfg.ln_lambda {
        let lo = ssf_predict(cfg.q, Side::Below, cfg.boundary, l, cfg.b, cap_value)?;
        let hi = ssf_predict(cfg.q, Side::Above, cfg.boundary, l, cfg.b, cap_value)?;
        constant = lo.constant_used;
        writeln!(body, "{},{},{},{},{}", num(l), num(lo.value), num(hi.value), num(lo.value / hi.value), lo.bounded_flag).unwrap();
    }
    let mut result = json!({
        "cap": cap_value,
        "cap_source": source,
        "frak_c": constant,
        "boundary": cfg.boundary,
    });
    if cfg.boundary == Boundary::Neumann {
        result["interpretation"] = json!(if cfg.q == 0 {
            "below the lowest Landau level, minus the spectral shift counts exterior Neumann eigenvalues below Lambda_0 - lambda up to O(1)"
        } else {
            "the eigenvalue-counting reading holds at the lowest Landau level only"
        });
    }
    emit(common, "ssf", &cfg, result, &warnings, &body)
}

#[derive(Debug, Clone, Serialize)]
struct SuiteRow {
    suite: &'static str,
    instances: usize,
    violations: usize,
    worst: f64,
    threshold: f64,
}

impl SuiteRow {
    fn from_report(suite: &'static str, r: SuiteReport, threshold: f64) -> Self {
        SuiteRow { suite, instances: r.instances, violations: r.violations, worst: r.worst, threshold }
    }
    fn pass(&self) -> bool {
        self.violations == 0
    }
}

pub const SUITES: [&str; 11] = [
    "weyl",
    "chebyshev",
    "pushnitski",
    "m3",
    "trarctan",
    "hs-bounds",
    "inversion",
    "expansion-trend",
    "predictor",
    "identities",
    "m6m7",
];

fn run_suite(name: &str, seed: u64, instances: Option<usize>, tol: Option<f64>) -> Result<SuiteRow, CliError> {
    let random = |n: usize| RandomSuite { seed, instances: instances.unwrap_or(n), max_dim: 8 };
    Ok(match name {
        "weyl" => SuiteRow::from_report("weyl", random(1000).weyl()?, 0.0),
        "chebyshev" => SuiteRow::from_report("chebyshev", random(1000).chebyshev(&[1.0, 2.0])?, 0.0),
        "pushnitski" => SuiteRow::from_report("pushnitski", random(1000).pushnitski_bound()?, 0.0),
        "m3" => {
            let t = tol.unwrap_or(1e-10);
            SuiteRow::from_report("m3", random(200).m3_agreement(t)?, t)
        }
        "trarctan" => {
            let t = tol.unwrap_or(1e-12);
            SuiteRow::from_report("trarctan", random(200).tr_arctan_agreement(t)?, t)
        }
        "hs-bounds" => SuiteRow::from_report("hs-bounds", random_bound_suite(seed, instances.unwrap_or(500), &HsConfig::default())?, 1.0),
        "inversion" => {
            let t = tol.unwrap_or(1e-12);
            SuiteRow::from_report("inversion", asymptotics::inversion_suite(seed, instances.unwrap_or(200), t)?, t)
        }
        "expansion-trend" => {
            let ys = [1e6, 1e9, 1e12, 1e15];
            let mut bad = 0;
            let mut worst = 0.0f64;
            for c in asymptotics::INVERSION_CONSTANTS {
                let r = asymptotics::expansion_residuals(c, &ys)?;
                worst = worst.max(r[r.len() - 1]);
                if !asymptotics::is_non_increasing(&r) {
                    bad += 1;
                }
            }
            SuiteRow { suite: "expansion-trend", instances: 3, violations: bad, worst, threshold: 0.0 }
        }
        "predictor" => predictor_suite(seed, instances.unwrap_or(200))?,
        "identities" => identities_suite(tol.unwrap_or(1e-7))?,
        "m6m7" => {
            let t = tol.unwrap_or(1e-6);
            let spec = GridSpec { half_perp: 7.0, ..GridSpec::default() };
            let (mut bad, mut worst) = (0, 0.0f64);
            for q in 0..3 {
                let cut = CutoffField::gaussian(1.0, 1.0, 1.0, [0.3, -0.2], spec, 1.0, q)?;
                let r = m6_vs_m7(&cut, &FormCheckConfig { seed, ..FormCheckConfig::default() })?;
                worst = worst.max(r.discrepancy);
                if r.discrepancy >= t {
                    bad += 1;
                }
            }
            SuiteRow { suite: "m6m7", instances: 3, violations: bad, worst, threshold: t }
        }
        other => {
            return Err(CliError::Usage(format!("unknown suite '{other}'; available: all, {}", SUITES.join(", "))));
        }
    })
}

/// Structural relations of the predictor at random schedule points.
fn predictor_suite(seed: u64, n: usize) -> Result<SuiteRow, CliError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..n {
        let l = -(10f64.powf(rng.random_range(1.0..6.0)));
        let b = rng.random_range(0.1..5.0);
        let cap = rng.random_range(0.1..3.0);
        let q = rng.random_range(0..4usize);
        let p = |side, bd| ssf_predict(q, side, bd, l, b, cap);
        let (db, da) = (p(Side::Below, Boundary::Dirichlet)?, p(Side::Above, Boundary::Dirichlet)?);
        let (nb, na) = (p(Side::Below, Boundary::Neumann)?, p(Side::Above, Boundary::Neumann)?);
        let phi = asymptotics::phi1(&asymptotics::profile(l, true)?, asymptotics::frak_c(b, cap)?)?;
        let ok = db.bounded_flag && db.value == 0.0 && nb.value / na.value == 2.0 && da.value - na.value == 0.5 * phi;
        if !ok {
            bad += 1;
        }
    }
    Ok(SuiteRow { suite: "predictor", instances: n, violations: bad, worst: 0.0, threshold: 0.0 })
}

fn identities_suite(tol: f64) -> Result<SuiteRow, CliError> {
    let g = Grid2::centered(128, 6.0);
    let v: Vec<Complex64> =
        g.points().map(|x| Complex64::new((-(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.1).powi(2)).exp(), 0.0)).collect();
    let mut basis = BasisTable::new(g, 1.0, 12);
    let mut checks = Vec::new();
    for m in 1..4 {
        checks.push(check_level_shift(&v, &mut basis, m, 2)?);
    }
    for q in 0..3 {
        checks.push(check_single_step(&v, &mut basis, q, 2)?);
    }
    for q in 1..3 {
        checks.push(check_double_step(&v, &mut basis, q, 2)?);
    }
    let worst = checks.iter().map(|c| c.max_abs_diff / c.scale.max(1.0)).fold(0.0, f64::max);
    let bad = checks.iter().filter(|c| c.max_abs_diff > tol * c.scale.max(1.0)).count();
    Ok(SuiteRow { suite: "identities", instances: checks.len(), violations: bad, worst, threshold: tol })
}

pub fn verify(common: &Common, suite: Option<String>, instances: Option<usize>) -> Result<(), CliError> {
    let mut cfg: VerifyConfig = load_or_default(common)?;
    if let Some(s) = suite {
        cfg.suite = s;
    }
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    cfg.instances = instances.or(cfg.instances);
    cfg.tol = common.tol.or(cfg.tol);
    if cfg.suite.is_empty() {
        return Err(CliError::Usage(format!("verify needs a suite; available: all, {}", SUITES.join(", "))));
    }
    let names: Vec<&str> = if cfg.suite == "all" { SUITES.to_vec() } else { vec![cfg.suite.as_str()] };
    let mut rows = Vec::new();
    for n in names {
        rows.push(run_suite(n, cfg.seed, cfg.instances, cfg.tol)?);
    }
    let mut body = String::from("suite,instances,violations,worst,threshold,pass\n");
    for r in &rows {
        writeln!(body, "{},{},{},{},{},{}", r.suite, r.instances, r.violations, num(r.worst), num(r.threshold), r.pass()).unwrap();
    }
    let failed: Vec<&str> = rows.iter().filter(|r| !r.pass()).map(|r| r.suite).collect();
    emit(common, "verify", &cfg, json!({ "suites": rows, "failed": failed }), &[], &body)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("suites failed: {}", failed.join(", "))))
    }
}

pub fn effective(common: &Common, q: Option<usize>, b: Option<f64>, k_check: Option<usize>) -> Result<(), CliError> {
    let mut cfg: EffectiveConfig = load_or_default(common)?;
    cfg.q = q.unwrap_or(cfg.q);
    cfg.b = b.unwrap_or(cfg.b);
    cfg.k_check = k_check.or(cfg.k_check);
    cfg.seed = common.seed.unwrap_or(cfg.seed);
    let c = &cfg.cutoff;
    let cut = CutoffField::gaussian(c.amplitude, c.s_perp, c.s_par, c.center, cfg.grid, cfg.b, cfg.q)?;
    let wf = weight_fields(&cut)?;
    let ups = upsilon_q(&wf, cfg.q, cfg.b)?;
    let mut result = json!({
        "mu_q_max": mu_q_max(&ups).ok(),
        "weights_hermitian_defect": wf.hermitian_defect(),
    });
    if let Some(k) = cfg.k_check {
        let r = m6_vs_m7(&cut, &FormCheckConfig { k_max: k, seed: cfg.seed, ..FormCheckConfig::default() })?;
        result["form_comparison"] = json!(r);
    }
    let shadow = cfg.obstacle.as_ref().map(|d| d.validate().map(|_| shadow_field(d, &ups.grid, &ShadowConfig::default()))).transpose()?;
    let mut body = String::from(if shadow.is_some() { "x1,x2,upsilon,shadow\n" } else { "x1,x2,upsilon\n" });
    for (i, p) in ups.grid.points().enumerate() {
        write!(body, "{},{},{}", num(p[0]), num(p[1]), num(ups.values[i])).unwrap();
        if let Some(s) = &shadow {
            write!(body, ",{}", num(s.values[i])).unwrap();
        }
        body.push('\n');
    }
    emit(common, "effective", &cfg, result, &[], &body)
}

pub fn resolvent(common: &Common, energy: Option<Vec<f64>>, variant: Option<String>) -> Result<(), CliError> {
    let mut cfg: ResolventConfig = load_or_default(common)?;
    if let Some(e) = energy {
        cfg.energies = e;
    }
    if let Some(v) = variant {
        cfg.variant = if v == "tilde" { KernelVariant::Tilde } else { KernelVariant::Plain };
    }
    cfg.abs_tol = common.tol.unwrap_or(cfg.abs_tol);
    cfg.cutoff.validate()?;
    let hc = HsConfig { abs_tol: cfg.abs_tol };
    let mut body = String::from("energy,hs_norm,bound,ratio,error,converged\n");
    let mut warnings = Vec::new();
    let mut over = Vec::new();
    for &e in &cfg.energies {
        let spec = KernelSpec::new(e, cfg.variant)?;
        let r = hs_norm(&spec, &cfg.cutoff, &hc)?;
        if !r.converged {
            warnings.push(format!("E = {e}: quadrature tolerance missed"));
        }
        if !r.within_bound() {
            over.push(e);
        }
        writeln!(body, "{},{},{},{},{},{}", num(e), num(r.norm), num(r.bound), num(r.norm / r.bound), num(r.error), r.converged).unwrap();
    }
    let indicator = matches!(cfg.cutoff, Cutoff1D::Indicator { .. });
    emit(common, "resolvent", &cfg, json!({ "bound_violations": over, "indicator_cutoff": indicator }), &warnings, &body)?;
    if over.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invariant(format!("HS norm above the bound at E = {over:?}")))
    }
}
