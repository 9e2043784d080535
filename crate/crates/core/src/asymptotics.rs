//! Iterated-logarithm profiles `Phi_0`, `Phi_1`, the inverse of
//! `F_C(x) = x ln x - C x`, threshold predictions for the spectral shift
//! function, and counting checks against the profiles.
//!
//! All profile arithmetic runs on `ln lambda`, since the interesting regime
//! lies far below the double range of `lambda` itself.

use crate::counting::{count_log, SuiteReport};
use crate::error::{invalid, Error, Result};
use crate::toeplitz::SpectralSequence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

/// Nested logarithms of a small `lambda`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AsymptoticProfile {
    /// `lambda` when representable, `None` below the double range.
    pub lambda: Option<f64>,
    pub ln_lambda: f64,
    pub abs_ln_lambda: f64,
    /// `ln |ln lambda|`, valid when `|ln lambda| > 1`.
    pub ln2: f64,
    /// `ln ln2`, valid when `ln2 > 1`.
    pub ln3: f64,
    /// `|ln lambda| / ln2`, valid with `ln2`.
    pub phi0: f64,
    pub valid_ln2: bool,
    pub valid_ln3: bool,
}

/// Profile from `lambda` (`is_log = false`) or from `ln lambda`.
pub fn profile(value: f64, is_log: bool) -> Result<AsymptoticProfile> {
    let ln_lambda = if is_log {
        value
    } else {
        if !(value > 0.0) {
            return invalid(format!("lambda must be positive, got {value}"));
        }
        value.ln()
    };
    if !(ln_lambda < 0.0) || ln_lambda.is_nan() {
        return invalid(format!("lambda must lie in (0, 1); ln lambda = {ln_lambda}"));
    }
    let lambda = if is_log {
        let l = ln_lambda.exp();
        (l > 0.0).then_some(l)
    } else {
        Some(value)
    };
    let abs_ln_lambda = -ln_lambda;
    let valid_ln2 = abs_ln_lambda > 1.0;
    let ln2 = abs_ln_lambda.ln();
    let valid_ln3 = valid_ln2 && ln2 > 1.0;
    let ln3 = if valid_ln2 { ln2.ln() } else { f64::NAN };
    Ok(AsymptoticProfile {
        lambda,
        ln_lambda,
        abs_ln_lambda,
        ln2: if valid_ln2 { ln2 } else { f64::NAN },
        ln3: if valid_ln3 { ln3 } else { f64::NAN },
        phi0: if valid_ln2 { abs_ln_lambda / ln2 } else { f64::NAN },
        valid_ln2,
        valid_ln3,
    })
}

/// `Phi_0 (1 + ln3/ln2 + C/ln2)`.
pub fn phi1(p: &AsymptoticProfile, c: f64) -> Result<f64> {
    if !p.valid_ln3 {
        return Err(Error::Domain(format!("Phi_1 needs ln ln |ln lambda| > 0, i.e. lambda < e^-e; ln lambda = {}", p.ln_lambda)));
    }
    Ok(p.phi0 * (1.0 + p.ln3 / p.ln2 + c / p.ln2))
}

/// `1 + ln(b cap^2)`.
pub fn frak_c(b: f64, cap: f64) -> Result<f64> {
    if !(b > 0.0 && cap > 0.0) {
        return invalid("b and cap must be positive");
    }
    Ok(1.0 + (b * cap * cap).ln())
}

/// Newton inverse of `F_C` on its increasing branch, with the three-term
/// expansion `y/L + y ln L / L^2 + C y / L^2`, `L = ln y`, for comparison.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FInverse {
    pub x: f64,
    /// `None` when `ln y <= 1`, where the expansion is meaningless.
    pub expansion: Option<f64>,
    /// `|x - expansion|`.
    pub residual: Option<f64>,
    pub iterations: usize,
}

pub fn f_c(c: f64, x: f64) -> f64 {
    x * x.ln() - c * x
}

pub fn f_inverse(c: f64, y: f64) -> Result<FInverse> {
    let x_min = (c - 1.0).exp();
    let y_min = -x_min;
    if !(y > y_min) || !y.is_finite() {
        return Err(Error::Domain(format!(
            "F_C^-1 needs y > F_C(e^(C-1)) = {y_min} so that the increasing branch x > e^(C-1) applies; got y = {y}"
        )));
    }
    let ly = y.ln();
    let expansion = (y > 0.0 && ly > 1.0).then(|| y / ly + y * ly.ln() / (ly * ly) + c * y / (ly * ly));
    // seed on the branch: expansion when it lies there, otherwise a point right of the minimum
    let mut x = match expansion {
        Some(e) if e > x_min => e,
        _ => x_min * (1.0 + ((y - y_min) / x_min).sqrt().max(1e-3)),
    };
    let mut it = 0;
    for k in 0..200 {
        it = k + 1;
        let fx = f_c(c, x) - y;
        let d = x.ln() + 1.0 - c;
        let mut nx = x - fx / d;
        if nx <= x_min {
            nx = 0.5 * (x + x_min);
        }
        let done = (nx - x).abs() <= 1e-15 * nx;
        x = nx;
        if done {
            break;
        }
    }
    let fx = f_c(c, x);
    if (fx - y).abs() > 1e-12 * y.abs().max(x.abs()) {
        return Err(Error::Domain(format!("Newton iteration for F_C^-1 stalled at x = {x}")));
    }
    Ok(FInverse { x, expansion, residual: expansion.map(|e| (x - e).abs()), iterations: it })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Below,
    Above,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// Leading behaviour of the spectral shift function at `Lambda_q -+ lambda`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SsfPrediction {
    pub q: usize,
    pub side: Side,
    pub boundary: Boundary,
    pub ln_lambda: f64,
    /// Zero when `bounded_flag` is set.
    pub value: f64,
    /// The prediction is `O(1)` only.
    pub bounded_flag: bool,
    pub constant_used: f64,
    pub cap: f64,
    pub b: f64,
}

/// Predicted SSF near `Lambda_q`, for a caller-supplied capacity of the
/// projected obstacle. The leading term does not depend on `q`.
pub fn ssf_predict(q: usize, side: Side, boundary: Boundary, ln_lambda: f64, b: f64, cap: f64) -> Result<SsfPrediction> {
    let p = profile(ln_lambda, true)?;
    let cc = frak_c(b, cap)?;
    let f = phi1(&p, cc)?;
    let (value, bounded) = match (side, boundary) {
        (Side::Below, Boundary::Dirichlet) => (0.0, true),
        (Side::Below, Boundary::Neumann) => (-0.5 * f, false),
        (Side::Above, Boundary::Dirichlet) => (0.25 * f, false),
        (Side::Above, Boundary::Neumann) => (-0.25 * f, false),
    };
    Ok(SsfPrediction { q, side, boundary, ln_lambda, value, bounded_flag: bounded, constant_used: cc, cap, b })
}

/// One schedule point of a counting check.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MsfRow {
    pub lambda_log: f64,
    /// `n_+(c sqrt(lambda))` or `(1/pi) Tr arctan(T/(c sqrt(lambda)))`.
    pub observed: f64,
    /// `Phi_1/2` or `Phi_1/4`.
    pub profile: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MsfKind {
    Count,
    TrArctan,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MsfTable {
    pub kind: MsfKind,
    pub c: f64,
    pub frak_c: f64,
    pub rows: Vec<MsfRow>,
    pub notices: Vec<String>,
}

impl MsfTable {
    pub fn ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.ratio).collect()
    }

    /// CSV with columns `lambda_log, n_plus|tr_arctan, phi_half|phi_quarter, ratio`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        match self.kind {
            MsfKind::Count => writeln!(w, "lambda_log,n_plus,phi_half,ratio")?,
            MsfKind::TrArctan => writeln!(w, "lambda_log,tr_arctan,phi_quarter,ratio")?,
        }
        for r in &self.rows {
            writeln!(w, "{},{},{},{}", r.lambda_log, r.observed, r.profile, r.ratio)?;
        }
        Ok(())
    }
}

fn schedule_checks(seq: &SpectralSequence, c: f64, ln_lambda: f64, notices: &mut Vec<String>) -> Result<Option<f64>> {
    if !(c > 0.0) {
        return invalid("c must be positive");
    }
    let ln_s = c.ln() + 0.5 * ln_lambda;
    let deepest = seq.log_nu.last().copied().unwrap_or(f64::INFINITY);
    if deepest >= ln_s {
        notices.push(format!("ln lambda = {ln_lambda}: sequence ends at ln nu = {deepest}, above the threshold {ln_s}; row dropped"));
        return Ok(None);
    }
    Ok(Some(ln_s))
}

/// `n_+(c sqrt(lambda))` against `Phi_1(lambda; c_O)/2` over a schedule of `ln lambda`.
pub fn verify_msf1(seq: &SpectralSequence, c: f64, b: f64, cap: f64, ln_lambdas: &[f64]) -> Result<MsfTable> {
    let cc = frak_c(b, cap)?;
    let mut notices = Vec::new();
    let mut rows = Vec::new();
    for &ll in ln_lambdas {
        let Some(ln_s) = schedule_checks(seq, c, ll, &mut notices)? else { continue };
        let n = count_log(ln_s, &seq.log_nu).n_plus as f64;
        let half = 0.5 * phi1(&profile(ll, true)?, cc)?;
        rows.push(MsfRow { lambda_log: ll, observed: n, profile: half, ratio: n / half });
    }
    Ok(MsfTable { kind: MsfKind::Count, c, frak_c: cc, rows, notices })
}

/// `arctan(e^r)`, saturating cleanly at both ends.
pub fn arctan_exp(r: f64) -> f64 {
    if r > 40.0 {
        FRAC_PI_2 - (-r).exp()
    } else if r < -40.0 {
        r.exp()
    } else {
        r.exp().atan()
    }
}

/// `(1/pi) sum_k arctan(nu_k / e^{ln_scale})` from the log-domain sequence.
pub fn tr_arctan_log(log_nu: &[f64], ln_scale: f64) -> f64 {
    log_nu.iter().map(|&l| arctan_exp(l - ln_scale)).sum::<f64>() / PI
}

/// `(1/pi) Tr arctan(T/(c sqrt(lambda)))` against `Phi_1(lambda; c_O)/4`.
pub fn verify_msf2(seq: &SpectralSequence, c: f64, b: f64, cap: f64, ln_lambdas: &[f64]) -> Result<MsfTable> {
    let cc = frak_c(b, cap)?;
    let mut notices = Vec::new();
    let mut rows = Vec::new();
    for &ll in ln_lambdas {
        let Some(ln_s) = schedule_checks(seq, c, ll, &mut notices)? else { continue };
        let t = tr_arctan_log(&seq.log_nu, ln_s);
        let quarter = 0.25 * phi1(&profile(ll, true)?, cc)?;
        rows.push(MsfRow { lambda_log: ll, observed: t, profile: quarter, ratio: t / quarter });
    }
    Ok(MsfTable { kind: MsfKind::TrArctan, c, frak_c: cc, rows, notices })
}

/// Constants used by the inversion checks.
pub const INVERSION_CONSTANTS: [f64; 3] = [-1.0, 0.0, 1.0 + std::f64::consts::LN_2];

/// Newton inverse on random branch-valid `y` (log-uniform up to `1e15`, plus
/// a share just above the branch minimum); violations are relative
/// residuals `|F_C(x) - y| / max(|y|, |x|)` above `tol`.
pub fn inversion_suite(seed: u64, samples: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut bad, mut worst) = (0, 0.0f64);
    for i in 0..samples {
        let c = INVERSION_CONSTANTS[i % INVERSION_CONSTANTS.len()];
        let y_min = -(c - 1.0).exp();
        let y = if rng.random_bool(0.8) {
            10f64.powf(rng.random_range(-1.0..15.0))
        } else {
            y_min * rng.random_range(0.0..0.999)
        };
        let r = f_inverse(c, y)?;
        let rel = (f_c(c, r.x) - y).abs() / y.abs().max(r.x.abs());
        worst = worst.max(rel);
        if rel > tol {
            bad += 1;
        }
    }
    Ok(SuiteReport { instances: samples, violations: bad, worst })
}

/// `|x - expansion| (ln y)^2 / y` along `ys`.
pub fn expansion_residuals(c: f64, ys: &[f64]) -> Result<Vec<f64>> {
    ys.iter()
        .map(|&y| {
            let r = f_inverse(c, y)?;
            let res = r.residual.ok_or_else(|| Error::Domain(format!("expansion undefined at y = {y}")))?;
            Ok(res * y.ln().powi(2) / y)
        })
        .collect()
}

/// `|x_k - 1|` non-increasing along the sequence.
pub fn approaches_one_monotonically(ratios: &[f64]) -> bool {
    ratios.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs())
}

/// Non-increasing sequence.
pub fn is_non_increasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] <= w[0])
}
