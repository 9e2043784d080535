//! Truncated Toeplitz matrices `p_q V p_q` in the angular-momentum basis,
//! their spectra, and the capacity read off the eigenvalue decay.
//!
//! Indicator symbols are integrated along rays from the origin: for each
//! direction the set meets the ray in radial intervals, the radial integral
//! of `R_{k,q} R_{l,q}` over an interval is a finite sum of regularized
//! incomplete gamma differences, and the remaining angular integral is
//! smooth between critical angles, where adaptive Gauss-Kronrod is used.

use crate::counting;
use crate::error::{invalid, Error, Result};
use crate::geometry::PlanarSet;
use crate::landau::{phi_polar, radial_factor, LaguerreSpec, laguerre};
use crate::linalg::{graded_psd_eigenvalues, hermitian_defect, hermitian_eigenvalues, symmetrize, CMat};
use crate::quad::{adaptive, integrate_with_breaks};
use crate::special::{ln_binomial, ln_factorial, ln_gamma, ln_lower_regularized, lower_regularized_chain, upper_regularized_chain};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Quadrature settings for matrix elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Absolute tolerance: for [`upsilon_element`] on the value itself, for
    /// [`toeplitz_matrix`] on entries scaled by `1/sqrt(a_kk a_ll)`.
    pub abs_tol: f64,
    pub max_panels: usize,
    /// Radius beyond which the integrand is treated as zero; defaults to the
    /// Gaussian tail cutoff of the basis functions involved.
    pub cutoff_radius: Option<f64>,
    /// Radii where the symbol is known to jump (e.g. a disk boundary).
    pub radial_breaks: Vec<f64>,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { abs_tol: 1e-13, max_panels: 20_000, cutoff_radius: None, radial_breaks: vec![] }
    }
}

/// Matrix element with its quadrature diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct UpsilonValue {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

/// Radius where `t^{n} e^{-t}` tails are below double precision for indices up to `n`.
pub fn tail_cutoff_radius(n: usize, b: f64) -> f64 {
    let n = n as f64;
    let t = n + 12.0 * (n + 1.0).sqrt() + 40.0;
    (2.0 * t / b).sqrt()
}

/// `<V phi_{k,m}, phi_{l,s}> = int V phi_{k,m} conj(phi_{l,s})` by nested
/// adaptive quadrature in polar coordinates.
pub fn upsilon_element<V>(v: V, m: usize, s: usize, k: usize, l: usize, b: f64, cfg: &QuadConfig) -> Result<UpsilonValue>
where
    V: Fn([f64; 2]) -> Complex64,
{
    if b <= 0.0 {
        return invalid("b must be positive");
    }
    let rmax = cfg.cutoff_radius.unwrap_or_else(|| tail_cutoff_radius(k.max(l).max(m).max(s), b));
    let mut rbreaks = vec![0.0];
    rbreaks.extend(cfg.radial_breaks.iter().copied().filter(|&r| r > 0.0 && r < rmax));
    rbreaks.push(rmax);
    rbreaks.sort_by(f64::total_cmp);
    let inner_tol = cfg.abs_tol / (8.0 * PI);
    let mut inner_ok = true;
    let mut inner_err = 0.0f64;
    let freq = (k as i64 - m as i64 - l as i64 + s as i64).unsigned_abs() as usize;
    let n_theta = (2 * freq + 8).max(8);
    let tbreaks: Vec<f64> = (0..=n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect();
    let outer = adaptive(
        |th, out: &mut [f64]| {
            let (c, sn) = (th.cos(), th.sin());
            let r = adaptive(
                |rho, o: &mut [f64]| {
                    let z = v([rho * c, rho * sn]) * phi_polar(k, m, b, rho, th) * phi_polar(l, s, b, rho, th).conj() * rho;
                    o[0] = z.re;
                    o[1] = z.im;
                },
                2,
                &rbreaks,
                inner_tol,
                cfg.max_panels,
            );
            inner_ok &= r.converged;
            inner_err = inner_err.max(r.error);
            out[0] = r.value[0];
            out[1] = r.value[1];
        },
        2,
        &tbreaks,
        cfg.abs_tol,
        cfg.max_panels,
    );
    Ok(UpsilonValue {
        value: Complex64::new(outer.value[0], outer.value[1]),
        error: outer.error + 2.0 * PI * inner_err,
        converged: outer.converged && inner_ok,
    })
}

/// Finite section of a Toeplitz operator with provenance.
#[derive(Debug, Clone)]
pub struct TruncatedOperator {
    pub q: usize,
    pub b: f64,
    /// Indices run over `0..=k_max`.
    pub k_max: usize,
    pub entries: CMat,
    pub symbol_descriptor: String,
    /// Relative accuracy of entries against `sqrt(a_kk a_ll)`.
    pub entry_rel_tol: f64,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.k_max + 1
    }

    /// Largest off-diagonal modulus relative to the largest diagonal entry.
    pub fn off_diagonal_ratio(&self) -> f64 {
        let n = self.dim();
        let diag = (0..n).map(|i| self.entries[(i, i)].norm()).fold(0.0, f64::max);
        let mut off = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off.max(self.entries[(i, j)].norm());
                }
            }
        }
        if diag == 0.0 {
            0.0
        } else {
            off / diag
        }
    }
}

/// Radial polynomial data of `R_{k,q}`: `R = sign * exp(ln_amp) t^{m/2} e^{-t/2} sum_i c_i t^i`.
struct RadialTerm {
    m: usize,
    ln_amp: f64,
    sign: f64,
    /// `(ln|c_i|, sign c_i)`
    coeffs: Vec<(f64, f64)>,
}

fn radial_term(k: usize, q: usize) -> RadialTerm {
    let (lo, hi) = if k >= q { (q, k) } else { (k, q) };
    let m = hi - lo;
    let coeffs = (0..=lo)
        .map(|i| (ln_binomial(hi, lo - i) - ln_factorial(i), if i % 2 == 0 { 1.0 } else { -1.0 }))
        .collect();
    RadialTerm {
        m,
        ln_amp: 0.5 * (ln_factorial(lo) - ln_factorial(hi)),
        sign: if k < q && (q - k) % 2 == 1 { -1.0 } else { 1.0 },
        coeffs,
    }
}

/// `int_{T1}^{T2} R_k R_l dt = sum_w coef_w [P(a_w, T2) - P(a_w, T1)]`, `2 a_w = twice_a`.
struct PairTable {
    k: usize,
    l: usize,
    terms: Vec<(usize, f64)>,
}

fn pair_tables(k_max: usize, q: usize, pairs: &[(usize, usize)]) -> (Vec<PairTable>, usize) {
    let radial: Vec<RadialTerm> = (0..=k_max).map(|k| radial_term(k, q)).collect();
    let mut max_twice = 2;
    let tables = pairs
        .iter()
        .map(|&(k, l)| {
            let (rk, rl) = (&radial[k], &radial[l]);
            let mut terms = Vec::with_capacity(rk.coeffs.len() * rl.coeffs.len());
            for (i, ci) in rk.coeffs.iter().enumerate() {
                for (j, cj) in rl.coeffs.iter().enumerate() {
                    let twice = rk.m + rl.m + 2 * (i + j) + 2;
                    max_twice = max_twice.max(twice);
                    let a = 0.5 * twice as f64;
                    let ln = rk.ln_amp + rl.ln_amp + ci.0 + cj.0 + ln_gamma(a);
                    terms.push((twice, rk.sign * rl.sign * ci.1 * cj.1 * ln.exp()));
                }
            }
            PairTable { k, l, terms }
        })
        .collect();
    (tables, max_twice)
}

/// `P(a, T)` and `Q(a, T)` for all `a = twice/2 <= max_twice/2`, indexed by `twice`.
fn pq_table(max_twice: usize, t: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; max_twice + 1];
    let mut q = vec![1.0; max_twice + 1];
    if t <= 0.0 {
        return (p, q);
    }
    let n_int = max_twice / 2;
    let n_half = (max_twice.saturating_sub(1)) / 2;
    for (j, v) in lower_regularized_chain(1.0, n_int, t).into_iter().enumerate() {
        p[2 * (j + 1)] = v;
    }
    for (j, v) in lower_regularized_chain(1.5, n_half, t).into_iter().enumerate() {
        p[2 * j + 3] = v;
    }
    for (j, v) in upper_regularized_chain(1.0, n_int, t).into_iter().enumerate() {
        q[2 * (j + 1)] = v;
    }
    for (j, v) in upper_regularized_chain(1.5, n_half, t).into_iter().enumerate() {
        q[2 * j + 3] = v;
    }
    (p, q)
}

/// `P(a, T2) - P(a, T1)` for every tabulated `a`, from whichever of `P`, `Q`
/// is small at `T1`.
fn add_gamma_differences(delta: &mut [f64], t1: f64, t2: f64) {
    let max_twice = delta.len() - 1;
    let (p2, q2) = pq_table(max_twice, t2);
    if t1 <= 0.0 {
        for w in 2..=max_twice {
            delta[w] += p2[w];
        }
        return;
    }
    let (p1, q1) = pq_table(max_twice, t1);
    for w in 2..=max_twice {
        delta[w] += if t1 >= 0.5 * w as f64 { q1[w] - q2[w] } else { p2[w] - p1[w] };
    }
}

/// Angular integral of the pair tables over the ray intervals of `set`.
#[allow(clippy::too_many_arguments)]
fn integrate_pairs(
    set: &PlanarSet,
    b: f64,
    tables: &[PairTable],
    max_twice: usize,
    weights: &[f64],
    panels: &[f64],
    tol: f64,
    max_panels: usize,
) -> (Vec<Complex64>, f64, bool) {
    let dim = 2 * tables.len();
    // smoothstep on each segment flattens sqrt-type behaviour at tangent angles
    let segs = panels.len() - 1;
    let ubreaks: Vec<f64> = (0..=segs).map(|j| j as f64).collect();
    let out = adaptive(
        |u, o: &mut [f64]| {
            let j = (u.floor() as usize).min(segs - 1);
            let x = u - j as f64;
            let h = panels[j + 1] - panels[j];
            let th = panels[j] + h * x * x * (3.0 - 2.0 * x);
            let jac = h * 6.0 * x * (1.0 - x);
            let mut delta = vec![0.0; max_twice + 1];
            for (r1, r2) in set.ray_intervals(th) {
                add_gamma_differences(&mut delta, 0.5 * b * r1 * r1, 0.5 * b * r2 * r2);
            }
            for (idx, tab) in tables.iter().enumerate() {
                let radial: f64 = tab.terms.iter().map(|&(tw, c)| c * delta[tw]).sum();
                let v = radial * weights[idx] * jac / (2.0 * PI);
                let ang = (tab.k as f64 - tab.l as f64) * th;
                o[2 * idx] = v * ang.cos();
                o[2 * idx + 1] = v * ang.sin();
            }
        },
        dim,
        &ubreaks,
        tol,
        max_panels,
    );
    let vals = (0..tables.len()).map(|i| Complex64::new(out.value[2 * i], out.value[2 * i + 1])).collect();
    (vals, out.error, out.converged)
}

/// Matrix of `p_q 1_O p_q` on `phi_{0,q}..phi_{K,q}`.
pub fn toeplitz_matrix(set: &PlanarSet, q: usize, b: f64, k_max: usize, cfg: &QuadConfig) -> Result<TruncatedOperator> {
    if !(b > 0.0 && b.is_finite()) {
        return invalid("b must be positive");
    }
    set.validate()?;
    let n = k_max + 1;
    let descriptor = format!("1[{}]", set.descriptor());
    if !set.is_region() {
        return Ok(TruncatedOperator {
            q,
            b,
            k_max,
            entries: CMat::zeros(n, n),
            symbol_descriptor: descriptor,
            entry_rel_tol: 0.0,
            converged: true,
            warnings: vec!["set has empty interior; the compression is zero".into()],
        });
    }
    let mut panels: Vec<f64> = (0..=(2 * n).max(16)).map(|j| 2.0 * PI * j as f64 / (2 * n).max(16) as f64).collect();
    panels.extend(set.critical_angles());
    panels.sort_by(f64::total_cmp);
    panels.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    // pass 1: diagonal, scaled by the enclosing-disk values, to get weights
    let t_max = 0.5 * b * set.max_radius().powi(2);
    let enclosing: Vec<f64> = (0..n).map(|k| radial_oracle_ln_t(t_max, q, k).exp().max(1e-300)).collect();
    let diag_pairs: Vec<(usize, usize)> = (0..n).map(|k| (k, k)).collect();
    let (tables, max_twice) = pair_tables(k_max, q, &diag_pairs);
    let w1: Vec<f64> = enclosing.iter().map(|s| 1.0 / s).collect();
    let (d1, _, _) = integrate_pairs(set, b, &tables, max_twice, &w1, &panels, 1e-10, cfg.max_panels);
    let diag: Vec<f64> = d1.iter().zip(&enclosing).map(|(d, s)| (d.re * s).max(1e-300 * s)).collect();

    // pass 2: all entries scaled by 1/sqrt(a_kk a_ll)
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k..n).map(move |l| (k, l))).collect();
    let (tables, max_twice) = pair_tables(k_max, q, &pairs);
    let w2: Vec<f64> = pairs.iter().map(|&(k, l)| 1.0 / (diag[k] * diag[l]).sqrt()).collect();
    let (vals, err, converged) = integrate_pairs(set, b, &tables, max_twice, &w2, &panels, cfg.abs_tol, cfg.max_panels);
    let mut entries = CMat::zeros(n, n);
    for (v, &(k, l)) in vals.iter().zip(&pairs) {
        let z = v * (diag[k] * diag[l]).sqrt();
        entries[(k, l)] = z;
        entries[(l, k)] = z.conj();
    }
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!("angular quadrature stopped at estimated scaled error {err:.2e}"));
    }
    if hermitian_defect(&entries) > 1e-12 {
        warnings.push("entries not Hermitian before symmetrization".into());
    }
    symmetrize(&mut entries);
    Ok(TruncatedOperator {
        q,
        b,
        k_max,
        entries,
        symbol_descriptor: descriptor,
        entry_rel_tol: err + evaluation_error(k_max.max(q), max_twice, t_max),
        converged,
        warnings,
    })
}

/// Rounding in the log-domain coefficients and incomplete gamma values,
/// relative to `sqrt(a_kk a_ll)`.
fn evaluation_error(max_index: usize, max_twice: usize, t_max: f64) -> f64 {
    8.0 * f64::EPSILON * (1.0 + ln_factorial(max_index) + 0.5 * max_twice as f64 * t_max.ln().abs().max(1.0))
}

/// `ln int_0^T R_{k,q}(t)^2 dt`.
fn radial_oracle_ln_t(t_end: f64, q: usize, k: usize) -> f64 {
    if t_end <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if q == 0 {
        return ln_lower_regularized(k as f64 + 1.0, t_end);
    }
    let (lo, hi) = if k >= q { (q, k) } else { (k, q) };
    let m = hi - lo;
    let spec = LaguerreSpec { q: lo, m };
    let ln_dens = |t: f64| {
        let l = laguerre(spec, t);
        if t <= 0.0 {
            return if m == 0 { (l * l).ln() } else { f64::NEG_INFINITY };
        }
        ln_factorial(lo) - ln_factorial(hi) + m as f64 * t.ln() - t + (l * l).ln()
    };
    let grid = 256;
    let shift = (0..=grid)
        .map(|j| ln_dens(t_end * j as f64 / grid as f64))
        .filter(|v| v.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return f64::NEG_INFINITY;
    }
    let breaks: Vec<f64> = (0..=16).map(|j| t_end * j as f64 / 16.0).collect();
    let (v, _, _) = integrate_with_breaks(|t| (ln_dens(t) - shift).exp(), &breaks, 1e-16 * t_end);
    shift + v.ln()
}

/// `nu_{k,q}` of the centred disk of radius `r`: `P(k+1, br^2/2)` at `q = 0`,
/// otherwise a 1D quadrature of the radial density of `|phi_{k,q}|^2`.
pub fn radial_oracle(r: f64, q: usize, b: f64, k: usize) -> f64 {
    radial_oracle_ln(r, q, b, k).exp()
}

/// `ln nu_{k,q}` of the centred disk, valid far below the double range.
pub fn radial_oracle_ln(r: f64, q: usize, b: f64, k: usize) -> f64 {
    if r.is_infinite() {
        return 0.0;
    }
    radial_oracle_ln_t(0.5 * b * r * r, q, k)
}

/// Spectrum of the centred disk for `k = 0..=k_max`, log domain.
pub fn radial_oracle_sequence(r: f64, q: usize, b: f64, k_max: usize) -> SpectralSequence {
    let log_nu: Vec<f64> = (0..=k_max).map(|k| radial_oracle_ln(r, q, b, k)).collect();
    SpectralSequence::from_log(log_nu, q, b, format!("radial oracle, disk r={r}"))
}

/// Non-increasing eigenvalue list with per-entry certification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralSequence {
    pub nu: Vec<f64>,
    pub log_nu: Vec<f64>,
    pub certified: Vec<bool>,
    pub rel_error: Vec<f64>,
    pub q: usize,
    pub b: f64,
    pub descriptor: String,
}

impl SpectralSequence {
    /// Sequence given in the log domain, sorted non-increasing, all certified.
    pub fn from_log(mut log_nu: Vec<f64>, q: usize, b: f64, descriptor: String) -> Self {
        log_nu.sort_by(|a, b| b.total_cmp(a));
        let nu = log_nu.iter().map(|l| l.exp()).collect();
        let n = log_nu.len();
        SpectralSequence { nu, log_nu, certified: vec![true; n], rel_error: vec![0.0; n], q, b, descriptor }
    }

    pub fn len(&self) -> usize {
        self.log_nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_nu.is_empty()
    }

    /// Number of leading certified entries.
    pub fn certified_len(&self) -> usize {
        self.certified.iter().take_while(|&&c| c).count()
    }

    /// `n_+(s)` on this list, through the counting module.
    pub fn n_plus(&self, s: f64) -> usize {
        counting::count_log(s.ln(), &self.log_nu).n_plus
    }

    /// CSV with columns `k, nu, ln_nu, certified`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "k,nu,ln_nu,certified")?;
        for k in 0..self.len() {
            writeln!(w, "{k},{:e},{},{}", self.nu[k], self.log_nu[k], self.certified[k])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectrumConfig {
    /// Required distance between a certified index and the truncation `K`.
    pub margin: usize,
    /// Largest estimated relative error of a certified eigenvalue.
    pub rel_accuracy: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig { margin: 20, rel_accuracy: 1e-10 }
    }
}

/// Eigenvalues of the truncated operator with default certification.
pub fn spectrum(op: &TruncatedOperator) -> Result<SpectralSequence> {
    spectrum_with(op, &SpectrumConfig::default())
}

/// Eigenvalues, non-increasing. Index `j` is certified when
/// `j + margin <= K` and its estimated relative error is below the target.
pub fn spectrum_with(op: &TruncatedOperator, cfg: &SpectrumConfig) -> Result<SpectralSequence> {
    let n = op.dim();
    let (nu, rel_error) = match graded_psd_eigenvalues(&op.entries, op.entry_rel_tol) {
        Some(g) => (g.values, g.rel_error),
        None => {
            let v = hermitian_eigenvalues(&op.entries)?;
            let top = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let err = v.iter().map(|x| (n as f64 * f64::EPSILON * top + op.entry_rel_tol * top) / x.abs()).collect();
            (v, err)
        }
    };
    if nu.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigen("non-finite eigenvalue".into()));
    }
    let certified = (0..n).map(|j| j + cfg.margin <= op.k_max && rel_error[j] < cfg.rel_accuracy).collect();
    let log_nu = nu.iter().map(|x| if *x > 0.0 { x.ln() } else { f64::NEG_INFINITY }).collect();
    Ok(SpectralSequence { nu, log_nu, certified, rel_error, q: op.q, b: op.b, descriptor: op.symbol_descriptor.clone() })
}

/// Capacity read off the decay `(k! nu_k)^{1/k} -> b cap^2/2`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectralCapacity {
    pub cap: f64,
    /// Fitted slope of `ln(k! nu_k)` against `k`, i.e. `ln(b cap^2/2)`.
    pub slope: f64,
    /// Largest fit residual divided by the window length.
    pub residual: f64,
    pub reliable: bool,
}

/// Threshold on `max|residual| / window length` for a reliable fit.
pub const SPECTRAL_FIT_RESIDUAL: f64 = 0.01;

/// Linear fit of `ln(k! nu_k)` over `k in window` (inclusive bounds).
pub fn capacity_from_spectrum(seq: &SpectralSequence, window: (usize, usize)) -> Result<SpectralCapacity> {
    let (lo, hi) = window;
    if hi <= lo + 1 || hi >= seq.len() {
        return invalid(format!("window {lo}..={hi} must hold at least three indices of a sequence of length {}", seq.len()));
    }
    if seq.certified[lo..=hi].iter().any(|c| !c) {
        return invalid("window contains uncertified indices");
    }
    let pts: Vec<(f64, f64)> = (lo..=hi).map(|k| (k as f64, ln_factorial(k) + seq.log_nu[k])).collect();
    if pts.iter().any(|p| !p.1.is_finite()) {
        return invalid("window contains zero eigenvalues");
    }
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let icpt = (sy - slope * sx) / m;
    let worst = pts.iter().map(|p| (p.1 - icpt - slope * p.0).abs()).fold(0.0, f64::max);
    let residual = worst / (hi - lo) as f64;
    Ok(SpectralCapacity {
        cap: (2.0 * slope.exp() / seq.b).sqrt(),
        slope,
        residual,
        reliable: residual <= SPECTRAL_FIT_RESIDUAL,
    })
}

/// `r_k / k` with `r_k = ln nu_k + k ln k - (c - ln 2) k`, for `k >= 1`.
pub fn fipu_residuals(seq: &SpectralSequence, frak_c: f64) -> Vec<(usize, f64)> {
    (1..seq.len())
        .map(|k| {
            let kf = k as f64;
            (k, (seq.log_nu[k] + kf * kf.ln() - (frak_c - 2f64.ln()) * kf).abs() / kf)
        })
        .collect()
}

/// Radial density helper used by tests and the demo.
pub fn radial_density(k: usize, q: usize, t: f64) -> f64 {
    radial_factor(k, q, t).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(_: [f64; 2]) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn upsilon_of_constant_is_identity() {
        let cfg = QuadConfig { abs_tol: 1e-11, ..Default::default() };
        for (k, l) in [(0, 0), (2, 2), (1, 0), (3, 1)] {
            let u = upsilon_element(one, 1, 1, k, l, 2.0, &cfg).unwrap();
            let want = if k == l { 1.0 } else { 0.0 };
            assert!((u.value - want).norm() < 1e-10, "{k},{l}: {}", u.value);
        }
    }

    #[test]
    fn upsilon_of_disk_indicator() {
        let cfg = QuadConfig { abs_tol: 1e-12, radial_breaks: vec![1.0], ..Default::default() };
        let ind = |x: [f64; 2]| Complex64::new(if x[0].hypot(x[1]) <= 1.0 { 1.0 } else { 0.0 }, 0.0);
        for k in 0..4 {
            let u = upsilon_element(ind, 0, 0, k, k, 2.0, &cfg).unwrap();
            let want = crate::special::lower_regularized(k as f64 + 1.0, 1.0);
            assert!((u.value.re - want).abs() < 1e-9 && u.value.im.abs() < 1e-10);
        }
        let off = upsilon_element(ind, 0, 0, 0, 2, 2.0, &cfg).unwrap();
        assert!(off.value.norm() < 1e-10);
        let q1 = upsilon_element(ind, 1, 1, 0, 0, 2.0, &cfg).unwrap();
        assert!((q1.value.re - radial_oracle(1.0, 1, 2.0, 0)).abs() < 1e-9);
    }

    #[test]
    fn disk_small_matrix() {
        let op = toeplitz_matrix(&PlanarSet::disk([0.0, 0.0], 1.0), 0, 2.0, 1, &QuadConfig::default()).unwrap();
        let e = (-1f64).exp();
        assert!((op.entries[(0, 0)].re - (1.0 - e)).abs() < 1e-13);
        assert!((op.entries[(1, 1)].re - (1.0 - 2.0 * e)).abs() < 1e-13);
        assert!(op.entries[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn oracle_limits() {
        assert!((radial_oracle(1.0, 0, 2.0, 0) - (1.0 - (-1f64).exp())).abs() < 1e-15);
        for k in [0, 5, 30] {
            assert_eq!(radial_oracle(f64::INFINITY, 0, 2.0, k), 1.0);
            assert!((radial_oracle(40.0, 2, 2.0, k) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_spectrum_is_sorted_diagonal() {
        let mut m = CMat::zeros(4, 4);
        for (i, v) in [0.1, 0.7, 0.05, 0.3].iter().enumerate() {
            m[(i, i)] = Complex64::new(*v, 0.0);
        }
        let op = TruncatedOperator {
            q: 0,
            b: 2.0,
            k_max: 3,
            entries: m,
            symbol_descriptor: "diag".into(),
            entry_rel_tol: 0.0,
            converged: true,
            warnings: vec![],
        };
        let s = spectrum_with(&op, &SpectrumConfig { margin: 0, rel_accuracy: 1e-10 }).unwrap();
        for (a, b) in s.nu.iter().zip([0.7, 0.3, 0.1, 0.05]) {
            assert!((a - b).abs() < 1e-15 * b);
        }
    }

    #[test]
    fn constant_sequence_is_unreliable() {
        let seq = SpectralSequence::from_log(vec![0.5f64.ln(); 60], 0, 2.0, "const".into());
        assert!(!capacity_from_spectrum(&seq, (20, 40)).unwrap().reliable);
    }
}
