//! Eigenvalue counting functions and the finite-dimensional inequalities
//! built on them: Weyl, Chebyshev, the Pushnitski average over `t` with
//! weight `dt / (pi (1 + t^2))`, and `Tr arctan`.
//!
//! Counting is strict everywhere: `n_+(s) = #{lambda > s}`.

use crate::error::{invalid, Result};
use crate::linalg::{hermitian_defect, hermitian_eigenvalues, CMat};
use nalgebra::Schur;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingResult {
    pub s: f64,
    pub n_plus: usize,
    pub n_minus: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

fn check_threshold(s: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return invalid(format!("threshold must be positive and finite, got {s}"));
    }
    Ok(())
}

/// `n_+ = #{lambda > s}`, `n_- = #{lambda < -s}`, with multiplicity.
pub fn count(s: f64, eigenvalues: &[f64]) -> Result<CountingResult> {
    check_threshold(s)?;
    Ok(CountingResult {
        s,
        n_plus: eigenvalues.iter().filter(|&&l| l > s).count(),
        n_minus: eigenvalues.iter().filter(|&&l| l < -s).count(),
    })
}

/// Counting on a list of non-negative values given by their logarithms.
pub fn count_log(ln_s: f64, log_values: &[f64]) -> CountingResult {
    CountingResult { s: ln_s.exp(), n_plus: log_values.iter().filter(|&&l| l > ln_s).count(), n_minus: 0 }
}

fn n_signed(s: f64, eig: &[f64], sign: Sign) -> usize {
    let f = sign.factor();
    eig.iter().filter(|&&l| f * l > s).count()
}

fn check_hermitian(a: &CMat, name: &str) -> Result<()> {
    if a.nrows() != a.ncols() {
        return invalid(format!("{name} is not square"));
    }
    let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if hermitian_defect(a) > 1e-12 * scale {
        return invalid(format!("{name} is not Hermitian"));
    }
    Ok(())
}

/// `n_±(s1+s2; T1+T2) <= n_±(s1; T1) + n_±(s2; T2)` for both signs.
pub fn weyl_check(t1: &CMat, t2: &CMat, s1: f64, s2: f64) -> Result<bool> {
    check_hermitian(t1, "T1")?;
    check_hermitian(t2, "T2")?;
    check_threshold(s1)?;
    check_threshold(s2)?;
    if t1.shape() != t2.shape() {
        return invalid("dimension mismatch");
    }
    let e1 = hermitian_eigenvalues(t1)?;
    let e2 = hermitian_eigenvalues(t2)?;
    let e12 = hermitian_eigenvalues(&(t1 + t2))?;
    let sum = count(s1 + s2, &e12)?;
    let (c1, c2) = (count(s1, &e1)?, count(s2, &e2)?);
    Ok(sum.n_plus <= c1.n_plus + c2.n_plus && sum.n_minus <= c1.n_minus + c2.n_minus)
}

/// `(n_+(s) + n_-(s), s^{-p} sum |lambda|^p)`.
pub fn chebyshev_bound(t: &CMat, s: f64, p: f64) -> Result<(usize, f64)> {
    check_hermitian(t, "T")?;
    check_threshold(s)?;
    if !(p >= 1.0) {
        return invalid("p must be at least 1");
    }
    let e = hermitian_eigenvalues(t)?;
    let c = count(s, &e)?;
    let rhs = e.iter().map(|l| l.abs().powf(p)).sum::<f64>() / s.powf(p);
    Ok((c.n_plus + c.n_minus, rhs))
}

/// Real and imaginary parts of a non-self-adjoint matrix.
#[derive(Debug, Clone)]
pub struct HermitianPair {
    pub re_part: CMat,
    pub im_part: CMat,
}

impl HermitianPair {
    pub fn new(re_part: CMat, im_part: CMat) -> Result<Self> {
        check_hermitian(&re_part, "real part")?;
        check_hermitian(&im_part, "imaginary part")?;
        if re_part.shape() != im_part.shape() {
            return invalid("real and imaginary parts differ in dimension");
        }
        Ok(HermitianPair { re_part, im_part })
    }

    /// `Re T = (T + T*)/2`, `Im T = (T - T*)/(2i)`.
    pub fn from_matrix(t: &CMat) -> Result<Self> {
        let adj = t.adjoint();
        let re = (t + &adj) * Complex64::new(0.5, 0.0);
        let im = (t - &adj) * Complex64::new(0.0, -0.5);
        HermitianPair::new(re, im)
    }

    pub fn dim(&self) -> usize {
        self.re_part.nrows()
    }

    pub fn im_is_psd(&self) -> bool {
        let e = hermitian_eigenvalues(&self.im_part).unwrap_or_default();
        let top = e.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        e.iter().all(|&l| l >= -1e-12 * top.max(1.0))
    }
}

/// Result of [`pushnitski_average`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PushnitskiAverage {
    pub value: f64,
    /// `false` when the pencil was singular and the `theta` grid was used.
    pub exact: bool,
    pub im_psd: bool,
    /// Number of crossing candidates in `t`.
    pub crossings: usize,
}

/// Grid size of the fallback; the value is then accurate to about `dim / SAMPLES`.
pub const FALLBACK_SAMPLES: usize = 20_000;

/// `(1/pi) int n_±(s; Re + t Im) dt / (1 + t^2)`.
///
/// With `t = tan(theta)` the integrand is piecewise constant; its jumps are
/// real roots of `det(Re - s + t Im) = 0` (sign `+`), found as eigenvalues
/// of a shifted pencil, and the integral is a sum of angle differences.
pub fn pushnitski_average(pair: &HermitianPair, s: f64, sign: Sign) -> Result<PushnitskiAverage> {
    check_threshold(s)?;
    let n = pair.dim();
    let im_psd = pair.im_is_psd();
    if n == 0 {
        return Ok(PushnitskiAverage { value: 0.0, exact: true, im_psd, crossings: 0 });
    }
    let f = Complex64::new(sign.factor(), 0.0);
    // sign-adjusted: count eigenvalues of B + tC above zero
    let b = &pair.re_part * f - CMat::identity(n, n) * Complex64::new(s, 0.0);
    let c = &pair.im_part * f;
    let count_at = |t: f64| -> Result<usize> {
        let e = hermitian_eigenvalues(&(&b + &c * Complex64::new(t, 0.0)))?;
        Ok(e.iter().filter(|&&l| l > 0.0).count())
    };
    let cscale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if cscale == 0.0 {
        let v = count_at(0.0)? as f64;
        return Ok(PushnitskiAverage { value: v, exact: true, im_psd, crossings: 0 });
    }
    let bscale = b.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut roots: Option<Vec<f64>> = None;
    for t0 in [0.0, 0.371, -1.29, 2.93, -7.7] {
        let shifted = &b + &c * Complex64::new(t0, 0.0);
        let lu = shifted.clone().lu();
        let diag: Vec<f64> = lu.u().diagonal().iter().map(|z| z.norm()).collect();
        let dmax = diag.iter().fold(0.0f64, |a, &x| a.max(x));
        let dmin = diag.iter().fold(f64::INFINITY, |a, &x| a.min(x));
        if dmax == 0.0 || dmin <= 1e-11 * (bscale + t0.abs() * cscale) {
            continue;
        }
        let Some(inv) = lu.try_inverse() else { continue };
        // det(shifted + (t - t0) C) = 0  <=>  1/(t - t0) is an eigenvalue of -inv C
        let m = -(inv * &c);
        let Some(eig) = Schur::new(m).eigenvalues() else { continue };
        let mut r = Vec::new();
        for z in eig.iter() {
            if z.im.abs() <= 1e-8 * (1.0 + z.re.abs()) && z.re != 0.0 {
                r.push(t0 + 1.0 / z.re);
            }
        }
        roots = Some(r);
        break;
    }
    let Some(mut roots) = roots else {
        let mut acc = 0.0;
        for j in 0..FALLBACK_SAMPLES {
            let th = -FRAC_PI_2 + PI * (j as f64 + 0.5) / FALLBACK_SAMPLES as f64;
            acc += count_at(th.tan())? as f64;
        }
        return Ok(PushnitskiAverage { value: acc / FALLBACK_SAMPLES as f64, exact: false, im_psd, crossings: 0 });
    };
    roots.sort_by(f64::total_cmp);
    let crossings = roots.len();
    let mut angles = vec![-FRAC_PI_2];
    angles.extend(roots.iter().map(|t| t.atan()));
    angles.push(FRAC_PI_2);
    let mut value = 0.0;
    for w in angles.windows(2) {
        let width = w[1] - w[0];
        if width <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        value += width * count_at(mid.tan())? as f64;
    }
    Ok(PushnitskiAverage { value: value / PI, exact: true, im_psd, crossings })
}

/// Closed form of the averaged count for the model pair built from
/// `M_3 = -iota(lambda)/(2 sqrt|lambda|) M`, `iota = 1` for `lambda < 0` and
/// `-i` for `lambda > 0`.
pub fn m3_closed_form(m: &CMat, lambda: f64, s: f64, sign: Sign) -> Result<f64> {
    check_hermitian(m, "M")?;
    check_threshold(s)?;
    if lambda == 0.0 || !lambda.is_finite() {
        return invalid("lambda must be nonzero and finite");
    }
    let e = hermitian_eigenvalues(m)?;
    let thr = 2.0 * s * lambda.abs().sqrt();
    if lambda < 0.0 {
        return Ok(match sign {
            Sign::Plus => 0.0,
            Sign::Minus => count(thr, &e)?.n_plus as f64,
        });
    }
    let pos: Vec<f64> = e.iter().map(|l| l.max(0.0)).collect();
    Ok(tr_arctan(&pos, thr)? / PI)
}

/// Real/imaginary parts of `M_3`.
pub fn m3_pair(m: &CMat, lambda: f64) -> Result<HermitianPair> {
    if lambda == 0.0 {
        return invalid("lambda must be nonzero");
    }
    let iota = if lambda < 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, -1.0) };
    let m3 = m * (-iota / (2.0 * lambda.abs().sqrt()));
    HermitianPair::from_matrix(&m3)
}

fn check_nonneg(eig: &[f64], scale: f64) -> Result<()> {
    if !(scale > 0.0) {
        return invalid("scale must be positive");
    }
    if eig.iter().any(|&l| l < 0.0 || !l.is_finite()) {
        return invalid("eigenvalues must be non-negative");
    }
    Ok(())
}

/// `sum arctan(lambda_i / scale)`.
pub fn tr_arctan(eigenvalues: &[f64], scale: f64) -> Result<f64> {
    check_nonneg(eigenvalues, scale)?;
    Ok(eigenvalues.iter().map(|l| (l / scale).atan()).sum())
}

/// `int_0^inf n_+(sigma; T/scale) dsigma/(1+sigma^2)` summed over the steps
/// of the staircase `n_+`.
pub fn tr_arctan_staircase(eigenvalues: &[f64], scale: f64) -> Result<f64> {
    check_nonneg(eigenvalues, scale)?;
    let mut mu: Vec<f64> = eigenvalues.iter().map(|l| l / scale).collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    for j in 0..mu.len() {
        let next = mu.get(j + 1).copied().unwrap_or(0.0);
        // n_+ = j + 1 on (next, mu_j)
        acc += (j + 1) as f64 * (mu[j].atan() - next.atan());
    }
    Ok(acc)
}

/// Schatten-1 norm.
pub fn trace_norm(t: &CMat) -> Result<f64> {
    Ok(hermitian_eigenvalues(t)?.iter().map(|l| l.abs()).sum())
}

/// `avg n_±(s; T1 + t T2) <= n_±(s/2; T1) + (2/(pi s)) ||T2||_1`.
pub fn pushnitski_bound_check(t1: &CMat, t2: &CMat, s: f64, sign: Sign) -> Result<bool> {
    let pair = HermitianPair::new(t1.clone(), t2.clone())?;
    let lhs = pushnitski_average(&pair, s, sign)?.value;
    let e1 = hermitian_eigenvalues(t1)?;
    let rhs = n_signed(0.5 * s, &e1, sign) as f64 + 2.0 / (PI * s) * trace_norm(t2)?;
    Ok(lhs <= rhs + 1e-12 * (1.0 + rhs))
}

/// Gaussian Hermitian matrix (GUE scaling up to a constant).
pub fn random_hermitian<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `G G*` with Gaussian `G`, rank `dim`.
pub fn random_psd<R: Rng>(dim: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(dim, dim, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    &g * g.adjoint()
}

/// Seeded randomized check of the counting inequalities.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RandomSuite {
    pub seed: u64,
    pub instances: usize,
    pub max_dim: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SuiteReport {
    pub instances: usize,
    pub violations: usize,
    /// Largest discrepancy for agreement suites, zero otherwise.
    pub worst: f64,
}

impl RandomSuite {
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    fn dim<R: Rng>(&self, rng: &mut R) -> usize {
        rng.random_range(1..=self.max_dim.max(1))
    }

    pub fn weyl(&self) -> Result<SuiteReport> {
        let mut rng = self.rng(1);
        let mut bad = 0;
        for _ in 0..self.instances {
            let d = self.dim(&mut rng);
            let (a, b) = (random_hermitian(d, &mut rng), random_hermitian(d, &mut rng));
            let (s1, s2) = (rng.random_range(0.05..3.0), rng.random_range(0.05..3.0));
            if !weyl_check(&a, &b, s1, s2)? {
                bad += 1;
            }
        }
        Ok(SuiteReport { instances: self.instances, violations: bad, worst: 0.0 })
    }

    /// Every instance is checked for each exponent in `exponents`.
    pub fn chebyshev(&self, exponents: &[f64]) -> Result<SuiteReport> {
        let mut rng = self.rng(2);
        let mut bad = 0;
        for _ in 0..self.instances {
            let d = self.dim(&mut rng);
            let t = random_hermitian(d, &mut rng);
            let s = rng.random_range(0.05..3.0);
            for &p in exponents {
                let (l, r) = chebyshev_bound(&t, s, p)?;
                if l as f64 > r * (1.0 + 1e-12) {
                    bad += 1;
                    break;
                }
            }
        }
        Ok(SuiteReport { instances: self.instances, violations: bad, worst: 0.0 })
    }

    pub fn pushnitski_bound(&self) -> Result<SuiteReport> {
        let mut rng = self.rng(3);
        let mut bad = 0;
        for _ in 0..self.instances {
            let d = self.dim(&mut rng);
            let t1 = random_hermitian(d, &mut rng);
            let t2 = random_psd(d, &mut rng) * Complex64::new(rng.random_range(0.01..1.0), 0.0);
            let s = rng.random_range(0.1..3.0);
            let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
            if !pushnitski_bound_check(&t1, &t2, s, sign)? {
                bad += 1;
            }
        }
        Ok(SuiteReport { instances: self.instances, violations: bad, worst: 0.0 })
    }

    /// Agreement of [`m3_closed_form`] with [`pushnitski_average`], tolerance `tol`.
    pub fn m3_agreement(&self, tol: f64) -> Result<SuiteReport> {
        let mut rng = self.rng(4);
        let (mut bad, mut worst) = (0, 0.0f64);
        for _ in 0..self.instances {
            let d = self.dim(&mut rng);
            let m = random_psd(d, &mut rng);
            let lambda = rng.random_range(0.05..4.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
            let s = rng.random_range(0.1..3.0);
            let sign = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
            let closed = m3_closed_form(&m, lambda, s, sign)?;
            let avg = pushnitski_average(&m3_pair(&m, lambda)?, s, sign)?.value;
            let diff = (closed - avg).abs();
            worst = worst.max(diff);
            if diff > tol {
                bad += 1;
            }
        }
        Ok(SuiteReport { instances: self.instances, violations: bad, worst })
    }

    /// Agreement of [`tr_arctan`] with [`tr_arctan_staircase`] on PSD spectra.
    pub fn tr_arctan_agreement(&self, tol: f64) -> Result<SuiteReport> {
        let mut rng = self.rng(5);
        let (mut bad, mut worst) = (0, 0.0f64);
        for _ in 0..self.instances {
            let d = self.dim(&mut rng);
            let eig: Vec<f64> = hermitian_eigenvalues(&random_psd(d, &mut rng))?.iter().map(|x| x.max(0.0)).collect();
            let scale = rng.random_range(0.05..5.0);
            let diff = (tr_arctan(&eig, scale)? - tr_arctan_staircase(&eig, scale)?).abs();
            worst = worst.max(diff);
            if diff > tol {
                bad += 1;
            }
        }
        Ok(SuiteReport { instances: self.instances, violations: bad, worst })
    }
}
