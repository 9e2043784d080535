//! One-dimensional free resolvent kernels along the field, sandwiched by a
//! longitudinal cutoff, and their Hilbert-Schmidt norms.

use crate::counting::SuiteReport;
use crate::error::{invalid, Result};
use crate::quad::integrate_with_breaks;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Longitudinal cutoff with values in `[0, 1]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Cutoff1D {
    /// Indicator of `[a, b]`; not smooth, admitted for closed-form checks.
    Indicator { a: f64, b: f64 },
    /// `exp(-(x - center)^2 / width^2)`.
    Gaussian { center: f64, width: f64 },
    /// `exp(1 - 1/(1 - s^2))`, `s = (x - center)/radius`, zero for `|s| >= 1`.
    Bump { center: f64, radius: f64 },
    /// Piecewise linear through `(x_i, v_i)`, zero outside.
    Sampled { x: Vec<f64>, values: Vec<f64> },
}

/// Gaussian tails beyond this many widths are dropped (`exp(-2 * 6^2)`).
const GAUSSIAN_EXTENT: f64 = 6.0;

impl Cutoff1D {
    pub fn validate(&self) -> Result<()> {
        match self {
            Cutoff1D::Indicator { a, b } if !(b > a) => invalid("indicator interval is empty"),
            Cutoff1D::Gaussian { width, .. } if !(*width > 0.0) => invalid("Gaussian width must be positive"),
            Cutoff1D::Bump { radius, .. } if !(*radius > 0.0) => invalid("bump radius must be positive"),
            Cutoff1D::Sampled { x, values } => {
                if x.len() != values.len() || x.len() < 2 {
                    return invalid("sampled cutoff needs matching x and values, at least two");
                }
                if x.windows(2).any(|w| !(w[1] > w[0])) {
                    return invalid("sampled cutoff abscissae must increase strictly");
                }
                if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
                    return invalid("cutoff values must lie in [0, 1]");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Cutoff1D::Indicator { a, b } => {
                if x >= *a && x <= *b {
                    1.0
                } else {
                    0.0
                }
            }
            Cutoff1D::Gaussian { center, width } => (-((x - center) / width).powi(2)).exp(),
            Cutoff1D::Bump { center, radius } => {
                let s = (x - center) / radius;
                if s.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
            Cutoff1D::Sampled { x: xs, values } => {
                if x < xs[0] || x > xs[xs.len() - 1] {
                    return 0.0;
                }
                let j = xs.partition_point(|&t| t <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
                values[j - 1] + t * (values[j] - values[j - 1])
            }
        }
    }

    /// Interval outside which the cutoff vanishes or is negligible.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Cutoff1D::Indicator { a, b } => (*a, *b),
            Cutoff1D::Gaussian { center, width } => (center - GAUSSIAN_EXTENT * width, center + GAUSSIAN_EXTENT * width),
            Cutoff1D::Bump { center, radius } => (center - radius, center + radius),
            Cutoff1D::Sampled { x, .. } => (x[0], x[x.len() - 1]),
        }
    }

    /// Points where the cutoff is not smooth, inside the support.
    fn kinks(&self) -> Vec<f64> {
        match self {
            Cutoff1D::Sampled { x, .. } => x.clone(),
            _ => Vec::new(),
        }
    }

    /// `||omega||^2` in `L^2(R)`.
    pub fn l2_norm_sq(&self) -> f64 {
        match self {
            Cutoff1D::Indicator { a, b } => b - a,
            Cutoff1D::Gaussian { width, .. } => width * (std::f64::consts::PI / 2.0).sqrt(),
            _ => {
                let (lo, hi) = self.support();
                let mut br = vec![lo];
                br.extend(self.kinks().into_iter().filter(|&k| k > lo && k < hi));
                br.push(hi);
                integrate_with_breaks(|x| self.value(x).powi(2), &br, 1e-15).0
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelVariant {
    Plain,
    Tilde,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KernelSpec {
    pub energy: f64,
    pub variant: KernelVariant,
}

impl KernelSpec {
    pub fn new(energy: f64, variant: KernelVariant) -> Result<Self> {
        if energy == 0.0 || !energy.is_finite() {
            return invalid("the energy must be finite and nonzero");
        }
        Ok(KernelSpec { energy, variant })
    }
}

/// The free 1D kernel without the cutoff factors.
fn bare_kernel(spec: &KernelSpec, d: f64) -> Complex64 {
    let k = spec.energy.abs().sqrt();
    let prop = if spec.energy < 0.0 {
        Complex64::new((-k * d.abs()).exp(), 0.0)
    } else {
        Complex64::from_polar(1.0, -k * d.abs())
    };
    match spec.variant {
        KernelVariant::Plain => {
            let pre = if spec.energy < 0.0 { Complex64::new(0.5 / k, 0.0) } else { Complex64::new(0.0, -0.5 / k) };
            pre * prop
        }
        KernelVariant::Tilde => {
            // sign(0) = 0 keeps the antisymmetry exact on the diagonal
            let sgn = if d > 0.0 {
                1.0
            } else if d < 0.0 {
                -1.0
            } else {
                0.0
            };
            -0.5 * sgn * prop
        }
    }
}

/// Kernel value at `(x, y)`.
pub fn kernel_value(spec: &KernelSpec, cutoff: &Cutoff1D, x: f64, y: f64) -> Complex64 {
    cutoff.value(x) * bare_kernel(spec, x - y) * cutoff.value(y)
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HsConfig {
    pub abs_tol: f64,
}

impl Default for HsConfig {
    fn default() -> Self {
        HsConfig { abs_tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HsNorm {
    pub norm: f64,
    /// Upper bound `||omega||^2 / (2 sqrt|E|)` or `||omega||^2 / 2`.
    pub bound: f64,
    /// Quadrature error estimate on the squared norm.
    pub error: f64,
    pub converged: bool,
}

impl HsNorm {
    pub fn within_bound(&self) -> bool {
        self.norm <= self.bound * (1.0 + 1e-12)
    }
}

pub fn hs_bound(spec: &KernelSpec, cutoff: &Cutoff1D) -> f64 {
    let n2 = cutoff.l2_norm_sq();
    match spec.variant {
        KernelVariant::Plain => n2 / (2.0 * spec.energy.abs().sqrt()),
        KernelVariant::Tilde => 0.5 * n2,
    }
}

/// Hilbert-Schmidt norm by nested adaptive quadrature of `|K|^2`, with the
/// inner integral split at the diagonal.
pub fn hs_norm(spec: &KernelSpec, cutoff: &Cutoff1D, cfg: &HsConfig) -> Result<HsNorm> {
    if spec.energy == 0.0 {
        return invalid("the energy must be nonzero");
    }
    cutoff.validate()?;
    let (lo, hi) = cutoff.support();
    let mut outer = vec![lo];
    outer.extend(cutoff.kinks().into_iter().filter(|&k| k > lo && k < hi));
    outer.push(hi);
    let width = hi - lo;
    let inner_tol = cfg.abs_tol / width;
    let mut inner_err = 0.0f64;
    let mut ok = true;
    let (val, outer_err, outer_ok) = integrate_with_breaks(
        |x| {
            let wx = cutoff.value(x);
            if wx == 0.0 {
                return 0.0;
            }
            let mut br = outer.clone();
            if x > lo && x < hi {
                br.push(x);
                br.sort_by(f64::total_cmp);
                br.dedup();
            }
            let (v, e, c) = integrate_with_breaks(|y| kernel_value(spec, cutoff, x, y).norm_sqr(), &br, inner_tol);
            inner_err = inner_err.max(e);
            ok &= c;
            v
        },
        &outer,
        cfg.abs_tol,
    );
    let error = outer_err + inner_err * width;
    Ok(HsNorm {
        norm: val.max(0.0).sqrt(),
        bound: hs_bound(spec, cutoff),
        error,
        converged: ok && outer_ok,
    })
}

/// Squared HS norm for the indicator of an interval of length `len`.
pub fn indicator_hs_sq(spec: &KernelSpec, len: f64) -> f64 {
    let e = spec.energy;
    let pre = match spec.variant {
        KernelVariant::Plain => 0.25 / e.abs(),
        KernelVariant::Tilde => 0.25,
    };
    if e > 0.0 {
        return pre * len * len;
    }
    // double integral of exp(-c|x - y|) over the square of side len
    let c = 2.0 * e.abs().sqrt();
    let cl = c * len;
    pre * 2.0 * (cl + (-cl).exp_m1()) / (c * c)
}

/// Random Gaussian cutoffs and energies; counts norms above the bound.
pub fn random_bound_suite(seed: u64, samples: usize, cfg: &HsConfig) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for i in 0..samples {
        let mag = 10f64.powf(rng.random_range(-2.0..2.0));
        let energy = if rng.random_bool(0.5) { mag } else { -mag };
        let width = 10f64.powf(rng.random_range(-1.0..1.0));
        let center = rng.random_range(-2.0..2.0);
        let variant = if i % 2 == 0 { KernelVariant::Plain } else { KernelVariant::Tilde };
        let spec = KernelSpec::new(energy, variant)?;
        let r = hs_norm(&spec, &Cutoff1D::Gaussian { center, width }, cfg)?;
        if !r.within_bound() {
            violations += 1;
        }
        worst = worst.max(r.norm / r.bound);
    }
    Ok(SuiteReport { instances: samples, violations, worst })
}
