//! Effective planar potentials built from a smooth cutoff `omega` on R^3,
//! shadow functions of 3D obstacles, and the check that the quadratic form
//! assembled from the weights `w_jk` with ladder-shifted levels equals the
//! lowest-level form of the single multiplier `upsilon_q`.
//!
//! Operators `L(-Delta/2b)` and the Wirtinger derivatives act as Fourier
//! multipliers on a zero-padded periodic grid. Matrix elements are
//! trapezoid sums on the same grid, which is spectrally accurate for the
//! rapidly decaying integrands involved.

use crate::error::{invalid, Error, Result};
use crate::geometry::PlanarSet;
use crate::landau::{laguerre, phi_polar, LaguerreSpec};
use crate::linalg::{hermitian_eigenvalues, CMat};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Square periodic grid `x = origin + h (i1, i2)`, `0 <= i1, i2 < n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub n: usize,
    pub h: f64,
    pub origin: [f64; 2],
}

impl Grid2 {
    /// `n` points per axis on `[-half, half)`.
    pub fn centered(n: usize, half: f64) -> Self {
        Grid2 { n, h: 2.0 * half / n as f64, origin: [-half, -half] }
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn point(&self, idx: usize) -> [f64; 2] {
        let (i1, i2) = (idx / self.n, idx % self.n);
        [self.origin[0] + self.h * i1 as f64, self.origin[1] + self.h * i2 as f64]
    }

    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Angular wavenumber of FFT bin `k` on an axis of `n` points.
    fn wavenumber(n: usize, h: f64, k: usize) -> f64 {
        let s = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
        2.0 * PI * s / (n as f64 * h)
    }
}

/// Real field on a [`Grid2`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealField2 {
    pub grid: Grid2,
    pub values: Vec<f64>,
}

impl RealField2 {
    /// CSV with columns `x1, x2, value`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "x1,x2,value")?;
        for (p, v) in self.grid.points().zip(&self.values) {
            writeln!(w, "{},{},{:e}", p[0], p[1], v)?;
        }
        Ok(())
    }

    pub fn complexified(&self) -> Vec<Complex64> {
        self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect()
    }
}

fn fft2_in_place(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fft.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
    if inverse {
        let s = 1.0 / (n * n) as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Relative spectral mass beyond this fraction of the Nyquist radius that
/// counts as under-resolved.
pub const SPECTRAL_TAIL_TOL: f64 = 1e-10;

/// Apply the Fourier multiplier `symbol(xi1, xi2)` to `f`, zero-padding by
/// `pad` in each direction; fails when the data is not resolved.
pub fn apply_multiplier<S>(grid: &Grid2, f: &[Complex64], pad: usize, symbol: S) -> Result<Vec<Complex64>>
where
    S: Fn(f64, f64) -> Complex64,
{
    let n = grid.n;
    let pad = pad.max(1);
    let np = n * pad;
    let off = (np - n) / 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); np * np];
    for i in 0..n {
        for j in 0..n {
            buf[(i + off) * np + j + off] = f[i * n + j];
        }
    }
    fft2_in_place(&mut buf, np, false);
    let top = buf.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if top > 0.0 {
        let knyq = PI / grid.h;
        let mut tail = 0.0f64;
        for i in 0..np {
            let k1 = Grid2::wavenumber(np, grid.h, i);
            for j in 0..np {
                let k2 = Grid2::wavenumber(np, grid.h, j);
                if k1.abs().max(k2.abs()) > 0.8 * knyq {
                    tail = tail.max(buf[i * np + j].norm());
                }
            }
        }
        if tail > SPECTRAL_TAIL_TOL * top {
            return Err(Error::Resolution(format!(
                "spectral tail {:.1e} of the peak; refine the grid (h = {})",
                tail / top,
                grid.h
            )));
        }
    }
    let even = np % 2 == 0;
    for i in 0..np {
        let k1 = Grid2::wavenumber(np, grid.h, i);
        for j in 0..np {
            let k2 = Grid2::wavenumber(np, grid.h, j);
            let nyq = even && (i == np / 2 || j == np / 2);
            buf[i * np + j] *= if nyq { Complex64::new(0.0, 0.0) } else { symbol(k1, k2) };
        }
    }
    fft2_in_place(&mut buf, np, true);
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = buf[(i + off) * np + j + off];
        }
    }
    Ok(out)
}

/// Symbol of `d/dzeta = (d1 - i d2)/2`.
pub fn dzeta_symbol(k1: f64, k2: f64) -> Complex64 {
    0.5 * (I * k1 - I * I * k2)
}

/// Symbol of `d/dzeta-bar = (d1 + i d2)/2`.
pub fn dzeta_bar_symbol(k1: f64, k2: f64) -> Complex64 {
    0.5 * (I * k1 + I * I * k2)
}

/// Symbol of `L_q^{(m)}(-Delta/2b)`.
pub fn laguerre_symbol(q: usize, m: usize, b: f64, k1: f64, k2: f64) -> f64 {
    laguerre(LaguerreSpec { q, m }, (k1 * k1 + k2 * k2) / (2.0 * b))
}

/// Sampling of the cutoff.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_perp: usize,
    pub n_par: usize,
    pub half_perp: f64,
    pub half_par: f64,
    /// Zero-padding factor for Fourier multipliers.
    pub pad: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { n_perp: 128, n_par: 129, half_perp: 6.0, half_par: 6.0, pad: 2 }
    }
}

/// Largest boundary value of the cutoff relative to its peak that is accepted.
pub const CUTOFF_DECAY_TOL: f64 = 1e-14;

/// Smooth real cutoff sampled on a box; the field points along the last axis.
#[derive(Debug, Clone)]
pub struct CutoffField {
    pub spec: GridSpec,
    pub grid: Grid2,
    /// Index `(p * n + i1) * n + i2` for the longitudinal sample `p`.
    pub values: Vec<f64>,
    pub b: f64,
    pub q: usize,
    pub descriptor: String,
}

impl CutoffField {
    pub fn par_step(&self) -> f64 {
        2.0 * self.spec.half_par / (self.spec.n_par - 1) as f64
    }

    pub fn par_coordinate(&self, p: usize) -> f64 {
        -self.spec.half_par + self.par_step() * p as f64
    }

    pub fn from_fn<F: Fn([f64; 3]) -> f64>(f: F, spec: GridSpec, b: f64, q: usize, descriptor: &str) -> Result<Self> {
        if !(b > 0.0) {
            return invalid("b must be positive");
        }
        if spec.n_perp < 8 || spec.n_par < 3 {
            return invalid("grid too small");
        }
        let grid = Grid2::centered(spec.n_perp, spec.half_perp);
        let n = spec.n_perp;
        let hp = 2.0 * spec.half_par / (spec.n_par - 1) as f64;
        let mut values = Vec::with_capacity(n * n * spec.n_par);
        for p in 0..spec.n_par {
            let z = -spec.half_par + hp * p as f64;
            for idx in 0..n * n {
                let x = grid.point(idx);
                values.push(f([x[0], x[1], z]));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("cutoff has non-finite samples");
        }
        let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut edge = 0.0f64;
        for p in 0..spec.n_par {
            for i1 in 0..n {
                for i2 in 0..n {
                    if p == 0 || p == spec.n_par - 1 || i1 == 0 || i2 == 0 || i1 == n - 1 || i2 == n - 1 {
                        edge = edge.max(values[(p * n + i1) * n + i2].abs());
                    }
                }
            }
        }
        if peak > 0.0 && edge > CUTOFF_DECAY_TOL * peak {
            return Err(Error::Resolution(format!(
                "cutoff is {:.1e} of its peak at the box boundary; enlarge the box",
                edge / peak
            )));
        }
        Ok(CutoffField { spec, grid, values, b, q, descriptor: descriptor.to_string() })
    }

    /// `amplitude exp(-|x_perp - c|^2/s_perp^2 - x_par^2/s_par^2)`.
    pub fn gaussian(amplitude: f64, s_perp: f64, s_par: f64, center: [f64; 2], spec: GridSpec, b: f64, q: usize) -> Result<Self> {
        if !(s_perp > 0.0 && s_par > 0.0) {
            return invalid("Gaussian widths must be positive");
        }
        let desc = format!("gaussian(a={amplitude},s_perp={s_perp},s_par={s_par},c=({},{}))", center[0], center[1]);
        Self::from_fn(
            |x| {
                let r2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                amplitude * (-r2 / (s_perp * s_perp) - x[2] * x[2] / (s_par * s_par)).exp()
            },
            spec,
            b,
            q,
            &desc,
        )
    }
}

/// The nine transverse weights `w_jk = int conj(omega_j) omega_k dx_par` with
/// `omega_0 = Lambda_q omega - Delta omega`, `omega_1 = -2i d omega/d zeta-bar`,
/// `omega_2 = -2i d omega / d zeta`.
#[derive(Debug, Clone)]
pub struct WeightMatrixField {
    pub grid: Grid2,
    pub pad: usize,
    pub w: [[Vec<Complex64>; 3]; 3],
}

impl WeightMatrixField {
    pub fn zeros(grid: Grid2, pad: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        WeightMatrixField { grid, pad, w: std::array::from_fn(|_| std::array::from_fn(|_| z.clone())) }
    }

    /// `max |w_kj - conj(w_jk)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for j in 0..3 {
            for k in 0..3 {
                for (a, b) in self.w[j][k].iter().zip(&self.w[k][j]) {
                    d = d.max((a - b.conj()).norm());
                }
            }
        }
        d
    }
}

pub fn weight_fields(cut: &CutoffField) -> Result<WeightMatrixField> {
    let n = cut.grid.n;
    let np = cut.spec.n_par;
    let plane = n * n;
    let lam = cut.b * (2 * cut.q + 1) as f64;
    let hp = cut.par_step();
    // longitudinal second derivative, spectral along each column
    let mut d2par = vec![0.0; cut.values.len()];
    {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(np);
        let inv = planner.plan_fft_inverse(np);
        let mut col = vec![Complex64::new(0.0, 0.0); np];
        for idx in 0..plane {
            for p in 0..np {
                col[p] = Complex64::new(cut.values[p * plane + idx], 0.0);
            }
            fwd.process(&mut col);
            for (k, z) in col.iter_mut().enumerate() {
                let kk = Grid2::wavenumber(np, hp, k);
                *z *= -kk * kk / np as f64;
            }
            inv.process(&mut col);
            for p in 0..np {
                d2par[p * plane + idx] = col[p].re;
            }
        }
    }
    let mut out = WeightMatrixField::zeros(cut.grid, cut.spec.pad);
    for p in 0..np {
        let wt = if p == 0 || p == np - 1 { 0.5 * hp } else { hp };
        let slice = &cut.values[p * plane..(p + 1) * plane];
        if slice.iter().all(|&v| v == 0.0) {
            continue;
        }
        let om: Vec<Complex64> = slice.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let lap = apply_multiplier(&cut.grid, &om, 1, |a, b| Complex64::new(-(a * a + b * b), 0.0))?;
        let dz = apply_multiplier(&cut.grid, &om, 1, dzeta_symbol)?;
        let dzb = apply_multiplier(&cut.grid, &om, 1, dzeta_bar_symbol)?;
        for idx in 0..plane {
            let o0 = lam * om[idx] - lap[idx] - d2par[p * plane + idx];
            let o = [o0, -2.0 * I * dzb[idx], -2.0 * I * dz[idx]];
            for j in 0..3 {
                for k in 0..3 {
                    out.w[j][k][idx] += wt * o[j].conj() * o[k];
                }
            }
        }
    }
    Ok(out)
}

/// Largest imaginary residue of the assembled multiplier, relative to its size,
/// above the rounding floor of the multipliers.
pub const ASSEMBLY_IMAG_TOL: f64 = 1e-10;

/// Rounding floor of `apply_multiplier`: unit roundoff times the largest
/// symbol value on the padded frequency grid times the largest input value.
pub fn multiplier_noise<S: Fn(f64, f64) -> Complex64>(grid: &Grid2, f: &[Complex64], pad: usize, symbol: S) -> f64 {
    let np = grid.n * pad.max(1);
    let mut top = 0.0f64;
    for i in 0..np {
        let k1 = Grid2::wavenumber(np, grid.h, i);
        for j in 0..np {
            top = top.max(symbol(k1, Grid2::wavenumber(np, grid.h, j)).norm());
        }
    }
    let fmax = f.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    16.0 * f64::EPSILON * top * fmax
}

/// The multiplier `upsilon_q` whose lowest-level Toeplitz form equals the
/// ladder-shifted form of the weights.
pub fn upsilon_q(wf: &WeightMatrixField, q: usize, b: f64) -> Result<RealField2> {
    if !(b > 0.0) {
        return invalid("b must be positive");
    }
    let g = &wf.grid;
    let pad = wf.pad;
    let lsym = |qq: usize, m: usize| move |k1: f64, k2: f64| Complex64::new(laguerre_symbol(qq, m, b, k1, k2), 0.0);
    let mut diag_part = apply_multiplier(g, &wf.w[0][0], pad, lsym(q, 0))?;
    let mut noise = multiplier_noise(g, &wf.w[0][0], pad, lsym(q, 0));
    let t11 = apply_multiplier(g, &wf.w[1][1], pad, lsym(q + 1, 0))?;
    let c11 = 2.0 * b * (q + 1) as f64;
    noise += c11 * multiplier_noise(g, &wf.w[1][1], pad, lsym(q + 1, 0));
    for (d, t) in diag_part.iter_mut().zip(&t11) {
        *d += c11 * t;
    }
    let t01 = apply_multiplier(g, &wf.w[0][1], pad, |a, c| laguerre_symbol(q, 1, b, a, c) * dzeta_symbol(a, c))?;
    let mut cross: Vec<f64> = t01.iter().map(|z| -4.0 * z.im).collect();
    if q >= 1 {
        let t22 = apply_multiplier(g, &wf.w[2][2], pad, lsym(q - 1, 0))?;
        let c22 = 2.0 * b * q as f64;
        noise += c22 * multiplier_noise(g, &wf.w[2][2], pad, lsym(q - 1, 0));
        for (d, t) in diag_part.iter_mut().zip(&t22) {
            *d += c22 * t;
        }
        let t21 = apply_multiplier(g, &wf.w[2][1], pad, |a, c| {
            let s = dzeta_symbol(a, c);
            laguerre_symbol(q - 1, 2, b, a, c) * s * s
        })?;
        let t20 = apply_multiplier(g, &wf.w[2][0], pad, |a, c| laguerre_symbol(q - 1, 1, b, a, c) * dzeta_symbol(a, c))?;
        for ((x, a), c) in cross.iter_mut().zip(&t21).zip(&t20) {
            *x += -8.0 * a.re - 4.0 * c.im;
        }
    }
    let values: Vec<f64> = diag_part.iter().zip(&cross).map(|(d, x)| d.re + x).collect();
    let scale = values.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let resid = diag_part.iter().fold(0.0f64, |a, z| a.max(z.im.abs()));
    if resid > ASSEMBLY_IMAG_TOL * scale + noise {
        return Err(Error::Assembly(format!(
            "imaginary residue {:.1e} relative to the field; derivative conventions are inconsistent",
            resid / scale
        )));
    }
    Ok(RealField2 { grid: *g, values })
}

/// Grid maximum of `upsilon` refined by a parabola through the neighbours
/// along each axis.
pub fn mu_q_max(f: &RealField2) -> Result<f64> {
    let n = f.grid.n;
    let (imax, &vmax) = f
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::InvalidArgument("empty field".into()))?;
    if !(vmax > 0.0) {
        return Err(Error::Domain(format!("maximum of the effective potential is {vmax}, expected positive")));
    }
    let (i1, i2) = (imax / n, imax % n);
    let mut v = vmax;
    for axis in 0..2 {
        let (c, lim) = if axis == 0 { (i1, n) } else { (i2, n) };
        if c == 0 || c + 1 == lim {
            continue;
        }
        let at = |d: isize| {
            let (a, b) = if axis == 0 { ((i1 as isize + d) as usize, i2) } else { (i1, (i2 as isize + d) as usize) };
            f.values[a * n + b]
        };
        let (m, z, p) = (at(-1), at(0), at(1));
        let den = m - 2.0 * z + p;
        if den < 0.0 {
            v += -(p - m) * (p - m) / (8.0 * den);
        }
    }
    Ok(v)
}

/// `phi_{k,level}` tabulated on a grid.
pub struct BasisTable {
    pub grid: Grid2,
    pub b: f64,
    pub k_max: usize,
    table: Vec<Option<Vec<Vec<Complex64>>>>,
}

impl BasisTable {
    pub fn new(grid: Grid2, b: f64, k_max: usize) -> Self {
        BasisTable { grid, b, k_max, table: Vec::new() }
    }

    fn level(&mut self, q: usize) -> &Vec<Vec<Complex64>> {
        if self.table.len() <= q {
            self.table.resize(q + 1, None);
        }
        if self.table[q].is_none() {
            let (g, b) = (self.grid, self.b);
            let rows = (0..=self.k_max)
                .map(|k| {
                    g.points()
                        .map(|x| phi_polar(k, q, b, x[0].hypot(x[1]), x[1].atan2(x[0])))
                        .collect()
                })
                .collect();
            self.table[q] = Some(rows);
        }
        self.table[q].as_ref().unwrap()
    }

    /// `[Upsilon_{m,s}(V; k, l)]_{k,l <= k_max}` by the trapezoid rule.
    pub fn upsilon(&mut self, v: &[Complex64], m: usize, s: usize) -> CMat {
        let n = self.k_max + 1;
        let h2 = self.grid.h * self.grid.h;
        let left: Vec<Vec<Complex64>> = self.level(m).iter().map(|row| row.iter().zip(v).map(|(p, w)| p * w).collect()).collect();
        let right = self.level(s).clone();
        CMat::from_fn(n, n, |k, l| left[k].iter().zip(&right[l]).map(|(a, b)| a * b.conj()).sum::<Complex64>() * h2)
    }
}

/// `sum_{kl} Q_kl c_k conj(c_l)`.
pub fn quadratic_form(q: &CMat, c: &[Complex64]) -> Complex64 {
    let n = c.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        for l in 0..n {
            acc += q[(k, l)] * c[k] * c[l].conj();
        }
    }
    acc
}

/// Matrix of the ladder-shifted weight form on `phi_{k,q}`.
pub fn m6_matrix(wf: &WeightMatrixField, basis: &mut BasisTable, q: usize) -> CMat {
    let b = basis.b;
    let qf = q as f64;
    let mut m = basis.upsilon(&wf.w[0][0], q, q);
    m += basis.upsilon(&wf.w[1][1], q + 1, q + 1) * Complex64::new(2.0 * b * (qf + 1.0), 0.0);
    let mut x = basis.upsilon(&wf.w[0][1], q + 1, q) * Complex64::new((2.0 * b * (qf + 1.0)).sqrt(), 0.0);
    if q >= 1 {
        m += basis.upsilon(&wf.w[2][2], q - 1, q - 1) * Complex64::new(2.0 * b * qf, 0.0);
        x += basis.upsilon(&wf.w[2][1], q + 1, q - 1) * Complex64::new(2.0 * b * (qf * (qf + 1.0)).sqrt(), 0.0);
        x += basis.upsilon(&wf.w[2][0], q, q - 1) * Complex64::new((2.0 * b * qf).sqrt(), 0.0);
    }
    m + &x + x.adjoint()
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FormComparison {
    /// `max_u |<M6 u,u> - <M7 W u, W u>| / |u|^2` over the random vectors,
    /// divided by the operator norm of the `M7` block (or 1 if that is 0).
    pub discrepancy: f64,
    pub absolute: f64,
    /// Supremum over all `u`: spectral radius of the difference.
    pub sup_absolute: f64,
    pub m7_norm: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FormCheckConfig {
    pub k_max: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for FormCheckConfig {
    fn default() -> Self {
        FormCheckConfig { k_max: 12, samples: 64, seed: 7 }
    }
}

/// Build both quadratic forms on `K+1` coefficients and compare them.
pub fn m6_vs_m7(cut: &CutoffField, cfg: &FormCheckConfig) -> Result<FormComparison> {
    if cfg.k_max > 16 {
        return invalid("K above 16 is not supported by the grid form check");
    }
    let wf = weight_fields(cut)?;
    let ups = upsilon_q(&wf, cut.q, cut.b)?;
    let mut basis = BasisTable::new(cut.grid, cut.b, cfg.k_max);
    compare_forms(&wf, &ups, &mut basis, cut.q, cfg)
}

pub fn compare_forms(wf: &WeightMatrixField, ups: &RealField2, basis: &mut BasisTable, q: usize, cfg: &FormCheckConfig) -> Result<FormComparison> {
    let m6 = m6_matrix(wf, basis, q);
    let m7 = basis.upsilon(&ups.complexified(), 0, 0);
    let diff = &m6 - &m7;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.k_max + 1;
    let mut worst = 0.0f64;
    for _ in 0..cfg.samples {
        let c: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm2: f64 = c.iter().map(|z| z.norm_sqr()).sum();
        worst = worst.max(quadratic_form(&diff, &c).norm() / norm2);
    }
    let herm = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    let sup = hermitian_eigenvalues(&herm)?.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let m7n = hermitian_eigenvalues(&m7)?.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let scale = if m7n > 0.0 { m7n } else { 1.0 };
    Ok(FormComparison { discrepancy: worst / scale, absolute: worst, sup_absolute: sup, m7_norm: m7n, samples: cfg.samples })
}

/// Two matrices computed along independent paths.
#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub lhs: CMat,
    pub rhs: CMat,
    /// `max |lhs - rhs|` over entries.
    pub max_abs_diff: f64,
    /// `max |lhs|` over entries.
    pub scale: f64,
}

impl IdentityCheck {
    fn new(lhs: CMat, rhs: CMat) -> Self {
        let max_abs_diff = (&lhs - &rhs).iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let scale = lhs.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        IdentityCheck { lhs, rhs, max_abs_diff, scale }
    }
}

/// `Upsilon_{m,m}(V) = Upsilon_{0,0}(L_m(-Delta/2b) V)`.
pub fn check_level_shift(v: &[Complex64], basis: &mut BasisTable, m: usize, pad: usize) -> Result<IdentityCheck> {
    let b = basis.b;
    let lhs = basis.upsilon(v, m, m);
    let lv = apply_multiplier(&basis.grid, v, pad, |a, c| Complex64::new(laguerre_symbol(m, 0, b, a, c), 0.0))?;
    Ok(IdentityCheck::new(lhs, basis.upsilon(&lv, 0, 0)))
}

/// `sqrt(2b(q+1)) Upsilon_{q+1,q}(V) = 2i Upsilon_{0,0}(L_q^{(1)}(-Delta/2b) dV/dzeta)`.
pub fn check_single_step(v: &[Complex64], basis: &mut BasisTable, q: usize, pad: usize) -> Result<IdentityCheck> {
    let b = basis.b;
    let lhs = basis.upsilon(v, q + 1, q) * Complex64::new((2.0 * b * (q + 1) as f64).sqrt(), 0.0);
    let lv = apply_multiplier(&basis.grid, v, pad, |a, c| 2.0 * I * laguerre_symbol(q, 1, b, a, c) * dzeta_symbol(a, c))?;
    Ok(IdentityCheck::new(lhs, basis.upsilon(&lv, 0, 0)))
}

/// `2b sqrt(q(q+1)) Upsilon_{q+1,q-1}(V) = Upsilon_{0,0}(-4 L_{q-1}^{(2)}(-Delta/2b) d^2V/dzeta^2)`, `q >= 1`.
pub fn check_double_step(v: &[Complex64], basis: &mut BasisTable, q: usize, pad: usize) -> Result<IdentityCheck> {
    if q == 0 {
        return invalid("the two-level identity needs q >= 1");
    }
    let b = basis.b;
    let qf = q as f64;
    let lhs = basis.upsilon(v, q + 1, q - 1) * Complex64::new(2.0 * b * (qf * (qf + 1.0)).sqrt(), 0.0);
    let lv = apply_multiplier(&basis.grid, v, pad, |a, c| {
        let s = dzeta_symbol(a, c);
        -4.0 * laguerre_symbol(q - 1, 2, b, a, c) * s * s
    })?;
    Ok(IdentityCheck::new(lhs, basis.upsilon(&lv, 0, 0)))
}

/// Bounded 3D obstacle; the magnetic field points along the third axis.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain3D {
    Ball { center: [f64; 3], radius: f64 },
    Box { min: [f64; 3], max: [f64; 3] },
    /// Torus around an axis parallel to the field.
    Torus { center: [f64; 3], major: f64, minor: f64 },
    Cylinder { center: [f64; 2], radius: f64, z_min: f64, z_max: f64 },
}

impl Domain3D {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Domain3D::Ball { radius, .. } => *radius > 0.0,
            Domain3D::Box { min, max } => (0..3).all(|i| max[i] > min[i]),
            Domain3D::Torus { major, minor, .. } => *minor > 0.0 && major > minor,
            Domain3D::Cylinder { radius, z_min, z_max, .. } => *radius > 0.0 && z_max > z_min,
        };
        if ok {
            Ok(())
        } else {
            invalid(format!("degenerate domain {self:?}"))
        }
    }

    pub fn contains(&self, x: [f64; 3]) -> bool {
        match self {
            Domain3D::Ball { center, radius } => (0..3).map(|i| (x[i] - center[i]).powi(2)).sum::<f64>() < radius * radius,
            Domain3D::Box { min, max } => (0..3).all(|i| x[i] > min[i] && x[i] < max[i]),
            Domain3D::Torus { center, major, minor } => {
                let rho = (x[0] - center[0]).hypot(x[1] - center[1]);
                (rho - major).powi(2) + (x[2] - center[2]).powi(2) < minor * minor
            }
            Domain3D::Cylinder { center, radius, z_min, z_max } => {
                (x[0] - center[0]).hypot(x[1] - center[1]) < *radius && x[2] > *z_min && x[2] < *z_max
            }
        }
    }

    pub fn bounding_box(&self) -> ([f64; 3], [f64; 3]) {
        match self {
            Domain3D::Ball { center: c, radius: r } => ([c[0] - r, c[1] - r, c[2] - r], [c[0] + r, c[1] + r, c[2] + r]),
            Domain3D::Box { min, max } => (*min, *max),
            Domain3D::Torus { center: c, major, minor } => {
                let r = major + minor;
                ([c[0] - r, c[1] - r, c[2] - minor], [c[0] + r, c[1] + r, c[2] + minor])
            }
            Domain3D::Cylinder { center: c, radius: r, z_min, z_max } => ([c[0] - r, c[1] - r, *z_min], [c[0] + r, c[1] + r, *z_max]),
        }
    }

    /// Orthogonal projection onto the plane transverse to the field.
    pub fn projection(&self) -> PlanarSet {
        match self {
            Domain3D::Ball { center, radius } => PlanarSet::Disk { center: [center[0], center[1]], radius: *radius },
            Domain3D::Box { min, max } => PlanarSet::Polygon {
                vertices: vec![[min[0], min[1]], [max[0], min[1]], [max[0], max[1]], [min[0], max[1]]],
            },
            Domain3D::Torus { center, major, minor } => PlanarSet::Disk { center: [center[0], center[1]], radius: major + minor },
            Domain3D::Cylinder { center, radius, .. } => PlanarSet::Disk { center: *center, radius: *radius },
        }
    }

    /// Every member here has a smooth boundary except the box and the cylinder.
    pub fn smooth_boundary(&self) -> bool {
        matches!(self, Domain3D::Ball { .. } | Domain3D::Torus { .. })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShadowConfig {
    /// Samples along the column used to bracket boundary crossings.
    pub samples: usize,
    /// Bisection tolerance on crossings, relative to the column length.
    pub tol: f64,
}

impl Default for ShadowConfig {
    fn default() -> Self {
        ShadowConfig { samples: 512, tol: 1e-14 }
    }
}

/// Length of the column of the domain above `x_perp`.
pub fn shadow(dom: &Domain3D, x_perp: [f64; 2], cfg: &ShadowConfig) -> f64 {
    let (lo, hi) = dom.bounding_box();
    if x_perp[0] <= lo[0] || x_perp[0] >= hi[0] || x_perp[1] <= lo[1] || x_perp[1] >= hi[1] {
        return 0.0;
    }
    let inside = |z: f64| dom.contains([x_perp[0], x_perp[1], z]);
    let (a, b) = (lo[2], hi[2]);
    let m = cfg.samples.max(2);
    let h = (b - a) / m as f64;
    let tol = cfg.tol * (b - a);
    let crossing = |mut l: f64, mut r: f64, left_in: bool| {
        while r - l > tol {
            let mid = 0.5 * (l + r);
            if inside(mid) == left_in {
                l = mid;
            } else {
                r = mid;
            }
        }
        0.5 * (l + r)
    };
    let mut total = 0.0;
    let mut state = inside(a);
    let mut start = a;
    for j in 1..=m {
        let z = if j == m { b } else { a + h * j as f64 };
        let s = inside(z);
        if s != state {
            let c = crossing(z - h, z, state);
            if state {
                total += c - start;
            } else {
                start = c;
            }
            state = s;
        }
    }
    if state {
        total += b - start;
    }
    total
}

/// Shadow function sampled on a grid.
pub fn shadow_field(dom: &Domain3D, grid: &Grid2, cfg: &ShadowConfig) -> RealField2 {
    RealField2 { grid: *grid, values: grid.points().map(|x| shadow(dom, x, cfg)).collect() }
}
