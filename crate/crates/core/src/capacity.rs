//! Logarithmic capacity of planar compact sets through Fekete points.
//!
//! Points live on the boundary curves of the set and are optimized in the
//! curve parameters by a damped Newton (Levenberg-Marquardt) iteration on the
//! log-product energy `sum_{i<j} ln|x_i - x_j|`. For sets with several boundary
//! curves, exchange moves relocate the least useful point to the best
//! location on any curve, so the per-curve counts are not frozen by the
//! initial allocation.
//!
//! The transfinite diameters are extrapolated with
//! `ln d_n = ln cap + (ln n + beta)/(n - 1)`, exact for the circle where
//! `d_n = r n^{1/(n-1)}`.

use crate::error::{invalid, Error, Result};
use crate::geometry::{polygon_is_convex, polygon_signed_area, CurveParam, Piece, PlanarSet, Point};
use crate::geometry::Curve;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative distance below which two points count as coincident.
pub const DUPLICATE_TOL: f64 = 1e-14;
/// Largest accepted fit residual (in `ln d_n`) for an extrapolated estimate.
pub const EXTRAPOLATION_RESIDUAL: f64 = 5e-3;

/// `sum_{i<j} ln|x_i - x_j|`.
pub fn log_energy(points: &[Point]) -> Result<f64> {
    let scale = points.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max).max(1.0);
    let mut e = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = (points[i][0] - points[j][0]).hypot(points[i][1] - points[j][1]);
            if d <= DUPLICATE_TOL * scale {
                return Err(Error::Degenerate(format!("points {i} and {j} coincide")));
            }
            e += d.ln();
        }
    }
    Ok(e)
}

/// `d_n = (prod_{i<j} |x_i - x_j|)^{2/(n(n-1))}`, evaluated in the log domain.
pub fn discrete_diameter(points: &[Point]) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return invalid("at least two points are required");
    }
    let e = log_energy(points)?;
    Ok((2.0 * e / (n as f64 * (n as f64 - 1.0))).exp())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeketeConfig {
    pub seed: u64,
    pub starts: usize,
    pub max_iter: usize,
    /// Relative energy change treated as converged.
    pub tol: f64,
}

impl Default for FeketeConfig {
    fn default() -> Self {
        FeketeConfig { seed: 20_240_521, starts: 3, max_iter: 400, tol: 1e-13 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeketeResult {
    pub points: Vec<Point>,
    pub energy: f64,
    pub diameter: f64,
    pub converged: bool,
    pub iterations: usize,
    pub start_index: usize,
    pub warning: Option<String>,
}

#[derive(Clone)]
struct State {
    curve: Vec<usize>,
    param: Vec<f64>,
}

struct Problem {
    curves: Vec<Curve>,
    scale: f64,
}

impl Problem {
    fn positions(&self, st: &State) -> Vec<(Point, Point, Point)> {
        st.curve.iter().zip(&st.param).map(|(&c, &s)| self.curves[c].eval(s)).collect()
    }

    fn energy(&self, st: &State) -> Option<f64> {
        let pts: Vec<Point> = self.positions(st).iter().map(|p| p.0).collect();
        let mut e = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let d = (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
                if d <= DUPLICATE_TOL * self.scale {
                    return None;
                }
                e += d.ln();
            }
        }
        Some(e)
    }

    /// Energy, gradient and Hessian with respect to the parameters.
    fn derivatives(&self, st: &State) -> (DVector<f64>, DMatrix<f64>) {
        let n = st.param.len();
        let pv = self.positions(st);
        let mut g = DVector::zeros(n);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            let (xi, ti, ai) = pv[i];
            for j in i + 1..n {
                let (xj, tj, _) = pv[j];
                let d = [xi[0] - xj[0], xi[1] - xj[1]];
                let r2 = d[0] * d[0] + d[1] * d[1];
                let di = d[0] * ti[0] + d[1] * ti[1];
                let dj = d[0] * tj[0] + d[1] * tj[1];
                g[i] += di / r2;
                g[j] -= dj / r2;
                let titj = ti[0] * tj[0] + ti[1] * tj[1];
                let hij = -titj / r2 + 2.0 * di * dj / (r2 * r2);
                h[(i, j)] += hij;
                h[(j, i)] += hij;
            }
            // diagonal terms
            let mut hii = 0.0;
            for (j, &(xj, _, _)) in pv.iter().enumerate() {
                if j == i {
                    continue;
                }
                let d = [xi[0] - xj[0], xi[1] - xj[1]];
                let r2 = d[0] * d[0] + d[1] * d[1];
                let di = d[0] * ti[0] + d[1] * ti[1];
                let tt = ti[0] * ti[0] + ti[1] * ti[1];
                let da = d[0] * ai[0] + d[1] * ai[1];
                hii += (tt + da) / r2 - 2.0 * di * di / (r2 * r2);
            }
            h[(i, i)] = hii;
        }
        (g, h)
    }

    fn project(&self, st: &mut State) {
        for (c, s) in st.curve.iter().zip(st.param.iter_mut()) {
            let cv = &self.curves[*c];
            *s = if cv.closed { s.rem_euclid(cv.hi) } else { s.clamp(0.0, cv.hi) };
        }
    }

    /// Damped Newton ascent. Returns (energy, converged, iterations).
    fn optimize(&self, st: &mut State, max_iter: usize, tol: f64) -> (f64, bool, usize) {
        let n = st.param.len();
        let Some(mut e) = self.energy(st) else { return (f64::NEG_INFINITY, false, 0) };
        let mut mu = 1e-3;
        let mut stall = 0;
        for it in 0..max_iter {
            let (g, h) = self.derivatives(st);
            // active bounds on open curves
            let free: Vec<usize> = (0..n)
                .filter(|&i| {
                    let cv = &self.curves[st.curve[i]];
                    if cv.closed {
                        return true;
                    }
                    let s = st.param[i];
                    !((s <= 0.0 && g[i] < 0.0) || (s >= cv.hi && g[i] > 0.0))
                })
                .collect();
            let m = free.len();
            if m == 0 {
                return (e, true, it);
            }
            let diag_scale = free.iter().map(|&i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
            let mut accepted = false;
            while mu < 1e12 {
                let a = DMatrix::from_fn(m, m, |r, c| {
                    let v = -h[(free[r], free[c])];
                    if r == c {
                        v + mu * h[(free[r], free[r])].abs().max(1e-6 * diag_scale)
                    } else {
                        v
                    }
                });
                let rhs = DVector::from_fn(m, |r, _| g[free[r]]);
                let Some(chol) = a.cholesky() else {
                    mu *= 10.0;
                    continue;
                };
                let step = chol.solve(&rhs);
                let mut trial = st.clone();
                for (r, &i) in free.iter().enumerate() {
                    trial.param[i] += step[r];
                }
                self.project(&mut trial);
                match self.energy(&trial) {
                    Some(et) if et > e => {
                        let gain = et - e;
                        *st = trial;
                        e = et;
                        mu = (mu / 3.0).max(1e-12);
                        accepted = true;
                        if gain <= tol * (1.0 + e.abs()) {
                            stall += 1;
                        } else {
                            stall = 0;
                        }
                        break;
                    }
                    _ => mu *= 4.0,
                }
            }
            if !accepted {
                // no ascent direction left at this resolution: a (possibly
                // nonsmooth) local maximum
                return (e, true, it);
            }
            if stall >= 2 {
                return (e, true, it);
            }
        }
        (e, false, max_iter)
    }

    /// `sum_{j != skip} ln|y - x_j|`.
    fn potential(pts: &[Point], y: Point, skip: usize) -> f64 {
        pts.iter()
            .enumerate()
            .filter(|(j, _)| *j != skip)
            .map(|(_, x)| ((y[0] - x[0]).hypot(y[1] - x[1])).ln())
            .sum()
    }

    /// Move the weakest point to the best sampled location if that raises the energy.
    fn exchange(&self, st: &mut State, samples_per_unit: f64) -> bool {
        let pts: Vec<Point> = self.positions(st).iter().map(|p| p.0).collect();
        let n = pts.len();
        let (worst, u_worst) = (0..n)
            .map(|i| (i, Self::potential(&pts, pts[i], i)))
            .fold((0, f64::INFINITY), |b, c| if c.1 < b.1 { c } else { b });
        let mut best: Option<(usize, f64, f64)> = None;
        for (c, cv) in self.curves.iter().enumerate() {
            let m = ((cv.length() * samples_per_unit).ceil() as usize).max(16);
            for s in cv.equispaced(m, 0.5) {
                let y = cv.eval(s).0;
                let u = Self::potential(&pts, y, worst);
                if u.is_finite() && best.is_none_or(|b| u > b.2) {
                    best = Some((c, s, u));
                }
            }
        }
        match best {
            Some((c, s, u)) if u > u_worst + 1e-9 * (1.0 + u_worst.abs()) => {
                st.curve[worst] = c;
                st.param[worst] = s;
                true
            }
            _ => false,
        }
    }
}

fn allocate(lengths: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = lengths.iter().sum();
    let raw: Vec<f64> = lengths.iter().map(|l| l / total * n as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let mut rem: Vec<(usize, f64)> = raw.iter().enumerate().map(|(i, r)| (i, r - r.floor())).collect();
    rem.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let short = n - counts.iter().sum::<usize>();
    for &(i, _) in rem.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

fn initial_state(curves: &[Curve], n: usize, start: usize, rng: &mut ChaCha8Rng) -> State {
    let lengths: Vec<f64> = curves.iter().map(Curve::length).collect();
    let counts = allocate(&lengths, n);
    let mut st = State { curve: Vec::with_capacity(n), param: Vec::with_capacity(n) };
    for (c, (&cnt, cv)) in counts.iter().zip(curves).enumerate() {
        let offset = if start == 0 { 0.0 } else { rng.random::<f64>() };
        let mut params = cv.equispaced(cnt, offset);
        if start > 0 {
            let spacing = cv.hi / cnt.max(1) as f64;
            for p in params.iter_mut() {
                *p += 0.2 * spacing * (rng.random::<f64>() - 0.5);
            }
        }
        for p in params {
            st.curve.push(c);
            st.param.push(p);
        }
    }
    st
}

/// Points on the boundary of `set` locally maximizing the distance product.
pub fn fekete_points(set: &PlanarSet, n: usize, cfg: &FeketeConfig) -> Result<FeketeResult> {
    if n < 2 {
        return invalid("fekete_points needs n >= 2");
    }
    set.validate()?;
    let curves = set.boundary_curves();
    let scale = set.max_radius().max(1.0);
    let prob = Problem { curves, scale };
    let multi = prob.curves.len() > 1;
    let total_len: f64 = prob.curves.iter().map(Curve::length).sum();
    let mut best: Option<FeketeResult> = None;
    for start in 0..cfg.starts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(start as u64));
        let mut st = initial_state(&prob.curves, n, start, &mut rng);
        prob.project(&mut st);
        let (mut e, mut conv, mut iters) = prob.optimize(&mut st, cfg.max_iter, cfg.tol);
        if multi {
            for _ in 0..4 * n {
                let mut trial = st.clone();
                if !prob.exchange(&mut trial, 8.0 * n as f64 / total_len) {
                    break;
                }
                let (et, ct, it) = prob.optimize(&mut trial, cfg.max_iter, cfg.tol);
                iters += it;
                if et > e {
                    st = trial;
                    e = et;
                    conv = ct;
                } else {
                    break;
                }
            }
        }
        if !e.is_finite() {
            continue;
        }
        let points: Vec<Point> = prob.positions(&st).iter().map(|p| p.0).collect();
        let nn = n as f64;
        let res = FeketeResult {
            diameter: (2.0 * e / (nn * (nn - 1.0))).exp(),
            points,
            energy: e,
            converged: conv,
            iterations: iters,
            start_index: start,
            warning: (!conv).then(|| format!("optimizer did not converge within {} iterations (start {start})", cfg.max_iter)),
        };
        // strict improvement keeps the lowest start index on ties
        if best.as_ref().is_none_or(|b| res.energy > b.energy) {
            best = Some(res);
        }
    }
    best.ok_or_else(|| Error::Degenerate("every start collapsed to coincident points".into()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityEstimate {
    pub value: f64,
    pub n_points: usize,
    pub diameters: Vec<(usize, f64)>,
    pub extrapolated: bool,
    /// Largest absolute residual of the fit in `ln d_n`.
    pub residual: f64,
    /// `d_n` non-increasing along the schedule (relative slack 1e-6).
    pub monotone: bool,
    pub warnings: Vec<String>,
}

/// Least-squares fit of `ln d_n - ln n/(n-1) = ln cap + beta/(n-1)`.
/// Returns `(cap, beta, max residual)`.
pub fn extrapolate(diameters: &[(usize, f64)]) -> (f64, f64, f64) {
    let rows: Vec<(f64, f64)> = diameters
        .iter()
        .map(|&(n, d)| {
            let nf = n as f64;
            (1.0 / (nf - 1.0), d.ln() - nf.ln() / (nf - 1.0))
        })
        .collect();
    if rows.len() == 1 {
        return (rows[0].1.exp(), 0.0, 0.0);
    }
    let m = rows.len() as f64;
    let sx: f64 = rows.iter().map(|r| r.0).sum();
    let sy: f64 = rows.iter().map(|r| r.1).sum();
    let sxx: f64 = rows.iter().map(|r| r.0 * r.0).sum();
    let sxy: f64 = rows.iter().map(|r| r.0 * r.1).sum();
    let beta = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    let a = (sy - beta * sx) / m;
    let resid = rows.iter().map(|r| (r.1 - a - beta * r.0).abs()).fold(0.0, f64::max);
    (a.exp(), beta, resid)
}

/// Capacity estimate from Fekete diameters along `schedule`.
pub fn capacity(set: &PlanarSet, schedule: &[usize], cfg: &FeketeConfig) -> Result<CapacityEstimate> {
    if schedule.is_empty() {
        return invalid("empty n schedule");
    }
    if schedule.iter().any(|&n| n < 8) || schedule.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("n schedule must be increasing with every entry >= 8");
    }
    let mut warnings = Vec::new();
    let mut diameters = Vec::new();
    for &n in schedule {
        let r = fekete_points(set, n, cfg)?;
        if let Some(w) = r.warning {
            warnings.push(format!("n={n}: {w}"));
        }
        diameters.push((n, r.diameter));
    }
    let monotone = diameters.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-6));
    if !monotone {
        warnings.push("d_n is not non-increasing along the schedule".into());
    }
    let (fit, _, residual) = extrapolate(&diameters);
    let extrapolated = diameters.len() >= 2 && residual <= EXTRAPOLATION_RESIDUAL;
    let value = if extrapolated || diameters.len() == 1 {
        fit
    } else {
        warnings.push(format!("fit residual {residual:.2e} above {EXTRAPOLATION_RESIDUAL:.0e}; reporting the largest-n diameter"));
        diameters.last().unwrap().1
    };
    Ok(CapacityEstimate { value, n_points: *schedule.last().unwrap(), diameters, extrapolated, residual, monotone, warnings })
}

/// Inner approximating curves of a region together with notices for skipped offsets.
#[derive(Debug, Clone)]
pub struct CurveSchedule {
    pub curves: Vec<(f64, PlanarSet)>,
    pub notices: Vec<String>,
}

fn single_region(domain: &PlanarSet) -> Result<Piece> {
    domain.validate()?;
    let mut p = domain.pieces();
    if p.len() != 1 || matches!(p[0], Piece::Segment(..)) {
        return Err(Error::Unsupported("curve approximation needs a single region (disk, polygon or jordan curve)".into()));
    }
    Ok(p.remove(0))
}

fn ccw(mut v: Vec<Point>) -> Vec<Point> {
    if polygon_signed_area(&v) < 0.0 {
        v.reverse();
    }
    v
}

/// Move every edge of a convex ccw polygon by `d` along its outward normal
/// (`d < 0` shrinks). `None` when the polygon collapses.
fn offset_convex(v: &[Point], d: f64) -> Option<Vec<Point>> {
    let n = v.len();
    let lines: Vec<(Point, Point)> = (0..n)
        .map(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            let l = (b[0] - a[0]).hypot(b[1] - a[1]);
            let nrm = [(b[1] - a[1]) / l, -(b[0] - a[0]) / l];
            ([a[0] + d * nrm[0], a[1] + d * nrm[1]], [b[0] - a[0], b[1] - a[1]])
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (p1, d1) = lines[(i + n - 1) % n];
        let (p2, d2) = lines[i];
        let den = d1[0] * d2[1] - d1[1] * d2[0];
        if den.abs() < 1e-300 {
            return None;
        }
        let t = ((p2[0] - p1[0]) * d2[1] - (p2[1] - p1[1]) * d2[0]) / den;
        out.push([p1[0] + t * d1[0], p1[1] + t * d1[1]]);
    }
    // collapse shows up as reversed edges
    for i in 0..n {
        let e_new = [out[(i + 1) % n][0] - out[i][0], out[(i + 1) % n][1] - out[i][1]];
        let e_old = lines[i].1;
        if e_new[0] * e_old[0] + e_new[1] * e_old[1] <= 0.0 {
            return None;
        }
    }
    Some(out)
}

/// Boundary of `poly + B_r` for a convex ccw polygon: edges pushed out by `r`
/// joined by circular arcs around the vertices. With `circumscribe`, each
/// arc is replaced by a polygon containing it.
fn rounded_outline(v: &[Point], r: f64, per_arc: usize, circumscribe: bool) -> Vec<Point> {
    let n = v.len();
    let normal = |i: usize| {
        let a = v[i];
        let b = v[(i + 1) % n];
        let l = (b[0] - a[0]).hypot(b[1] - a[1]);
        [(b[1] - a[1]) / l, -(b[0] - a[0]) / l]
    };
    let mut out = Vec::new();
    for i in 0..n {
        let n0 = normal((i + n - 1) % n);
        let n1 = normal(i);
        let a0 = n0[1].atan2(n0[0]);
        let mut a1 = n1[1].atan2(n1[0]);
        while a1 < a0 {
            a1 += 2.0 * PI;
        }
        let sweep = a1 - a0;
        let steps = ((per_arc as f64 * sweep / (PI / 2.0)).ceil() as usize).max(1);
        let h = sweep / steps as f64;
        let c = v[i];
        out.push([c[0] + r * a0.cos(), c[1] + r * a0.sin()]);
        for k in 0..steps {
            if circumscribe {
                let ang = a0 + (k as f64 + 0.5) * h;
                let rr = r / (0.5 * h).cos();
                out.push([c[0] + rr * ang.cos(), c[1] + rr * ang.sin()]);
            } else if k > 0 {
                let ang = a0 + k as f64 * h;
                out.push([c[0] + r * ang.cos(), c[1] + r * ang.sin()]);
            }
        }
        out.push([c[0] + r * a1.cos(), c[1] + r * a1.sin()]);
    }
    out.dedup_by(|a, b| (a[0] - b[0]).hypot(a[1] - b[1]) < 1e-13);
    if out.len() > 1 {
        let (f, l) = (out[0], out[out.len() - 1]);
        if (f[0] - l[0]).hypot(f[1] - l[1]) < 1e-13 {
            out.pop();
        }
    }
    out
}

/// Inward approximating Jordan curves for a region, one per offset.
///
/// Disks give concentric circles; convex polygons give the boundary of the
/// polygon shrunk by `2d` and rounded by `d` (distance `d` to the boundary at
/// the edges); smooth Jordan curves are offset along the inward normal.
pub fn curve_approximation_schedule(domain: &PlanarSet, offsets: &[f64]) -> Result<CurveSchedule> {
    if offsets.iter().any(|&d| !(d > 0.0)) || offsets.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("offsets must be positive and decreasing");
    }
    let piece = single_region(domain)?;
    let mut curves = Vec::new();
    let mut notices = Vec::new();
    for &d in offsets {
        let curve = match &piece {
            Piece::Disk { center, radius } => {
                if *radius <= d {
                    None
                } else {
                    Some(PlanarSet::JordanCurve {
                        parametrization: CurveParam::Fourier {
                            center: *center,
                            cos: vec![[radius - d, 0.0]],
                            sin: vec![[0.0, radius - d]],
                        },
                        samples: 256,
                    })
                }
            }
            Piece::Polygon(v) => {
                let v = ccw(v.clone());
                if !polygon_is_convex(&v) {
                    return Err(Error::Unsupported("curve approximation of non-convex polygons".into()));
                }
                offset_convex(&v, -2.0 * d).map(|inner| PlanarSet::JordanCurve {
                    parametrization: CurveParam::Points(rounded_outline(&inner, d, 24, false)),
                    samples: 0,
                })
            }
            Piece::Smooth { param, samples } => {
                let m = (*samples).max(64);
                let pts: Vec<Point> = (0..m).map(|j| param.eval(2.0 * PI * j as f64 / m as f64)).collect();
                let orient = polygon_signed_area(&pts).signum();
                let off: Vec<Point> = (0..m)
                    .map(|j| {
                        let a = pts[(j + m - 1) % m];
                        let b = pts[(j + 1) % m];
                        let t = [b[0] - a[0], b[1] - a[1]];
                        let l = t[0].hypot(t[1]);
                        // inward normal for ccw orientation is (-t_y, t_x)
                        let nrm = [-t[1] / l * orient, t[0] / l * orient];
                        [pts[j][0] + d * nrm[0], pts[j][1] + d * nrm[1]]
                    })
                    .collect();
                let cand = PlanarSet::JordanCurve { parametrization: CurveParam::Points(off), samples: m };
                cand.validate().ok().map(|_| cand)
            }
            Piece::Segment(..) => unreachable!(),
        };
        match curve {
            Some(PlanarSet::JordanCurve { parametrization: CurveParam::Points(p), .. }) => {
                let samples = p.len();
                let c = PlanarSet::JordanCurve { parametrization: CurveParam::Points(p), samples };
                match c.validate() {
                    Ok(()) => curves.push((d, c)),
                    Err(e) => notices.push(format!("offset {d}: skipped ({e})")),
                }
            }
            Some(c) => curves.push((d, c)),
            None => notices.push(format!("offset {d}: curve collapses, skipped")),
        }
    }
    Ok(CurveSchedule { curves, notices })
}

fn thicken_piece(piece: &Piece, delta: f64) -> Vec<PlanarSet> {
    match piece {
        Piece::Disk { center, radius } => vec![PlanarSet::disk(*center, radius + delta)],
        Piece::Segment(a, b) => {
            vec![PlanarSet::Polygon { vertices: rounded_outline(&[*a, *b], delta, 16, true) }]
        }
        Piece::Polygon(v) if polygon_is_convex(v) => {
            vec![PlanarSet::Polygon { vertices: rounded_outline(&ccw(v.clone()), delta, 16, true) }]
        }
        other => {
            // polygon + edge rectangles + vertex disks is exactly the neighbourhood
            let (base, outline) = match other {
                Piece::Polygon(v) => (PlanarSet::Polygon { vertices: v.clone() }, v.clone()),
                Piece::Smooth { param, samples } => {
                    let m = (*samples).max(8);
                    let pts: Vec<Point> = (0..m).map(|j| param.eval(2.0 * PI * j as f64 / m as f64)).collect();
                    (PlanarSet::JordanCurve { parametrization: param.clone(), samples: *samples }, pts)
                }
                _ => unreachable!(),
            };
            let n = outline.len();
            let mut out = vec![base];
            for i in 0..n {
                let a = outline[i];
                let b = outline[(i + 1) % n];
                let l = (b[0] - a[0]).hypot(b[1] - a[1]);
                let nrm = [(b[1] - a[1]) / l * delta, -(b[0] - a[0]) / l * delta];
                out.push(PlanarSet::Polygon {
                    vertices: vec![
                        [a[0] + nrm[0], a[1] + nrm[1]],
                        [b[0] + nrm[0], b[1] + nrm[1]],
                        [b[0] - nrm[0], b[1] - nrm[1]],
                        [a[0] - nrm[0], a[1] - nrm[1]],
                    ],
                });
                out.push(PlanarSet::disk(a, delta));
            }
            out
        }
    }
}

/// An outer approximation of `{x : dist(x, set) <= delta}`; it always
/// contains the true neighbourhood. Exact for disks; convex pieces get a
/// polygon circumscribing the rounded corners.
pub fn outer_thickening(set: &PlanarSet, delta: f64) -> Result<PlanarSet> {
    if !(delta > 0.0 && delta.is_finite()) {
        return invalid("delta must be positive");
    }
    set.validate()?;
    let mut parts: Vec<PlanarSet> = set.pieces().iter().flat_map(|p| thicken_piece(p, delta)).collect();
    Ok(if parts.len() == 1 { parts.remove(0) } else { PlanarSet::Union { sets: parts } })
}
