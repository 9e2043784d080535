//! Angular-momentum basis of the Landau Hamiltonian, associated Laguerre
//! polynomials and the ladder operators.
//!
//! With `t = b|x|^2/2`, `theta = arg(zeta)` and `m = |k - q|` the basis is
//!
//! ```text
//! phi_{k,q}(x) = (-i)^q sqrt(b/2pi) e^{i(k-q)theta} R_{k,q}(t)
//! R_{k,q}(t)   = sqrt(q!/k!) t^{m/2} e^{-t/2} L_q^{(m)}(t)                 k >= q
//!              = (-1)^{q-k} sqrt(k!/q!) t^{m/2} e^{-t/2} L_k^{(m)}(t)        k <  q
//! ```
//!
//! The second form follows from applying the creation operator
//! `a* = -2i e^{g} d/dzeta e^{-g}` with `g = b|x|^2/4` q times to
//! `zeta^k e^{-g}`: `(a*)^q (zeta^k e^{-g}) = (-2i)^q q! zeta^{k-q} L_q^{(k-q)}(t) e^{-g}`,
//! and for `k < q` the identity `L_q^{(k-q)}(t) = (-t)^{q-k} (k!/q!) L_k^{(q-k)}(t)`.
//! With these phases `a* phi_{k,q} = sqrt(2b(q+1)) phi_{k,q+1}` holds exactly.

use crate::error::{invalid, Result};
use crate::special::{binomial, ln_factorial};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest accepted `k + q`.
pub const MAX_INDEX_SUM: usize = 10_000;

/// Associated Laguerre polynomial `L_q^{(m)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaguerreSpec {
    pub q: usize,
    pub m: usize,
}

/// `L_q^{(m)}(t) = sum_j C(q+m, q-j) (-t)^j / j!`.
pub fn laguerre(spec: LaguerreSpec, t: f64) -> f64 {
    let LaguerreSpec { q, m } = spec;
    if q <= 2 && t.abs() <= 4.0 {
        return laguerre_coefficients(q, m)
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * t + c);
    }
    let m = m as f64;
    let mut prev = 1.0;
    let mut cur = 1.0 + m - t;
    if q == 0 {
        return prev;
    }
    for n in 1..q {
        let n = n as f64;
        let next = ((2.0 * n + 1.0 + m - t) * cur - (n + m) * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients of `t^j`, `j = 0..=q`, of `L_q^{(m)}`.
pub fn laguerre_coefficients(q: usize, m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(q + 1);
    let mut inv_fact = 1.0;
    for j in 0..=q {
        if j > 0 {
            inv_fact /= j as f64;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * binomial(q + m, q - j) * inv_fact);
    }
    out
}

/// The scalar `b|x|^2/4` whose exponential gauges the basis.
pub fn gauge_phase_exponent(b: f64, x: [f64; 2]) -> f64 {
    0.25 * b * (x[0] * x[0] + x[1] * x[1])
}

/// Evaluation request for `phi_{k,q}` at a point.
#[derive(Debug, Clone, Copy)]
pub struct BasisPoint {
    pub k: usize,
    pub q: usize,
    pub b: f64,
    pub point: [f64; 2],
}

impl BasisPoint {
    pub fn zeta(&self) -> Complex64 {
        Complex64::new(self.point[0], self.point[1])
    }

    pub fn gauge_phase_exponent(&self) -> f64 {
        gauge_phase_exponent(self.b, self.point)
    }

    /// `t = b|x|^2/2`.
    pub fn radial_variable(&self) -> f64 {
        2.0 * self.gauge_phase_exponent()
    }
}

/// Radial factor `R_{k,q}(t)`; `int_0^inf R_{k,q}(t)^2 dt = 1`.
pub fn radial_factor(k: usize, q: usize, t: f64) -> f64 {
    let (lo, hi) = if k >= q { (q, k) } else { (k, q) };
    let m = hi - lo;
    let lag = laguerre(LaguerreSpec { q: lo, m }, t);
    if t <= 0.0 {
        return if m == 0 { lag } else { 0.0 };
    }
    let ln_pref = 0.5 * (ln_factorial(lo) - ln_factorial(hi)) + 0.5 * m as f64 * t.ln() - 0.5 * t;
    let sign = if k < q && (q - k) % 2 == 1 { -1.0 } else { 1.0 };
    sign * ln_pref.exp() * lag
}

/// `(-i)^q`.
fn minus_i_pow(q: usize) -> Complex64 {
    match q % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, -1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, 1.0),
    }
}

/// `phi_{k,q}` from polar coordinates `(rho, theta)`.
pub fn phi_polar(k: usize, q: usize, b: f64, rho: f64, theta: f64) -> Complex64 {
    let t = 0.5 * b * rho * rho;
    let amp = (b / (2.0 * PI)).sqrt() * radial_factor(k, q, t);
    let angle = (k as f64 - q as f64) * theta;
    minus_i_pow(q) * Complex64::from_polar(amp, angle)
}

/// `phi_{k,q}(x)`.
pub fn phi_basis(bp: &BasisPoint) -> Result<Complex64> {
    if bp.k + bp.q > MAX_INDEX_SUM {
        return invalid(format!("k + q = {} exceeds the cap {MAX_INDEX_SUM}", bp.k + bp.q));
    }
    if bp.b <= 0.0 || !bp.b.is_finite() {
        return invalid("field strength b must be positive");
    }
    let [x1, x2] = bp.point;
    let rho = x1.hypot(x2);
    let theta = x2.atan2(x1);
    Ok(phi_polar(bp.k, bp.q, bp.b, rho, theta))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

/// `a* phi_{k,q} = sqrt(2b(q+1)) phi_{k,q+1}`, `a phi_{k,q} = sqrt(2bq) phi_{k,q-1}`,
/// `a phi_{k,0} = 0` (reported as `(0, 0)`).
pub fn ladder_apply(direction: Ladder, _k: usize, q: usize, b: f64) -> (f64, usize) {
    match direction {
        Ladder::Raise => ((2.0 * b * (q as f64 + 1.0)).sqrt(), q + 1),
        Ladder::Lower if q == 0 => (0.0, 0),
        Ladder::Lower => ((2.0 * b * q as f64).sqrt(), q - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate;

    #[test]
    fn laguerre_values() {
        for t in [-3.0, 0.0, 1.7, 40.0] {
            assert_eq!(laguerre(LaguerreSpec { q: 0, m: 3 }, t), 1.0);
        }
        assert!((laguerre(LaguerreSpec { q: 2, m: 0 }, 3.0) + 0.5).abs() < 1e-15);
        for t in [0.0, 1.0, 2.5] {
            let s: f64 = (0..=2).map(|j| laguerre(LaguerreSpec { q: j, m: 1 }, t)).sum();
            assert!((s - laguerre(LaguerreSpec { q: 2, m: 2 }, t)).abs() < 1e-13);
        }
    }

    #[test]
    fn recurrence_matches_direct_sum() {
        for q in 0..12 {
            for m in 0..5 {
                let c = laguerre_coefficients(q, m);
                for t in [0.3, 2.0, 7.5, 15.0] {
                    let direct: f64 = c.iter().rev().fold(0.0, |a, c| a * t + c);
                    let rec = laguerre(LaguerreSpec { q, m }, t);
                    assert!((direct - rec).abs() <= 1e-10 * (1.0 + direct.abs()), "q={q} m={m} t={t}");
                }
            }
        }
    }

    #[test]
    fn origin_value_and_ladder() {
        let b = 2.0;
        let v = phi_basis(&BasisPoint { k: 0, q: 0, b, point: [0.0, 0.0] }).unwrap();
        assert!((v.re - (b / (2.0 * PI)).sqrt()).abs() < 1e-15 && v.im == 0.0);
        assert_eq!(ladder_apply(Ladder::Raise, 0, 0, 2.0), (2.0, 1));
        assert_eq!(ladder_apply(Ladder::Lower, 3, 0, 2.0), (0.0, 0));
        let (up, _) = ladder_apply(Ladder::Raise, 1, 2, 1.5);
        let (down, _) = ladder_apply(Ladder::Lower, 1, 3, 1.5);
        assert!((up * down - 2.0 * 1.5 * 3.0).abs() < 1e-12);
        assert!(phi_basis(&BasisPoint { k: 9000, q: 1001, b, point: [0.1, 0.0] }).is_err());
    }

    #[test]
    fn radial_normalization() {
        for k in 0..6 {
            for q in 0..6 {
                let hi = (k.max(q) as f64) + 60.0;
                let (v, _, ok) = integrate(|t| radial_factor(k, q, t).powi(2), 0.0, hi, 1e-13);
                assert!(ok && (v - 1.0).abs() < 1e-11, "k={k} q={q}: {v}");
            }
        }
    }

    fn gram_entry(k1: usize, q1: usize, k2: usize, q2: usize, b: f64) -> Complex64 {
        // trapezoid in theta is exact for the trigonometric factors involved
        let nth = 32;
        let rmax = (2.0 * 80.0 / b).sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..nth {
            let th = 2.0 * PI * j as f64 / nth as f64;
            let (re, _, _) = integrate(
                |r| (phi_polar(k1, q1, b, r, th) * phi_polar(k2, q2, b, r, th).conj()).re * r,
                0.0,
                rmax,
                1e-14,
            );
            let (im, _, _) = integrate(
                |r| (phi_polar(k1, q1, b, r, th) * phi_polar(k2, q2, b, r, th).conj()).im * r,
                0.0,
                rmax,
                1e-14,
            );
            acc += Complex64::new(re, im);
        }
        acc * (2.0 * PI / nth as f64)
    }

    #[test]
    fn orthonormal_gram_matrix() {
        let b = 2.0;
        let idx: Vec<(usize, usize)> = (0..=4).flat_map(|k| (0..=4).map(move |q| (k, q))).collect();
        for &(k1, q1) in &idx {
            for &(k2, q2) in &idx {
                let g = gram_entry(k1, q1, k2, q2, b);
                let want = if (k1, q1) == (k2, q2) { 1.0 } else { 0.0 };
                assert!((g - want).norm() < 1e-8, "({k1},{q1}) ({k2},{q2}): {g}");
            }
        }
    }

    fn creation_fd(k: usize, q: usize, b: f64, x: [f64; 2]) -> Complex64 {
        let h = 1e-4;
        let f = |p: [f64; 2]| {
            let g = gauge_phase_exponent(b, p);
            phi_basis(&BasisPoint { k, q, b, point: p }).unwrap() * (-g).exp()
        };
        let d1 = (f([x[0] + h, x[1]]) - f([x[0] - h, x[1]])) / (2.0 * h);
        let d2 = (f([x[0], x[1] + h]) - f([x[0], x[1] - h])) / (2.0 * h);
        let dz = (d1 - Complex64::i() * d2) * 0.5;
        Complex64::new(0.0, -2.0) * gauge_phase_exponent(b, x).exp() * dz
    }

    #[test]
    fn creation_operator_matches_ladder() {
        let b = 2.0;
        for k in 0..=3 {
            for q in 0..=3 {
                for x in [[0.3, -0.2], [0.7, 0.9], [-1.1, 0.4], [0.05, 1.3]] {
                    let lhs = creation_fd(k, q, b, x);
                    let (c, q1) = ladder_apply(Ladder::Raise, k, q, b);
                    let rhs = phi_basis(&BasisPoint { k, q: q1, b, point: x }).unwrap() * c;
                    assert!((lhs - rhs).norm() < 1e-6, "k={k} q={q} x={x:?}: {lhs} vs {rhs}");
                }
            }
        }
    }
}
