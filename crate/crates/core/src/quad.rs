//! Gauss-Legendre rules and adaptive Gauss-Kronrod (7/15) integration of
//! vector-valued integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone)]
pub struct QuadOutcome {
    pub value: Vec<f64>,
    /// Sum over panels of the max-norm Kronrod/Gauss difference.
    pub error: f64,
    pub converged: bool,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Vec<f64>,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gk_panel<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    for (i, (&xk, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let nodes: &[f64] = if i == 7 { &[0.0] } else { &[-1.0, 1.0] };
        for &sgn in nodes {
            f(c + sgn * h * xk, buf);
            for d in 0..dim {
                kron[d] += wk * buf[d];
                if i % 2 == 1 {
                    gauss[d] += WG[i / 2] * buf[d];
                }
            }
        }
    }
    let mut err = 0.0f64;
    for d in 0..dim {
        kron[d] *= h;
        gauss[d] *= h;
        err = err.max((kron[d] - gauss[d]).abs());
    }
    Panel { a, b, value: kron, err }
}

/// Adaptive Gauss-Kronrod integration of `f: R -> R^dim` over the panels
/// delimited by `breaks` (sorted, at least two entries). Panels with the
/// largest error are bisected until the summed error is below `abs_tol`
/// or `max_panels` is reached.
pub fn adaptive<F>(mut f: F, dim: usize, breaks: &[f64], abs_tol: f64, max_panels: usize) -> QuadOutcome
where
    F: FnMut(f64, &mut [f64]),
{
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let mut total_err = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let p = gk_panel(&mut f, w[0], w[1], dim, &mut buf);
            total_err += p.err;
            heap.push(p);
        }
    }
    while total_err > abs_tol && heap.len() < max_panels {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = gk_panel(&mut f, worst.a, mid, dim, &mut buf);
        let right = gk_panel(&mut f, mid, worst.b, dim, &mut buf);
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // recompute to drop accumulated rounding in the running total
    let mut value = vec![0.0; dim];
    let mut err = 0.0;
    let panels = heap.len();
    for p in heap {
        err += p.err;
        for d in 0..dim {
            value[d] += p.value[d];
        }
    }
    QuadOutcome { value, error: err, converged: err <= abs_tol, panels }
}

/// Scalar adaptive integral over `[a, b]`; returns `(value, error, converged)`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> (f64, f64, bool) {
    let out = adaptive(|x, out: &mut [f64]| out[0] = f(x), 1, &[a, b], abs_tol, 10_000);
    (out.value[0], out.error, out.converged)
}

/// Scalar adaptive integral with interior breakpoints.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], abs_tol: f64) -> (f64, f64, bool) {
    let out = adaptive(|x, out: &mut [f64]| out[0] = f(x), 1, breaks, abs_tol, 10_000);
    (out.value[0], out.error, out.converged)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for n in [1, 2, 5, 16, 41] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            let deg = 2 * n - 1;
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let want = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((got - want).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn kronrod_smooth_and_kinked() {
        let (v, e, ok) = integrate(|x| x.exp(), 0.0, 1.0, 1e-14);
        assert!(ok && e < 1e-14);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-14);
        let (v, _, ok) = integrate(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-12);
        assert!(ok);
        assert!((v - (0.045 + 0.245)).abs() < 1e-12);
        let (v, _, ok) = integrate_with_breaks(|x| if x < 0.3 { 1.0 } else { 0.0 }, &[0.0, 0.3, 1.0], 1e-14);
        assert!(ok && (v - 0.3).abs() < 1e-15);
    }

    #[test]
    fn vector_valued() {
        let out = adaptive(
            |x, o: &mut [f64]| {
                o[0] = x.sin();
                o[1] = x.cos();
            },
            2,
            &[0.0, std::f64::consts::PI],
            1e-13,
            1000,
        );
        assert!(out.converged);
        assert!((out.value[0] - 2.0).abs() < 1e-13);
        assert!(out.value[1].abs() < 1e-13);
    }
}
