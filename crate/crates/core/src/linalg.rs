//! Dense Hermitian helpers and a relatively accurate eigensolver for graded
//! positive semidefinite matrices.
//!
//! Toeplitz compressions of indicators have eigenvalues spanning hundreds of
//! orders of magnitude, far below `eps * ||A||`. A plain Hermitian solver only
//! resolves them to absolute accuracy. Pivoted Cholesky followed by one-sided
//! Jacobi on the factor recovers each eigenvalue to relative accuracy governed
//! by the conditioning of the diagonally scaled matrix.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// `max |a_ij - conj(a_ji)|`.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Replace `a` by `(a + a*)/2`.
pub fn symmetrize(a: &mut CMat) {
    let n = a.nrows();
    for i in 0..n {
        a[(i, i)].im = 0.0;
        for j in i + 1..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
}

/// Eigenvalues of a Hermitian matrix, non-increasing.
pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    if a.nrows() != a.ncols() {
        return Err(Error::Eigen("matrix is not square".into()));
    }
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigen("non-finite matrix entry".into()));
    }
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("Hermitian eigensolver did not converge".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    Ok(v)
}

/// Eigenvalues of a real symmetric matrix, non-increasing.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let eig = nalgebra::SymmetricEigen::try_new(a.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    Ok(v)
}

/// Output of [`graded_psd_eigenvalues`].
#[derive(Debug, Clone)]
pub struct GradedEigen {
    /// Non-increasing; trailing entries beyond `rank` are zero.
    pub values: Vec<f64>,
    /// Estimated relative error of each entry of `values`.
    pub rel_error: Vec<f64>,
    /// Numerical rank found by the pivoted factorization.
    pub rank: usize,
}

/// Relatively accurate eigenvalues of a Hermitian positive semidefinite matrix.
///
/// `entry_rel_tol` is the relative accuracy of the entries measured against
/// `sqrt(a_ii a_jj)`. Returns `None` when a pivot is clearly negative, i.e.
/// the matrix is not numerically semidefinite; callers then fall back to
/// [`hermitian_eigenvalues`].
pub fn graded_psd_eigenvalues(a: &CMat, entry_rel_tol: f64) -> Option<GradedEigen> {
    let n = a.nrows();
    if n == 0 {
        return Some(GradedEigen { values: vec![], rel_error: vec![], rank: 0 });
    }
    let eps = f64::EPSILON;
    let mut w = a.clone();
    let orig_diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    if orig_diag.iter().any(|&d| d < 0.0) {
        return None;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = CMat::zeros(n, n);
    let mut rank = n;
    for j in 0..n {
        let (p, _) = (j..n)
            .map(|i| (i, w[(i, i)].re))
            .fold((j, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
        if p != j {
            w.swap_rows(j, p);
            w.swap_columns(j, p);
            l.swap_rows(j, p);
            perm.swap(j, p);
        }
        let pivot = w[(j, j)].re;
        let scale = orig_diag[perm[j]];
        let floor = (n as f64) * eps * scale;
        if pivot < -floor.max(entry_rel_tol * scale) * 10.0 {
            return None;
        }
        if pivot <= floor || scale == 0.0 {
            rank = j;
            break;
        }
        let d = pivot.sqrt();
        l[(j, j)] = Complex64::new(d, 0.0);
        for i in j + 1..n {
            l[(i, j)] = w[(i, j)] / d;
        }
        for c in j + 1..n {
            let lc = l[(c, j)].conj();
            for r in j + 1..n {
                let v = l[(r, j)] * lc;
                w[(r, c)] -= v;
            }
        }
    }

    let mut cols: Vec<Vec<Complex64>> = (0..rank).map(|j| (0..n).map(|i| l[(i, j)]).collect()).collect();
    one_sided_jacobi(&mut cols);
    // first-order sensitivity of each eigenvalue to entry errors of size
    // delta * sqrt(a_ii a_kk): |d lambda| <= delta (sum_i |u_i| sqrt(a_ii))^2
    let sqrt_diag: Vec<f64> = (0..n).map(|i| orig_diag[perm[i]].sqrt()).collect();
    let mut pairs: Vec<(f64, f64)> = cols
        .iter()
        .map(|c| {
            let lam: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            let w: f64 = c.iter().zip(&sqrt_diag).map(|(z, d)| z.norm() * d).sum();
            (lam, if lam > 0.0 { w * w / (lam * lam) } else { f64::INFINITY })
        })
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let base = (n as f64) * eps + entry_rel_tol;
    let mut values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut rel_error: Vec<f64> = pairs.iter().map(|p| base * p.1.max(1.0)).collect();
    values.resize(n, 0.0);
    rel_error.resize(n, f64::INFINITY);
    Some(GradedEigen { values, rel_error, rank })
}

/// Orthogonalize the columns in place by Hestenes rotations.
fn one_sided_jacobi(cols: &mut [Vec<Complex64>]) {
    let m = cols.len();
    if m < 2 {
        return;
    }
    let tol = (cols[0].len() as f64) * f64::EPSILON;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..m - 1 {
            for q in p + 1..m {
                let (left, right) = cols.split_at_mut(q);
                let xp = &mut left[p];
                let xq = &mut right[0];
                let alpha: f64 = xp.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = xq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = xp.iter().zip(xq.iter()).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
                    let bq = *b * phase;
                    let na = *a * c - bq * s;
                    let nb = *a * s + bq * c;
                    *a = na;
                    *b = nb;
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_graded_factor(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut l = CMat::zeros(n, n);
        for i in 0..n {
            let d = 10f64.powf(-2.5 * i as f64);
            for j in 0..=i {
                let z = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                l[(i, j)] = if i == j { Complex64::new(1.0 + rng.random::<f64>(), 0.0) * d } else { z * d * 0.3 };
            }
        }
        l
    }

    #[test]
    fn determinant_of_graded_matrix_is_recovered() {
        for seed in 0..5 {
            let n = 14;
            let l = random_graded_factor(n, seed);
            let a = &l * l.adjoint();
            let want: f64 = (0..n).map(|i| 2.0 * l[(i, i)].re.ln()).sum();
            let g = graded_psd_eigenvalues(&a, 0.0).expect("psd");
            assert_eq!(g.rank, n);
            let got: f64 = g.values.iter().map(|v| v.ln()).sum();
            assert!((got - want).abs() < 1e-9 * want.abs(), "seed {seed}: {got} vs {want}");
        }
    }

    #[test]
    fn agrees_with_plain_solver_when_well_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 9;
        let b = CMat::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = &b * b.adjoint() + CMat::identity(n, n);
        let g = graded_psd_eigenvalues(&a, 0.0).unwrap();
        let p = hermitian_eigenvalues(&a).unwrap();
        for (x, y) in g.values.iter().zip(&p) {
            assert!((x - y).abs() < 1e-12 * y.abs());
        }
    }

    #[test]
    fn indefinite_is_rejected_and_rank_deficiency_detected() {
        let mut a = CMat::identity(3, 3);
        a[(2, 2)] = Complex64::new(-1.0, 0.0);
        assert!(graded_psd_eigenvalues(&a, 0.0).is_none());
        let v = nalgebra::DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0), Complex64::new(1.0, 1.0)]);
        let r1 = &v * v.adjoint();
        let g = graded_psd_eigenvalues(&r1, 0.0).unwrap();
        assert_eq!(g.rank, 1);
        assert!((g.values[0] - 7.0).abs() < 1e-13);
        assert_eq!(g.values[1], 0.0);
    }

    #[test]
    fn symmetrize_removes_defect() {
        let mut a = CMat::from_fn(3, 3, |i, j| Complex64::new((i + 2 * j) as f64, (i as f64) - (j as f64) * 0.5));
        assert!(hermitian_defect(&a) > 0.1);
        symmetrize(&mut a);
        assert!(hermitian_defect(&a) == 0.0);
    }
}
