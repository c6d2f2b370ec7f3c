//! Shift-invert Lanczos for the pencil `K x = lambda M x`.
//!
//! Iterates on `(K - sigma M)^{-1} M` in the `M` inner product with full
//! reorthogonalization. Ritz values `theta` map back through
//! `lambda = sigma + 1 / theta`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{dot, CsrMatrix, SkylineLdlt, SparseSymmetricMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    pub k: usize,
    pub sigma: f64,
    /// Relative Ritz-estimate tolerance on `theta`.
    pub ritz_tol: f64,
    /// Required `||K x - lambda M x|| / ||M x||` per returned pair.
    pub residual_tol: f64,
    /// Krylov dimension cap; `None` means `min(n, max(4k, 2k + 60))`.
    pub max_dim: Option<usize>,
    pub seed: u64,
}

impl LanczosOptions {
    pub fn new(k: usize, sigma: f64) -> Self {
        Self {
            k,
            sigma,
            ritz_tol: 1e-11,
            residual_tol: 1e-8,
            max_dim: None,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending.
    pub values: Vec<f64>,
    /// `M`-orthonormal eigenvectors matching `values`.
    pub vectors: Vec<Vec<f64>>,
    /// `||K x - lambda M x|| / ||M x||` per pair.
    pub residuals: Vec<f64>,
    pub krylov_dim: usize,
}

/// Implicit QL on a symmetric tridiagonal matrix (`diag`, `off[i]` couples
/// `i` and `i + 1`). Returns eigenvalues and the rows `rows` of the
/// eigenvector matrix, unsorted.
fn tridiagonal_eigen(diag: &[f64], off: &[f64], rows: &[usize]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let mut z: Vec<Vec<f64>> = rows
        .iter()
        .map(|&r| (0..n).map(|c| if c == r { 1.0 } else { 0.0 }).collect())
        .collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NonConvergence("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f2 = row[i + 1];
                    row[i + 1] = s * row[i] + c * f2;
                    row[i] = c * row[i] - s * f2;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lowest `k` eigenpairs of `K x = lambda M x` above `sigma`.
///
/// `sigma` must lie below the whole spectrum; the factorization inertia is
/// used to enforce that.
pub fn shift_invert_lanczos(
    stiffness: &SparseSymmetricMatrix,
    mass: &SparseSymmetricMatrix,
    opts: &LanczosOptions,
) -> Result<EigenPairs> {
    let n = stiffness.dim();
    if opts.k == 0 || opts.k > n {
        return Err(Error::InvalidInput(format!(
            "k={} must be in 1..={n}",
            opts.k
        )));
    }
    let shifted = stiffness.combine(1.0, mass, -opts.sigma)?;
    let factor = SkylineLdlt::factor(&shifted)?;
    if factor.negative_pivots() > 0 {
        return Err(Error::InvalidInput(format!(
            "sigma={} lies above {} eigenvalue(s); it must be below the spectrum",
            opts.sigma,
            factor.negative_pivots()
        )));
    }
    let k_csr = stiffness.to_csr();
    let m_csr = mass.to_csr();
    lanczos_iterate(&k_csr, &m_csr, &factor, opts)
}

fn lanczos_iterate(
    k_csr: &CsrMatrix,
    m_csr: &CsrMatrix,
    factor: &SkylineLdlt,
    opts: &LanczosOptions,
) -> Result<EigenPairs> {
    let n = k_csr.dim();
    let k = opts.k;
    let max_dim = opts
        .max_dim
        .unwrap_or_else(|| (4 * k).max(2 * k + 60))
        .min(n)
        .max(k);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim + 1);
    let mut m_basis: Vec<Vec<f64>> = Vec::with_capacity(max_dim + 1);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_dim);
    let mut beta: Vec<f64> = Vec::with_capacity(max_dim);

    let start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let m_start = m_csr.matvec(&start);
    let s = dot(&start, &m_start).sqrt();
    basis.push(start.iter().map(|x| x / s).collect());
    m_basis.push(m_start.iter().map(|x| x / s).collect());

    let mut next_check = k.min(max_dim);
    loop {
        let j = alpha.len();
        let mut w = factor.solve(&m_basis[j]);
        let a = dot(&m_basis[j], &w);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        // Full reorthogonalization; a second pass only when the first one
        // removed a large part of the vector ("twice is enough").
        let mut mw = m_csr.matvec(&w);
        let mut b = dot(&w, &mw).max(0.0).sqrt();
        for _pass in 0..2 {
            for (q, mq) in basis.iter().zip(&m_basis) {
                let c = dot(mq, &w);
                axpy(-c, q, &mut w);
            }
            let before = b;
            m_csr.matvec_into(&w, &mut mw);
            b = dot(&w, &mw).max(0.0).sqrt();
            if b > 0.7 * before {
                break;
            }
        }
        alpha.push(a);
        let dim = alpha.len();

        if dim >= next_check || dim == max_dim {
            let last_chance = dim == max_dim;
            if let Some(pairs) = try_extract(k_csr, m_csr, &basis, &alpha, &beta, b, opts, last_chance)? {
                return Ok(pairs);
            }
            if dim == max_dim {
                return Err(Error::NonConvergence(format!(
                    "{k} eigenpairs not converged within Krylov dimension {max_dim}"
                )));
            }
            next_check = (dim + (dim / 8).max(10)).min(max_dim);
        }

        if b <= 1e-13 * a.abs().max(1e-300) {
            // Invariant subspace: continue from a fresh direction orthogonal to the basis.
            w = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            for _pass in 0..2 {
                for (q, mq) in basis.iter().zip(&m_basis) {
                    let c = dot(mq, &w);
                    axpy(-c, q, &mut w);
                }
            }
            mw = m_csr.matvec(&w);
            let s = dot(&w, &mw).sqrt();
            w.iter_mut().for_each(|x| *x /= s);
            mw.iter_mut().for_each(|x| *x /= s);
            b = 0.0;
            beta.push(b);
            basis.push(w);
            m_basis.push(mw);
            continue;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
        m_basis.push(mw.iter().map(|x| x / b).collect());
    }
}

/// Checks convergence of the top `k` Ritz values; returns the pairs when
/// every estimate and explicit residual passes. On the last chance the
/// estimates are skipped and only explicit residuals decide.
#[allow(clippy::too_many_arguments)]
fn try_extract(
    k_csr: &CsrMatrix,
    m_csr: &CsrMatrix,
    basis: &[Vec<f64>],
    alpha: &[f64],
    beta: &[f64],
    beta_last: f64,
    opts: &LanczosOptions,
    last_chance: bool,
) -> Result<Option<EigenPairs>> {
    let dim = alpha.len();
    let k = opts.k;
    if dim < k {
        return Ok(None);
    }
    let last = [dim - 1];
    let (theta, bottom) = tridiagonal_eigen(alpha, beta, &last)?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| theta[b].total_cmp(&theta[a]));
    let top = &order[..k];
    let estimates_ok = top.iter().all(|&i| {
        theta[i] > 0.0 && (beta_last * bottom[0][i]).abs() <= opts.ritz_tol * theta[i]
    });
    if !estimates_ok && !last_chance {
        return Ok(None);
    }
    let rows: Vec<usize> = (0..dim).collect();
    let (theta_full, z) = tridiagonal_eigen(alpha, beta, &rows)?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| theta_full[b].total_cmp(&theta_full[a]));
    let n = k_csr.dim();
    let mut pairs: Vec<(f64, Vec<f64>, f64)> = Vec::with_capacity(k);
    for &i in &order[..k] {
        let th = theta_full[i];
        if th <= 0.0 {
            return Ok(None);
        }
        let lambda = opts.sigma + 1.0 / th;
        let mut x = vec![0.0; n];
        for (r, q) in basis.iter().take(dim).enumerate() {
            axpy(z[r][i], q, &mut x);
        }
        let kx = k_csr.matvec(&x);
        let mx = m_csr.matvec(&x);
        let resid: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - lambda * b).collect();
        let rel = norm(&resid) / norm(&mx);
        if rel > opts.residual_tol {
            return Ok(None);
        }
        pairs.push((lambda, x, rel));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(Some(EigenPairs {
        values: pairs.iter().map(|p| p.0).collect(),
        residuals: pairs.iter().map(|p| p.2).collect(),
        vectors: pairs.into_iter().map(|p| p.1).collect(),
        krylov_dim: dim,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn tridiagonal_eigenvalues() {
        let n = 30;
        let (mut ev, rows) = tridiagonal_eigen(&vec![2.0; n], &vec![-1.0; n - 1], &[0, n - 1]).unwrap();
        ev.sort_by(f64::total_cmp);
        for (k, v) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n as f64 + 1.0)).cos();
            assert!((v - exact).abs() < 1e-13);
        }
        let norm_first: f64 = rows[0].iter().map(|x| x * x).sum();
        assert!((norm_first - 1.0).abs() < 1e-12);
    }

    /// Generalized problem for the 1-D finite-element string: exact
    /// discrete eigenvalues are known in closed form.
    #[test]
    fn string_pencil_matches_closed_form() {
        let n = 200;
        let h = 1.0 / (n as f64 + 1.0);
        let mut kt = vec![];
        let mut mt = vec![];
        for i in 0..n {
            kt.push((i, i, 2.0 / h));
            mt.push((i, i, 4.0 * h / 6.0));
            if i + 1 < n {
                kt.push((i, i + 1, -1.0 / h));
                mt.push((i, i + 1, h / 6.0));
            }
        }
        let k = SparseSymmetricMatrix::from_triplets(n, kt).unwrap();
        let m = SparseSymmetricMatrix::from_triplets(n, mt).unwrap();
        let pairs = shift_invert_lanczos(&k, &m, &LanczosOptions::new(12, -1.0)).unwrap();
        for (j, v) in pairs.values.iter().enumerate() {
            let c = ((j + 1) as f64 * PI * h).cos();
            let exact = 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
            assert!(((v - exact) / exact).abs() < 1e-11, "mode {j}: {v} vs {exact}");
        }
        assert!(pairs.residuals.iter().all(|r| *r <= 1e-8));
        let again = shift_invert_lanczos(&k, &m, &LanczosOptions::new(12, -1.0)).unwrap();
        assert_eq!(pairs.values, again.values);
    }

    #[test]
    fn shift_above_spectrum_is_rejected() {
        let k = SparseSymmetricMatrix::from_triplets(3, vec![(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0)]).unwrap();
        let m = SparseSymmetricMatrix::from_triplets(3, vec![(0, 0, 1.0), (1, 1, 1.0), (2, 2, 1.0)]).unwrap();
        assert!(shift_invert_lanczos(&k, &m, &LanczosOptions::new(1, 1.5)).is_err());
        assert!(matches!(
            shift_invert_lanczos(&k, &m, &LanczosOptions::new(1, 2.0)),
            Err(Error::Factorization { .. })
        ));
        let all = shift_invert_lanczos(&k, &m, &LanczosOptions::new(3, 0.0)).unwrap();
        for (v, e) in all.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }
}
