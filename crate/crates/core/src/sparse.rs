//! Sparse symmetric matrices: coordinate assembly, CSR products and an
//! envelope (skyline) LDL^T factorization under reverse Cuthill-McKee ordering.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Dot product with eight independent accumulators so the loop vectorizes.
/// The summation order is fixed, so results are reproducible.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    let mut acc = [0.0; 8];
    for (x, y) in ca.zip(cb) {
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail
}

/// Symmetric matrix stored as canonical upper triplets (`row <= col`),
/// sorted and with duplicates summed.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetricMatrix {
    dim: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl SparseSymmetricMatrix {
    /// Canonicalizes arbitrary triplets. Entries from either triangle are
    /// folded onto `row <= col` and summed, so callers add each symmetric
    /// pair once.
    pub fn from_triplets(dim: usize, raw: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut t: Vec<(usize, usize, f64)> = raw
            .into_iter()
            .map(|(r, c, v)| if r <= c { (r, c, v) } else { (c, r, v) })
            .collect();
        if let Some(&(r, c, _)) = t.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::InvalidInput(format!(
                "entry ({r}, {c}) outside a {dim}x{dim} matrix"
            )));
        }
        t.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            match triplets.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => triplets.push((r, c, v)),
            }
        }
        Ok(Self { dim, triplets })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn triplets(&self) -> &[(usize, usize, f64)] {
        &self.triplets
    }

    pub fn nnz_upper(&self) -> usize {
        self.triplets.len()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SparseSymmetricMatrix, b: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput("dimension mismatch".into()));
        }
        let left = self.triplets.iter().map(|&(r, c, v)| (r, c, a * v));
        let right = other.triplets.iter().map(|&(r, c, v)| (r, c, b * v));
        Self::from_triplets(self.dim, left.chain(right))
    }

    pub fn to_csr(&self) -> CsrMatrix {
        let n = self.dim;
        let mut counts = vec![0usize; n + 1];
        for &(r, c, _) in &self.triplets {
            counts[r + 1] += 1;
            if r != c {
                counts[c + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut fill = counts;
        let nnz = row_ptr[n];
        let mut col_idx = vec![0usize; nnz];
        let mut values = vec![0.0; nnz];
        // Column order within each row ends up ascending because triplets
        // are sorted by (row, col): lower entries (c, r) arrive in order of r.
        for &(r, c, v) in &self.triplets {
            if r != c {
                let p = fill[c];
                col_idx[p] = r;
                values[p] = v;
                fill[c] += 1;
            }
        }
        for &(r, c, v) in &self.triplets {
            let p = fill[r];
            col_idx[p] = c;
            values[p] = v;
            fill[r] += 1;
        }
        CsrMatrix {
            dim: n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.dim];
        for &(r, c, v) in &self.triplets {
            if r == c {
                d[r] += v;
            }
        }
        d
    }
}

/// Full (both triangles) compressed-row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let mut s = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[p] * x[self.col_idx[p]];
            }
            *yi = s;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(&self.matvec(x), x)
    }

    /// Row-major dense copy, for tests and small oracles.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for (j, v) in self.row(i) {
                d[i * n + j] += v;
            }
        }
        d
    }
}

/// Reverse Cuthill-McKee permutation (`perm[new] = old`) of the adjacency
/// graph of `a`. Each component starts from a pseudo-peripheral node.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, mask: &[bool]| -> (Vec<usize>, usize) {
        let mut dist = vec![usize::MAX; n];
        let mut queue = VecDeque::from([start]);
        dist[start] = 0;
        let mut last = start;
        while let Some(u) = queue.pop_front() {
            last = u;
            for &v in &adj[u] {
                if !mask[v] && dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let depth = dist[last];
        let far: Vec<usize> = (0..n).filter(|&v| dist[v] == depth).collect();
        (far, depth)
    };

    while order.len() < n {
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .expect("unvisited node remains");
        let mut start = seed;
        let (mut far, mut depth) = bfs_levels(start, &visited);
        for _ in 0..8 {
            let candidate = *far.iter().min_by_key(|&&v| degree[v]).expect("non-empty level");
            let (f2, d2) = bfs_levels(candidate, &visited);
            if d2 > depth {
                start = candidate;
                far = f2;
                depth = d2;
            } else {
                break;
            }
        }
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = adj[u].iter().copied().filter(|&v| !visited[v]).collect();
            next.sort_by_key(|&v| (degree[v], v));
            for v in next {
                visited[v] = true;
                queue.push_back(v);
            }
        }
    }
    order.reverse();
    order
}

/// `P A P^T = L D L^T` with `L` stored row-wise inside the lower envelope.
#[derive(Debug, Clone)]
pub struct SkylineLdlt {
    dim: usize,
    /// `perm[new] = old`.
    perm: Vec<usize>,
    first: Vec<usize>,
    row_start: Vec<usize>,
    lower: Vec<f64>,
    diag: Vec<f64>,
}

impl SkylineLdlt {
    /// Factors `a` under its RCM ordering.
    pub fn factor(a: &SparseSymmetricMatrix) -> Result<Self> {
        let csr = a.to_csr();
        let perm = reverse_cuthill_mckee(&csr);
        Self::factor_with_ordering(&csr, perm)
    }

    pub fn factor_with_ordering(a: &CsrMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.dim();
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new_i, &old_i) in perm.iter().enumerate() {
            for (old_j, _) in a.row(old_i) {
                let new_j = inv[old_j];
                if new_j < first[new_i] {
                    first[new_i] = new_j;
                }
            }
        }
        let mut row_start = vec![0usize; n + 1];
        for i in 0..n {
            row_start[i + 1] = row_start[i] + (i - first[i]);
        }
        let mut lower = vec![0.0; row_start[n]];
        let mut diag = vec![0.0; n];
        for (new_i, &old_i) in perm.iter().enumerate() {
            for (old_j, v) in a.row(old_i) {
                let new_j = inv[old_j];
                if new_j < new_i {
                    lower[row_start[new_i] + new_j - first[new_i]] = v;
                } else if new_j == new_i {
                    diag[new_i] = v;
                }
            }
        }
        let scale = diag.iter().map(|d| d.abs()).fold(0.0, f64::max);
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = lower.split_at_mut(row_start[i]);
            let row_i = &mut rest[..i - fi];
            // Pass 1: row_i[j] <- g_ij = a_ij - sum_k g_ik L_jk (g = L D).
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &done[row_start[j]..row_start[j] + (j - fj)];
                let s = dot(&row_i[k0 - fi..j - fi], &row_j[k0 - fj..j - fj]);
                row_i[j - fi] -= s;
            }
            // Pass 2: L_ij = g_ij / d_j and the pivot update.
            let mut d = diag[i];
            for j in fi..i {
                let g = row_i[j - fi];
                let l = g / diag[j];
                row_i[j - fi] = l;
                d -= g * l;
            }
            if !(d.abs() > 1e-14 * scale) {
                return Err(Error::Factorization { row: i, pivot: d });
            }
            diag[i] = d;
        }
        Ok(Self {
            dim: n,
            perm,
            first,
            row_start,
            lower,
            diag,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored entries of the lower envelope.
    pub fn envelope_size(&self) -> usize {
        self.lower.len()
    }

    /// Number of negative pivots, i.e. eigenvalues of the factored matrix
    /// below zero (Sylvester's law of inertia).
    pub fn negative_pivots(&self) -> usize {
        self.diag.iter().filter(|d| **d < 0.0).count()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut z: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.lower[self.row_start[i]..self.row_start[i + 1]];
            z[i] -= dot(row, &z[fi..i]);
        }
        for (zi, d) in z.iter_mut().zip(&self.diag) {
            *zi /= d;
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let xi = z[i];
            let row = &self.lower[self.row_start[i]..self.row_start[i + 1]];
            for (zj, l) in z[fi..i].iter_mut().zip(row) {
                *zj -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = z[new];
        }
        x
    }
}
