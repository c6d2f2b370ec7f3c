//! Small dense complex linear algebra used as an independent oracle for the
//! closed-form symbol identities. Matrices here are at most 8x8.

use crate::complex::ComplexScalar;
use crate::error::{Error, Result};

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<ComplexScalar>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ComplexScalar::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ComplexScalar::ONE;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }

    pub fn trace(&self) -> ComplexScalar {
        (0..self.dim).fold(ComplexScalar::ZERO, |acc, i| acc + self[(i, i)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.abs()).fold(0.0, f64::max)
    }

    /// Spectral norm by power iteration on `R^H R`.
    pub fn operator_norm(&self) -> f64 {
        let n = self.dim;
        if self.max_abs() == 0.0 {
            return 0.0;
        }
        let mut v = vec![ComplexScalar::ONE; n];
        let mut sigma_sq = 0.0;
        for _ in 0..100 {
            let rv: Vec<ComplexScalar> = (0..n)
                .map(|i| (0..n).fold(ComplexScalar::ZERO, |acc, j| acc + self[(i, j)] * v[j]))
                .collect();
            let w: Vec<ComplexScalar> = (0..n)
                .map(|j| {
                    (0..n).fold(ComplexScalar::ZERO, |acc, i| acc + self[(i, j)].conj() * rv[i])
                })
                .collect();
            let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let next = norm / vnorm;
            v = w.into_iter().map(|z| z.scale(1.0 / norm)).collect();
            if (next - sigma_sq).abs() <= 1e-14 * next {
                sigma_sq = next;
                break;
            }
            sigma_sq = next;
        }
        sigma_sq.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = ComplexScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ComplexScalar {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexScalar {
        &mut self.data[i * self.dim + j]
    }
}

/// Partial-pivot LU factors `P A = L U`, packed in one matrix.
#[derive(Debug, Clone)]
pub struct ComplexLu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
}

impl ComplexLu {
    /// Factor `a`; a pivot smaller than `pivot_tol` (absolute) is reported as singular.
    pub fn factor(a: &ComplexMatrix, pivot_tol: f64) -> Result<Self> {
        let n = a.dim();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best <= pivot_tol {
                return Err(Error::SingularMatrix {
                    column: k,
                    pivot: best,
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let inv = lu[(k, k)].recip();
            for i in k + 1..n {
                let f = lu[(i, k)] * inv;
                lu[(i, k)] = f;
                for j in k + 1..n {
                    lu[(i, j)] = lu[(i, j)] - f * lu[(k, j)];
                }
            }
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn determinant(&self) -> ComplexScalar {
        let n = self.lu.dim();
        let d = (0..n).fold(ComplexScalar::ONE, |acc, i| acc * self.lu[(i, i)]);
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn solve(&self, b: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let n = self.lu.dim();
        let mut x: Vec<ComplexScalar> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] = x[i] - self.lu[(i, j)] * x[j];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.lu.dim();
        let mut inv = ComplexMatrix::zeros(n);
        let mut e = vec![ComplexScalar::ZERO; n];
        for j in 0..n {
            e.iter_mut().for_each(|z| *z = ComplexScalar::ZERO);
            e[j] = ComplexScalar::ONE;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    #[test]
    fn determinant_needs_pivoting() {
        // [[0, 1], [2, 3]] has det -2 and a zero leading entry.
        let mut a = ComplexMatrix::zeros(2);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(3.0, 0.0);
        let lu = ComplexLu::factor(&a, 0.0).unwrap();
        let d = lu.determinant();
        assert!((d.re + 2.0).abs() < 1e-15 && d.im.abs() < 1e-15);
        let prod = a.mul(&lu.inverse());
        assert!(prod.sub(&ComplexMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let a = ComplexMatrix::zeros(3);
        assert!(matches!(
            ComplexLu::factor(&a, 1e-300),
            Err(Error::SingularMatrix { column: 0, .. })
        ));
    }

    #[test]
    fn operator_norm_of_diagonal() {
        let mut a = ComplexMatrix::zeros(3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(0.0, -4.0);
        a[(2, 2)] = c(2.0, 0.0);
        assert!((a.operator_norm() - 4.0).abs() < 1e-10);
        assert_eq!(ComplexMatrix::zeros(2).operator_norm(), 0.0);
    }
}
