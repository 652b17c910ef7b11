//! Symmetric indefinite factorization and condition numbers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Growth-limiting pivot threshold `(1 + √17)/8`.
const ALPHA: f64 = 0.640_388_203_202_208_4;

/// `P A Pᵀ = L D Lᵀ` with `L` unit lower triangular and `D` block diagonal
/// with 1×1 and 2×2 blocks, computed with Bunch–Kaufman pivoting.
#[derive(Clone, Debug)]
pub struct Ldlt {
    l: DMatrix<f64>,
    /// Diagonal of `D`.
    d: Vec<f64>,
    /// Subdiagonal of `D`, nonzero only inside 2×2 blocks.
    e: Vec<f64>,
    /// `perm[i]` is the original index moved to position `i`.
    perm: Vec<usize>,
}

fn swap_sym(a: &mut DMatrix<f64>, p: usize, q: usize) {
    if p != q {
        a.swap_rows(p, q);
        a.swap_columns(p, q);
    }
}

impl Ldlt {
    /// Factorizes a symmetric matrix; only exact zero or roundoff-level
    /// pivots make it fail, with the offending position reported.
    pub fn factor(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Linear(format!("matrix is {}x{}, not square", n, m.ncols())));
        }
        let scale = m.amax();
        let tiny = 1e-14 * scale.max(f64::MIN_POSITIVE) * (n as f64).max(1.0);
        let mut a = m.clone();
        let mut l = DMatrix::<f64>::identity(n, n);
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        let mut perm: Vec<usize> = (0..n).collect();
        let mut k = 0;
        let swap = |a: &mut DMatrix<f64>, l: &mut DMatrix<f64>, perm: &mut Vec<usize>, k: usize, p: usize, q: usize| {
            if p == q {
                return;
            }
            swap_sym(a, p, q);
            for c in 0..k {
                l.swap((p, c), (q, c));
            }
            perm.swap(p, q);
        };
        while k < n {
            let akk = a[(k, k)].abs();
            let (r, lambda) = ((k + 1)..n).fold((k, 0.0), |(ri, best), i| {
                if a[(i, k)].abs() > best {
                    (i, a[(i, k)].abs())
                } else {
                    (ri, best)
                }
            });
            if akk.max(lambda) <= tiny {
                return Err(Error::Factorization {
                    pivot: k,
                    magnitude: akk.max(lambda),
                });
            }
            let two = if akk >= ALPHA * lambda {
                false
            } else {
                let sigma = (k..n).filter(|&j| j != r).map(|j| a[(r, j)].abs()).fold(0.0, f64::max);
                if akk * sigma >= ALPHA * lambda * lambda {
                    false
                } else if a[(r, r)].abs() >= ALPHA * sigma {
                    swap(&mut a, &mut l, &mut perm, k, k, r);
                    false
                } else {
                    swap(&mut a, &mut l, &mut perm, k, k + 1, r);
                    true
                }
            };
            if !two {
                let dk = a[(k, k)];
                if dk.abs() <= tiny {
                    return Err(Error::Factorization {
                        pivot: k,
                        magnitude: dk.abs(),
                    });
                }
                d[k] = dk;
                for i in (k + 1)..n {
                    l[(i, k)] = a[(i, k)] / dk;
                }
                for j in (k + 1)..n {
                    let ajk = a[(j, k)];
                    for i in (k + 1)..n {
                        a[(i, j)] -= l[(i, k)] * ajk;
                    }
                }
                k += 1;
            } else {
                let (p, b, c) = (a[(k, k)], a[(k + 1, k)], a[(k + 1, k + 1)]);
                let det = p * c - b * b;
                if det.abs() <= tiny * b.abs().max(tiny) {
                    return Err(Error::Factorization {
                        pivot: k,
                        magnitude: det.abs(),
                    });
                }
                d[k] = p;
                d[k + 1] = c;
                e[k] = b;
                for i in (k + 2)..n {
                    let (x, y) = (a[(i, k)], a[(i, k + 1)]);
                    l[(i, k)] = (x * c - y * b) / det;
                    l[(i, k + 1)] = (y * p - x * b) / det;
                }
                for j in (k + 2)..n {
                    let (xj, yj) = (a[(j, k)], a[(j, k + 1)]);
                    for i in (k + 2)..n {
                        a[(i, j)] -= l[(i, k)] * xj + l[(i, k + 1)] * yj;
                    }
                }
                k += 2;
            }
        }
        Ok(Self { l, d, e, perm })
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let n = self.d.len();
        let mut z = DVector::from_iterator(n, self.perm.iter().map(|&i| b[i]));
        for j in 0..n {
            let zj = z[j];
            for i in (j + 1)..n {
                z[i] -= self.l[(i, j)] * zj;
            }
        }
        let mut k = 0;
        while k < n {
            if k + 1 < n && self.e[k] != 0.0 {
                let (p, b, c) = (self.d[k], self.e[k], self.d[k + 1]);
                let det = p * c - b * b;
                let (x, y) = (z[k], z[k + 1]);
                z[k] = (c * x - b * y) / det;
                z[k + 1] = (p * y - b * x) / det;
                k += 2;
            } else {
                z[k] /= self.d[k];
                k += 1;
            }
        }
        for j in (0..n).rev() {
            let mut s = z[j];
            for i in (j + 1)..n {
                s -= self.l[(i, j)] * z[i];
            }
            z[j] = s;
        }
        let mut x = DVector::zeros(n);
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Number of negative eigenvalues of the factored matrix.
    pub fn negative_count(&self) -> usize {
        let n = self.d.len();
        let mut k = 0;
        let mut neg = 0;
        while k < n {
            if k + 1 < n && self.e[k] != 0.0 {
                let det = self.d[k] * self.d[k + 1] - self.e[k] * self.e[k];
                neg += if det < 0.0 {
                    1
                } else if self.d[k] < 0.0 {
                    2
                } else {
                    0
                };
                k += 2;
            } else {
                neg += usize::from(self.d[k] < 0.0);
                k += 1;
            }
        }
        neg
    }
}

/// Solves a symmetric system by [`Ldlt`] and checks the relative residual.
pub fn solve_symmetric(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let x = Ldlt::factor(a)?.solve(b);
    let bn = b.norm();
    let res = (a * &x - b).norm();
    if !(res <= 1e-10 * bn.max(f64::MIN_POSITIVE)) && bn > 0.0 {
        return Err(Error::Linear(format!(
            "relative residual {:.3e} after factorization",
            res / bn
        )));
    }
    Ok(x)
}

/// `|λ|max / |λ|min` of a symmetric matrix; infinite for a singular one.
pub fn spectral_condition(a: &DMatrix<f64>) -> f64 {
    let ev = a.clone().symmetric_eigenvalues();
    let max = ev.amax();
    let min = ev.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Ratio of the extreme singular values; infinite for a singular matrix.
pub fn singular_condition(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Frobenius norm of `A − Aᵀ` relative to that of `A`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    (a - a.transpose()).norm() / a.norm().max(f64::MIN_POSITIVE)
}
