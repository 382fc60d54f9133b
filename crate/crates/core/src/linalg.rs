//! Small dense matrices over any [`Scalar`], plus the f64-only factorizations
//! used by the pointwise solvers.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has the wrong length");
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows);
        Self::from_fn(self.rows, o.cols, |r, c| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                acc += self[(r, k)] * o[(k, c)];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for (c, &x) in v.iter().enumerate() {
                    acc += self[(r, c)] * x;
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip_with(o, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| x * c).collect() }
    }

    fn zip_with(&self, o: &Self, f: impl Fn(S, S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Primal values.
    pub fn values(&self) -> Mat<f64> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.value()).collect() }
    }

    /// Max-norm of the primal values.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(libm::fabs(x.value())))
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting on the
    /// primal values. `None` if a pivot vanishes.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..n {
            let pivot = (col..n).max_by(|&i, &j| {
                libm::fabs(a[(i, col)].value()).total_cmp(&libm::fabs(a[(j, col)].value()))
            })?;
            if libm::fabs(a[(pivot, col)].value()) <= scale * 1e-14 {
                return None;
            }
            if pivot != col {
                for c in 0..n {
                    a.data.swap(pivot * n + c, col * n + c);
                    inv.data.swap(pivot * n + c, col * n + c);
                }
            }
            let d = S::one() / a[(col, col)];
            for c in 0..n {
                a[(col, c)] = a[(col, c)] * d;
                inv[(col, c)] = inv[(col, c)] * d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.value() == 0.0 && S::EXACT_REAL {
                    continue;
                }
                for c in 0..n {
                    let t = a[(col, c)];
                    a[(r, c)] -= f * t;
                    let t = inv[(col, c)];
                    inv[(r, c)] -= f * t;
                }
            }
        }
        Some(inv)
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &Mat<f64>) -> Vec<f64> {
    let n = m.rows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off < 1e-30 * (1.0 + a.max_abs() * a.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Householder QR with column pivoting, `A P = Q R`.
#[derive(Clone, Debug)]
pub struct PivotedQr {
    rows: usize,
    cols: usize,
    /// Overwritten with R in the upper triangle.
    r: Mat<f64>,
    reflectors: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl PivotedQr {
    pub fn new(a: &Mat<f64>) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::new();
        for k in 0..m.min(n) {
            let norm2 = |r: &Mat<f64>, j: usize| (k..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>();
            let mut best = k;
            let mut best_norm = norm2(&r, k);
            for j in (k + 1)..n {
                let nj = norm2(&r, j);
                if nj > best_norm {
                    best = j;
                    best_norm = nj;
                }
            }
            if best != k {
                for i in 0..m {
                    let t = r[(i, k)];
                    r[(i, k)] = r[(i, best)];
                    r[(i, best)] = t;
                }
                perm.swap(k, best);
            }
            let norm = libm::sqrt(best_norm);
            let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
            if norm == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let alpha = if v[0] >= 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vv: f64 = v.iter().map(|x| x * x).sum();
            if vv == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            for j in k..n {
                let dot: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
                let f = 2.0 * dot / vv;
                for i in k..m {
                    r[(i, j)] -= f * v[i - k];
                }
            }
            reflectors.push(v);
        }
        PivotedQr { rows: m, cols: n, r, reflectors, perm }
    }

    /// Magnitudes of the diagonal of R, non-increasing up to rounding.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|k| libm::fabs(self.r[(k, k)])).collect()
    }

    /// Numerical rank: diagonal entries above `rel_tol · |R₀₀|`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let d = self.diagonal();
        let Some(&top) = d.first() else { return 0 };
        if top == 0.0 {
            return 0;
        }
        d.iter().filter(|&&x| x > rel_tol * top).count()
    }

    pub fn nullity(&self, rel_tol: f64) -> usize {
        self.cols - self.rank(rel_tol)
    }

    /// Basic least-squares solution using the leading `rank` columns.
    pub fn solve(&self, b: &[f64], rank: usize) -> Vec<f64> {
        assert_eq!(b.len(), self.rows);
        let mut y = b.to_vec();
        for (k, v) in self.reflectors.iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            let vv: f64 = v.iter().map(|x| x * x).sum();
            let dot: f64 = (k..self.rows).map(|i| v[i - k] * y[i]).sum();
            let f = 2.0 * dot / vv;
            for i in k..self.rows {
                y[i] -= f * v[i - k];
            }
        }
        let mut z = vec![0.0; self.cols];
        for i in (0..rank).rev() {
            let mut acc = y[i];
            for j in (i + 1)..rank {
                acc -= self.r[(i, j)] * z[j];
            }
            z[i] = acc / self.r[(i, i)];
        }
        let mut x = vec![0.0; self.cols];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }
}
