//! Matrix Lie algebras and their first prolongation
//! `𝔤⁽¹⁾ = {S: ℝⁿ → 𝔤 linear | S(v)w = S(w)v}`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Mat, PivotedQr};

const RANK_TOL: f64 = 1e-10;

/// A Lie subalgebra of `gl(n)` given by a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLieAlgebra {
    n: usize,
    basis: Vec<Mat<f64>>,
}

fn unit(n: usize, r: usize, c: usize) -> Mat<f64> {
    let mut m = Mat::zeros(n, n);
    m[(r, c)] = 1.0;
    m
}

/// Rank of the matrices flattened into rows.
fn span_rank(ms: &[&Mat<f64>], n: usize) -> usize {
    if ms.is_empty() {
        return 0;
    }
    let a = Mat::from_fn(ms.len(), n * n, |r, c| ms[r].as_slice()[c]);
    PivotedQr::new(&a.transpose()).rank(RANK_TOL)
}

impl MatrixLieAlgebra {
    pub fn new(n: usize, basis: Vec<Mat<f64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRank("matrix size must be positive".into()));
        }
        for b in &basis {
            if b.rows() != n || b.cols() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.rows().max(b.cols()) });
            }
        }
        let refs: Vec<&Mat<f64>> = basis.iter().collect();
        if span_rank(&refs, n) < basis.len() {
            return Err(Error::DependentBasis);
        }
        Ok(MatrixLieAlgebra { n, basis })
    }

    /// Skew-symmetric matrices `𝔬(n)`.
    pub fn orthogonal(n: usize) -> Result<Self> {
        Self::new(n, skew_basis(n, 0, n))
    }

    /// All matrices `𝔤𝔩(n)`.
    pub fn general_linear(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|r| (0..n).map(move |c| unit(n, r, c))).collect())
    }

    /// Block-diagonal `𝔬(r) ⊕ 𝔬(s)` inside `𝔤𝔩(r + s)`.
    pub fn orthogonal_pair(r: usize, s: usize) -> Result<Self> {
        let n = pair_size(r, s)?;
        let mut basis = skew_basis(n, 0, r);
        basis.extend(skew_basis(n, r, n));
        Self::new(n, basis)
    }

    /// Block-diagonal `𝔤𝔩(r) ⊕ 𝔤𝔩(s)` inside `𝔤𝔩(r + s)`.
    pub fn general_linear_pair(r: usize, s: usize) -> Result<Self> {
        let n = pair_size(r, s)?;
        let mut basis = Vec::new();
        for (lo, hi) in [(0, r), (r, n)] {
            for a in lo..hi {
                for b in lo..hi {
                    basis.push(unit(n, a, b));
                }
            }
        }
        Self::new(n, basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Mat<f64>] {
        &self.basis
    }

    /// Worst least-squares residual of `[A, B]` against the span, over basis pairs.
    pub fn closure_residual(&self) -> f64 {
        let d = self.dim();
        if d == 0 {
            return 0.0;
        }
        let nn = self.n * self.n;
        let a = Mat::from_fn(nn, d, |r, c| self.basis[c].as_slice()[r]);
        let qr = PivotedQr::new(&a);
        let rank = qr.rank(RANK_TOL);
        let mut worst = 0.0_f64;
        for x in &self.basis {
            for y in &self.basis {
                let br = x.matmul(y).sub(&y.matmul(x));
                let coef = qr.solve(br.as_slice(), rank);
                let fit = a.mul_vec(&coef);
                for (u, v) in fit.iter().zip(br.as_slice()) {
                    worst = worst.max((u - v).abs());
                }
            }
        }
        worst
    }

    /// The span is closed under transposition.
    pub fn transpose_invariant(&self) -> bool {
        let transposed: Vec<Mat<f64>> = self.basis.iter().map(Mat::transpose).collect();
        let all: Vec<&Mat<f64>> = self.basis.iter().chain(&transposed).collect();
        span_rank(&all, self.n) == self.dim()
    }
}

fn pair_size(r: usize, s: usize) -> Result<usize> {
    if r == 0 || s == 0 {
        return Err(Error::InvalidRank(format!("block sizes must be positive, got r = {r}, s = {s}")));
    }
    Ok(r + s)
}

fn skew_basis(n: usize, lo: usize, hi: usize) -> Vec<Mat<f64>> {
    let mut out = Vec::new();
    for a in lo..hi {
        for b in (a + 1)..hi {
            out.push(unit(n, a, b).sub(&unit(n, b, a)));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Prolongation {
    pub dimension: usize,
    pub transpose_invariant: bool,
}

impl Prolongation {
    /// A vanishing first prolongation of a transpose-invariant algebra
    /// guarantees a functorial connection.
    pub fn admits_functorial_connection(&self) -> bool {
        self.dimension == 0 && self.transpose_invariant
    }
}

/// Dimension of the kernel of `S ↦ (S(e_i)e_j − S(e_j)e_i)_{i<j}` on `Hom(ℝⁿ, 𝔤)`.
pub fn first_prolongation_dim(algebra: &MatrixLieAlgebra) -> Prolongation {
    let (n, d) = (algebra.n, algebra.dim());
    let unknowns = n * d;
    // unknown c[i*d + a] is the coefficient of basis[a] in S(e_i)
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..n {
                let mut row = alloc::vec![0.0; unknowns];
                for (a, b) in algebra.basis.iter().enumerate() {
                    row[i * d + a] += b[(k, j)];
                    row[j * d + a] -= b[(k, i)];
                }
                rows.push(row);
            }
        }
    }
    let rank = if rows.is_empty() || unknowns == 0 {
        0
    } else {
        PivotedQr::new(&Mat::from_fn(rows.len(), unknowns, |r, c| rows[r][c])).rank(RANK_TOL)
    };
    Prolongation { dimension: unknowns - rank, transpose_invariant: algebra.transpose_invariant() }
}
