//! Tensors built from a derivation law: covariant derivatives, torsion,
//! curvature and the Nijenhuis tensor.

use alloc::vec::Vec;

use super::{covariant_metric, covariant_tensor11, Coeffs, DerivationLaw};
use crate::error::{Error, Result};
use crate::fields::{lie_bracket, vector_jet, Image, MatrixField, MetricField, OneOneField, Point, VectorFieldEval};
use crate::golden::product_of;
use crate::linalg::Mat;

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::DimensionMismatch { expected: n, found: i + 1 });
    }
    Ok(())
}

/// `∇_X Y` at `p`.
pub fn covariant_derivative<X: VectorFieldEval, Y: VectorFieldEval>(
    law: &DerivationLaw,
    x: &X,
    y: &Y,
    p: &[f64],
) -> Result<Vec<f64>> {
    let gamma = law.coefficients(p)?;
    let n = law.dim();
    let xv = x.eval_at(p)?;
    let (yv, dy) = vector_jet(p, |q| y.eval_at(q))?;
    Ok((0..n)
        .map(|k| {
            let mut acc = 0.0;
            for i in 0..n {
                acc += xv[i] * dy[i][k];
                for j in 0..n {
                    acc += gamma.get(k, i, j) * xv[i] * yv[j];
                }
            }
            acc
        })
        .collect())
}

/// `∇_{∂_i} T` at `p` as a matrix in the same convention as `T`.
pub fn covariant_deriv_tensor11(law: &DerivationLaw, t: &MatrixField, i: usize, p: &[f64]) -> Result<Mat<f64>> {
    check_index(i, law.dim())?;
    let gamma = law.coefficients(p)?;
    let jet = t.jet(p)?;
    Ok(covariant_tensor11(&gamma, &jet).swap_remove(i))
}

/// `(∇_{∂_i} g)_{jk}` at `p`.
pub fn covariant_deriv_metric(law: &DerivationLaw, g: &MetricField, i: usize, p: &[f64]) -> Result<Mat<f64>> {
    check_index(i, law.dim())?;
    let gamma = law.coefficients(p)?;
    let jet = g.jet(p)?;
    Ok(covariant_metric(&gamma, &jet).swap_remove(i))
}

/// `T(X, Y) = ∇_X Y − ∇_Y X − [X, Y]` at `p`.
pub fn torsion<X: VectorFieldEval, Y: VectorFieldEval>(
    law: &DerivationLaw,
    x: &X,
    y: &Y,
    p: &[f64],
) -> Result<Vec<f64>> {
    let a = covariant_derivative(law, x, y, p)?;
    let b = covariant_derivative(law, y, x, p)?;
    let br = lie_bracket(x, y, p)?;
    Ok((0..law.dim()).map(|k| a[k] - b[k] - br[k]).collect())
}

/// Riemann tensor `R^l_{kij}`, the `∂_l` component of `R(∂_i, ∂_j) ∂_k`
/// with `R(X, Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature {
    n: usize,
    data: Vec<f64>,
}

impl Curvature {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        self.data[((l * self.n + k) * self.n + i) * self.n + j]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Curvature at `p`. Coefficient derivatives are exact for closed-form laws
/// and central differences with step `fd_step` for pointwise-solved ones.
pub fn curvature(law: &DerivationLaw, p: &[f64], fd_step: f64) -> Result<Curvature> {
    let n = law.dim();
    let g = law.coefficients(p)?;
    let dg = law.coefficient_partials(p, fd_step)?;
    let mut data = Vec::with_capacity(n * n * n * n);
    for l in 0..n {
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut r = dg[i].get(l, j, k) - dg[j].get(l, i, k);
                    for m in 0..n {
                        r += g.get(l, i, m) * g.get(m, j, k) - g.get(l, j, m) * g.get(m, i, k);
                    }
                    data.push(r);
                }
            }
        }
    }
    Ok(Curvature { n, data })
}

/// `N_T(X, Y) = [TX, TY] − T[TX, Y] − T[X, TY] + T²[X, Y]` at `p`.
pub fn nijenhuis<X: VectorFieldEval, Y: VectorFieldEval>(
    t: &MatrixField,
    x: &X,
    y: &Y,
    p: &[f64],
) -> Result<Vec<f64>> {
    let tm = t.eval::<f64>(p)?;
    let tx = Image::new(t, x);
    let ty = Image::new(t, y);
    let a = lie_bracket(&tx, &ty, p)?;
    let b = tm.mul_vec(&lie_bracket(&tx, y, p)?);
    let c = tm.mul_vec(&lie_bracket(x, &ty, p)?);
    let d = tm.mul_vec(&tm.mul_vec(&lie_bracket(x, y, p)?));
    Ok((0..tm.rows()).map(|k| a[k] - b[k] - c[k] + d[k]).collect())
}

/// `N_T(∂_a, ∂_b)^k` for all basis pairs, stored as `[k][a][b]`.
pub fn nijenhuis_basis(t: &MatrixField, p: &[f64]) -> Result<Coeffs<f64>> {
    let jet = t.jet(p)?;
    let v = &jet.value;
    let d = &jet.partials;
    let n = t.dim();
    Ok(Coeffs::from_fn(n, |k, a, b| {
        let mut acc = 0.0;
        for m in 0..n {
            acc += v[(m, a)] * d[m][(k, b)] - v[(m, b)] * d[m][(k, a)];
            acc += v[(k, m)] * (d[b][(m, a)] - d[a][(m, b)]);
        }
        acc
    }))
}

fn torsion_free_check(gamma: &Coeffs<f64>, tol: f64) -> Result<()> {
    let r = gamma.antisymmetrize().max_abs();
    if !(r <= tol) {
        return Err(Error::NotTorsionFree { residual: r });
    }
    Ok(())
}

fn via_connection(dj: &[Mat<f64>], j: &Mat<f64>, x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = j.rows();
    let along = |v: &[f64]| -> Mat<f64> {
        let mut m = Mat::zeros(n, n);
        for (i, &vi) in v.iter().enumerate() {
            m = m.add(&dj[i].scale(vi));
        }
        m
    };
    let jx = j.mul_vec(x);
    let jy = j.mul_vec(y);
    let a = along(x).mul_vec(&jy);
    let b = along(&jx).mul_vec(y);
    let c = along(y).mul_vec(&jx);
    let d = along(&jy).mul_vec(x);
    (0..n).map(|k| a[k] + b[k] - c[k] - d[k]).collect()
}

/// `N_J(X,Y) = (∇_X J)JY + (∇_{JX} J)Y − (∇_Y J)JX − (∇_{JY} J)X` for a
/// torsion-free `law`. The identity relies on `J² = I`.
pub fn nijenhuis_via_connection<X: VectorFieldEval, Y: VectorFieldEval>(
    law: &DerivationLaw,
    j: &OneOneField,
    x: &X,
    y: &Y,
    p: &[f64],
    tol: f64,
) -> Result<Vec<f64>> {
    let gamma = law.coefficients(p)?;
    torsion_free_check(&gamma, tol)?;
    let jet = j.jet(p)?;
    let dj = covariant_tensor11(&gamma, &jet);
    Ok(via_connection(&dj, &jet.value, &x.eval_at(p)?, &y.eval_at(p)?))
}

/// Basis version of [`nijenhuis_via_connection`], stored as `[k][a][b]`.
pub fn nijenhuis_via_connection_basis(law: &DerivationLaw, j: &OneOneField, p: &[f64], tol: f64) -> Result<Coeffs<f64>> {
    let n = law.dim();
    let gamma = law.coefficients(p)?;
    torsion_free_check(&gamma, tol)?;
    let jet = j.jet(p)?;
    let dj = covariant_tensor11(&gamma, &jet);
    let e = |i: usize| -> Vec<f64> { (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
    let mut out = Coeffs::zeros(n);
    for a in 0..n {
        for b in 0..n {
            let v = via_connection(&dj, &jet.value, &e(a), &e(b));
            for (k, x) in v.into_iter().enumerate() {
                out.set(k, a, b, x);
            }
        }
    }
    Ok(out)
}

/// Parallelism of `φ`, of the induced `J` and optionally of `g` over a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptedReport {
    /// `max ‖∇φ‖`.
    pub phi_residual: f64,
    /// `max ‖∇J‖`.
    pub j_residual: f64,
    /// `max ‖∇g‖`, when a metric was supplied.
    pub metric_residual: Option<f64>,
    pub tol: f64,
}

impl AdaptedReport {
    pub fn adapted(&self) -> bool {
        self.phi_residual <= self.tol && self.j_residual <= self.tol && self.metric_residual.is_none_or(|r| r <= self.tol)
    }

    /// `∇φ = 0` and `∇J = 0` must hold or fail together.
    pub fn consistent(&self) -> bool {
        (self.phi_residual <= self.tol) == (self.j_residual <= self.tol)
    }
}

pub fn is_adapted(
    law: &DerivationLaw,
    phi: &OneOneField,
    g: Option<&MetricField>,
    points: &[Point],
    tol: f64,
) -> Result<AdaptedReport> {
    let j = product_of(phi);
    let mut out = AdaptedReport { phi_residual: 0.0, j_residual: 0.0, metric_residual: g.map(|_| 0.0), tol };
    for p in points {
        let gamma = law.coefficients(p)?;
        let worst = |ms: Vec<Mat<f64>>| ms.iter().fold(0.0_f64, |m, x| m.max(x.max_abs()));
        out.phi_residual = out.phi_residual.max(worst(covariant_tensor11(&gamma, &phi.jet(p)?)));
        out.j_residual = out.j_residual.max(worst(covariant_tensor11(&gamma, &j.jet(p)?)));
        if let (Some(g), Some(r)) = (g, out.metric_residual.as_mut()) {
            *r = r.max(worst(covariant_metric(&gamma, &g.jet(p)?)));
        }
    }
    Ok(out)
}
