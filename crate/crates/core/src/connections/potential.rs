//! Potential tensors `Q` of type (1,2) and the natural projection of
//! potentials onto those that keep a connection adapted to `(J, g)`.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{Coeffs, DerivationLaw, Differentiability};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fields::{MetricField, OneOneField, Point};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
enum PotSource {
    Constant(Coeffs<f64>),
    Exprs(Vec<Expr>),
    Difference(Box<DerivationLaw>, Box<DerivationLaw>),
    Obata { j: OneOneField, inner: Box<PotentialTensor> },
    MetricSkew { g: MetricField, inner: Box<PotentialTensor> },
}

/// A (1,2)-tensor field `Q`, stored like connection coefficients:
/// `[k][i][j] = Q(∂_i, ∂_j)^k`.
#[derive(Clone, Debug)]
pub struct PotentialTensor {
    n: usize,
    source: PotSource,
}

impl PotentialTensor {
    pub fn constant(c: Coeffs<f64>) -> Self {
        PotentialTensor { n: c.dim(), source: PotSource::Constant(c) }
    }

    pub fn from_exprs(n: usize, exprs: Vec<Expr>) -> Result<Self> {
        if exprs.len() != n * n * n {
            return Err(Error::DimensionMismatch { expected: n * n * n, found: exprs.len() });
        }
        Ok(PotentialTensor { n, source: PotSource::Exprs(exprs) })
    }

    /// `a − b`.
    pub fn difference(a: &DerivationLaw, b: &DerivationLaw) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
        }
        Ok(PotentialTensor { n: a.dim(), source: PotSource::Difference(Box::new(a.clone()), Box::new(b.clone())) })
    }

    /// Metric-skew part `Q'` defined by `g(Q'(X,Y),Z) = ½(g(Q(X,Y),Z) − g(Q(X,Z),Y))`.
    pub fn metric_skew(&self, g: &MetricField) -> Result<Self> {
        if g.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: g.dim() });
        }
        Ok(PotentialTensor { n: self.n, source: PotSource::MetricSkew { g: g.clone(), inner: Box::new(self.clone()) } })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn differentiability(&self) -> Differentiability {
        match &self.source {
            PotSource::Constant(_) | PotSource::Exprs(_) => Differentiability::Ad,
            PotSource::Difference(a, b) => {
                if a.differentiability() == Differentiability::Ad && b.differentiability() == Differentiability::Ad {
                    Differentiability::Ad
                } else {
                    Differentiability::Numeric
                }
            }
            PotSource::Obata { inner, .. } | PotSource::MetricSkew { inner, .. } => inner.differentiability(),
        }
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Coeffs<S>> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.len() });
        }
        match &self.source {
            PotSource::Constant(c) => Ok(c.map(S::from_f64)),
            PotSource::Exprs(e) => {
                Ok(Coeffs::from_vec(self.n, e.iter().map(|x| x.evaluate(p)).collect::<Result<_>>()?))
            }
            PotSource::Difference(a, b) => Ok(a.gamma(p)?.sub(&b.gamma(p)?)),
            PotSource::Obata { j, inner } => Ok(obata_apply(&inner.eval(p)?, &j.eval(p)?)),
            PotSource::MetricSkew { g, inner } => {
                let gm = g.eval(p)?;
                let inv = gm.inverse().ok_or_else(|| Error::SingularMetric { point: p.iter().map(|x| x.value()).collect() })?;
                Ok(metric_skew_apply(&inner.eval(p)?, &gm, &inv))
            }
        }
    }
}

/// `(OQ)(X,Y) = ½(Q(X,Y) + J Q(X, JY))`.
pub(crate) fn obata_apply<S: Scalar>(q: &Coeffs<S>, j: &crate::linalg::Mat<S>) -> Coeffs<S> {
    let n = q.dim();
    // Q(∂_i, J∂_j)^a
    let qj = Coeffs::from_fn(n, |a, i, jj| {
        let mut acc = S::zero();
        for m in 0..n {
            acc += q.get(a, i, m) * j[(m, jj)];
        }
        acc
    });
    Coeffs::from_fn(n, |k, i, jj| {
        let mut acc = q.get(k, i, jj);
        for a in 0..n {
            acc += j[(k, a)] * qj.get(a, i, jj);
        }
        acc * 0.5
    })
}

pub(crate) fn metric_skew_apply<S: Scalar>(
    q: &Coeffs<S>,
    g: &crate::linalg::Mat<S>,
    inv: &crate::linalg::Mat<S>,
) -> Coeffs<S> {
    let n = q.dim();
    // low(i, j, l) = g(Q(∂_i, ∂_j), ∂_l)
    let low = Coeffs::from_fn(n, |i, jj, l| {
        let mut acc = S::zero();
        for k in 0..n {
            acc += g[(l, k)] * q.get(k, i, jj);
        }
        acc
    });
    Coeffs::from_fn(n, |k, i, jj| {
        let mut acc = S::zero();
        for l in 0..n {
            acc += inv[(k, l)] * (low.get(i, jj, l) - low.get(i, l, jj));
        }
        acc * 0.5
    })
}

/// Obata-type operator `O_J`, projecting onto potentials with
/// `Q(X, JY) = J Q(X, Y)`.
pub fn obata(j: &OneOneField, q: &PotentialTensor) -> Result<PotentialTensor> {
    if j.dim() != q.dim() {
        return Err(Error::DimensionMismatch { expected: q.dim(), found: j.dim() });
    }
    Ok(PotentialTensor { n: q.n, source: PotSource::Obata { j: j.clone(), inner: Box::new(q.clone()) } })
}

/// `max ‖Q(X, JY) − J Q(X, Y)‖` over basis pairs.
pub(crate) fn l_residual(q: &Coeffs<f64>, j: &crate::linalg::Mat<f64>) -> f64 {
    let n = q.dim();
    let mut worst = 0.0_f64;
    for k in 0..n {
        for i in 0..n {
            for jj in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    acc += q.get(k, i, m) * j[(m, jj)] - j[(k, m)] * q.get(m, i, jj);
                }
                worst = worst.max(acc.abs());
            }
        }
    }
    worst
}

/// `max |g(Q(X,Y),Z) + g(Q(X,Z),Y)|` over basis triples.
pub(crate) fn skew_residual(q: &Coeffs<f64>, g: &crate::linalg::Mat<f64>) -> f64 {
    let n = q.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for jj in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += g[(l, k)] * q.get(k, i, jj) + g[(jj, k)] * q.get(k, i, l);
                }
                worst = worst.max(acc.abs());
            }
        }
    }
    worst
}

/// Residuals of the two defining conditions of the natural class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaturalMembership {
    /// `max ‖Q(X, JY) − J Q(X, Y)‖`.
    pub commutes_with_j: f64,
    /// `max |g(Q(X,Y),Z) + g(Q(X,Z),Y)|`.
    pub metric_skew: f64,
    pub tol: f64,
}

impl NaturalMembership {
    pub fn is_member(&self) -> bool {
        self.commutes_with_j <= self.tol && self.metric_skew <= self.tol
    }
}

/// Tests whether `Q` commutes with `J` and is g-skew in its last two slots.
pub fn natural_membership(
    q: &PotentialTensor,
    j: &OneOneField,
    g: &MetricField,
    points: &[Point],
    tol: f64,
) -> Result<NaturalMembership> {
    let mut out = NaturalMembership { commutes_with_j: 0.0, metric_skew: 0.0, tol };
    for p in points {
        let c = q.eval::<f64>(p)?;
        out.commutes_with_j = out.commutes_with_j.max(l_residual(&c, &j.eval(p)?));
        out.metric_skew = out.metric_skew.max(skew_residual(&c, &g.eval(p)?));
    }
    Ok(out)
}
