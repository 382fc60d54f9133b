//! Derivation laws as connection-coefficient fields.
//!
//! `Γ[k][i][j]` is the `∂_k` component of `∇_{∂_i} ∂_j`. Every connection,
//! however it is defined, is materialized by applying its defining formula to
//! coordinate fields, so torsion, curvature and comparisons share one code path.

mod potential;
mod tensors;
mod well_adapted;

pub use potential::{natural_membership, obata, NaturalMembership, PotentialTensor};
pub use tensors::{
    covariant_derivative, covariant_deriv_metric, covariant_deriv_tensor11, curvature, is_adapted, nijenhuis,
    nijenhuis_basis, nijenhuis_via_connection, nijenhuis_via_connection_basis, torsion, AdaptedReport, Curvature,
};
pub use well_adapted::{well_adapted, SolverConfig, WellAdaptedSolution, WellAdaptedSolver};

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fields::{MatrixJet, MetricField, OneOneField};
use crate::linalg::Mat;
use crate::scalar::{seed, Scalar};

/// Rank-3 array indexed `[k][i][j]`, used for connection coefficients,
/// torsion, potentials and Nijenhuis tensors on basis pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Coeffs<S> {
    n: usize,
    data: Vec<S>,
}

impl<S: Scalar> Coeffs<S> {
    pub fn zeros(n: usize) -> Self {
        Coeffs { n, data: vec![S::zero(); n * n * n] }
    }

    pub fn from_vec(n: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), n * n * n);
        Coeffs { n, data }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(n * n * n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    data.push(f(k, i, j));
                }
            }
        }
        Coeffs { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> S {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: S) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    /// Vector `(T(∂_i, ∂_j)^k)_k`.
    pub fn vector(&self, i: usize, j: usize) -> Vec<S> {
        (0..self.n).map(|k| self.get(k, i, j)).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        Coeffs { n: self.n, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Coeffs { n: self.n, data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        Coeffs { n: self.n, data: self.data.iter().map(|&a| a * c).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(S) -> T) -> Coeffs<T> {
        Coeffs { n: self.n, data: self.data.iter().map(|&a| f(a)).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(libm::fabs(x.value())))
    }

    /// `T^k_{ij} − T^k_{ji}`.
    pub fn antisymmetrize(&self) -> Self {
        Coeffs::from_fn(self.n, |k, i, j| self.get(k, i, j) - self.get(k, j, i))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differentiability {
    /// Coefficients are closed-form in the field expressions; derivatives are exact.
    Ad,
    /// Coefficients are solved pointwise; derivatives use central differences.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Flat,
    LeviCivita,
    Schouten,
    Vranceanu,
    Nabla0,
    Crasmareanu,
    FirstCanonical,
    WellAdapted,
    Custom,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Flat => "flat",
            Provenance::LeviCivita => "levi-civita",
            Provenance::Schouten => "schouten",
            Provenance::Vranceanu => "vranceanu",
            Provenance::Nabla0 => "nabla0",
            Provenance::Crasmareanu => "crasmareanu",
            Provenance::FirstCanonical => "first-canonical",
            Provenance::WellAdapted => "well-adapted",
            Provenance::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    Flat,
    Custom(Vec<Expr>),
    LeviCivita(MetricField),
    Schouten { base: Box<DerivationLaw>, j: OneOneField },
    Vranceanu { base: Box<DerivationLaw>, j: OneOneField },
    Nabla0 { base: Box<DerivationLaw>, j: OneOneField },
    Crasmareanu { base: Box<DerivationLaw>, phi: OneOneField },
    Shifted { base: Box<DerivationLaw>, q: PotentialTensor },
    WellAdapted(Box<WellAdaptedSolver>),
}

/// A linear connection given by its coefficient field.
#[derive(Clone, Debug)]
pub struct DerivationLaw {
    n: usize,
    provenance: Provenance,
    source: Source,
}

/// Tolerance used to reject structures that are not `J² = I` / Golden at an
/// evaluation point.
const STRUCTURE_TOL: f64 = 1e-8;

impl DerivationLaw {
    /// `Γ ≡ 0`.
    pub fn flat(n: usize) -> Self {
        DerivationLaw { n, provenance: Provenance::Flat, source: Source::Flat }
    }

    /// Coefficients given directly as `n³` expressions in `[k][i][j]` order.
    pub fn custom(n: usize, coeffs: Vec<Expr>) -> Result<Self> {
        if coeffs.len() != n * n * n {
            return Err(Error::DimensionMismatch { expected: n * n * n, found: coeffs.len() });
        }
        Ok(DerivationLaw { n, provenance: Provenance::Custom, source: Source::Custom(coeffs) })
    }

    /// `self + Q`.
    pub fn shifted(&self, q: PotentialTensor) -> Result<Self> {
        if q.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: q.dim() });
        }
        Ok(DerivationLaw {
            n: self.n,
            provenance: Provenance::Custom,
            source: Source::Shifted { base: Box::new(self.clone()), q },
        })
    }

    pub(crate) fn from_solver(solver: WellAdaptedSolver) -> Self {
        DerivationLaw { n: solver.dim(), provenance: Provenance::WellAdapted, source: Source::WellAdapted(Box::new(solver)) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn differentiability(&self) -> Differentiability {
        match &self.source {
            Source::Flat | Source::Custom(_) | Source::LeviCivita(_) => Differentiability::Ad,
            Source::Schouten { base, .. }
            | Source::Vranceanu { base, .. }
            | Source::Nabla0 { base, .. }
            | Source::Crasmareanu { base, .. } => base.differentiability(),
            Source::Shifted { base, q } => {
                if base.differentiability() == Differentiability::Ad && q.differentiability() == Differentiability::Ad {
                    Differentiability::Ad
                } else {
                    Differentiability::Numeric
                }
            }
            Source::WellAdapted(_) => Differentiability::Numeric,
        }
    }

    /// Coefficients at a real point.
    pub fn coefficients(&self, p: &[f64]) -> Result<Coeffs<f64>> {
        self.gamma(p)
    }

    /// `∂_i Γ` for every coordinate `i`: exact for AD laws, central
    /// differences with step `fd_step` otherwise.
    pub fn coefficient_partials(&self, p: &[f64], fd_step: f64) -> Result<Vec<Coeffs<f64>>> {
        match self.differentiability() {
            Differentiability::Ad => (0..p.len())
                .map(|i| Ok(self.gamma(&seed(p, i))?.map(|d| d.eps)))
                .collect(),
            Differentiability::Numeric => (0..p.len())
                .map(|i| {
                    let mut fwd = p.to_vec();
                    let mut bwd = p.to_vec();
                    fwd[i] += fd_step;
                    bwd[i] -= fd_step;
                    Ok(self.gamma(&fwd)?.sub(&self.gamma(&bwd)?).scale(0.5 / fd_step))
                })
                .collect(),
        }
    }

    /// Coefficients at a generic scalar point. Pointwise-solved laws only
    /// evaluate at plain real points.
    pub fn gamma<S: Scalar>(&self, p: &[S]) -> Result<Coeffs<S>> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.len() });
        }
        match &self.source {
            Source::Flat => Ok(Coeffs::zeros(self.n)),
            Source::Custom(exprs) => {
                Ok(Coeffs::from_vec(self.n, exprs.iter().map(|e| e.evaluate(p)).collect::<Result<_>>()?))
            }
            Source::LeviCivita(g) => levi_civita_coeffs(g, p),
            Source::Schouten { base, j } => {
                let gamma = base.gamma(p)?;
                let jet = product_jet(j, p)?;
                Ok(schouten_coeffs(&gamma, &jet))
            }
            Source::Vranceanu { base, j } => {
                let gamma = base.gamma(p)?;
                let jet = product_jet(j, p)?;
                Ok(vranceanu_coeffs(&gamma, &jet))
            }
            Source::Nabla0 { base, j } => {
                let gamma = base.gamma(p)?;
                let jet = product_jet(j, p)?;
                Ok(nabla0_coeffs(&gamma, &jet))
            }
            Source::Crasmareanu { base, phi } => {
                let gamma = base.gamma(p)?;
                let jet = phi.jet(p)?;
                let m = &jet.value;
                let res = m.matmul(m).sub(m).sub(&Mat::identity(self.n)).max_abs();
                if !(res <= STRUCTURE_TOL) {
                    return Err(Error::NotGolden { point: values(p), residual: res });
                }
                Ok(crasmareanu_coeffs(&gamma, &jet))
            }
            Source::Shifted { base, q } => Ok(base.gamma(p)?.add(&q.eval(p)?)),
            Source::WellAdapted(solver) => {
                if !S::EXACT_REAL {
                    return Err(Error::NotDifferentiable);
                }
                let real = values(p);
                Ok(solver.coefficients(&real)?.map(S::from_f64))
            }
        }
    }
}

fn values<S: Scalar>(p: &[S]) -> Vec<f64> {
    p.iter().map(|x| x.value()).collect()
}

fn product_jet<S: Scalar>(j: &OneOneField, p: &[S]) -> Result<MatrixJet<S>> {
    let jet = j.jet(p)?;
    let m = &jet.value;
    let res = m.matmul(m).sub(&Mat::identity(m.rows())).max_abs();
    if !(res <= STRUCTURE_TOL) {
        return Err(Error::NotAlmostProduct { point: values(p), residual: res });
    }
    Ok(jet)
}

/// `(∇_{∂_i} T)^k_j = ∂_i T^k_j + Γ^k_{im} T^m_j − Γ^m_{ij} T^k_m` for every `i`.
pub fn covariant_tensor11<S: Scalar>(gamma: &Coeffs<S>, t: &MatrixJet<S>) -> Vec<Mat<S>> {
    let n = gamma.dim();
    (0..n)
        .map(|i| {
            Mat::from_fn(n, n, |k, j| {
                let mut acc = t.partials[i][(k, j)];
                for m in 0..n {
                    acc += gamma.get(k, i, m) * t.value[(m, j)];
                    acc -= gamma.get(m, i, j) * t.value[(k, m)];
                }
                acc
            })
        })
        .collect()
}

/// `(∇_{∂_i} g)_{jk} = ∂_i g_{jk} − Γ^m_{ij} g_{mk} − Γ^m_{ik} g_{jm}` for every `i`.
pub fn covariant_metric<S: Scalar>(gamma: &Coeffs<S>, g: &MatrixJet<S>) -> Vec<Mat<S>> {
    let n = gamma.dim();
    (0..n)
        .map(|i| {
            Mat::from_fn(n, n, |j, k| {
                let mut acc = g.partials[i][(j, k)];
                for m in 0..n {
                    acc -= gamma.get(m, i, j) * g.value[(m, k)];
                    acc -= gamma.get(m, i, k) * g.value[(j, m)];
                }
                acc
            })
        })
        .collect()
}

fn levi_civita_coeffs<S: Scalar>(g: &MetricField, p: &[S]) -> Result<Coeffs<S>> {
    let n = g.dim();
    let jet = g.jet(p)?;
    let inv = jet.value.inverse().ok_or_else(|| Error::SingularMetric { point: values(p) })?;
    let dg = |l: usize, i: usize, j: usize| jet.partials[l][(i, j)];
    Ok(Coeffs::from_fn(n, |k, i, j| {
        let mut acc = S::zero();
        for l in 0..n {
            acc += inv[(k, l)] * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
        }
        acc * 0.5
    }))
}

fn split_projectors<S: Scalar>(j: &MatrixJet<S>) -> [(Mat<S>, Vec<Mat<S>>); 2] {
    let n = j.value.rows();
    let id = Mat::identity(n);
    [
        (id.add(&j.value).scale(0.5), j.partials.iter().map(|d| d.scale(0.5)).collect()),
        (id.sub(&j.value).scale(0.5), j.partials.iter().map(|d| d.scale(-0.5)).collect()),
    ]
}

/// `∇^sc_X Y = P⁺ ∇_X P⁺Y + P⁻ ∇_X P⁻Y`.
fn schouten_coeffs<S: Scalar>(gamma: &Coeffs<S>, j: &MatrixJet<S>) -> Coeffs<S> {
    let n = gamma.dim();
    let mut out = Coeffs::zeros(n);
    for (p, dp) in split_projectors(j) {
        for i in 0..n {
            for jj in 0..n {
                // ∇_{∂_i}(P ∂_j)
                let v: Vec<S> = (0..n)
                    .map(|a| {
                        let mut acc = dp[i][(a, jj)];
                        for m in 0..n {
                            acc += gamma.get(a, i, m) * p[(m, jj)];
                        }
                        acc
                    })
                    .collect();
                for k in 0..n {
                    let mut acc = out.get(k, i, jj);
                    for (a, &va) in v.iter().enumerate() {
                        acc += p[(k, a)] * va;
                    }
                    out.set(k, i, jj, acc);
                }
            }
        }
    }
    out
}

/// `∇^v_X Y = P⁺∇_{P⁺X}P⁺Y + P⁻∇_{P⁻X}P⁻Y + P⁺[P⁻X, P⁺Y] + P⁻[P⁺X, P⁻Y]`.
fn vranceanu_coeffs<S: Scalar>(gamma: &Coeffs<S>, j: &MatrixJet<S>) -> Coeffs<S> {
    let n = gamma.dim();
    let [(pp, dpp), (pm, dpm)] = split_projectors(j);
    // ∇_{A∂_i}(B∂_j)
    let cov = |a: &Mat<S>, b: &Mat<S>, db: &[Mat<S>], i: usize, jj: usize| -> Vec<S> {
        (0..n)
            .map(|c| {
                let mut acc = S::zero();
                for bidx in 0..n {
                    let mut inner = db[bidx][(c, jj)];
                    for m in 0..n {
                        inner += gamma.get(c, bidx, m) * b[(m, jj)];
                    }
                    acc += a[(bidx, i)] * inner;
                }
                acc
            })
            .collect()
    };
    // [A∂_i, B∂_j]
    let bracket = |a: &Mat<S>, da: &[Mat<S>], b: &Mat<S>, db: &[Mat<S>], i: usize, jj: usize| -> Vec<S> {
        (0..n)
            .map(|c| {
                let mut acc = S::zero();
                for m in 0..n {
                    acc += a[(m, i)] * db[m][(c, jj)];
                    acc -= b[(m, jj)] * da[m][(c, i)];
                }
                acc
            })
            .collect()
    };
    let apply = |p: &Mat<S>, v: &[S], k: usize| -> S {
        let mut acc = S::zero();
        for (a, &va) in v.iter().enumerate() {
            acc += p[(k, a)] * va;
        }
        acc
    };
    Coeffs::from_fn(n, |k, i, jj| {
        let t1 = cov(&pp, &pp, &dpp, i, jj);
        let t2 = cov(&pm, &pm, &dpm, i, jj);
        let b1 = bracket(&pm, &dpm, &pp, &dpp, i, jj);
        let b2 = bracket(&pp, &dpp, &pm, &dpm, i, jj);
        apply(&pp, &t1, k) + apply(&pm, &t2, k) + apply(&pp, &b1, k) + apply(&pm, &b2, k)
    })
}

/// `∇⁰_X Y = ∇_X Y − ½ (∇_X J) J Y`.
fn nabla0_coeffs<S: Scalar>(gamma: &Coeffs<S>, j: &MatrixJet<S>) -> Coeffs<S> {
    let n = gamma.dim();
    let dj = covariant_tensor11(gamma, j);
    Coeffs::from_fn(n, |k, i, jj| {
        let mut corr = S::zero();
        for m in 0..n {
            corr += dj[i][(k, m)] * j.value[(m, jj)];
        }
        gamma.get(k, i, jj) - corr * 0.5
    })
}

/// `⅕(3∇_X Y + 2φ(∇_X φY) − φ(∇_X Y) − ∇_X φY)`.
fn crasmareanu_coeffs<S: Scalar>(gamma: &Coeffs<S>, phi: &MatrixJet<S>) -> Coeffs<S> {
    let n = gamma.dim();
    let f = &phi.value;
    // A^k_{ij} = (∇_{∂_i} φ∂_j)^k
    let a = Coeffs::from_fn(n, |k, i, j| {
        let mut acc = phi.partials[i][(k, j)];
        for m in 0..n {
            acc += gamma.get(k, i, m) * f[(m, j)];
        }
        acc
    });
    Coeffs::from_fn(n, |k, i, j| {
        let mut phi_a = S::zero();
        let mut phi_g = S::zero();
        for m in 0..n {
            phi_a += f[(k, m)] * a.get(m, i, j);
            phi_g += f[(k, m)] * gamma.get(m, i, j);
        }
        (gamma.get(k, i, j) * 3.0 + phi_a * 2.0 - phi_g - a.get(k, i, j)) * 0.2
    })
}

/// Levi-Civita connection of `g`.
pub fn levi_civita(g: &MetricField) -> DerivationLaw {
    DerivationLaw { n: g.dim(), provenance: Provenance::LeviCivita, source: Source::LeviCivita(g.clone()) }
}

/// Schouten-type connection of `base` adapted to the almost product structure `j`.
pub fn schouten(base: &DerivationLaw, j: &OneOneField) -> Result<DerivationLaw> {
    composite(base, j, Provenance::Schouten, |base, j| Source::Schouten { base, j })
}

/// Vrănceanu-type connection of `base` adapted to `j`.
pub fn vranceanu(base: &DerivationLaw, j: &OneOneField) -> Result<DerivationLaw> {
    composite(base, j, Provenance::Vranceanu, |base, j| Source::Vranceanu { base, j })
}

/// `∇⁰`-type connection: `∇ − ½ (∇J) J`.
pub fn nabla0_type(base: &DerivationLaw, j: &OneOneField) -> Result<DerivationLaw> {
    composite(base, j, Provenance::Nabla0, |base, j| Source::Nabla0 { base, j })
}

/// The same connection written in terms of the Golden structure `φ`.
pub fn crasmareanu_formula(base: &DerivationLaw, phi: &OneOneField) -> Result<DerivationLaw> {
    composite(base, phi, Provenance::Crasmareanu, |base, phi| Source::Crasmareanu { base, phi })
}

/// First canonical connection `∇^g − ½ (∇^g J) J`.
pub fn first_canonical(g: &MetricField, j: &OneOneField) -> Result<DerivationLaw> {
    let mut law = nabla0_type(&levi_civita(g), j)?;
    law.provenance = Provenance::FirstCanonical;
    Ok(law)
}

fn composite(
    base: &DerivationLaw,
    t: &OneOneField,
    provenance: Provenance,
    make: impl FnOnce(Box<DerivationLaw>, OneOneField) -> Source,
) -> Result<DerivationLaw> {
    if t.dim() != base.dim() {
        return Err(Error::DimensionMismatch { expected: base.dim(), found: t.dim() });
    }
    Ok(DerivationLaw { n: base.dim(), provenance, source: make(Box::new(base.clone()), t.clone()) })
}

/// Max coefficient distance between two laws over `points`.
pub fn coefficient_distance(a: &DerivationLaw, b: &DerivationLaw, points: &[crate::fields::Point]) -> Result<f64> {
    let mut d = 0.0_f64;
    for p in points {
        d = d.max(a.coefficients(p)?.sub(&b.coefficients(p)?).max_abs());
    }
    Ok(d)
}

#[cfg(test)]
mod tests;
