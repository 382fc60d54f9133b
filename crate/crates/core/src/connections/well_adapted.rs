//! Pointwise solve for the well-adapted connection `∇^w = ∇⁰ + Q`.
//!
//! `Q` is the unique potential that commutes with `J`, is g-skew in its last
//! two slots, and makes the torsion satisfy
//! `g(T(X,Y),Z) − g(T(Z,Y),X) = g(T(JZ,Y),JX) − g(T(JX,Y),JZ)`.
//! All three conditions are linear in `Q`, so each point is a small
//! least-squares problem solved by column-pivoted QR.

use alloc::vec;
use alloc::vec::Vec;

use super::{covariant_metric, covariant_tensor11, first_canonical, Coeffs, DerivationLaw};
use crate::error::{Error, Result};
use crate::fields::{MetricField, OneOneField};
use crate::golden::GoldenPair;
use crate::linalg::{Mat, PivotedQr};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Largest accepted residual of the solved system and of `∇^w g`, `∇^w J`.
    pub residual_tol: f64,
    /// Relative threshold on the QR diagonal used to decide the rank.
    pub rank_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { residual_tol: 1e-8, rank_tol: 1e-10 }
    }
}

#[derive(Clone, Debug)]
pub struct WellAdaptedSolver {
    g: MetricField,
    j: OneOneField,
    base: DerivationLaw,
    config: SolverConfig,
}

/// Everything computed while solving at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct WellAdaptedSolution {
    pub gamma: Coeffs<f64>,
    pub potential: Coeffs<f64>,
    /// Dimension of the solution space of the homogeneous system.
    pub nullity: usize,
    /// `max |M q − b|` of the stacked linear system.
    pub system_residual: f64,
    /// `max ‖∇^w g‖`.
    pub metric_residual: f64,
    /// `max ‖∇^w J‖`.
    pub product_residual: f64,
    /// Residual of the torsion condition.
    pub torsion_residual: f64,
    /// Residual of the same condition restricted to each eigen-distribution.
    pub split_residual: f64,
}

impl WellAdaptedSolution {
    pub fn residual(&self) -> f64 {
        self.system_residual.max(self.metric_residual).max(self.product_residual).max(self.torsion_residual)
    }
}

fn lower(t: &Coeffs<f64>, g: &Mat<f64>) -> Coeffs<f64> {
    let n = t.dim();
    // tl(a, b, c) = g(T(e_a, e_b), e_c)
    Coeffs::from_fn(n, |a, b, c| (0..n).map(|k| g[(c, k)] * t.get(k, a, b)).sum())
}

/// `E(a,b,c)` of the torsion condition for all basis triples.
fn torsion_condition(t: &Coeffs<f64>, g: &Mat<f64>, j: &Mat<f64>) -> Vec<f64> {
    let n = t.dim();
    let tl = lower(t, g);
    let mut out = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut e = tl.get(a, b, c) - tl.get(c, b, a);
                for u in 0..n {
                    for w in 0..n {
                        e += (j[(u, a)] * j[(w, c)] - j[(u, c)] * j[(w, a)]) * tl.get(u, b, w);
                    }
                }
                out.push(e);
            }
        }
    }
    out
}

/// Torsion condition restricted to `X, Z` in the image of `proj`.
fn split_condition(t: &Coeffs<f64>, g: &Mat<f64>, proj: &Mat<f64>) -> f64 {
    let n = t.dim();
    let tl = lower(t, g);
    let mut worst = 0.0_f64;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut e = 0.0;
                for u in 0..n {
                    for w in 0..n {
                        e += (proj[(u, a)] * proj[(w, c)] - proj[(u, c)] * proj[(w, a)]) * tl.get(u, b, w);
                    }
                }
                worst = worst.max(e.abs());
            }
        }
    }
    worst
}

fn apply_system(q: &Coeffs<f64>, g: &Mat<f64>, j: &Mat<f64>) -> Vec<f64> {
    let n = q.dim();
    let mut out = Vec::with_capacity(3 * n * n * n);
    for k in 0..n {
        for i in 0..n {
            for jj in 0..n {
                let mut acc = 0.0;
                for m in 0..n {
                    acc += q.get(k, i, m) * j[(m, jj)] - j[(k, m)] * q.get(m, i, jj);
                }
                out.push(acc);
            }
        }
    }
    for i in 0..n {
        for jj in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += g[(l, k)] * q.get(k, i, jj) + g[(jj, k)] * q.get(k, i, l);
                }
                out.push(acc);
            }
        }
    }
    out.extend(torsion_condition(&q.antisymmetrize(), g, j));
    out
}

impl WellAdaptedSolver {
    pub fn new(g: &MetricField, j: &OneOneField, config: SolverConfig) -> Result<Self> {
        Ok(WellAdaptedSolver { g: g.clone(), j: j.clone(), base: first_canonical(g, j)?, config })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn solve_at(&self, p: &[f64]) -> Result<WellAdaptedSolution> {
        let n = self.dim();
        let unknowns = n * n * n;
        let base = self.base.coefficients(p)?;
        let gj = self.g.jet(p)?;
        let jj = self.j.jet(p)?;
        let (g, j) = (&gj.value, &jj.value);

        let mut columns = Vec::with_capacity(unknowns);
        for u in 0..unknowns {
            let mut unit = vec![0.0; unknowns];
            unit[u] = 1.0;
            columns.push(apply_system(&Coeffs::from_vec(n, unit), g, j));
        }
        let rows = columns[0].len();
        let m = Mat::from_fn(rows, unknowns, |r, c| columns[c][r]);
        let mut rhs = vec![0.0; rows];
        for (slot, e) in rhs[2 * unknowns..].iter_mut().zip(torsion_condition(&base.antisymmetrize(), g, j)) {
            *slot = -e;
        }

        let qr = PivotedQr::new(&m);
        let rank = qr.rank(self.config.rank_tol);
        let nullity = unknowns - rank;
        if nullity > 0 {
            return Err(Error::NonUniqueSolution { point: p.to_vec(), nullity });
        }
        let q = Coeffs::from_vec(n, qr.solve(&rhs, rank));
        let fitted = m.mul_vec(q.as_slice());
        let system_residual = fitted.iter().zip(&rhs).fold(0.0_f64, |w, (a, b)| w.max((a - b).abs()));

        let gamma = base.add(&q);
        let worst = |ms: Vec<Mat<f64>>| ms.iter().fold(0.0_f64, |w, x| w.max(x.max_abs()));
        let torsion = gamma.antisymmetrize();
        let id = Mat::identity(n);
        let solution = WellAdaptedSolution {
            metric_residual: worst(covariant_metric(&gamma, &gj)),
            product_residual: worst(covariant_tensor11(&gamma, &jj)),
            torsion_residual: torsion_condition(&torsion, g, j).iter().fold(0.0_f64, |w, x| w.max(x.abs())),
            split_residual: split_condition(&torsion, g, &id.add(j).scale(0.5))
                .max(split_condition(&torsion, g, &id.sub(j).scale(0.5))),
            gamma,
            potential: q,
            nullity,
            system_residual,
        };
        let residual = solution.residual();
        if !(residual <= self.config.residual_tol) {
            return Err(Error::SolverResidualTooLarge { point: p.to_vec(), residual });
        }
        Ok(solution)
    }

    pub fn coefficients(&self, p: &[f64]) -> Result<Coeffs<f64>> {
        Ok(self.solve_at(p)?.gamma)
    }
}

/// The well-adapted connection of a validated pair.
pub fn well_adapted(pair: &GoldenPair, config: SolverConfig) -> Result<DerivationLaw> {
    Ok(DerivationLaw::from_solver(WellAdaptedSolver::new(pair.metric(), pair.j(), config)?))
}
