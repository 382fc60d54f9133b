//! Numerical checks of the structure theory: universal identities, iff-style
//! verdict agreements, integrability verdicts and connection coincidences.
//!
//! Every tensor identity is multilinear, so it is checked on coordinate basis
//! arguments `∂_i` at the sample points.

mod prolongation;

pub use prolongation::{first_prolongation_dim, MatrixLieAlgebra, Prolongation};

use alloc::vec::Vec;

use crate::connections::{
    covariant_deriv_metric, crasmareanu_formula, curvature, first_canonical, is_adapted, levi_civita, nabla0_type,
    nijenhuis_basis, nijenhuis_via_connection_basis, schouten, vranceanu, well_adapted, Coeffs, DerivationLaw,
    SolverConfig, WellAdaptedSolver,
};
use crate::error::Result;
use crate::expr::SQRT5;
use crate::fields::{sample_points, Point};
use crate::golden::{golden_of, product_metric_residual, product_of, purity_residual, GoldenPair};
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub points: usize,
    pub seed: u64,
    /// Tolerance for identities and verdicts computed from exact derivatives.
    pub tol: f64,
    /// Tolerance for the finite-difference curvature of the well-adapted connection.
    pub curvature_tol: f64,
    pub fd_step: f64,
    pub solver: SolverConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { points: 20, seed: 42, tol: 1e-8, curvature_tol: 1e-4, fd_step: 1e-5, solver: SolverConfig::default() }
    }
}

/// One row of a verification table.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub id: &'static str,
    /// The statement being checked, written as a formula.
    pub anchor: &'static str,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub worst_point: Option<Vec<f64>>,
    /// Holds for every valid structure (as opposed to a per-structure verdict).
    pub universal: bool,
}

impl IdentityCheck {
    fn new(id: &'static str, anchor: &'static str, universal: bool, tol: f64) -> Self {
        IdentityCheck { id, anchor, residual: 0.0, tol, pass: true, worst_point: None, universal }
    }

    fn record(&mut self, r: f64, p: &[f64]) {
        if self.worst_point.is_none() || r > self.residual || r.is_nan() && !self.residual.is_nan() {
            self.residual = r;
            self.worst_point = Some(p.to_vec());
        }
        self.pass = self.residual <= self.tol;
    }

    fn finish(mut self) -> Self {
        self.pass = self.residual <= self.tol;
        self
    }

    /// Verdict-agreement row: residual 1 when the two verdicts differ.
    fn agreement(id: &'static str, anchor: &'static str, agree: bool) -> Self {
        IdentityCheck {
            id,
            anchor,
            residual: if agree { 0.0 } else { 1.0 },
            tol: 0.0,
            pass: agree,
            worst_point: None,
            universal: true,
        }
    }
}

fn scan(
    points: &[Point],
    mut check: IdentityCheck,
    mut f: impl FnMut(&Point) -> Result<f64>,
) -> Result<IdentityCheck> {
    for p in points {
        let r = f(p)?;
        check.record(r, p);
    }
    Ok(check.finish())
}

fn max_abs_vec(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0_f64, |m, x| if x.is_nan() || m.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

/// `T(P∂_i, P∂_j)` for every basis pair.
fn restrict(t: &Coeffs<f64>, proj: &Mat<f64>) -> Coeffs<f64> {
    let n = t.dim();
    Coeffs::from_fn(n, |k, i, j| {
        let mut acc = 0.0;
        for u in 0..n {
            for w in 0..n {
                acc += proj[(u, i)] * proj[(w, j)] * t.get(k, u, w);
            }
        }
        acc
    })
}

fn split(j: &Mat<f64>) -> (Mat<f64>, Mat<f64>) {
    let id = Mat::identity(j.rows());
    (id.add(j).scale(0.5), id.sub(j).scale(0.5))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityVerdict {
    /// `max ‖N_φ(∂_i, ∂_j)‖_∞`.
    pub n_phi: f64,
    /// `max ‖N_J(∂_i, ∂_j)‖_∞`.
    pub n_j: f64,
    pub integrable: bool,
    /// The verdicts for `φ` and `J` agree.
    pub agree: bool,
    pub worst_point: Option<Vec<f64>>,
}

pub fn integrability_verdict(pair: &GoldenPair, points: &[Point], tol: f64) -> Result<IntegrabilityVerdict> {
    let mut n_phi = IdentityCheck::new("", "", false, tol);
    let mut n_j = 0.0_f64;
    for p in points {
        n_phi.record(nijenhuis_basis(pair.phi(), p)?.max_abs(), p);
        n_j = n_j.max(nijenhuis_basis(pair.j(), p)?.max_abs());
    }
    let integrable = n_phi.residual <= tol;
    Ok(IntegrabilityVerdict {
        n_phi: n_phi.residual,
        n_j,
        integrable,
        agree: integrable == (n_j <= tol),
        worst_point: n_phi.worst_point,
    })
}

pub fn check_nijenhuis_scaling(pair: &GoldenPair, points: &[Point], tol: f64) -> Result<IdentityCheck> {
    scan(points, IdentityCheck::new("nijenhuis_scaling", "N_J = (4/5) N_φ", true, tol), |p| {
        let a = nijenhuis_basis(pair.j(), p)?;
        let b = nijenhuis_basis(pair.phi(), p)?;
        Ok(a.sub(&b.scale(0.8)).max_abs())
    })
}

/// Torsion of the first canonical connection restricted to each
/// eigen-distribution, and the identity relating `T⁰` to `N_J`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionCriterion {
    /// `max ‖T⁰(P±∂_i, P±∂_j)‖`; passes when both restrictions vanish.
    pub restricted: IdentityCheck,
    /// `T⁰(JX, JY) + T⁰(X, Y) + ½ N_J(X, Y) = 0`.
    pub relation: IdentityCheck,
    /// The restricted-torsion verdict equals the Nijenhuis verdict.
    pub agrees_with_nijenhuis: bool,
}

pub fn check_torsion_criterion(pair: &GoldenPair, points: &[Point], tol: f64) -> Result<TorsionCriterion> {
    let fc = first_canonical(pair.metric(), pair.j())?;
    let n = pair.dim();
    let mut restricted =
        IdentityCheck::new("torsion_criterion", "T⁰(X, Y) = 0 for X, Y in D_φ and in D_φ̄", false, tol);
    let mut relation =
        IdentityCheck::new("torsion_nijenhuis_relation", "T⁰(JX, JY) + T⁰(X, Y) = −½ N_J(X, Y)", true, tol);
    for p in points {
        let t = fc.coefficients(p)?.antisymmetrize();
        let j = pair.j().eval::<f64>(p)?;
        let (pp, pm) = split(&j);
        relation.record(restricted_relation(&t, &j, &nijenhuis_basis(pair.j(), p)?, n), p);
        restricted.record(restrict(&t, &pp).max_abs().max(restrict(&t, &pm).max_abs()), p);
    }
    let restricted = restricted.finish();
    let verdict = integrability_verdict(pair, points, tol)?;
    Ok(TorsionCriterion {
        agrees_with_nijenhuis: restricted.pass == verdict.integrable,
        restricted,
        relation: relation.finish(),
    })
}

fn restricted_relation(t: &Coeffs<f64>, j: &Mat<f64>, nj: &Coeffs<f64>, n: usize) -> f64 {
    let tj = restrict(t, j);
    let mut worst = 0.0_f64;
    for k in 0..n {
        for a in 0..n {
            for b in 0..n {
                worst = max_abs_vec([worst, tj.get(k, a, b) + t.get(k, a, b) + 0.5 * nj.get(k, a, b)]);
            }
        }
    }
    worst
}

/// The three algebraic identities satisfied by `∇^g J` for any almost
/// product Riemannian structure.
pub fn check_levi_civita_dj_identities(pair: &GoldenPair, points: &[Point], tol: f64) -> Result<IdentityCheck> {
    let lc = levi_civita(pair.metric());
    let n = pair.dim();
    let check = IdentityCheck::new(
        "levi_civita_dj_identities",
        "g((∇_X J)Y, Z) = g((∇_X J)Z, Y); g((∇_X J)JY, Z) = −g((∇_X J)Y, JZ) = −g((∇_X J)JZ, Y)",
        true,
        tol,
    );
    scan(points, check, |p| {
        let g = pair.metric().eval::<f64>(p)?;
        let j = pair.j().eval::<f64>(p)?;
        let mut worst = 0.0_f64;
        for i in 0..n {
            let d = crate::connections::covariant_deriv_tensor11(&lc, pair.j(), i, p)?;
            let gd = g.matmul(&d);
            let gdj = gd.matmul(&j);
            let jtgd = j.transpose().matmul(&gd);
            for b in 0..n {
                for c in 0..n {
                    worst = max_abs_vec([
                        worst,
                        gd[(c, b)] - gd[(b, c)],
                        gdj[(c, b)] + jtgd[(c, b)],
                        gdj[(c, b)] + gdj[(b, c)],
                    ]);
                }
            }
        }
        Ok(worst)
    })
}

/// `g(T(X,Y),Z) − g(T(Z,Y),X) + g(T(JX,Y),JZ) − g(T(JZ,Y),JX)` on basis triples.
fn torsion_pairing(t: &Coeffs<f64>, g: &Mat<f64>, j: &Mat<f64>) -> Coeffs<f64> {
    let n = t.dim();
    let tl = Coeffs::from_fn(n, |a, b, c| (0..n).map(|k| g[(c, k)] * t.get(k, a, b)).sum::<f64>());
    Coeffs::from_fn(n, |a, b, c| {
        let mut e = tl.get(a, b, c) - tl.get(c, b, a);
        for u in 0..n {
            for w in 0..n {
                e += (j[(u, a)] * j[(w, c)] - j[(u, c)] * j[(w, a)]) * tl.get(u, b, w);
            }
        }
        e
    })
}

/// The pairing of `T⁰` with `J` equals `½ g(N_J(X, Z), Y)`.
pub fn check_torsion_nijenhuis_pairing(pair: &GoldenPair, points: &[Point], tol: f64) -> Result<IdentityCheck> {
    let fc = first_canonical(pair.metric(), pair.j())?;
    let n = pair.dim();
    let check = IdentityCheck::new(
        "torsion_nijenhuis_pairing",
        "g(T⁰(X,Y),Z) − g(T⁰(Z,Y),X) + g(T⁰(JX,Y),JZ) − g(T⁰(JZ,Y),JX) = ½ g(N_J(X,Z),Y)",
        true,
        tol,
    );
    scan(points, check, |p| {
        let g = pair.metric().eval::<f64>(p)?;
        let j = pair.j().eval::<f64>(p)?;
        let t = fc.coefficients(p)?.antisymmetrize();
        let nj = nijenhuis_basis(pair.j(), p)?;
        let lhs = torsion_pairing(&t, &g, &j);
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let rhs: f64 = 0.5 * (0..n).map(|k| g[(b, k)] * nj.get(k, a, c)).sum::<f64>();
                    worst = max_abs_vec([worst, lhs.get(a, b, c) - rhs]);
                }
            }
        }
        Ok(worst)
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct GStructureVerdict {
    /// `max ‖T^w‖` over points and basis pairs.
    pub torsion: f64,
    /// `max ‖R^w‖`, from finite-difference coefficient derivatives.
    pub curvature: f64,
    pub integrable: bool,
    pub torsion_point: Option<Vec<f64>>,
    pub curvature_point: Option<Vec<f64>>,
}

pub fn gstructure_integrability(pair: &GoldenPair, points: &[Point], cfg: &VerifyConfig) -> Result<GStructureVerdict> {
    let wa = well_adapted(pair, cfg.solver)?;
    let mut t = IdentityCheck::new("", "", false, cfg.tol);
    let mut r = IdentityCheck::new("", "", false, cfg.curvature_tol);
    for p in points {
        t.record(wa.coefficients(p)?.antisymmetrize().max_abs(), p);
        r.record(curvature(&wa, p, cfg.fd_step)?.max_abs(), p);
    }
    Ok(GStructureVerdict {
        integrable: t.residual <= cfg.tol && r.residual <= cfg.curvature_tol,
        torsion: t.residual,
        curvature: r.residual,
        torsion_point: t.worst_point,
        curvature_point: r.worst_point,
    })
}

pub const COINCIDENCE_LABELS: [&str; 3] = ["levi-civita", "first-canonical", "well-adapted"];

#[derive(Clone, Debug, PartialEq)]
pub struct Coincidence {
    /// Sup coefficient distances, ordered as [`COINCIDENCE_LABELS`].
    pub distances: [[f64; 3]; 3],
    pub phi_integrable: bool,
    pub levi_civita_adapted: bool,
    /// `∇⁰ = ∇^w` exactly when `φ` is integrable.
    pub first_canonical_clause: bool,
    /// `∇^g = ∇^w` exactly when `∇^g` is adapted, and then all three coincide.
    pub levi_civita_clause: bool,
}

pub fn connection_coincidence(pair: &GoldenPair, points: &[Point], tol: f64, solver: SolverConfig) -> Result<Coincidence> {
    let laws = [
        levi_civita(pair.metric()),
        first_canonical(pair.metric(), pair.j())?,
        well_adapted(pair, solver)?,
    ];
    let mut distances = [[0.0_f64; 3]; 3];
    for p in points {
        let gammas = laws.iter().map(|l| l.coefficients(p)).collect::<Result<Vec<_>>>()?;
        for a in 0..3 {
            for b in 0..3 {
                let d = gammas[a].sub(&gammas[b]).max_abs();
                distances[a][b] = max_abs_vec([distances[a][b], d]);
            }
        }
    }
    let phi_integrable = integrability_verdict(pair, points, tol)?.integrable;
    let levi_civita_adapted = is_adapted(&laws[0], pair.phi(), Some(pair.metric()), points, tol)?.adapted();
    let close = |a: usize, b: usize| distances[a][b] <= tol;
    let all = close(0, 1) && close(0, 2) && close(1, 2);
    Ok(Coincidence {
        distances,
        phi_integrable,
        levi_civita_adapted,
        first_canonical_clause: close(1, 2) == phi_integrable,
        levi_civita_clause: close(0, 2) == levi_civita_adapted && (!levi_civita_adapted || all),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureSummary {
    pub dim: usize,
    pub r: usize,
    pub s: usize,
    pub golden_residual: f64,
    pub purity_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdicts {
    pub phi_integrable: bool,
    pub g_structure_integrable: bool,
    pub levi_civita_adapted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub structure: StructureSummary,
    pub checks: Vec<IdentityCheck>,
    pub verdicts: Verdicts,
    pub coincidence: [[f64; 3]; 3],
    pub config: VerifyConfig,
}

impl VerificationReport {
    pub fn check(&self, id: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Rows that must pass for every valid structure.
    pub fn universal(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| c.universal)
    }
}

/// Only the universal identities; skips the verdict rows.
pub fn lemmas(pair: &GoldenPair, cfg: &VerifyConfig) -> Result<Vec<IdentityCheck>> {
    Ok(verify(pair, cfg)?.checks.into_iter().filter(|c| c.universal).collect())
}

/// Runs every check on `cfg.points` seeded sample points.
pub fn verify(pair: &GoldenPair, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let points = sample_points(pair.chart(), cfg.points.max(1), cfg.seed);
    let tol = cfg.tol;
    let n = pair.dim();
    let (phi, j, g) = (pair.phi(), pair.j(), pair.metric());
    let mut checks = Vec::new();

    checks.push(scan(&points, IdentityCheck::new("golden_relation", "φ² = φ + I", true, tol), |p| {
        crate::golden::check_golden(phi, p)
    })?);
    checks.push(scan(&points, IdentityCheck::new("induced_product_relation", "J² = I for J = (2φ − I)/√5", true, tol), |p| {
        crate::golden::check_product(j, p)
    })?);
    let phi_back = golden_of(&product_of(phi));
    let j_back = product_of(&golden_of(j));
    checks.push(scan(
        &points,
        IdentityCheck::new("golden_product_round_trip", "φ ↦ J ↦ φ and J ↦ φ ↦ J are identities", true, tol),
        |p| {
            let a = phi_back.eval::<f64>(p)?.sub(&phi.eval(p)?).max_abs();
            let b = j_back.eval::<f64>(p)?.sub(&j.eval(p)?).max_abs();
            Ok(a.max(b))
        },
    )?);
    let mut purity = IdentityCheck::new("purity", "g(φX, Y) = g(X, φY)", true, tol);
    let mut purity_expanded =
        IdentityCheck::new("purity_equivalent_form", "g(φX, φY) = g(φX, Y) + g(X, Y)", true, tol);
    let mut product_metric = IdentityCheck::new("product_metric_compatibility", "g(JX, JY) = g(X, Y)", true, tol);
    let mut projectors =
        IdentityCheck::new("projector_identities", "(P±)² = P±, P⁺P⁻ = 0, φP⁺ = φ·P⁺, φP⁻ = φ̄·P⁻", true, tol);
    for p in &points {
        let pr = purity_residual(phi, g, p)?;
        purity.record(pr.symmetric, p);
        purity_expanded.record(pr.expanded, p);
        product_metric.record(product_metric_residual(j, g, p)?, p);
        let jm = j.eval::<f64>(p)?;
        let f = phi.eval::<f64>(p)?;
        let (pp, pm) = split(&jm);
        let r = max_abs_vec([
            pp.matmul(&pp).sub(&pp).max_abs(),
            pm.matmul(&pm).sub(&pm).max_abs(),
            pp.matmul(&pm).max_abs(),
            f.matmul(&pp).sub(&pp.scale(crate::expr::PHI)).max_abs(),
            f.matmul(&pm).sub(&pm.scale(crate::expr::PHIBAR)).max_abs(),
        ]);
        projectors.record(r, p);
    }
    checks.extend([purity.finish(), purity_expanded.finish(), product_metric.finish(), projectors.finish()]);

    checks.push(check_nijenhuis_scaling(pair, &points, tol)?);
    let integrability = integrability_verdict(pair, &points, tol)?;
    checks.push(IdentityCheck::agreement(
        "nijenhuis_verdict_agreement",
        "φ integrable ⇔ J integrable",
        integrability.agree,
    ));

    let lc = levi_civita(g);
    checks.push(scan(
        &points,
        IdentityCheck::new("nijenhuis_via_connection", "N_J(X,Y) = (∇_X J)JY + (∇_{JX} J)Y − (∇_Y J)JX − (∇_{JY} J)X", true, tol),
        |p| Ok(nijenhuis_via_connection_basis(&lc, j, p, tol)?.sub(&nijenhuis_basis(j, p)?).max_abs()),
    )?);
    checks.push(scan(
        &points,
        IdentityCheck::new("levi_civita_compatibility", "∇^g g = 0 and T^g = 0", true, tol),
        |p| {
            let mut r = lc.coefficients(p)?.antisymmetrize().max_abs();
            for i in 0..n {
                r = max_abs_vec([r, covariant_deriv_metric(&lc, g, i, p)?.max_abs()]);
            }
            Ok(r)
        },
    )?);

    let sc = schouten(&lc, j)?;
    let vr = vranceanu(&lc, j)?;
    let n0 = nabla0_type(&lc, j)?;
    let cr = crasmareanu_formula(&lc, phi)?;
    let fc = first_canonical(g, j)?;
    let distance = |a: &DerivationLaw, b: &DerivationLaw, p: &Point| -> Result<f64> {
        Ok(a.coefficients(p)?.sub(&b.coefficients(p)?).max_abs())
    };
    checks.push(scan(
        &points,
        IdentityCheck::new("schouten_equals_nabla0", "P⁺∇_X P⁺Y + P⁻∇_X P⁻Y = ∇_X Y − ½(∇_X J)JY", true, tol),
        |p| distance(&sc, &n0, p),
    )?);
    checks.push(scan(
        &points,
        IdentityCheck::new(
            "nabla0_equals_crasmareanu",
            "∇_X Y − ½(∇_X J)JY = ⅕(3∇_X Y + 2φ∇_X φY − φ∇_X Y − ∇_X φY)",
            true,
            tol,
        ),
        |p| distance(&n0, &cr, p),
    )?);
    for (id, anchor, law) in [
        ("schouten_adapted", "∇^sc φ = 0 and ∇^sc J = 0", &sc),
        ("vranceanu_adapted", "∇^v φ = 0 and ∇^v J = 0", &vr),
    ] {
        let rep = is_adapted(law, phi, None, &points, tol)?;
        let mut c = IdentityCheck::new(id, anchor, true, tol);
        c.residual = rep.phi_residual.max(rep.j_residual);
        checks.push(c.finish());
    }
    let wa = well_adapted(pair, cfg.solver)?;
    let laws = [&lc, &sc, &vr, &n0, &cr, &fc, &wa];
    checks.push(scan(
        &points,
        IdentityCheck::new("adapted_equivalence", "∇φ = (√5/2) ∇J, so ∇φ = 0 ⇔ ∇J = 0", true, tol),
        |p| {
            let pj = phi.jet(p)?;
            let jj = j.jet(p)?;
            let mut worst = 0.0_f64;
            for law in laws {
                let gamma = law.coefficients(p)?;
                let dphi = crate::connections::covariant_tensor11(&gamma, &pj);
                let dj = crate::connections::covariant_tensor11(&gamma, &jj);
                for (a, b) in dphi.iter().zip(&dj) {
                    worst = max_abs_vec([worst, a.sub(&b.scale(SQRT5 / 2.0)).max_abs()]);
                }
            }
            Ok(worst)
        },
    )?);
    let fc_rep = is_adapted(&fc, phi, Some(g), &points, tol)?;
    let mut c = IdentityCheck::new("first_canonical_natural", "∇⁰φ = 0, ∇⁰J = 0, ∇⁰g = 0", true, tol);
    c.residual = max_abs_vec([fc_rep.phi_residual, fc_rep.j_residual, fc_rep.metric_residual.unwrap_or(0.0)]);
    checks.push(c.finish());

    let solver = WellAdaptedSolver::new(g, j, cfg.solver)?;
    let mut wa_conditions = IdentityCheck::new(
        "well_adapted_conditions",
        "∇^w J = 0, ∇^w g = 0, g(T^w(X,Y),Z) − g(T^w(Z,Y),X) = g(T^w(JZ,Y),JX) − g(T^w(JX,Y),JZ)",
        true,
        tol,
    );
    let mut wa_split = IdentityCheck::new(
        "well_adapted_split_conditions",
        "g(T^w(P±X,Y),P±Z) = g(T^w(P±Z,Y),P±X)",
        true,
        tol,
    );
    let mut wa_unique = IdentityCheck::new("well_adapted_uniqueness", "the defining linear system has trivial kernel", true, 0.0);
    let mut wa_torsion = IdentityCheck::new("well_adapted_torsion", "T^w = 0", false, tol);
    for p in &points {
        let s = solver.solve_at(p)?;
        wa_conditions.record(s.residual(), p);
        wa_split.record(s.split_residual, p);
        wa_unique.record(s.nullity as f64, p);
        wa_torsion.record(s.gamma.antisymmetrize().max_abs(), p);
    }
    checks.extend([wa_conditions.finish(), wa_split.finish(), wa_unique.finish()]);

    let torsion = check_torsion_criterion(pair, &points, tol)?;
    checks.push(torsion.relation.clone());
    checks.push(check_levi_civita_dj_identities(pair, &points, tol)?);
    checks.push(check_torsion_nijenhuis_pairing(pair, &points, tol)?);
    checks.push(IdentityCheck::agreement(
        "torsion_criterion_agreement",
        "φ integrable ⇔ T⁰ vanishes on D_φ and on D_φ̄",
        torsion.agrees_with_nijenhuis,
    ));

    let coincidence = connection_coincidence(pair, &points, tol, cfg.solver)?;
    checks.push(IdentityCheck::agreement(
        "first_canonical_coincidence_agreement",
        "∇⁰ = ∇^w ⇔ φ integrable",
        coincidence.first_canonical_clause,
    ));
    checks.push(IdentityCheck::agreement(
        "levi_civita_coincidence_agreement",
        "∇^g = ∇^w ⇔ ∇^g adapted, and then ∇^g = ∇⁰ = ∇^w",
        coincidence.levi_civita_clause,
    ));

    let mut phi_int = IdentityCheck::new("phi_nijenhuis_vanishes", "N_φ = 0", false, tol);
    phi_int.residual = integrability.n_phi;
    phi_int.worst_point = integrability.worst_point.clone();
    checks.push(phi_int.finish());
    checks.push(torsion.restricted);
    let lc_rep = is_adapted(&lc, phi, Some(g), &points, tol)?;
    let mut lc_adapted = IdentityCheck::new("levi_civita_adapted", "∇^g φ = 0", false, tol);
    lc_adapted.residual = lc_rep.phi_residual.max(lc_rep.j_residual);
    checks.push(lc_adapted.finish());
    checks.push(wa_torsion.finish());
    let mut wa_curv = IdentityCheck::new("well_adapted_curvature", "R^w = 0", false, cfg.curvature_tol);
    for p in &points {
        wa_curv.record(curvature(&wa, p, cfg.fd_step)?.max_abs(), p);
    }
    let wa_curv = wa_curv.finish();
    let g_structure_integrable = checks.iter().any(|c| c.id == "well_adapted_torsion" && c.pass) && wa_curv.pass;
    checks.push(wa_curv);
    for (id, anchor, a, b) in [
        ("first_canonical_equals_well_adapted", "∇⁰ = ∇^w", 1, 2),
        ("levi_civita_equals_well_adapted", "∇^g = ∇^w", 0, 2),
    ] {
        let mut c = IdentityCheck::new(id, anchor, false, tol);
        c.residual = coincidence.distances[a][b];
        checks.push(c.finish());
    }

    let (r, s) = pair.ranks();
    let structure = StructureSummary {
        dim: n,
        r,
        s,
        golden_residual: checks[0].residual,
        purity_residual: checks.iter().find(|c| c.id == "purity").map_or(0.0, |c| c.residual),
    };
    Ok(VerificationReport {
        structure,
        checks,
        verdicts: Verdicts {
            phi_integrable: integrability.integrable,
            g_structure_integrable,
            levi_civita_adapted: lc_rep.adapted(),
        },
        coincidence: coincidence.distances,
        config: *cfg,
    })
}

#[cfg(test)]
mod tests;
