use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::catalog::{self, CatalogEntry};
use crate::golden::ValidationConfig;

fn setup(entry: &CatalogEntry) -> (GoldenPair, Vec<Point>) {
    let pair = entry.pair(&ValidationConfig::default()).unwrap();
    let points = sample_points(pair.chart(), 20, 42);
    (pair, points)
}

#[test]
fn integrability_of_catalog_entries() {
    let (flat, pts) = setup(&catalog::flat_fibonacci());
    let v = integrability_verdict(&flat, &pts, 1e-8).unwrap();
    assert!(v.integrable && v.agree && v.n_phi == 0.0);

    let (tw, pts) = setup(&catalog::twisted_book());
    let v = integrability_verdict(&tw, &pts, 1e-8).unwrap();
    assert!(!v.integrable && v.agree);
    assert!((v.n_phi - 5.0).abs() < 1e-12 && (v.n_j - 4.0).abs() < 1e-12);

    let (pe, pts) = setup(&catalog::product_example());
    assert!(integrability_verdict(&pe, &pts, 1e-8).unwrap().n_phi < 1e-9);
}

#[test]
fn torsion_criterion_on_twisted_book() {
    let (tw, pts) = setup(&catalog::twisted_book());
    let c = check_torsion_criterion(&tw, &pts, 1e-8).unwrap();
    assert!(c.restricted.residual >= 0.5 && !c.restricted.pass);
    assert!(c.relation.pass && c.relation.residual < 1e-8);
    assert!(c.agrees_with_nijenhuis);

    let (flat, pts) = setup(&catalog::flat_fibonacci());
    let c = check_torsion_criterion(&flat, &pts, 1e-8).unwrap();
    assert!(c.restricted.pass && c.agrees_with_nijenhuis);
}

#[test]
fn universal_identities_on_random_structure() {
    let (pair, pts) = setup(&catalog::random_pure_structure(3, 2, 7).unwrap());
    assert!(check_levi_civita_dj_identities(&pair, &pts, 1e-9).unwrap().pass);
    assert!(check_torsion_nijenhuis_pairing(&pair, &pts, 1e-8).unwrap().pass);
    assert!(check_nijenhuis_scaling(&pair, &pts, 1e-8).unwrap().pass);
    assert!(check_torsion_criterion(&pair, &pts, 1e-8).unwrap().relation.pass);
}

#[test]
fn pairing_has_expected_magnitude_on_twisted_book() {
    let e = catalog::twisted_book();
    let (pair, pts) = setup(&e);
    let fc = first_canonical(pair.metric(), pair.j()).unwrap();
    for p in &pts {
        let t = fc.coefficients(p).unwrap().antisymmetrize();
        let lhs = torsion_pairing(&t, &pair.metric().eval(p).unwrap(), &pair.j().eval(p).unwrap());
        // X = ∂x, Y = ∂z, Z = ∂y: ½ g(N_J(∂x, ∂y), ∂z) = ½ g(4∂z, ∂z) = 2
        assert!((lhs.get(0, 2, 1) - 2.0).abs() < 1e-12);
    }
    assert!(check_torsion_nijenhuis_pairing(&pair, &pts, 1e-8).unwrap().pass);
}

#[test]
fn g_structure_verdicts() {
    let cfg = VerifyConfig::default();
    let (flat, pts) = setup(&catalog::flat_fibonacci());
    let v = gstructure_integrability(&flat, &pts, &cfg).unwrap();
    assert!(v.integrable && v.torsion == 0.0 && v.curvature == 0.0);

    let (tw, pts) = setup(&catalog::twisted_book());
    assert!(!gstructure_integrability(&tw, &pts, &cfg).unwrap().integrable);

    // φ integrable but the metric is curved
    let (pe, pts) = setup(&catalog::product_example());
    let v = gstructure_integrability(&pe, &pts, &cfg).unwrap();
    assert!(v.torsion < 1e-12 && v.curvature > 1e-2 && !v.integrable);
}

#[test]
fn coincidence_clauses() {
    let tol = 1e-8;
    let sc = SolverConfig::default();
    let (flat, pts) = setup(&catalog::flat_fibonacci());
    let c = connection_coincidence(&flat, &pts, tol, sc).unwrap();
    assert!(c.distances.iter().flatten().all(|d| *d < 1e-10));
    assert!(c.first_canonical_clause && c.levi_civita_clause && c.phi_integrable && c.levi_civita_adapted);

    let (tw, pts) = setup(&catalog::twisted_book());
    let c = connection_coincidence(&tw, &pts, tol, sc).unwrap();
    assert!(c.distances[1][2] > 1e-3 && !c.phi_integrable);
    assert!(c.first_canonical_clause && c.levi_civita_clause);

    let (inp, pts) = setup(&catalog::integrable_nonparallel());
    let c = connection_coincidence(&inp, &pts, tol, sc).unwrap();
    assert!(c.distances[1][2] < 1e-6 && c.distances[0][2] > 1e-3);
    assert!(c.first_canonical_clause && c.levi_civita_clause);

    let (pe, pts) = setup(&catalog::product_example());
    let c = connection_coincidence(&pe, &pts, tol, sc).unwrap();
    assert!(c.distances.iter().flatten().all(|d| *d < 1e-9));
}

#[test]
fn full_reports_match_ground_truth() {
    for entry in catalog::fixed_entries() {
        let (pair, _) = setup(&entry);
        let report = verify(&pair, &VerifyConfig::default()).unwrap();
        for c in report.universal() {
            assert!(c.pass, "{}: {} residual {}", entry.name, c.id, c.residual);
        }
        assert_eq!(Some(report.verdicts.phi_integrable), entry.truth.phi_integrable, "{}", entry.name);
        assert_eq!(Some(report.verdicts.levi_civita_adapted), entry.truth.levi_civita_adapted, "{}", entry.name);
        assert_eq!((report.structure.r, report.structure.s), entry.truth.ranks);
        let mut ids: Vec<&str> = report.checks.iter().map(|c| c.id).collect();
        let total = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), total, "duplicate check ids");
    }
}

#[test]
fn reports_are_deterministic_and_monotone_in_tolerance() {
    let (pair, _) = setup(&catalog::twisted_book());
    let cfg = VerifyConfig { points: 5, ..VerifyConfig::default() };
    let a = verify(&pair, &cfg).unwrap();
    assert_eq!(a, verify(&pair, &cfg).unwrap());
    let strict = verify(&pair, &VerifyConfig { tol: 1e-15, ..cfg }).unwrap();
    for (s, l) in strict.checks.iter().zip(&a.checks) {
        assert_eq!(s.id, l.id);
        if s.pass && s.tol > 0.0 {
            assert!(l.pass, "{}", s.id);
        }
    }
    let lem = lemmas(&pair, &cfg).unwrap();
    assert!(lem.iter().all(|c| c.universal) && lem.len() < a.checks.len());
}

#[test]
fn degenerate_structure_reduces_to_levi_civita() {
    let entry = catalog::random_pure_structure(3, 3, 11).unwrap();
    let (pair, pts) = setup(&entry);
    assert_eq!(pair.ranks(), (3, 0));
    let c = connection_coincidence(&pair, &pts, 1e-8, SolverConfig::default()).unwrap();
    assert!(c.distances.iter().flatten().all(|d| *d < 1e-9));
}

#[test]
fn prolongations() {
    let dim = |a: MatrixLieAlgebra| first_prolongation_dim(&a);
    for n in 2..=4 {
        let p = dim(MatrixLieAlgebra::orthogonal(n).unwrap());
        assert_eq!(p.dimension, 0);
        assert!(p.transpose_invariant && p.admits_functorial_connection());
    }
    let p = dim(MatrixLieAlgebra::orthogonal_pair(2, 1).unwrap());
    assert_eq!(p.dimension, 0);
    assert!(p.admits_functorial_connection());
    let p = dim(MatrixLieAlgebra::general_linear_pair(1, 1).unwrap());
    assert_eq!(p.dimension, 2);
    assert!(p.transpose_invariant && !p.admits_functorial_connection());
    // gl(n)⁽¹⁾ is the space of symmetric bilinear maps ℝⁿ × ℝⁿ → ℝⁿ
    assert_eq!(dim(MatrixLieAlgebra::general_linear(2).unwrap()).dimension, 6);
    assert_eq!(dim(MatrixLieAlgebra::general_linear(3).unwrap()).dimension, 18);
}

#[test]
fn lie_algebra_validation() {
    let o3 = MatrixLieAlgebra::orthogonal(3).unwrap();
    assert_eq!(o3.dim(), 3);
    assert!(o3.closure_residual() < 1e-12);
    let b = o3.basis()[0].clone();
    assert!(matches!(
        MatrixLieAlgebra::new(3, vec![b.clone(), b.scale(2.0)]),
        Err(crate::Error::DependentBasis)
    ));
    let mut upper = Mat::zeros(2, 2);
    upper[(0, 1)] = 1.0;
    let strictly_upper = MatrixLieAlgebra::new(2, vec![upper]).unwrap();
    assert!(!strictly_upper.transpose_invariant());
    assert!(matches!(MatrixLieAlgebra::orthogonal_pair(0, 2), Err(crate::Error::InvalidRank(_))));
}
