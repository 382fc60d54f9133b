use golden_core::catalog::{self, StructureKind, Tensor};
use golden_core::connections::nijenhuis_basis;
use golden_core::expr::{PHI, PHIBAR};
use golden_core::fields::sample_points;
use golden_core::golden::{check_golden, check_product, purity_residual, ValidationConfig};
use golden_core::linalg::symmetric_eigenvalues;
use golden_core::verify::{integrability_verdict, verify, VerifyConfig};
use golden_core::Error;

#[test]
fn every_entry_validates_and_matches_documented_ranks() {
    for entry in catalog::fixed_entries() {
        let pair = entry.pair(&ValidationConfig::default()).unwrap();
        assert_eq!(pair.ranks(), entry.truth.ranks, "{}", entry.name);
        assert_eq!(catalog::by_name(&entry.name).unwrap(), entry);
    }
    assert_eq!(catalog::NAMES.len(), catalog::fixed_entries().len());
    assert!(matches!(catalog::by_name("klein_bottle"), Err(Error::UnknownEntry(_))));
}

#[test]
fn known_nijenhuis_values_hold_at_every_point() {
    for entry in catalog::fixed_entries() {
        let pair = entry.pair(&ValidationConfig::default()).unwrap();
        for known in &entry.truth.nijenhuis {
            let field = match known.tensor {
                Tensor::Phi => pair.phi(),
                Tensor::J => pair.j(),
            };
            for p in sample_points(&entry.chart, 20, 42) {
                let v = nijenhuis_basis(field, &p).unwrap().vector(known.args.0, known.args.1);
                for (a, b) in v.iter().zip(&known.value) {
                    assert!((a - b).abs() < 1e-8, "{}: {v:?}", entry.name);
                }
            }
        }
    }
}

#[test]
fn fibonacci_matrix() {
    let e = catalog::flat_fibonacci();
    assert_eq!(e.kind, StructureKind::Golden);
    assert_eq!(check_golden(&e.structure, &[0.4, 0.1]).unwrap(), 0.0);
    let ev = symmetric_eigenvalues(&e.structure.eval(&[0.0, 0.0]).unwrap());
    assert!((ev[0] - PHIBAR).abs() < 1e-14 && (ev[1] - PHI).abs() < 1e-14);
}

#[test]
fn twisted_book_is_pure_product() {
    let e = catalog::twisted_book();
    for p in sample_points(&e.chart, 20, 42) {
        assert!(check_product(&e.structure, &p).unwrap() < 1e-14);
    }
    let pair = e.pair(&ValidationConfig::default()).unwrap();
    for p in sample_points(&e.chart, 20, 42) {
        assert!(purity_residual(pair.phi(), pair.metric(), &p).unwrap().max() < 1e-12);
    }
}

#[test]
fn random_structures_are_valid() {
    for (n, r) in [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (4, 2), (4, 3)] {
        for seed in [0, 7, 12345] {
            let e = catalog::random_pure_structure(n, r, seed).unwrap();
            assert_eq!(e.name, format!("random_{n}_{r}_{seed}"));
            let pair = e.pair(&ValidationConfig::default()).unwrap();
            assert_eq!(pair.ranks(), (r, n - r));
            for p in sample_points(&e.chart, 20, 42) {
                assert!(check_golden(pair.phi(), &p).unwrap() < 1e-10);
                assert!(purity_residual(pair.phi(), pair.metric(), &p).unwrap().max() < 1e-10);
            }
        }
    }
    assert_eq!(catalog::random_pure_structure(3, 2, 7).unwrap(), catalog::random_pure_structure(3, 2, 7).unwrap());
    assert_ne!(catalog::random_pure_structure(3, 2, 7).unwrap(), catalog::random_pure_structure(3, 2, 8).unwrap());
    for (n, r) in [(0, 0), (3, 0), (3, 4), (5, 2)] {
        assert!(matches!(catalog::random_pure_structure(n, r, 1), Err(Error::InvalidRank(_))));
    }
}

#[test]
fn one_dimensional_distributions_are_integrable() {
    for seed in 0..5 {
        let e = catalog::random_pure_structure(2, 1, seed).unwrap();
        assert_eq!(e.truth.phi_integrable, Some(true));
        let pair = e.pair(&ValidationConfig::default()).unwrap();
        let pts = sample_points(&e.chart, 20, 42);
        assert!(integrability_verdict(&pair, &pts, 1e-8).unwrap().integrable);
    }
}

#[test]
fn random_3_2_7_matches_fixture() {
    let text = include_str!("fixtures/random_3_2_7.txt");
    let e = catalog::random_pure_structure(3, 2, 7).unwrap();
    let pair = e.pair(&ValidationConfig::default()).unwrap();
    let report = verify(&pair, &VerifyConfig::default()).unwrap();
    assert!(!report.verdicts.phi_integrable);
    let mut seen = 0;
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (id, value) = line.split_once('=').unwrap();
        let expected: f64 = value.trim().parse().unwrap();
        let got = report.check(id.trim()).unwrap().residual;
        assert!((got - expected).abs() <= 1e-12 * expected.abs(), "{id}: {got:e} vs {expected:e}");
        seen += 1;
    }
    assert_eq!(seen, 7);
}
