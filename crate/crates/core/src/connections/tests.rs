use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::fields::{sample_points, ChartSpec, Point, VectorField, VectorFieldEval};
use crate::golden::{golden_of, GoldenPair, ValidationConfig};
use crate::scalar::Dual;

fn twisted() -> (ChartSpec, OneOneField, MetricField) {
    let c = ChartSpec::new(&["x", "y", "z"]).unwrap();
    let j = OneOneField::parse(&c, &[["1", "0", "0"], ["0", "1", "0"], ["0", "2*x", "-1"]]).unwrap();
    let g = MetricField::parse(&c, &[["1", "0", "0"], ["0", "1 + x^2", "-x"], ["0", "-x", "1"]]).unwrap();
    (c, j, g)
}

fn pts(c: &ChartSpec) -> Vec<Point> {
    sample_points(c, 6, 7)
}

#[test]
fn levi_civita_of_polar_metric() {
    let c = ChartSpec::with_box(&["r", "t"], vec![(0.5, 2.0), (-1.0, 1.0)]).unwrap();
    let g = MetricField::parse(&c, &[["1", "0"], ["0", "r^2"]]).unwrap();
    let lc = levi_civita(&g);
    let gamma = lc.coefficients(&[1.5, 0.3]).unwrap();
    assert!((gamma.get(0, 1, 1) + 1.5).abs() < 1e-15);
    assert!((gamma.get(1, 0, 1) - 1.0 / 1.5).abs() < 1e-15);
    assert!((gamma.get(1, 1, 0) - 1.0 / 1.5).abs() < 1e-15);
    assert_eq!(gamma.get(0, 0, 0), 0.0);
    assert_eq!(levi_civita(&MetricField::euclidean(3)).coefficients(&[0.1, 0.2, 0.3]).unwrap().max_abs(), 0.0);
}

#[test]
fn levi_civita_is_metric_and_torsion_free() {
    let c = ChartSpec::new(&["x", "y"]).unwrap();
    let g = MetricField::parse(&c, &[["2 + sin(x*y)", "x/3"], ["x/3", "1 + exp(y)"]]).unwrap();
    let lc = levi_civita(&g);
    for p in pts(&c) {
        assert!(lc.coefficients(&p).unwrap().antisymmetrize().max_abs() < 1e-15);
        for i in 0..2 {
            assert!(covariant_deriv_metric(&lc, &g, i, &p).unwrap().max_abs() < 1e-14);
        }
    }
}

#[test]
fn sphere_curvature() {
    let c = ChartSpec::with_box(&["th", "ph"], vec![(0.3, 2.8), (-1.0, 1.0)]).unwrap();
    let g = MetricField::parse(&c, &[["1", "0"], ["0", "sin(th)^2"]]).unwrap();
    let lc = levi_civita(&g);
    let p = [0.9, 0.1];
    let r = curvature(&lc, &p, 1e-5).unwrap();
    let s2 = libm::sin(0.9) * libm::sin(0.9);
    // R(∂θ,∂φ)∂φ = sin²θ ∂θ
    assert!((r.get(0, 1, 0, 1) - s2).abs() < 1e-13);
    assert!((r.get(0, 1, 1, 0) + s2).abs() < 1e-13);
    assert!((r.get(1, 0, 0, 1) + 1.0).abs() < 1e-13);
}

#[test]
fn nijenhuis_of_twisted_structure() {
    let (c, j, _) = twisted();
    let phi = golden_of(&j);
    let dx = VectorField::coordinate(3, 0);
    let dy = VectorField::coordinate(3, 1);
    for p in pts(&c) {
        let nj = nijenhuis(&j, &dx, &dy, &p).unwrap();
        assert_eq!(nj, vec![0.0, 0.0, 4.0]);
        let nphi = nijenhuis(&phi, &dx, &dy, &p).unwrap();
        assert!((nphi[2] - 5.0).abs() < 1e-12 && nphi[0].abs() < 1e-12 && nphi[1].abs() < 1e-12);
        let basis = nijenhuis_basis(&j, &p).unwrap();
        assert_eq!(basis.vector(0, 1), nj);
        assert_eq!(basis.vector(1, 0), vec![0.0, 0.0, -4.0]);
        for (a, b) in [(0, 2), (1, 2), (2, 2)] {
            assert!(basis.vector(a, b).iter().all(|x| *x == 0.0));
        }
    }
}

#[test]
fn nijenhuis_general_fields_match_basis() {
    let (c, j, g) = twisted();
    let x = VectorField::parse(&c, &["y", "1 + z^2", "x*y"]).unwrap();
    let y = VectorField::parse(&c, &["cos(z)", "x", "1"]).unwrap();
    let lc = levi_civita(&g);
    for p in pts(&c) {
        let direct = nijenhuis(&j, &x, &y, &p).unwrap();
        let basis = nijenhuis_basis(&j, &p).unwrap();
        let xv = x.eval_at(&p[..]).unwrap();
        let yv = y.eval_at(&p[..]).unwrap();
        let via = nijenhuis_via_connection(&lc, &j, &x, &y, &p, 1e-12).unwrap();
        for k in 0..3 {
            let mut tensorial = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    tensorial += xv[a] * yv[b] * basis.get(k, a, b);
                }
            }
            assert!((direct[k] - tensorial).abs() < 1e-12);
            assert!((direct[k] - via[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn via_connection_requires_torsion_free() {
    let (_, j, _) = twisted();
    let mut exprs = vec![Expr::lit(0.0); 27];
    exprs[1] = Expr::lit(1.0);
    let law = DerivationLaw::custom(3, exprs).unwrap();
    let dx = VectorField::coordinate(3, 0);
    assert!(matches!(
        nijenhuis_via_connection(&law, &j, &dx, &dx, &[0.0; 3], 1e-12),
        Err(Error::NotTorsionFree { .. })
    ));
}

#[test]
fn adapted_connections_of_twisted_structure() {
    let (c, j, g) = twisted();
    let phi = golden_of(&j);
    let points = pts(&c);
    let lc = levi_civita(&g);
    let sc = schouten(&lc, &j).unwrap();
    let vr = vranceanu(&lc, &j).unwrap();
    let n0 = nabla0_type(&lc, &j).unwrap();
    let cr = crasmareanu_formula(&lc, &phi).unwrap();
    for law in [&sc, &vr, &n0, &cr] {
        let rep = is_adapted(law, &phi, None, &points, 1e-12).unwrap();
        assert!(rep.adapted() && rep.consistent(), "{:?} {rep:?}", law.provenance());
    }
    assert!(coefficient_distance(&sc, &n0, &points).unwrap() < 1e-13);
    assert!(coefficient_distance(&n0, &cr, &points).unwrap() < 1e-13);
    let fc = first_canonical(&g, &j).unwrap();
    assert_eq!(fc.provenance(), Provenance::FirstCanonical);
    assert!(is_adapted(&fc, &phi, Some(&g), &points, 1e-12).unwrap().adapted());
    let lc_rep = is_adapted(&lc, &phi, Some(&g), &points, 1e-12).unwrap();
    assert!(!lc_rep.adapted() && lc_rep.consistent());
}

#[test]
fn first_canonical_torsion_on_plus_distribution() {
    let (c, j, g) = twisted();
    let fc = first_canonical(&g, &j).unwrap();
    for p in pts(&c) {
        let t = fc.coefficients(&p).unwrap().antisymmetrize();
        let x = p[0];
        // P⁺∂x = ∂x, P⁺∂y = ∂y + x∂z
        let ty: Vec<f64> = (0..3).map(|k| t.get(k, 0, 1) + x * t.get(k, 0, 2)).collect();
        assert!(ty[0].abs() < 1e-13 && ty[1].abs() < 1e-13);
        assert!((ty[2] + 1.0).abs() < 1e-13);
    }
}

#[test]
fn structure_is_checked_at_evaluation() {
    let c = ChartSpec::new(&["x", "y"]).unwrap();
    let not_product = OneOneField::parse(&c, &[["2", "0"], ["0", "1"]]).unwrap();
    let sc = schouten(&DerivationLaw::flat(2), &not_product).unwrap();
    assert!(matches!(sc.coefficients(&[0.0, 0.0]), Err(Error::NotAlmostProduct { .. })));
    let cr = crasmareanu_formula(&DerivationLaw::flat(2), &not_product).unwrap();
    assert!(matches!(cr.coefficients(&[0.0, 0.0]), Err(Error::NotGolden { .. })));
    assert!(matches!(
        schouten(&DerivationLaw::flat(3), &not_product),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn obata_projection_lands_in_natural_class() {
    let (c, j, g) = twisted();
    let points = pts(&c);
    let exprs: Vec<Expr> = (0..27)
        .map(|i| c.parse(&alloc::format!("{} * x + sin({} * y) - z^2 / {}", i as f64 / 7.0, i % 5, i + 1)).unwrap())
        .collect();
    let q = PotentialTensor::from_exprs(3, exprs).unwrap();
    let raw = natural_membership(&q, &j, &g, &points, 1e-10).unwrap();
    assert!(!raw.is_member());
    let oq = obata(&j, &q).unwrap();
    let proj = natural_membership(&oq, &j, &g, &points, 1e-10).unwrap();
    assert!(proj.commutes_with_j < 1e-12);
    let both = oq.metric_skew(&g).unwrap();
    assert!(natural_membership(&both, &j, &g, &points, 1e-10).unwrap().is_member());
    // idempotent
    let twice = obata(&j, &oq).unwrap();
    for p in &points {
        assert!(twice.eval::<f64>(p).unwrap().sub(&oq.eval(p).unwrap()).max_abs() < 1e-12);
    }
}

#[test]
fn shifting_by_natural_potential_keeps_adaptedness() {
    let (c, j, g) = twisted();
    let points = pts(&c);
    let phi = golden_of(&j);
    let exprs: Vec<Expr> = (0..27).map(|i| c.parse(&alloc::format!("{i} * x*y + 1")).unwrap()).collect();
    let q = obata(&j, &PotentialTensor::from_exprs(3, exprs).unwrap()).unwrap().metric_skew(&g).unwrap();
    let fc = first_canonical(&g, &j).unwrap();
    let shifted = fc.shifted(q).unwrap();
    assert!(is_adapted(&shifted, &phi, Some(&g), &points, 1e-12).unwrap().adapted());
    let diff = PotentialTensor::difference(&shifted, &fc).unwrap();
    assert!(natural_membership(&diff, &j, &g, &points, 1e-12).unwrap().is_member());
}

#[test]
fn well_adapted_on_twisted_structure() {
    let (c, j, g) = twisted();
    let points = pts(&c);
    let pair = GoldenPair::from_product(c, j.clone(), g.clone(), &ValidationConfig::default()).unwrap();
    let wa = well_adapted(&pair, SolverConfig::default()).unwrap();
    assert_eq!(wa.differentiability(), Differentiability::Numeric);
    let solver = WellAdaptedSolver::new(&g, &j, SolverConfig::default()).unwrap();
    for p in &points {
        let s = solver.solve_at(p).unwrap();
        assert_eq!(s.nullity, 0);
        assert!(s.residual() < 1e-12 && s.split_residual < 1e-12, "{s:?}");
    }
    assert!(is_adapted(&wa, pair.phi(), Some(&g), &points, 1e-12).unwrap().adapted());
    assert!(matches!(wa.gamma(&[Dual::constant(0.0); 3]), Err(Error::NotDifferentiable)));
    let r = curvature(&wa, &points[0], 1e-5).unwrap();
    assert!(r.max_abs().is_finite());
}

#[test]
fn finite_difference_partials_track_exact_ones() {
    // J integrable and parallel for the first canonical connection here, so
    // the well-adapted connection coincides with it
    let c = ChartSpec::new(&["x", "y", "z"]).unwrap();
    let j = OneOneField::parse(&c, &[["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]]).unwrap();
    let g = MetricField::parse(&c, &[["1", "0", "0"], ["0", "1 + x^2", "0"], ["0", "0", "1"]]).unwrap();
    let fc = first_canonical(&g, &j).unwrap();
    let wa = DerivationLaw::from_solver(WellAdaptedSolver::new(&g, &j, SolverConfig::default()).unwrap());
    for p in pts(&c) {
        assert!(wa.coefficients(&p).unwrap().sub(&fc.coefficients(&p).unwrap()).max_abs() < 1e-12);
        let exact = fc.coefficient_partials(&p, 1e-5).unwrap();
        let fd = wa.coefficient_partials(&p, 1e-5).unwrap();
        for (a, b) in exact.iter().zip(&fd) {
            assert!(a.sub(b).max_abs() < 1e-8);
        }
        let ra = curvature(&fc, &p, 1e-5).unwrap();
        let rb = curvature(&wa, &p, 1e-5).unwrap();
        assert!(ra.max_abs() > 0.1);
        for l in 0..3 {
            for k in 0..3 {
                for i in 0..3 {
                    for jj in 0..3 {
                        assert!((ra.get(l, k, i, jj) - rb.get(l, k, i, jj)).abs() < 1e-6);
                    }
                }
            }
        }
    }
}
