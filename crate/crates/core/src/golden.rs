//! Almost Golden structures `φ² = φ + I`, the induced almost product
//! structure `J = (2φ − I)/√5`, eigen-projectors, purity of the metric and
//! pointwise adapted orthonormal frames.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expr::{PHI, PHIBAR, SQRT5};
use crate::fields::{sample_points, ChartSpec, MatrixField, MetricField, OneOneField, Point};
use crate::linalg::Mat;

/// The two roots of `x² − x − 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GoldenConstants {
    pub phi: f64,
    pub phibar: f64,
}

impl GoldenConstants {
    pub const VALUES: GoldenConstants = GoldenConstants { phi: PHI, phibar: PHIBAR };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationConfig {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { points: 20, seed: 42, tol: 1e-9 }
    }
}

fn check_dim(m: &MatrixField, p: &[f64]) -> Result<()> {
    if m.dim() != p.len() {
        return Err(Error::DimensionMismatch { expected: m.dim(), found: p.len() });
    }
    Ok(())
}

/// `‖φ(p)² − φ(p) − I‖_∞`.
pub fn check_golden(phi: &OneOneField, p: &[f64]) -> Result<f64> {
    check_dim(phi, p)?;
    let m = phi.eval::<f64>(p)?;
    Ok(m.matmul(&m).sub(&m).sub(&Mat::identity(m.rows())).max_abs())
}

/// `‖J(p)² − I‖_∞`.
pub fn check_product(j: &OneOneField, p: &[f64]) -> Result<f64> {
    check_dim(j, p)?;
    let m = j.eval::<f64>(p)?;
    Ok(m.matmul(&m).sub(&Mat::identity(m.rows())).max_abs())
}

fn worst<F>(points: &[Point], mut f: F) -> Result<(f64, Option<&Point>)>
where
    F: FnMut(&Point) -> Result<f64>,
{
    let mut best = (0.0, None);
    for p in points {
        let r = f(p)?;
        if best.1.is_none() || r > best.0 || r.is_nan() {
            best = (r, Some(p));
        }
    }
    Ok(best)
}

fn ensure_golden(phi: &OneOneField, points: &[Point], tol: f64) -> Result<f64> {
    let (r, at) = worst(points, |p| check_golden(phi, p))?;
    if !(r <= tol) {
        return Err(Error::NotGolden { point: at.map(|p| p.0.clone()).unwrap_or_default(), residual: r });
    }
    Ok(r)
}

fn ensure_product(j: &OneOneField, points: &[Point], tol: f64) -> Result<f64> {
    let (r, at) = worst(points, |p| check_product(j, p))?;
    if !(r <= tol) {
        return Err(Error::NotAlmostProduct {
            point: at.map(|p| p.0.clone()).unwrap_or_default(),
            residual: r,
        });
    }
    Ok(r)
}

/// `J_φ = (2φ − I)/√5`, built symbolically; no validation.
pub fn product_of(phi: &OneOneField) -> OneOneField {
    OneOneField(phi.affine(-1.0 / SQRT5, 2.0 / SQRT5))
}

/// `φ_J = (I + √5 J)/2`, built symbolically; no validation.
pub fn golden_of(j: &OneOneField) -> OneOneField {
    OneOneField(j.affine(0.5, SQRT5 / 2.0))
}

/// Induced almost product structure, after checking the Golden relation at `points`.
pub fn induced_product(phi: &OneOneField, points: &[Point], tol: f64) -> Result<OneOneField> {
    ensure_golden(phi, points, tol)?;
    Ok(product_of(phi))
}

/// Induced almost Golden structure, after checking `J² = I` at `points`.
pub fn induced_golden(j: &OneOneField, points: &[Point], tol: f64) -> Result<OneOneField> {
    ensure_product(j, points, tol)?;
    Ok(golden_of(j))
}

/// Eigen-projectors `P± = (I ± J)/2` onto the `±1` eigen-distributions.
pub fn projectors(j: &OneOneField, points: &[Point], tol: f64) -> Result<(OneOneField, OneOneField)> {
    ensure_product(j, points, tol)?;
    Ok(projectors_of(j))
}

pub fn projectors_of(j: &OneOneField) -> (OneOneField, OneOneField) {
    (OneOneField(j.affine(0.5, 0.5)), OneOneField(j.affine(0.5, -0.5)))
}

/// Both forms of the purity condition at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PurityResidual {
    /// `‖gφ − φᵀg‖_∞`, i.e. `g(φX, Y) − g(X, φY)` on basis pairs.
    pub symmetric: f64,
    /// `‖φᵀgφ − φᵀg − g‖_∞`, i.e. `g(φX, φY) − g(φX, Y) − g(X, Y)`.
    pub expanded: f64,
}

impl PurityResidual {
    pub fn max(&self) -> f64 {
        self.symmetric.max(self.expanded)
    }

    /// The two forms are equivalent for Golden `φ`; true when both pass or both fail.
    pub fn forms_agree(&self, tol: f64) -> bool {
        (self.symmetric <= tol) == (self.expanded <= tol)
    }
}

pub fn purity_residual(phi: &OneOneField, g: &MetricField, p: &[f64]) -> Result<PurityResidual> {
    check_dim(phi, p)?;
    check_dim(g, p)?;
    let f = phi.eval::<f64>(p)?;
    let gm = g.eval::<f64>(p)?;
    let ft = f.transpose();
    let symmetric = gm.matmul(&f).sub(&ft.matmul(&gm)).max_abs();
    let ftg = ft.matmul(&gm);
    let expanded = ftg.matmul(&f).sub(&ftg).sub(&gm).max_abs();
    Ok(PurityResidual { symmetric, expanded })
}

/// `‖g(JX, JY) − g(X, Y)‖` on basis pairs: `‖JᵀgJ − g‖_∞`.
pub fn product_metric_residual(j: &OneOneField, g: &MetricField, p: &[f64]) -> Result<f64> {
    let jm = j.eval::<f64>(p)?;
    let gm = g.eval::<f64>(p)?;
    Ok(jm.transpose().matmul(&gm).matmul(&jm).sub(&gm).max_abs())
}

/// `(r, s)` at one point from the trace of `J` (eigenvalues ±1).
pub fn eigen_ranks_at(j: &OneOneField, p: &[f64]) -> Result<(usize, usize)> {
    check_dim(j, p)?;
    let m = j.eval::<f64>(p)?;
    let n = m.rows();
    let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
    let r = libm::round((n as f64 + trace) / 2.0).clamp(0.0, n as f64) as usize;
    Ok((r, n - r))
}

/// `(r, s)`, required to be the same at every point.
pub fn eigen_ranks(j: &OneOneField, points: &[Point]) -> Result<(usize, usize)> {
    let mut ranks: Option<(usize, usize)> = None;
    for p in points {
        let here = eigen_ranks_at(j, p)?;
        match ranks {
            None => ranks = Some(here),
            Some(first) if first != here => return Err(Error::NonConstantRank { first, other: here }),
            _ => {}
        }
    }
    ranks.ok_or(Error::DimensionMismatch { expected: 1, found: 0 })
}

/// Residuals recorded when a pair was validated.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationSummary {
    pub points: Vec<Point>,
    pub golden_residual: f64,
    pub product_residual: f64,
    pub purity_residual: f64,
    pub ranks: (usize, usize),
}

/// A validated almost Golden Riemannian structure `(φ, g)` with its induced
/// almost product structure cached.
#[derive(Clone, Debug, PartialEq)]
pub struct GoldenPair {
    chart: ChartSpec,
    phi: OneOneField,
    g: MetricField,
    j: OneOneField,
    summary: ValidationSummary,
}

impl GoldenPair {
    pub fn new(chart: ChartSpec, phi: OneOneField, g: MetricField, cfg: &ValidationConfig) -> Result<Self> {
        let n = chart.dim();
        for dim in [phi.dim(), g.dim()] {
            if dim != n {
                return Err(Error::DimensionMismatch { expected: n, found: dim });
            }
        }
        let points = sample_points(&chart, cfg.points.max(1), cfg.seed);
        g.validate(&points)?;
        let golden_residual = ensure_golden(&phi, &points, cfg.tol)?;
        let j = product_of(&phi);
        let product_residual = ensure_product(&j, &points, cfg.tol)?;
        let mut purity = 0.0_f64;
        for p in &points {
            let r = purity_residual(&phi, &g, p)?.symmetric;
            if !(r <= cfg.tol) {
                return Err(Error::NotPure { point: p.0.clone(), residual: r });
            }
            purity = purity.max(r);
        }
        let ranks = eigen_ranks(&j, &points)?;
        Ok(GoldenPair {
            chart,
            phi,
            g,
            j,
            summary: ValidationSummary {
                points,
                golden_residual,
                product_residual,
                purity_residual: purity,
                ranks,
            },
        })
    }

    /// Builds the pair from an almost product structure, inducing `φ`.
    pub fn from_product(chart: ChartSpec, j: OneOneField, g: MetricField, cfg: &ValidationConfig) -> Result<Self> {
        let points = sample_points(&chart, cfg.points.max(1), cfg.seed);
        let phi = induced_golden(&j, &points, cfg.tol)?;
        Self::new(chart, phi, g, cfg)
    }

    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn phi(&self) -> &OneOneField {
        &self.phi
    }

    pub fn metric(&self) -> &MetricField {
        &self.g
    }

    /// Induced almost product structure.
    pub fn j(&self) -> &OneOneField {
        &self.j
    }

    pub fn summary(&self) -> &ValidationSummary {
        &self.summary
    }

    pub fn ranks(&self) -> (usize, usize) {
        self.summary.ranks
    }

    pub fn projectors(&self) -> (OneOneField, OneOneField) {
        projectors_of(&self.j)
    }
}

/// Frame whose first `r` columns are a g-orthonormal basis of `ker(J − I)`
/// and whose last `s` columns are one of `ker(J + I)` at `p`.
///
/// Columns are picked from the projector columns by pivoted Gram-Schmidt in
/// the g inner product; each column's first nonzero entry is positive.
pub fn adapted_orthonormal_frame(pair: &GoldenPair, p: &[f64]) -> Result<Mat<f64>> {
    let n = pair.dim();
    let here = eigen_ranks_at(pair.j(), p)?;
    if here != pair.ranks() {
        return Err(Error::NonConstantRank { first: pair.ranks(), other: here });
    }
    let (r, s) = here;
    let jm = pair.j().eval::<f64>(p)?;
    let g = pair.metric().eval::<f64>(p)?;
    let id = Mat::identity(n);
    let plus = id.add(&jm).scale(0.5);
    let minus = id.sub(&jm).scale(0.5);
    let degenerate = || Error::DegenerateEigenspace { point: p.to_vec() };

    let inner = |u: &[f64], v: &[f64]| -> f64 {
        let gv = g.mul_vec(v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    };

    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (proj, count) in [(&plus, r), (&minus, s)] {
        let start = frame.len();
        let mut candidates: Vec<Vec<f64>> = (0..n).map(|c| proj.column(c)).collect();
        let scale = libm::sqrt(candidates.iter().map(|c| inner(c, c)).fold(0.0, f64::max));
        for _ in 0..count {
            for cand in candidates.iter_mut() {
                for e in &frame[start..] {
                    let d = inner(cand, e);
                    for (x, y) in cand.iter_mut().zip(e) {
                        *x -= d * y;
                    }
                }
            }
            let norms: Vec<f64> = candidates.iter().map(|c| libm::sqrt(inner(c, c).max(0.0))).collect();
            let best = norms.iter().cloned().fold(0.0, f64::max);
            if !(best > 1e-8 * scale.max(1e-300)) {
                return Err(degenerate());
            }
            // first column within rounding of the largest norm
            let pick = norms.iter().position(|&x| x >= best * (1.0 - 1e-8)).unwrap();
            let mut col: Vec<f64> = candidates[pick].iter().map(|x| x / norms[pick]).collect();
            let big = col.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
            if let Some(lead) = col.iter().find(|x| x.abs() > 1e-12 * big) {
                if *lead < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            for c in candidates.iter_mut() {
                let d = inner(c, &col);
                for (x, y) in c.iter_mut().zip(&col) {
                    *x -= d * y;
                }
            }
            frame.push(col);
        }
    }

    let f = Mat::from_fn(n, n, |row, c| frame[c][row]);
    let jf = jm.matmul(&f);
    let mut eig_res = 0.0_f64;
    for c in 0..n {
        let sign = if c < r { 1.0 } else { -1.0 };
        for row in 0..n {
            eig_res = eig_res.max((jf[(row, c)] - sign * f[(row, c)]).abs());
        }
    }
    let ortho = f.transpose().matmul(&g).matmul(&f).sub(&id).max_abs();
    if !(eig_res <= 1e-10 && ortho <= 1e-10) {
        return Err(degenerate());
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn fib() -> OneOneField {
        OneOneField::constant(&Mat::from_rows(2, 2, vec![1.0, 1.0, 1.0, 0.0]))
    }

    fn pts2() -> Vec<Point> {
        sample_points(&ChartSpec::new(&["x", "y"]).unwrap(), 5, 42)
    }

    #[test]
    fn golden_residuals() {
        assert_eq!(check_golden(&fib(), &[0.1, 0.2]).unwrap(), 0.0);
        assert_eq!(check_golden(&OneOneField::identity(2), &[0.1, 0.2]).unwrap(), 1.0);
        assert!(matches!(check_golden(&fib(), &[0.1]), Err(Error::DimensionMismatch { .. })));
        let c = GoldenConstants::VALUES;
        assert!((c.phi * c.phi - c.phi - 1.0).abs() < 1e-15);
        assert_eq!(c.phibar, 1.0 - c.phi);
    }

    #[test]
    fn induced_structures() {
        let pts = pts2();
        let j = induced_product(&fib(), &pts, 1e-9).unwrap();
        let jm = j.eval::<f64>(&[0.0, 0.0]).unwrap();
        let expected = Mat::from_rows(2, 2, vec![1.0, 2.0, 2.0, -1.0]).scale(1.0 / SQRT5);
        assert!(jm.sub(&expected).max_abs() < 1e-15);
        assert!(check_product(&j, &[0.0, 0.0]).unwrap() < 1e-14);
        let back = induced_golden(&j, &pts, 1e-9).unwrap();
        assert!(back.eval::<f64>(&[0.0, 0.0]).unwrap().sub(&fib().eval(&[0.0, 0.0]).unwrap()).max_abs() < 1e-15);
        assert!(matches!(
            induced_product(&OneOneField::identity(2), &pts, 1e-9),
            Err(Error::NotGolden { residual, .. }) if residual == 1.0
        ));

        let diag = OneOneField::constant(&Mat::from_rows(2, 2, vec![1.0, 0.0, 0.0, -1.0]));
        let phi = induced_golden(&diag, &pts, 1e-9).unwrap().eval::<f64>(&[0.0, 0.0]).unwrap();
        assert!((phi[(0, 0)] - PHI).abs() < 1e-15 && (phi[(1, 1)] - PHIBAR).abs() < 1e-15);
        assert_eq!(phi[(0, 1)], 0.0);
        let full = induced_golden(&OneOneField::identity(2), &pts, 1e-9).unwrap();
        assert!((full.eval::<f64>(&[0.0, 0.0]).unwrap()[(1, 1)] - PHI).abs() < 1e-15);
        assert!(matches!(induced_golden(&fib(), &pts, 1e-9), Err(Error::NotAlmostProduct { .. })));
    }

    #[test]
    fn projector_algebra() {
        let pts = pts2();
        let diag = OneOneField::constant(&Mat::from_rows(2, 2, vec![1.0, 0.0, 0.0, -1.0]));
        let (pp, pm) = projectors(&diag, &pts, 1e-9).unwrap();
        assert_eq!(pp.eval::<f64>(&[0.0, 0.0]).unwrap(), Mat::from_rows(2, 2, vec![1.0, 0.0, 0.0, 0.0]));
        assert_eq!(pm.eval::<f64>(&[0.0, 0.0]).unwrap(), Mat::from_rows(2, 2, vec![0.0, 0.0, 0.0, 1.0]));

        let j = product_of(&fib());
        let (pp, pm) = projectors(&j, &pts, 1e-9).unwrap();
        let a = pp.eval::<f64>(&[0.0, 0.0]).unwrap();
        let b = pm.eval::<f64>(&[0.0, 0.0]).unwrap();
        let expected = Mat::identity(2)
            .scale(0.5)
            .add(&Mat::from_rows(2, 2, vec![1.0, 2.0, 2.0, -1.0]).scale(1.0 / (2.0 * SQRT5)));
        assert!(a.sub(&expected).max_abs() < 1e-15);
        assert!(a.matmul(&a).sub(&a).max_abs() < 1e-14);
        assert!(a.matmul(&b).max_abs() < 1e-14);
        let f = fib().eval::<f64>(&[0.0, 0.0]).unwrap();
        assert!(f.matmul(&a).sub(&a.scale(PHI)).max_abs() < 1e-12);
        assert!(f.matmul(&b).sub(&b.scale(PHIBAR)).max_abs() < 1e-12);
    }

    #[test]
    fn purity_detects_non_pure_metric() {
        let g = MetricField::constant(&Mat::from_rows(2, 2, vec![1.0, 0.0, 0.0, 4.0]));
        let r = purity_residual(&fib(), &g, &[0.0, 0.0]).unwrap();
        assert_eq!(r.symmetric, 3.0);
        assert!(r.expanded > 1e-3);
        let e = purity_residual(&fib(), &MetricField::euclidean(2), &[0.0, 0.0]).unwrap();
        assert!(e.max() < 1e-15);
        assert!(e.forms_agree(1e-9) && r.forms_agree(1e-9));
    }

    #[test]
    fn ranks_from_trace() {
        let pts = pts2();
        assert_eq!(eigen_ranks(&product_of(&fib()), &pts).unwrap(), (1, 1));
        let id3 = OneOneField::identity(3);
        assert_eq!(eigen_ranks_at(&id3, &[0.0, 0.0, 0.0]).unwrap(), (3, 0));
        let c = ChartSpec::new(&["x", "y"]).unwrap();
        let varying = OneOneField::parse(&c, &[["x", "0"], ["0", "-1"]]).unwrap();
        let spread = vec![Point(vec![0.9, 0.0]), Point(vec![-0.9, 0.0])];
        assert!(matches!(eigen_ranks(&varying, &spread), Err(Error::NonConstantRank { .. })));
    }

    #[test]
    fn frames() {
        let c = ChartSpec::new(&["x", "y"]).unwrap();
        let cfg = ValidationConfig::default();
        let diag = OneOneField::constant(&Mat::from_rows(2, 2, vec![1.0, 0.0, 0.0, -1.0]));
        let pair = GoldenPair::from_product(c.clone(), diag, MetricField::euclidean(2), &cfg).unwrap();
        assert_eq!(adapted_orthonormal_frame(&pair, &[0.2, 0.3]).unwrap(), Mat::identity(2));

        let pair = GoldenPair::new(c, fib(), MetricField::euclidean(2), &cfg).unwrap();
        let f = adapted_orthonormal_frame(&pair, &[0.2, 0.3]).unwrap();
        let norm = libm::sqrt(PHI * PHI + 1.0);
        assert!((f[(0, 0)] - PHI / norm).abs() < 1e-12);
        assert!((f[(1, 0)] - 1.0 / norm).abs() < 1e-12);
    }

    #[test]
    fn pair_validation_rejects_bad_input() {
        let c = ChartSpec::new(&["x", "y"]).unwrap();
        let cfg = ValidationConfig::default();
        let g = MetricField::constant(&Mat::from_rows(2, 2, vec![1.0, 0.0, 0.0, 4.0]));
        assert!(matches!(GoldenPair::new(c.clone(), fib(), g, &cfg), Err(Error::NotPure { .. })));
        assert!(matches!(
            GoldenPair::new(c, OneOneField::identity(2), MetricField::euclidean(2), &cfg),
            Err(Error::NotGolden { .. })
        ));
    }
}
