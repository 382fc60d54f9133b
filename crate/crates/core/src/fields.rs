//! Charts, points and expression-valued fields.
//!
//! Index convention used everywhere in the crate:
//! `OneOneField[k][i] = (T ∂_i)^k` (column `i` is the image of `∂_i`) and
//! `MetricField[i][j] = g(∂_i, ∂_j)`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};
use core::ops::Deref;

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::linalg::Mat;
use crate::tape::Tape;
use alloc::sync::Arc;
use crate::scalar::{seed, Dual, Scalar};

const RESERVED: &[&str] = &["sin", "cos", "tan", "exp", "log", "sqrt", "abs", "pi", "sqrt5", "phi", "phibar"];

/// A single coordinate chart with its sampling box.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartSpec {
    coords: Vec<String>,
    sample_box: Vec<(f64, f64)>,
}

impl ChartSpec {
    /// Chart with the default box `[-1, 1]^n`.
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<Self> {
        let n = coords.len();
        Self::with_box(coords, vec![(-1.0, 1.0); n])
    }

    pub fn with_box<S: AsRef<str>>(coords: &[S], sample_box: Vec<(f64, f64)>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidChart("a chart needs at least one coordinate".to_string()));
        }
        if sample_box.len() != coords.len() {
            return Err(Error::DimensionMismatch { expected: coords.len(), found: sample_box.len() });
        }
        let coords: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
        for (i, name) in coords.iter().enumerate() {
            let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::InvalidChart(format!("`{name}` is not a valid coordinate name")));
            }
            if RESERVED.contains(&name.as_str()) {
                return Err(Error::InvalidChart(format!("`{name}` is reserved")));
            }
            if coords[..i].contains(name) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{name}`")));
            }
        }
        for &(lo, hi) in &sample_box {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidChart(format!("bad sampling interval [{lo}, {hi}]")));
            }
        }
        Ok(ChartSpec { coords, sample_box })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub fn parse(&self, text: &str) -> Result<Expr> {
        Ok(expr::parse(text, &self.coords)?)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// SplitMix64 generator (Steele, Lea & Flood): `state += 0x9E3779B97F4A7C15`
/// followed by two xor-shift-multiply rounds. Floats take the top 53 bits.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

/// Deterministic uniform samples from the chart's box.
pub fn sample_points(chart: &ChartSpec, count: usize, seed: u64) -> Vec<Point> {
    let mut rng = SplitMix64::new(seed);
    (0..count)
        .map(|_| Point(chart.sample_box.iter().map(|&(lo, hi)| rng.uniform(lo, hi)).collect()))
        .collect()
}

/// `∂f/∂x^i` at `p`, exact by forward-mode differentiation.
pub fn partial(f: &Expr, i: usize, p: &[f64]) -> Result<f64> {
    partial_generic(f, i, p)
}

pub fn partial_generic<S: Scalar>(f: &Expr, i: usize, p: &[S]) -> Result<S> {
    if i >= p.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), found: i + 1 });
    }
    Ok(f.evaluate(&seed(p, i))?.eps)
}

/// Value and all coordinate partials of a vector-valued function.
pub fn vector_jet<S: Scalar>(
    p: &[S],
    f: impl Fn(&[Dual<S>]) -> Result<Vec<Dual<S>>>,
) -> Result<(Vec<S>, Vec<Vec<S>>)> {
    let mut value = Vec::new();
    let mut partials = Vec::with_capacity(p.len());
    for dir in 0..p.len() {
        let out = f(&seed(p, dir))?;
        if dir == 0 {
            value = out.iter().map(|d| d.re).collect();
        }
        partials.push(out.iter().map(|d| d.eps).collect());
    }
    Ok((value, partials))
}

/// Square matrix of expressions, row-major.
#[derive(Clone, Debug)]
pub struct MatrixField {
    n: usize,
    entries: Vec<Expr>,
    tape: Option<Arc<Tape>>,
}

impl PartialEq for MatrixField {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

/// Value and coordinate partials of a matrix field at a point.
#[derive(Clone, Debug)]
pub struct MatrixJet<S> {
    pub value: Mat<S>,
    pub partials: Vec<Mat<S>>,
}

impl MatrixField {
    pub fn from_exprs(n: usize, entries: Vec<Expr>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        if let Some(m) = entries.iter().filter_map(Expr::max_variable).max() {
            if m >= n {
                return Err(Error::DimensionMismatch { expected: n, found: m + 1 });
            }
        }
        Ok(Self::build(n, entries))
    }

    fn build(n: usize, entries: Vec<Expr>) -> Self {
        let tape = Tape::compile(&entries).map(Arc::new);
        MatrixField { n, entries, tape }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(f(r, c));
            }
        }
        Self::build(n, entries)
    }

    pub fn parse<R: AsRef<[S]>, S: AsRef<str>>(chart: &ChartSpec, rows: &[R]) -> Result<Self> {
        let n = chart.dim();
        if rows.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: row.len() });
            }
            for text in row {
                entries.push(chart.parse(text.as_ref())?);
            }
        }
        Ok(Self::build(n, entries))
    }

    pub fn constant(m: &Mat<f64>) -> Self {
        Self::from_fn(m.rows(), |r, c| Expr::lit(m[(r, c)]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> &Expr {
        &self.entries[r * self.n + c]
    }

    pub fn eval<S: Scalar>(&self, p: &[S]) -> Result<Mat<S>> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: p.len() });
        }
        if let Some(values) = self.tape.as_ref().and_then(|t| t.eval(p)) {
            return Ok(Mat::from_rows(self.n, self.n, values));
        }
        let data = self.entries.iter().map(|e| e.evaluate(p)).collect::<Result<Vec<S>>>()?;
        Ok(Mat::from_rows(self.n, self.n, data))
    }

    pub fn jet<S: Scalar>(&self, p: &[S]) -> Result<MatrixJet<S>> {
        let (value, partials) = vector_jet(p, |q| Ok(self.eval(q)?.as_slice().to_vec()))?;
        Ok(MatrixJet {
            value: Mat::from_rows(self.n, self.n, value),
            partials: partials.into_iter().map(|d| Mat::from_rows(self.n, self.n, d)).collect(),
        })
    }

    /// Entry-wise `a·I + b·self`, folding literal entries.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        Self::from_fn(self.n, |r, c| {
            let diag = if r == c { a } else { 0.0 };
            let e = self.entry(r, c);
            match e.as_literal() {
                Some(x) => Expr::lit(diag + b * x),
                None => {
                    let scaled = if b == 1.0 { e.clone() } else { Expr::lit(b) * e.clone() };
                    if diag == 0.0 {
                        scaled
                    } else {
                        Expr::lit(diag) + scaled
                    }
                }
            }
        })
    }
}

/// (1,1)-tensor field; `[k][i] = (T ∂_i)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneOneField(pub MatrixField);

impl Deref for OneOneField {
    type Target = MatrixField;
    fn deref(&self) -> &MatrixField {
        &self.0
    }
}

impl OneOneField {
    pub fn parse<R: AsRef<[S]>, S: AsRef<str>>(chart: &ChartSpec, rows: &[R]) -> Result<Self> {
        MatrixField::parse(chart, rows).map(OneOneField)
    }

    pub fn constant(m: &Mat<f64>) -> Self {
        OneOneField(MatrixField::constant(m))
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(&Mat::identity(n))
    }
}

/// Riemannian metric field; `[i][j] = g(∂_i, ∂_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField(pub MatrixField);

impl Deref for MetricField {
    type Target = MatrixField;
    fn deref(&self) -> &MatrixField {
        &self.0
    }
}

impl MetricField {
    pub fn parse<R: AsRef<[S]>, S: AsRef<str>>(chart: &ChartSpec, rows: &[R]) -> Result<Self> {
        MatrixField::parse(chart, rows).map(MetricField)
    }

    pub fn constant(m: &Mat<f64>) -> Self {
        MetricField(MatrixField::constant(m))
    }

    pub fn euclidean(n: usize) -> Self {
        Self::constant(&Mat::identity(n))
    }

    /// Checks symmetry (structural or to 1e-12) and positive definiteness
    /// (eigenvalues above 1e-10) at every point.
    pub fn validate(&self, points: &[Point]) -> Result<()> {
        let n = self.dim();
        let structurally_symmetric =
            (0..n).all(|i| (0..i).all(|j| self.entry(i, j) == self.entry(j, i)));
        for p in points {
            let g = self.eval::<f64>(p)?;
            if !structurally_symmetric {
                let asym = g.sub(&g.transpose()).max_abs();
                if asym > 1e-12 {
                    return Err(Error::AsymmetricMetric { point: p.0.clone(), residual: asym });
                }
            }
            let min = crate::linalg::symmetric_eigenvalues(&g)[0];
            if !(min > 1e-10) {
                return Err(Error::NotPositiveDefinite { point: p.0.clone(), min_eigenvalue: min });
            }
        }
        Ok(())
    }
}

/// Vector field given by expression components in the coordinate frame.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> Self {
        VectorField { comps }
    }

    pub fn parse<S: AsRef<str>>(chart: &ChartSpec, comps: &[S]) -> Result<Self> {
        if comps.len() != chart.dim() {
            return Err(Error::DimensionMismatch { expected: chart.dim(), found: comps.len() });
        }
        Ok(VectorField { comps: comps.iter().map(|c| chart.parse(c.as_ref())).collect::<Result<_>>()? })
    }

    /// Coordinate field `∂_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        VectorField { comps: (0..n).map(|k| Expr::lit(if k == i { 1.0 } else { 0.0 })).collect() }
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }
}

/// Anything that can be evaluated as a vector field at generic scalar points.
pub trait VectorFieldEval {
    fn eval_at<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>>;
}

impl VectorFieldEval for VectorField {
    fn eval_at<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>> {
        self.comps.iter().map(|c| c.evaluate(p)).collect()
    }
}

impl<V: VectorFieldEval> VectorFieldEval for &V {
    fn eval_at<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>> {
        (**self).eval_at(p)
    }
}

/// The field `T X` for a (1,1)-tensor `T`.
pub struct Image<'a, V> {
    pub tensor: &'a MatrixField,
    pub field: V,
}

impl<'a, V> Image<'a, V> {
    pub fn new(tensor: &'a MatrixField, field: V) -> Self {
        Image { tensor, field }
    }
}

impl<V: VectorFieldEval> VectorFieldEval for Image<'_, V> {
    fn eval_at<S: Scalar>(&self, p: &[S]) -> Result<Vec<S>> {
        let t = self.tensor.eval(p)?;
        Ok(t.mul_vec(&self.field.eval_at(p)?))
    }
}

/// `[X, Y]^k = X^i ∂_i Y^k − Y^i ∂_i X^k` at `p`.
pub fn lie_bracket<A: VectorFieldEval, B: VectorFieldEval>(x: &A, y: &B, p: &[f64]) -> Result<Vec<f64>> {
    let (xv, dx) = vector_jet(p, |q| x.eval_at(q))?;
    let (yv, dy) = vector_jet(p, |q| y.eval_at(q))?;
    let n = p.len();
    Ok((0..n)
        .map(|k| (0..n).map(|i| xv[i] * dy[i][k] - yv[i] * dx[i][k]).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> ChartSpec {
        ChartSpec::new(names).unwrap()
    }

    #[test]
    fn partials_of_simple_fields() {
        let c = chart(&["x", "y"]);
        assert_eq!(partial(&c.parse("x*y").unwrap(), 0, &[2.0, 3.0]).unwrap(), 3.0);
        assert_eq!(partial(&c.parse("1 + x^2").unwrap(), 1, &[0.4, -0.2]).unwrap(), 0.0);
        assert_eq!(partial(&c.parse("sin(x)").unwrap(), 0, &[0.0, 0.0]).unwrap(), 1.0);
        assert!(partial(&c.parse("x").unwrap(), 2, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn brackets() {
        let c2 = chart(&["x", "y"]);
        let dx = VectorField::coordinate(2, 0);
        let dy = VectorField::coordinate(2, 1);
        assert_eq!(lie_bracket(&dx, &dy, &[0.3, 0.1]).unwrap(), vec![0.0, 0.0]);

        let c3 = chart(&["x", "y", "z"]);
        let x = VectorField::parse(&c3, &["1", "0", "0"]).unwrap();
        let y = VectorField::parse(&c3, &["0", "1", "x"]).unwrap();
        for p in sample_points(&c3, 10, 3) {
            assert_eq!(lie_bracket(&x, &y, &p).unwrap(), vec![0.0, 0.0, 1.0]);
        }

        let u = VectorField::parse(&c2, &["x*y", "sin(x)"]).unwrap();
        let v = VectorField::parse(&c2, &["y^2", "exp(x) - y"]).unwrap();
        let p = [0.3, -0.8];
        let a = lie_bracket(&u, &v, &p).unwrap();
        let b = lie_bracket(&v, &u, &p).unwrap();
        for k in 0..2 {
            assert_eq!(a[k], -b[k]);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_in_box() {
        let c = chart(&["x", "y"]);
        let a = sample_points(&c, 3, 42);
        assert_eq!(a.len(), 3);
        assert!(a.iter().all(|p| p.iter().all(|&v| (-1.0..=1.0).contains(&v))));
        assert_eq!(a, sample_points(&c, 3, 42));
        assert_ne!(sample_points(&c, 3, 1), sample_points(&c, 3, 2));
    }

    #[test]
    fn splitmix_reference_values() {
        // first outputs for seed 0 of the reference SplitMix64
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
    }

    #[test]
    fn chart_validation() {
        assert!(ChartSpec::new::<&str>(&[]).is_err());
        assert!(ChartSpec::new(&["x", "x"]).is_err());
        assert!(ChartSpec::new(&["phi"]).is_err());
        assert!(ChartSpec::with_box(&["x"], vec![(1.0, 0.0)]).is_err());
    }

    #[test]
    fn metric_validation() {
        let c = chart(&["x", "y"]);
        let pts = sample_points(&c, 5, 1);
        assert!(MetricField::parse(&c, &[["1", "0"], ["0", "1 + x^2"]]).unwrap().validate(&pts).is_ok());
        assert!(matches!(
            MetricField::parse(&c, &[["1", "x"], ["0", "1"]]).unwrap().validate(&pts),
            Err(Error::AsymmetricMetric { .. })
        ));
        assert!(matches!(
            MetricField::parse(&c, &[["1", "0"], ["0", "-1"]]).unwrap().validate(&pts),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
