//! Built-in example structures with known ground truth and a seeded
//! generator of random pure structures.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fields::{ChartSpec, MatrixField, MetricField, OneOneField, SplitMix64};
use crate::golden::{GoldenPair, ValidationConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructureKind {
    /// The structure field is `φ` itself.
    Golden,
    /// The structure field is the almost product structure `J`; `φ` is induced.
    Product,
}

impl StructureKind {
    pub fn label(self) -> &'static str {
        match self {
            StructureKind::Golden => "golden",
            StructureKind::Product => "product",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tensor {
    Phi,
    J,
}

/// A Nijenhuis value that holds at every point of the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct KnownNijenhuis {
    pub tensor: Tensor,
    pub args: (usize, usize),
    pub value: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundTruth {
    pub ranks: (usize, usize),
    pub phi_integrable: Option<bool>,
    pub levi_civita_adapted: Option<bool>,
    /// Levi-Civita, first canonical and well-adapted connections all coincide.
    pub all_coincide: Option<bool>,
    pub nijenhuis: Vec<KnownNijenhuis>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub chart: ChartSpec,
    pub metric: MetricField,
    pub kind: StructureKind,
    /// `φ` or `J` according to `kind`.
    pub structure: OneOneField,
    pub truth: GroundTruth,
}

impl CatalogEntry {
    pub fn pair(&self, cfg: &ValidationConfig) -> Result<GoldenPair> {
        match self.kind {
            StructureKind::Golden => GoldenPair::new(self.chart.clone(), self.structure.clone(), self.metric.clone(), cfg),
            StructureKind::Product => {
                GoldenPair::from_product(self.chart.clone(), self.structure.clone(), self.metric.clone(), cfg)
            }
        }
    }

    /// Expression strings of a field, row by row, in this entry's coordinates.
    pub fn rows(&self, field: &MatrixField) -> Vec<Vec<String>> {
        let n = field.dim();
        (0..n)
            .map(|r| (0..n).map(|c| field.entry(r, c).display(self.chart.coords()).to_string()).collect())
            .collect()
    }
}

fn parse_entry(
    name: &str,
    coords: &[&str],
    metric: &[&[&str]],
    kind: StructureKind,
    structure: &[&[&str]],
    truth: GroundTruth,
) -> CatalogEntry {
    let chart = ChartSpec::new(coords).expect("catalog chart");
    CatalogEntry {
        name: name.to_string(),
        metric: MetricField::parse(&chart, metric).expect("catalog metric"),
        structure: OneOneField::parse(&chart, structure).expect("catalog structure"),
        chart,
        kind,
        truth,
    }
}

/// `ℝ²`, Euclidean metric, constant `φ = [[1, 1], [1, 0]]`.
pub fn flat_fibonacci() -> CatalogEntry {
    parse_entry(
        "flat_fibonacci",
        &["x", "y"],
        &[&["1", "0"], &["0", "1"]],
        StructureKind::Golden,
        &[&["1", "1"], &["1", "0"]],
        GroundTruth {
            ranks: (1, 1),
            phi_integrable: Some(true),
            levi_civita_adapted: Some(true),
            all_coincide: Some(true),
            nijenhuis: vec![KnownNijenhuis { tensor: Tensor::Phi, args: (0, 1), value: vec![0.0, 0.0] }],
        },
    )
}

/// `ℝ³` with `J∂x = ∂x`, `J∂y = ∂y + 2x∂z`, `J∂z = −∂z` and the metric making
/// `{∂x, ∂y + x∂z, ∂z}` orthonormal. Not integrable.
pub fn twisted_book() -> CatalogEntry {
    parse_entry(
        "twisted_book",
        &["x", "y", "z"],
        &[&["1", "0", "0"], &["0", "1 + x^2", "-x"], &["0", "-x", "1"]],
        StructureKind::Product,
        &[&["1", "0", "0"], &["0", "1", "0"], &["0", "2*x", "-1"]],
        GroundTruth {
            ranks: (2, 1),
            phi_integrable: Some(false),
            levi_civita_adapted: Some(false),
            all_coincide: Some(false),
            nijenhuis: vec![
                KnownNijenhuis { tensor: Tensor::J, args: (0, 1), value: vec![0.0, 0.0, 4.0] },
                KnownNijenhuis { tensor: Tensor::Phi, args: (0, 1), value: vec![0.0, 0.0, 5.0] },
            ],
        },
    )
}

/// Constant `J = diag(1, 1, −1)` with the curved block metric `diag(1, 1 + x², 1)`.
pub fn product_example() -> CatalogEntry {
    parse_entry(
        "product_example",
        &["x", "y", "z"],
        &[&["1", "0", "0"], &["0", "1 + x^2", "0"], &["0", "0", "1"]],
        StructureKind::Product,
        &[&["1", "0", "0"], &["0", "1", "0"], &["0", "0", "-1"]],
        GroundTruth {
            ranks: (2, 1),
            phi_integrable: Some(true),
            levi_civita_adapted: Some(true),
            all_coincide: Some(true),
            nijenhuis: vec![],
        },
    )
}

/// Constant `J = diag(1, −1)` with `g = diag(1 + y², 1 + x²)`: integrable but
/// `∇^g J ≠ 0`.
pub fn integrable_nonparallel() -> CatalogEntry {
    parse_entry(
        "integrable_nonparallel",
        &["x", "y"],
        &[&["1 + y^2", "0"], &["0", "1 + x^2"]],
        StructureKind::Product,
        &[&["1", "0"], &["0", "-1"]],
        GroundTruth {
            ranks: (1, 1),
            phi_integrable: Some(true),
            levi_civita_adapted: Some(false),
            all_coincide: Some(false),
            nijenhuis: vec![],
        },
    )
}

pub const RANDOM_EPSILON: f64 = 0.2;
pub const RANDOM_MAX_DIM: usize = 4;
const RANDOM_COORDS: [&str; RANDOM_MAX_DIM] = ["x", "y", "z", "w"];

/// Name under which [`random_pure_structure`] outputs are listed.
pub fn random_name(n: usize, r: usize, seed: u64) -> String {
    format!("random_{n}_{r}_{seed}")
}

/// Random polynomial of degree ≤ 2 whose coefficients have unit `ℓ¹` norm, so
/// its absolute value is at most 1 on `[-1, 1]ⁿ`.
fn random_polynomial(n: usize, rng: &mut SplitMix64) -> Expr {
    let mut monomials: Vec<Expr> = vec![Expr::lit(1.0)];
    for i in 0..n {
        monomials.push(Expr::var(i));
    }
    for i in 0..n {
        for j in i..n {
            monomials.push(Expr::var(i) * Expr::var(j));
        }
    }
    let coeffs: Vec<f64> = monomials.iter().map(|_| rng.uniform(-1.0, 1.0)).collect();
    let norm: f64 = coeffs.iter().map(|c| c.abs()).sum();
    let mut terms = monomials.into_iter().zip(coeffs).filter(|(_, c)| *c != 0.0).map(|(m, c)| {
        let c = c / norm;
        match m.as_literal() {
            Some(_) => Expr::lit(c),
            None => Expr::lit(c) * m,
        }
    });
    let first = terms.next().unwrap_or(Expr::lit(0.0));
    terms.fold(first, |acc, t| acc + t)
}

/// Cofactor expansion along the first row; the matrix is small.
fn det(m: &[Vec<Expr>]) -> Expr {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc: Option<Expr> = None;
    for c in 0..n {
        let term = m[0][c].clone() * det(&minor(m, 0, c));
        acc = Some(match acc {
            None => term,
            Some(a) if c % 2 == 1 => a - term,
            Some(a) => a + term,
        });
    }
    acc.unwrap()
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(r, _)| *r != row)
        .map(|(_, line)| line.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

/// `adj(m)[r][c] = (−1)^{r+c} det(minor(m, c, r))`.
fn adjugate(m: &[Vec<Expr>]) -> Vec<Vec<Expr>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![Expr::lit(1.0)]];
    }
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let d = det(&minor(m, c, r));
                    if (r + c) % 2 == 1 {
                        -d
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect()
}

fn sum(terms: impl IntoIterator<Item = Expr>) -> Expr {
    let mut it = terms.into_iter();
    let first = it.next().unwrap_or(Expr::lit(0.0));
    it.fold(first, |a, t| a + t)
}

/// A pure almost product structure built from a prescribed frame.
///
/// The frame is `F = I + εA` with `ε = 0.2` and `A` a matrix of random
/// quadratic polynomials normalized so that `|A_ij| ≤ 1` on `[-1, 1]ⁿ`, which
/// keeps `F` invertible there for `n ≤ 4`. The first `r` columns span the `+1`
/// eigenspace: `J = F diag(I_r, −I_s) F⁻¹` and `g = F⁻ᵀF⁻¹`, so the frame is
/// g-orthonormal and `g` is pure by construction.
pub fn random_pure_structure(n: usize, r: usize, seed: u64) -> Result<CatalogEntry> {
    if n == 0 || n > RANDOM_MAX_DIM {
        return Err(Error::InvalidRank(format!("dimension must be between 1 and {RANDOM_MAX_DIM}, got {n}")));
    }
    if r == 0 || r > n {
        return Err(Error::InvalidRank(format!("rank r must satisfy 1 <= r <= {n}, got {r}")));
    }
    let mut rng = SplitMix64::new(seed);
    let frame: Vec<Vec<Expr>> = (0..n)
        .map(|row| {
            (0..n)
                .map(|col| {
                    let p = Expr::lit(RANDOM_EPSILON) * random_polynomial(n, &mut rng);
                    if row == col {
                        Expr::lit(1.0) + p
                    } else {
                        p
                    }
                })
                .collect()
        })
        .collect();
    let d = det(&frame);
    let adj = adjugate(&frame);
    let sign = |k: usize| if k < r { 1.0 } else { -1.0 };
    // J = F D adj(F) / det(F)
    let j = MatrixField::from_fn(n, |row, col| {
        sum((0..n).map(|k| {
            let t = frame[row][k].clone() * adj[k][col].clone();
            if sign(k) < 0.0 {
                -t
            } else {
                t
            }
        })) / d.clone()
    });
    // g = adj(F)ᵀ adj(F) / det(F)²
    let d2 = Expr::pow(d.clone(), 2.0);
    let g = MatrixField::from_fn(n, |row, col| {
        sum((0..n).map(|k| adj[k][row].clone() * adj[k][col].clone())) / d2.clone()
    });
    let chart = ChartSpec::new(&RANDOM_COORDS[..n])?;
    Ok(CatalogEntry {
        name: random_name(n, r, seed),
        chart,
        metric: MetricField(g),
        kind: StructureKind::Product,
        structure: OneOneField(j),
        truth: GroundTruth {
            ranks: (r, n - r),
            phi_integrable: if r == n || n - r <= 1 && r <= 1 { Some(true) } else { None },
            levi_civita_adapted: None,
            all_coincide: None,
            nijenhuis: vec![],
        },
    })
}

/// Names of the fixed entries.
pub const NAMES: [&str; 4] = ["flat_fibonacci", "twisted_book", "product_example", "integrable_nonparallel"];

pub fn fixed_entries() -> Vec<CatalogEntry> {
    vec![flat_fibonacci(), twisted_book(), product_example(), integrable_nonparallel()]
}

/// Looks up a fixed entry or a `random_<n>_<r>_<seed>` name.
pub fn by_name(name: &str) -> Result<CatalogEntry> {
    match name {
        "flat_fibonacci" => return Ok(flat_fibonacci()),
        "twisted_book" => return Ok(twisted_book()),
        "product_example" => return Ok(product_example()),
        "integrable_nonparallel" => return Ok(integrable_nonparallel()),
        _ => {}
    }
    let parts: Vec<&str> = name.split('_').collect();
    if let ["random", n, r, seed] = parts.as_slice() {
        if let (Ok(n), Ok(r), Ok(seed)) = (n.parse(), r.parse(), seed.parse()) {
            return random_pure_structure(n, r, seed);
        }
    }
    Err(Error::UnknownEntry(name.to_string()))
}
