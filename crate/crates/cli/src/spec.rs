//! TOML spec files describing a structure on a single chart.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use golden_core::catalog::{CatalogEntry, StructureKind};
use golden_core::fields::{ChartSpec, MatrixField, MetricField, OneOneField};
use golden_core::golden::{GoldenPair, ValidationConfig};
use golden_core::verify::VerifyConfig;
use serde::Deserialize;
use toml::Spanned;

use crate::error::{CliError, SpecError};

/// Per-file defaults for the verification run.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Options {
    pub points: usize,
    pub seed: u64,
    pub tol: f64,
    pub curvature_tol: f64,
    pub fd_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Options { points: v.points, seed: v.seed, tol: v.tol, curvature_tol: v.curvature_tol, fd_step: v.fd_step }
    }
}

impl Options {
    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            points: self.points,
            seed: self.seed,
            tol: self.tol,
            curvature_tol: self.curvature_tol,
            fd_step: self.fd_step,
            ..VerifyConfig::default()
        }
    }
}

/// A parsed spec file. Expressions are already parsed against the chart.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecFile {
    pub chart: ChartSpec,
    pub metric: MetricField,
    pub kind: StructureKind,
    /// `φ` for golden specs, `J` for product specs.
    pub structure: OneOneField,
    pub options: Options,
}

type Matrix = Spanned<Vec<Spanned<Vec<Spanned<String>>>>>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    manifold: RawManifold,
    metric: RawMetric,
    structure: Spanned<RawStructure>,
    #[serde(default)]
    options: Options,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifold {
    dim: Spanned<i64>,
    coords: Spanned<Vec<String>>,
    sample_box: Option<Spanned<Vec<Spanned<Vec<f64>>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMetric {
    g: Matrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    kind: Spanned<String>,
    phi: Option<Matrix>,
    #[serde(rename = "J")]
    j: Option<Matrix>,
}

struct Locator<'a> {
    file: &'a str,
    text: &'a str,
}

impl Locator<'_> {
    fn error(&self, span: Option<Range<usize>>, message: impl Into<String>) -> SpecError {
        let (line, column) = match span {
            Some(span) => {
                let before = &self.text[..span.start.min(self.text.len())];
                let line = before.matches('\n').count() + 1;
                let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
                (Some(line), Some(column))
            }
            None => (None, None),
        };
        SpecError { file: self.file.to_string(), line, column, message: message.into() }
    }
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Ok(Self::parse(&text, &path.display().to_string())?)
    }

    /// Parses spec text; `file` only labels diagnostics.
    pub fn parse(text: &str, file: &str) -> Result<Self, SpecError> {
        let loc = Locator { file, text };
        let raw: RawSpec = toml::from_str(text).map_err(|e| loc.error(e.span(), e.message().trim_end()))?;

        let dim = *raw.manifold.dim.get_ref();
        let coords = raw.manifold.coords.get_ref();
        if dim < 1 || coords.len() as i64 != dim {
            return Err(loc.error(
                Some(raw.manifold.coords.span()),
                format!("`dim` is {dim} but {} coordinates are listed", coords.len()),
            ));
        }
        let n = coords.len();
        let chart = match &raw.manifold.sample_box {
            None => ChartSpec::new(coords),
            Some(b) => {
                let mut intervals = Vec::new();
                for pair in b.get_ref() {
                    match pair.get_ref().as_slice() {
                        [lo, hi] => intervals.push((*lo, *hi)),
                        _ => return Err(loc.error(Some(pair.span()), "sampling intervals are written [lo, hi]")),
                    }
                }
                if intervals.len() != n {
                    return Err(loc.error(
                        Some(b.span()),
                        format!("`sample_box` needs {n} intervals, found {}", intervals.len()),
                    ));
                }
                ChartSpec::with_box(coords, intervals)
            }
        }
        .map_err(|e| loc.error(Some(raw.manifold.coords.span()), e.to_string()))?;

        let metric = MetricField(parse_matrix(&loc, &chart, &raw.metric.g, "g")?);

        let structure = raw.structure.get_ref();
        let kind = match structure.kind.get_ref().as_str() {
            "golden" => StructureKind::Golden,
            "product" => StructureKind::Product,
            other => {
                return Err(loc.error(
                    Some(structure.kind.span()),
                    format!("`kind` must be \"golden\" or \"product\", found \"{other}\""),
                ))
            }
        };
        let field = match (kind, &structure.phi, &structure.j) {
            (StructureKind::Golden, Some(phi), None) => parse_matrix(&loc, &chart, phi, "phi")?,
            (StructureKind::Product, None, Some(j)) => parse_matrix(&loc, &chart, j, "J")?,
            (StructureKind::Golden, _, _) => {
                return Err(loc.error(Some(raw.structure.span()), "kind \"golden\" needs `phi` and no `J`"))
            }
            (StructureKind::Product, _, _) => {
                return Err(loc.error(Some(raw.structure.span()), "kind \"product\" needs `J` and no `phi`"))
            }
        };

        let o = raw.options;
        if o.points == 0 || !(o.tol > 0.0) || !(o.curvature_tol > 0.0) || !(o.fd_step > 0.0) {
            return Err(loc.error(None, "[options]: points must be positive, tolerances and fd_step must be > 0"));
        }

        Ok(SpecFile { chart, metric, kind, structure: OneOneField(field), options: o })
    }

    pub fn from_entry(entry: &CatalogEntry) -> Self {
        SpecFile {
            chart: entry.chart.clone(),
            metric: entry.metric.clone(),
            kind: entry.kind,
            structure: entry.structure.clone(),
            options: Options::default(),
        }
    }

    pub fn pair(&self, cfg: &ValidationConfig) -> golden_core::Result<GoldenPair> {
        let (chart, g, s) = (self.chart.clone(), self.metric.clone(), self.structure.clone());
        match self.kind {
            StructureKind::Golden => GoldenPair::new(chart, s, g, cfg),
            StructureKind::Product => GoldenPair::from_product(chart, s, g, cfg),
        }
    }

    /// Serializes back to the file format. Parsing the output gives an equal spec.
    pub fn to_toml(&self) -> String {
        let quote = |s: &str| toml::Value::String(s.to_string()).to_string();
        let list = |items: Vec<String>| format!("[{}]", items.join(", "));
        let mut out = String::new();
        let coords = self.chart.coords();
        writeln!(out, "[manifold]").unwrap();
        writeln!(out, "dim = {}", coords.len()).unwrap();
        writeln!(out, "coords = {}", list(coords.iter().map(|c| quote(c)).collect())).unwrap();
        let intervals = self.chart.sample_box().iter().map(|(lo, hi)| format!("[{lo:?}, {hi:?}]")).collect();
        writeln!(out, "sample_box = {}", list(intervals)).unwrap();

        let matrix = |out: &mut String, key: &str, field: &MatrixField| {
            writeln!(out, "{key} = [").unwrap();
            for r in 0..field.dim() {
                let row = (0..field.dim()).map(|c| quote(&field.entry(r, c).display(coords).to_string())).collect();
                writeln!(out, "    {},", list(row)).unwrap();
            }
            writeln!(out, "]").unwrap();
        };
        writeln!(out, "\n[metric]").unwrap();
        matrix(&mut out, "g", &self.metric.0);
        writeln!(out, "\n[structure]").unwrap();
        writeln!(out, "kind = {}", quote(self.kind.label())).unwrap();
        let key = match self.kind {
            StructureKind::Golden => "phi",
            StructureKind::Product => "J",
        };
        matrix(&mut out, key, &self.structure.0);

        let o = &self.options;
        writeln!(out, "\n[options]").unwrap();
        writeln!(out, "points = {}", o.points).unwrap();
        writeln!(out, "seed = {}", o.seed).unwrap();
        writeln!(out, "tol = {:?}", o.tol).unwrap();
        writeln!(out, "curvature_tol = {:?}", o.curvature_tol).unwrap();
        writeln!(out, "fd_step = {:?}", o.fd_step).unwrap();
        out
    }
}

fn parse_matrix(loc: &Locator, chart: &ChartSpec, m: &Matrix, key: &str) -> Result<MatrixField, SpecError> {
    let n = chart.dim();
    let rows = m.get_ref();
    if rows.len() != n {
        return Err(loc.error(Some(m.span()), format!("`{key}` needs {n} rows, found {}", rows.len())));
    }
    let mut entries = Vec::with_capacity(n * n);
    for row in rows {
        if row.get_ref().len() != n {
            return Err(loc.error(
                Some(row.span()),
                format!("every row of `{key}` needs {n} entries, found {}", row.get_ref().len()),
            ));
        }
        for cell in row.get_ref() {
            let e = chart.parse(cell.get_ref()).map_err(|e| {
                // +1 skips the opening quote so offsets inside the string line up.
                let start = cell.span().start + 1;
                let offset = match &e {
                    golden_core::Error::Parse(p) => parse_offset(p),
                    _ => 0,
                };
                loc.error(Some(start + offset..start + offset), format!("in `{key}`: {e}"))
            })?;
            entries.push(e);
        }
    }
    MatrixField::from_exprs(n, entries).map_err(|e| loc.error(Some(m.span()), e.to_string()))
}

fn parse_offset(e: &golden_core::ParseError) -> usize {
    use golden_core::ParseError::*;
    match e {
        Syntax { position, .. } | UnknownIdentifier { position, .. } | NonConstantExponent { position } => *position,
        Arity { .. } | Empty => 0,
    }
}
