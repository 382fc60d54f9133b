//! Spec-file front end for `golden-core`: validation, reports, lemma tables,
//! prolongation dimensions and catalog export.

pub mod error;
pub mod report;
pub mod spec;

use std::io::Write;
use std::path::Path;

use golden_core::catalog;
use golden_core::golden::{GoldenPair, ValidationConfig};
use golden_core::verify::{self, first_prolongation_dim, IdentityCheck, MatrixLieAlgebra, VerificationReport, VerifyConfig};
use golden_core::Error;

pub use error::{exit, CliError, SpecError};
pub use spec::{Options, SpecFile};

pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// Command-line overrides for the `[options]` table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overrides {
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub curvature_tol: Option<f64>,
    pub fd_step: Option<f64>,
    pub validation_tol: f64,
}

impl Default for Overrides {
    fn default() -> Self {
        Overrides { points: None, seed: None, tol: None, curvature_tol: None, fd_step: None, validation_tol: DEFAULT_VALIDATION_TOL }
    }
}

impl Overrides {
    pub fn apply(&self, o: &Options) -> Options {
        Options {
            points: self.points.unwrap_or(o.points),
            seed: self.seed.unwrap_or(o.seed),
            tol: self.tol.unwrap_or(o.tol),
            curvature_tol: self.curvature_tol.unwrap_or(o.curvature_tol),
            fd_step: self.fd_step.unwrap_or(o.fd_step),
        }
    }
}

fn validated(spec: &SpecFile, options: &Options, validation_tol: f64) -> Result<GoldenPair, CliError> {
    let cfg = ValidationConfig { points: options.points, seed: options.seed, tol: validation_tol };
    Ok(spec.pair(&cfg)?)
}

fn io(e: std::io::Error) -> CliError {
    CliError::Write { path: "<stdout>".into(), source: e }
}

pub fn validate(path: &Path, validation_tol: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = SpecFile::load(path)?;
    let pair = validated(&spec, &spec.options, validation_tol)?;
    let s = pair.summary();
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "{}: valid almost Golden Riemannian structure", path.display())?;
        writeln!(out, "  dim {} (r = {}, s = {}), {} points, seed {}", pair.dim(), s.ranks.0, s.ranks.1, s.points.len(), spec.options.seed)?;
        writeln!(out, "  Golden relation residual  {:.3e}", s.golden_residual)?;
        writeln!(out, "  product relation residual {:.3e}", s.product_residual)?;
        writeln!(out, "  purity residual           {:.3e}", s.purity_residual)?;
        writeln!(out, "  tolerance                 {validation_tol:.1e}")
    };
    w(out).map_err(io)
}

/// Runs the full suite on a spec with overrides applied.
pub fn run_report(spec: &SpecFile, overrides: &Overrides) -> Result<VerificationReport, CliError> {
    let options = overrides.apply(&spec.options);
    let pair = validated(spec, &options, overrides.validation_tol)?;
    Ok(verify::verify(&pair, &options.verify_config())?)
}

pub fn report(path: &Path, overrides: &Overrides, json: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = SpecFile::load(path)?;
    let rep = run_report(&spec, overrides)?;
    out.write_all(report::human(&rep).as_bytes()).map_err(io)?;
    if let Some(json) = json {
        std::fs::write(json, report::to_json(&rep))
            .map_err(|source| CliError::Write { path: json.to_path_buf(), source })?;
    }
    finish(&rep.checks)
}

pub fn lemmas(path: &Path, overrides: &Overrides, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = SpecFile::load(path)?;
    let options = overrides.apply(&spec.options);
    let pair = validated(&spec, &options, overrides.validation_tol)?;
    let checks = verify::lemmas(&pair, &options.verify_config())?;
    out.write_all(report::check_table(&checks).as_bytes()).map_err(io)?;
    let bound = checks.iter().filter(|c| report::Status::of(c) == report::Status::ToleranceBound).count();
    if bound > 0 {
        writeln!(
            out,
            "\n{bound} row(s) miss tol {:.1e} but stay below {:.0e}: floating point floor, not a violation",
            options.tol,
            report::IDENTITY_FLOOR
        )
        .map_err(io)?;
    }
    finish(&checks)
}

fn finish(checks: &[IdentityCheck]) -> Result<(), CliError> {
    match report::violations(checks) {
        0 => Ok(()),
        n => Err(CliError::Violations(n)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algebra {
    /// `o(n)`
    O,
    /// `gl(n)`
    Gl,
    /// `o(r) ⊕ o(s)`
    OxO,
    /// `gl(r) ⊕ gl(s)`
    GlxGl,
}

pub fn prolongation(
    algebra: Algebra,
    n: Option<usize>,
    r: Option<usize>,
    s: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Error::InvalidRank(format!("{flag} is required for this algebra")));
    let (name, alg) = match algebra {
        Algebra::O => {
            let n = need(n, "--n")?;
            (format!("o({n})"), MatrixLieAlgebra::orthogonal(n)?)
        }
        Algebra::Gl => {
            let n = need(n, "--n")?;
            (format!("gl({n})"), MatrixLieAlgebra::general_linear(n)?)
        }
        Algebra::OxO => {
            let (r, s) = (need(r, "--r")?, need(s, "--s")?);
            (format!("o({r}) + o({s})"), MatrixLieAlgebra::orthogonal_pair(r, s)?)
        }
        Algebra::GlxGl => {
            let (r, s) = (need(r, "--r")?, need(s, "--s")?);
            (format!("gl({r}) + gl({s})"), MatrixLieAlgebra::general_linear_pair(r, s)?)
        }
    };
    let p = first_prolongation_dim(&alg);
    let verdict = if p.admits_functorial_connection() {
        "first prolongation vanishes and the algebra is transpose invariant: a functorial connection exists"
    } else if p.dimension > 0 {
        "first prolongation does not vanish: these structures do not admit a functorial connection"
    } else {
        "first prolongation vanishes but the algebra is not transpose invariant: the criterion does not apply"
    };
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "algebra: {name} in gl({}), dimension {}", alg.n(), alg.dim())?;
        writeln!(out, "first prolongation dimension: {}", p.dimension)?;
        writeln!(out, "transpose invariant: {}", if p.transpose_invariant { "yes" } else { "no" })?;
        writeln!(out, "{verdict}")
    };
    w(out).map_err(io)
}

pub fn catalog_list(out: &mut dyn Write) -> Result<(), CliError> {
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        for e in catalog::fixed_entries() {
            let (r, s) = e.truth.ranks;
            writeln!(out, "{:<24} dim {}  (r, s) = ({r}, {s})  {}", e.name, e.chart.dim(), e.kind.label())?;
        }
        writeln!(
            out,
            "random_<n>_<r>_<seed>    generated pure structure, 1 <= r <= n <= {}",
            catalog::RANDOM_MAX_DIM
        )
    };
    w(out).map_err(io)
}

pub fn catalog_export(name: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    let entry = catalog::by_name(name)?;
    let text = format!("# catalog entry {}\n{}", entry.name, SpecFile::from_entry(&entry).to_toml());
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Write { path: p.to_path_buf(), source }),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

/// The in-memory report for a catalog entry with default options.
pub fn entry_report(entry: &catalog::CatalogEntry) -> Result<VerificationReport, CliError> {
    let cfg = VerifyConfig::default();
    let pair = entry.pair(&ValidationConfig { points: cfg.points, seed: cfg.seed, tol: DEFAULT_VALIDATION_TOL })?;
    Ok(verify::verify(&pair, &cfg)?)
}
