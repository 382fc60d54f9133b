//! Human and JSON renderings of a verification report.

use std::fmt::Write as _;

use golden_core::verify::{IdentityCheck, VerificationReport, COINCIDENCE_LABELS};
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: &str = "golden-report/1";

/// Universal rows at or below this residual are tolerance-bound when they miss a
/// tighter user tolerance; above it they count as violations.
pub const IDENTITY_FLOOR: f64 = 1e-8;

/// A float written with 17 significant digits; non-finite values become `null`.
struct Float(f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

#[derive(serde::Serialize)]
struct Document<'a> {
    schema: &'static str,
    structure: Structure,
    checks: Vec<Check<'a>>,
    verdicts: Verdicts,
    coincidence: Coincidence,
    meta: Meta,
}

#[derive(serde::Serialize)]
struct Structure {
    dim: usize,
    r: usize,
    s: usize,
    golden_residual: Float,
    purity_residual: Float,
}

#[derive(serde::Serialize)]
struct Check<'a> {
    id: &'a str,
    anchor: &'a str,
    residual: Float,
    tol: Float,
    pass: bool,
    worst_point: Option<Vec<Float>>,
}

#[derive(serde::Serialize)]
struct Verdicts {
    phi_integrable: bool,
    g_structure_integrable: bool,
    levi_civita_adapted: bool,
}

#[derive(serde::Serialize)]
struct Coincidence {
    connections: [&'static str; 3],
    distances: Vec<Vec<Float>>,
}

#[derive(serde::Serialize)]
struct Meta {
    seed: u64,
    points: usize,
    tool_version: &'static str,
}

/// The JSON document for a report, newline terminated.
pub fn to_json(report: &VerificationReport) -> String {
    let doc = Document {
        schema: SCHEMA_VERSION,
        structure: Structure {
            dim: report.structure.dim,
            r: report.structure.r,
            s: report.structure.s,
            golden_residual: Float(report.structure.golden_residual),
            purity_residual: Float(report.structure.purity_residual),
        },
        checks: report
            .checks
            .iter()
            .map(|c| Check {
                id: c.id,
                anchor: c.anchor,
                residual: Float(c.residual),
                tol: Float(c.tol),
                pass: c.pass,
                worst_point: c.worst_point.as_ref().map(|p| p.iter().map(|&x| Float(x)).collect()),
            })
            .collect(),
        verdicts: Verdicts {
            phi_integrable: report.verdicts.phi_integrable,
            g_structure_integrable: report.verdicts.g_structure_integrable,
            levi_civita_adapted: report.verdicts.levi_civita_adapted,
        },
        coincidence: Coincidence {
            connections: COINCIDENCE_LABELS,
            distances: report.coincidence.iter().map(|row| row.iter().map(|&d| Float(d)).collect()).collect(),
        },
        meta: Meta { seed: report.config.seed, points: report.config.points, tool_version: env!("CARGO_PKG_VERSION") },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

/// How a row should be read by a person.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// A universal identity that misses the requested tolerance but sits at the
    /// floating point floor.
    ToleranceBound,
    Violation,
    /// Per-structure statements: the row records whether it holds here.
    Holds,
    DoesNotHold,
}

impl Status {
    pub fn of(check: &IdentityCheck) -> Status {
        match (check.universal, check.pass) {
            (true, true) => Status::Pass,
            (true, false) if check.residual <= IDENTITY_FLOOR => Status::ToleranceBound,
            (true, false) => Status::Violation,
            (false, true) => Status::Holds,
            (false, false) => Status::DoesNotHold,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::ToleranceBound => "tolerance-bound",
            Status::Violation => "VIOLATION",
            Status::Holds => "holds",
            Status::DoesNotHold => "does not hold",
        }
    }
}

pub fn violations<'a>(checks: impl IntoIterator<Item = &'a IdentityCheck>) -> usize {
    checks.into_iter().filter(|c| Status::of(c) == Status::Violation).count()
}

/// Fixed-width table of checks: id, residual, tolerance, status, anchor.
pub fn check_table<'a>(checks: impl IntoIterator<Item = &'a IdentityCheck>) -> String {
    let checks: Vec<&IdentityCheck> = checks.into_iter().collect();
    let w = checks.iter().map(|c| c.id.len()).max().unwrap_or(2).max(2);
    let mut out = String::new();
    writeln!(out, "{:<w$}  {:>10}  {:>8}  {:<15}  statement", "id", "residual", "tol", "status").unwrap();
    for c in checks {
        let status = Status::of(c).label();
        writeln!(out, "{:<w$}  {:>10.3e}  {:>8.1e}  {:<15}  {}", c.id, c.residual, c.tol, status, c.anchor).unwrap();
    }
    out
}

pub fn human(report: &VerificationReport) -> String {
    let s = &report.structure;
    let mut out = String::new();
    writeln!(out, "structure: dim {} (r = {}, s = {})", s.dim, s.r, s.s).unwrap();
    writeln!(out, "golden residual {:.3e}, purity residual {:.3e}", s.golden_residual, s.purity_residual).unwrap();
    writeln!(out, "points {}, seed {}\n", report.config.points, report.config.seed).unwrap();
    out.push_str(&check_table(&report.checks));
    let v = &report.verdicts;
    writeln!(out, "\nverdicts:").unwrap();
    writeln!(out, "  phi integrable:           {}", v.phi_integrable).unwrap();
    writeln!(out, "  G-structure integrable:   {}", v.g_structure_integrable).unwrap();
    writeln!(out, "  Levi-Civita adapted:      {}", v.levi_civita_adapted).unwrap();
    writeln!(out, "\ncoefficient distances:").unwrap();
    writeln!(out, "{:>17}{}", "", COINCIDENCE_LABELS.map(|l| format!("{l:>17}")).concat()).unwrap();
    for (label, row) in COINCIDENCE_LABELS.iter().zip(&report.coincidence) {
        writeln!(out, "{label:>17}{}", row.map(|d| format!("{d:>17.3e}")).concat()).unwrap();
    }
    out
}
