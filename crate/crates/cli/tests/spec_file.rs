use golden_cli::{exit, CliError, Options, SpecFile};
use golden_core::catalog::{self, StructureKind};
use golden_core::Error;

const BASE: &str = r#"
[manifold]
dim = 2
coords = ["u", "v"]
sample_box = [[0.5, 2.0], [-1.0, 1.0]]

[metric]
g = [["1", "0"], ["0", "u^2"]]

[structure]
kind = "product"
J = [["1", "0"], ["0", "-1"]]

[options]
points = 5
seed = 9
"#;

#[test]
fn parses_all_tables() {
    let spec = SpecFile::parse(BASE, "base.toml").unwrap();
    assert_eq!(spec.chart.coords(), ["u", "v"]);
    assert_eq!(spec.chart.sample_box(), [(0.5, 2.0), (-1.0, 1.0)]);
    assert_eq!(spec.kind, StructureKind::Product);
    assert_eq!(spec.options, Options { points: 5, seed: 9, ..Options::default() });
    assert_eq!(spec.metric.0.eval::<f64>(&[3.0, 0.0]).unwrap()[(1, 1)], 9.0);
}

#[test]
fn round_trips_through_text() {
    let spec = SpecFile::parse(BASE, "base.toml").unwrap();
    assert_eq!(SpecFile::parse(&spec.to_toml(), "again.toml").unwrap(), spec);
    for name in catalog::NAMES.iter().copied().chain(["random_4_2_1", "random_2_1_3"]) {
        let entry = catalog::by_name(name).unwrap();
        let spec = SpecFile::from_entry(&entry);
        assert_eq!(SpecFile::parse(&spec.to_toml(), name).unwrap(), spec, "{name}");
    }
}

fn error(text: &str) -> golden_cli::SpecError {
    SpecFile::parse(text, "t.toml").unwrap_err()
}

#[test]
fn shape_errors_are_located() {
    let e = error(&BASE.replace(r#"g = [["1", "0"], ["0", "u^2"]]"#, r#"g = [["1", "0"]]"#));
    assert_eq!(e.line, Some(8));
    assert!(e.message.contains("needs 2 rows"), "{e}");

    let e = error(&BASE.replace(r#"["0", "u^2"]"#, r#"["0"]"#));
    assert_eq!(e.line, Some(8));
    assert!(e.message.contains("needs 2 entries"), "{e}");

    let e = error(&BASE.replace("dim = 2", "dim = 3"));
    assert!(e.message.contains("`dim` is 3"), "{e}");

    let e = error(&BASE.replace("kind = \"product\"", "kind = \"golden\""));
    assert!(e.message.contains("needs `phi`"), "{e}");

    let e = error(&BASE.replace("kind = \"product\"", "kind = \"complex\""));
    assert_eq!((e.line, e.column), (Some(11), Some(8)));

    let e = error(&BASE.replace("[options]", "[options]\nfoo = 1"));
    assert!(e.message.contains("foo"), "{e}");

    let e = error(&BASE.replace("u^2", "u^"));
    assert_eq!(e.line, Some(8));
    assert!(e.to_string().starts_with("t.toml:8:"), "{e}");

    let e = error(&BASE.replace(r#"coords = ["u", "v"]"#, r#"coords = ["u", "u"]"#));
    assert!(e.message.contains("duplicate"), "{e}");

    let e = error(&BASE.replace("points = 5", "points = 0"));
    assert!(e.message.contains("points"), "{e}");
}

#[test]
fn missing_options_use_defaults() {
    let text = BASE.split("[options]").next().unwrap();
    assert_eq!(SpecFile::parse(text, "t.toml").unwrap().options, Options::default());
}

#[test]
fn exit_code_contract() {
    let core = |e: Error| CliError::Core(e).exit_code();
    assert_eq!(core(Error::NotGolden { point: vec![0.0], residual: 1.0 }), exit::VALIDATION);
    assert_eq!(core(Error::AsymmetricMetric { point: vec![0.0], residual: 1.0 }), exit::VALIDATION);
    assert_eq!(core(Error::UnknownEntry("x".into())), exit::PARSE);
    assert_eq!(core(Error::NonUniqueSolution { point: vec![0.0], nullity: 1 }), exit::SOLVER);
    assert_eq!(core(Error::SolverResidualTooLarge { point: vec![0.0], residual: 1.0 }), exit::SOLVER);
    assert_eq!(CliError::Spec(error("x = ")).exit_code(), exit::PARSE);
    assert_eq!(CliError::Violations(2).exit_code(), exit::VALIDATION);
    assert_eq!((exit::SUCCESS, exit::VALIDATION, exit::PARSE, exit::SOLVER), (0, 1, 2, 3));
}
