use markovcad::app::{self, Emit, Format, Inputs, RunConfig};
use markovcad::dto::{self, ModelFile, QueryFile, TreeJson};
use markovcad_core::arith::{parse_rational, Rational, Real};
use markovcad_core::cad::{decision_cad, solution_formula, CadOptions};
use markovcad_core::markov::encode_system;
use markovcad_core::poly::Var;
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn text(name: &str) -> String {
    std::fs::read_to_string(data(name)).unwrap()
}

fn two_way_inputs() -> Inputs {
    Inputs {
        model: Some(text("synthetic_model.json")),
        query: Some(text("synthetic_two_way.json")),
        ..Inputs::default()
    }
}

fn linear_form() -> Inputs {
    Inputs {
        system: Some(text("linear_form_system.json")),
        ..Inputs::default()
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_markovcad"))
}

fn error_doc(stderr: &[u8]) -> serde_json::Value {
    let s = String::from_utf8_lossy(stderr);
    let line = s.lines().last().expect("error line");
    let v: serde_json::Value = serde_json::from_str(line).unwrap();
    let e = &v["error"];
    assert!(e["kind"].is_string() && e["code"].is_i64() && e["message"].is_string());
    v
}

#[test]
fn exit_ok_for_linear_form() {
    let out = bin().arg("--system").arg(data("linear_form_system.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("0 < a1 < 1\n  a2 = 0\n    a3 = 1 - a1\n"));
    assert!(s.contains("          x3 >= (1 - a1*x1 - a2*x2)/a3\n"));
}

#[test]
fn exit_input_with_position() {
    let dir = std::env::temp_dir().join(format!("markovcad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, text("synthetic_model.json").replace("\"p11\"", "\"0.4x\"")).unwrap();
    let out = bin()
        .arg("--model")
        .arg(&bad)
        .arg("--query")
        .arg(data("synthetic_all_free.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = error_doc(&out.stderr);
    assert_eq!(v["error"]["position"], 3);
    assert_eq!(v["error"]["location"], "model.P[0][0]");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn exit_not_extensible() {
    let out = bin()
        .arg("--model")
        .arg(data("synthetic_model.json"))
        .arg("--query")
        .arg(data("synthetic_two_way.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_doc(&out.stderr)["error"]["kind"], "not_extensible");
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("simplex-extensible: false\n"));
}

#[test]
fn fallback_general_handles_fixed_rewards() {
    let cfg = RunConfig {
        fallback_general: true,
        ..RunConfig::default()
    };
    let out = app::run(&two_way_inputs(), &cfg);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("p22"));
}

#[test]
fn exit_infeasible_and_cell_limit() {
    let r = app::run(
        &Inputs {
            system: Some(
                r#"{"simplices":[{"vars":["a1","a2"],"constraint":"eq"}],"x_vars":[{"name":"x"}],"fstar":"-1 - x"}"#
                    .into(),
            ),
            ..Inputs::default()
        },
        &RunConfig::default(),
    );
    assert_eq!(r.code, 3);
    let out = bin()
        .arg("--system")
        .arg(data("linear_form_system.json"))
        .env("MARKOVCAD_MAX_CELLS", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_doc(&out.stderr)["error"]["kind"], "cell_limit");
}

#[test]
fn fstar_with_unknown_variable_is_rejected() {
    let r = app::run(
        &Inputs {
            system: Some(r#"{"simplices":[{"vars":["a1","a2"],"constraint":"eq"}],"fstar":"a1*y - 1"}"#.into()),
            ..Inputs::default()
        },
        &RunConfig::default(),
    );
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("system.fstar"));
}

#[test]
fn json_tree_round_trips_byte_for_byte() {
    for inputs in [linear_form(), drone()] {
        let cfg = RunConfig {
            format: Format::Json,
            ..RunConfig::default()
        };
        let out = app::run(&inputs, &cfg);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let parsed: TreeJson = serde_json::from_str(&out.stdout).unwrap();
        let tree = dto::tree_from(&parsed).unwrap();
        let mut again = serde_json::to_string_pretty(&dto::tree_json(&tree)).unwrap();
        again.push('\n');
        assert_eq!(again, out.stdout);
    }
}

fn drone() -> Inputs {
    Inputs {
        model: Some(text("drone_a.json")),
        model_b: Some(text("drone_b.json")),
        query: Some(text("drone_query.json")),
        system: None,
    }
}

#[test]
fn parallel_output_is_identical() {
    for inputs in [linear_form(), drone()] {
        for emit in [Emit::Tree, Emit::Formula] {
            for format in [Format::Text, Format::Json] {
                let serial = RunConfig {
                    emit,
                    format,
                    ..RunConfig::default()
                };
                let parallel = RunConfig {
                    parallel: true,
                    ..serial.clone()
                };
                assert_eq!(app::run(&inputs, &serial), app::run(&inputs, &parallel));
            }
        }
    }
}

fn csv_rows(s: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = s.lines();
    let head = lines.next().unwrap().split(',').map(String::from).collect();
    (head, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

fn two_way_system() -> markovcad_core::simplex::SystemM {
    let m = serde_json::from_str::<ModelFile>(&text("synthetic_model.json")).unwrap().to_model("model").unwrap();
    let q = serde_json::from_str::<QueryFile>(&text("synthetic_two_way.json")).unwrap().to_query().unwrap();
    encode_system(&[&m], &q).unwrap().system
}

#[test]
fn boundary_points_are_exact_zeros() {
    let cfg = RunConfig {
        emit: Emit::BoundaryCsv,
        boundary_samples: 25,
        floats: true,
        ..RunConfig::default()
    };
    let out = app::run(&two_way_inputs(), &cfg);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let (head, rows) = csv_rows(&out.stdout);
    assert_eq!(head, ["p11", "p22", "p11_float", "p22_float"]);
    let sys = two_way_system();
    let (u, v) = (sys.vars.lookup("p11").unwrap(), sys.vars.lookup("p22").unwrap());
    assert!(rows.len() >= 24);
    for r in &rows {
        let pt: BTreeMap<Var, Rational> =
            [(u, parse_rational(&r[0]).unwrap()), (v, parse_rational(&r[1]).unwrap())].into_iter().collect();
        assert_eq!(sys.fstar.eval(&pt), Some(Rational::from_integer(0.into())));
    }
    let at = rows.iter().find(|r| r[0] == "3/10").unwrap();
    assert_eq!(at[1], "39/55");
    assert_eq!(at[3], "0.709090909091");
}

#[test]
fn grid_agrees_with_solution_formula() {
    let sys = two_way_system();
    let order = sys.default_order();
    let cad = decision_cad(&sys.to_poly_system(), &order, &CadOptions::default()).unwrap();
    let phi = solution_formula(&cad);
    for grid in [(2, 2), (5, 5), (7, 10)] {
        let cfg = RunConfig {
            emit: Emit::GridCsv,
            grid_n: grid,
            ..RunConfig::default()
        };
        let out = app::run(&two_way_inputs(), &cfg);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let (head, rows) = csv_rows(&out.stdout);
        assert_eq!(head, ["p11", "p22", "satisfied", "on_boundary"]);
        assert_eq!(rows.len(), grid.0 * grid.1);
        for r in &rows {
            let pt: Vec<(Var, Real)> = order
                .iter()
                .zip(&r[..2])
                .map(|(v, s)| (*v, Real::Rational(parse_rational(s).unwrap())))
                .collect();
            assert_eq!(phi.holds_at(&pt), r[2] == "true", "at {r:?}");
        }
    }
}

#[test]
fn order_override_reorders_simplex_coordinates() {
    let cfg = RunConfig {
        order: Some(["a3", "a1", "a2", "x1", "x2", "x3"].map(String::from).to_vec()),
        ..RunConfig::default()
    };
    let out = app::run(&linear_form(), &cfg);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.starts_with("a3 = 0\n"));
    let bad = RunConfig {
        order: Some(["x1", "a1", "a2", "a3", "x2", "x3"].map(String::from).to_vec()),
        ..RunConfig::default()
    };
    assert_eq!(app::run(&linear_form(), &bad).code, 1);
}

#[test]
fn report_exit_codes() {
    let cfg = RunConfig {
        emit: Emit::Report,
        format: Format::Json,
        ..RunConfig::default()
    };
    let ok = app::run(&linear_form(), &cfg);
    assert_eq!(ok.code, 0);
    let v: serde_json::Value = serde_json::from_str(&ok.stdout).unwrap();
    assert_eq!(v["extensible"], true);
    assert_eq!(app::run(&two_way_inputs(), &cfg).code, 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn run_is_deterministic(seed in 0u64..1000, fmt in prop::bool::ANY) {
        let cfg = RunConfig {
            seed,
            format: if fmt { Format::Json } else { Format::Text },
            ..RunConfig::default()
        };
        let a = app::run(&drone(), &cfg);
        let b = app::run(&drone(), &RunConfig { parallel: true, ..cfg.clone() });
        prop_assert_eq!(a.code, 0);
        prop_assert_eq!(a, b);
    }
}
