//! End-to-end tests through the torusflats binary: job files in, JSON
//! (and CSV) out, with the documented exit codes on bad input.

use std::path::Path;
use std::process::{Command, Output};

use num_rational::BigRational;
use serde_json::{json, Value};
use torusflats_cli::dto;
use torusflats_core::linalg::Subspace;
use torusflats_core::numberfield::{Elem, Field};
use torusflats_core::poly::Poly;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/golden_surface.json");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_torusflats"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_job(dir: &Path, name: &str, job: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(job).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_class(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    v["error"]["class"].as_str().expect("error class").to_owned()
}

fn rat(s: &str) -> BigRational {
    s.parse().unwrap()
}

fn rat_v(v: &Value) -> BigRational {
    rat(v.as_str().expect("rational string"))
}

fn to_subspace(v: &Value) -> Subspace {
    let d: dto::SubspaceDto = serde_json::from_value(v.clone()).unwrap();
    dto::subspace_to_core(&d).unwrap()
}

fn unit(f: &Field, n: usize, k: usize) -> Vec<Elem> {
    let mut v = vec![f.zero(); n];
    v[k] = f.one();
    v
}

fn complex_plane(f: &Field, n: usize, axes: &[usize]) -> Subspace {
    Subspace::complex_closure(
        2 * n,
        f,
        axes.iter().map(|&k| unit(f, 2 * n, 2 * k)).collect(),
    )
    .unwrap()
}

fn identity_gens(n: usize) -> Value {
    Value::Array(
        (0..n)
            .map(|i| {
                Value::Array(
                    (0..n)
                        .map(|j| Value::String(if i == j { "1" } else { "0" }.into()))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn laurent_series(terms: &[(&str, &str)]) -> Value {
    json!({
        "terms": terms
            .iter()
            .map(|(e, c)| json!({
                "exponent": e,
                "coeff": { "nvars": 0, "terms": [{ "powers": [], "coeff": [c] }] }
            }))
            .collect::<Vec<_>>()
    })
}

fn hyperbola_attraction_job(drop: &[usize]) -> Value {
    json!({
        "schema": "v1",
        "command": "verify",
        "kind": "attraction",
        "mode": "complex",
        "lattice": { "generators": identity_gens(4) },
        "tol": "1/20",
        "radii": ["701/7"],
        "drop": drop,
        "families": [
            {
                "field": "rationals",
                "components": [
                    laurent_series(&[("-1", "1")]),
                    laurent_series(&[("1", "1")])
                ]
            },
            {
                "field": "rationals",
                "components": [
                    laurent_series(&[("1", "1")]),
                    laurent_series(&[("-1", "1")])
                ]
            }
        ]
    })
}

#[test]
fn golden_surface_closure_through_the_binary() {
    let out = run(&["closure", "--input", FIXTURE]);
    let v = stdout_json(&out);

    let comps = v["closure"]["components"].as_array().unwrap();
    assert_eq!(comps.len(), 4);
    assert_eq!(v["closure"]["mode"], "complex");
    assert_eq!(v["closure"]["ambient"], 6);

    let f = Field::rationals();
    let expected = [
        complex_plane(&f, 3, &[1, 2]),
        complex_plane(&f, 3, &[0, 2]),
        complex_plane(&f, 3, &[0, 1]),
        complex_plane(&f, 3, &[0]),
    ];
    for (i, c) in comps.iter().enumerate() {
        let dir = to_subspace(&c["dir"]);
        assert!(dir.equals(&expected[i]), "component {} direction", i);
        let sat = to_subspace(&c["dir_saturated"]);
        assert!(sat.equals(&dir), "component {} already saturated", i);
        assert_eq!(c["span_certified"], Value::Bool(true));
    }
    for c in &comps[..3] {
        assert_eq!(c["maximal"], Value::Bool(true));
        assert_eq!(c["translates"]["kind"], "point");
        let point = c["translates"]["point"].as_array().unwrap();
        assert_eq!(point.len(), 6);
        for e in point {
            assert!(rat_v(&e[0]) == rat("0"), "plane translate is the origin");
        }
    }

    let line = &comps[3];
    assert_eq!(line["maximal"], Value::Bool(false));
    assert_eq!(line["translates"]["kind"], "parametric");
    let fdto: dto::FieldDto = serde_json::from_value(line["translates"]["field"].clone()).unwrap();
    let lf = dto::field_to_core(&fdto).unwrap();
    let polys: Vec<Poly> = line["translates"]["polys"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| {
            let d: dto::PolyDto = serde_json::from_value(p.clone()).unwrap();
            dto::poly_to_core(&d, &lf).unwrap()
        })
        .collect();
    assert_eq!(polys.len(), 3);
    assert!(polys[0].is_zero());
    assert_eq!(polys[1], Poly::var(&lf, 2, 0));
    assert_eq!(polys[2], Poly::var(&lf, 2, 1));
    let cons = line["translates"]["constraints"].as_array().unwrap();
    assert_eq!(cons.len(), 1);
    let cd: dto::PolyDto = serde_json::from_value(cons[0].clone()).unwrap();
    let c0 = dto::poly_to_core(&cd, &lf).unwrap();
    let t = Poly::var(&lf, 2, 0);
    let u = Poly::var(&lf, 2, 1);
    assert_eq!(c0, t.mul(&u).sub(&Poly::one(&lf, 2)));

    let clauses = &v["clauses"];
    assert_eq!(clauses["all_pass"], Value::Bool(true));
    let cc = clauses["components"].as_array().unwrap();
    assert_eq!(cc.len(), 4);
    for c in &cc[..3] {
        assert_eq!(c["translate_dim"], 0);
        assert_eq!(c["finite_on_maximal"], Value::Bool(true));
    }
    assert_eq!(cc[3]["translate_dim"], 1);

    let subtori = v["subtori"].as_array().unwrap();
    assert_eq!(subtori.len(), 4);
    for s in &subtori[..3] {
        assert_eq!(s["dim"], 4);
        let folded = s["folded_translates"].as_array().unwrap();
        assert_eq!(folded.len(), 1);
        assert!(folded[0].as_array().unwrap().iter().all(|x| rat_v(x) == rat("0")));
    }
    assert_eq!(subtori[3]["dim"], 2);
    assert!(subtori[3]["folded_translates"].is_null());
}

#[test]
fn closure_output_is_deterministic_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&[
            "closure",
            "--input",
            FIXTURE,
            "--seed",
            "7",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn saturate_round_trips_an_extension_field() {
    let dir = tempfile::tempdir().unwrap();
    // the line through (1, sqrt 2) admits no rational kernel, so its
    // saturation is the whole plane
    let job = json!({
        "schema": "v1",
        "command": "saturate",
        "subspace": {
            "mode": "real",
            "ambient": 2,
            "field": { "min_poly": ["-2", "0", "1"], "root": { "re": "707/500", "im": "0" } },
            "basis": [[["1", "0"], ["0", "1"]]]
        },
        "lattice": { "generators": identity_gens(2) }
    });
    let path = write_job(dir.path(), "sat.json", &job);
    let v = stdout_json(&run(&["saturate", "--input", &path]));
    let sat = &v["saturation"];
    assert_eq!(to_subspace(sat).dim(), 2);

    // feeding the emitted subspace back reproduces it verbatim
    let again = json!({
        "schema": "v1",
        "command": "saturate",
        "subspace": sat.clone(),
        "lattice": { "generators": identity_gens(2) }
    });
    let path2 = write_job(dir.path(), "sat2.json", &again);
    let v2 = stdout_json(&run(&["saturate", "--input", &path2]));
    assert_eq!(v2["saturation"], *sat);
}

#[test]
fn malformed_json_exits_with_schema_class() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ this is not json").unwrap();
    let out = run(&["saturate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_class(&out), "schema");
}

#[test]
fn wrong_schema_version_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_job(
        dir.path(),
        "v0.json",
        &json!({ "schema": "v0", "command": "saturate" }),
    );
    let out = run(&["saturate", "--input", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_class(&out), "schema");
}

#[test]
fn command_mismatch_is_refused() {
    let out = run(&["saturate", "--input", FIXTURE]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_class(&out), "schema");
}

#[test]
fn attraction_radius_at_most_one_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut job = hyperbola_attraction_job(&[]);
    job["radii"] = json!(["1"]);
    let path = write_job(dir.path(), "r1.json", &job);
    let out = run(&["verify", "--input", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_class(&out), "precondition");
}

#[test]
fn attraction_with_no_families_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut job = hyperbola_attraction_job(&[]);
    job["families"] = json!([]);
    let path = write_job(dir.path(), "none.json", &job);
    let out = run(&["verify", "--input", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_class(&out), "precondition");
}

#[test]
fn branches_of_the_hyperbola_are_exact() {
    let dir = tempfile::tempdir().unwrap();
    let job = json!({
        "schema": "v1",
        "command": "branches",
        "field": "rationals",
        "curve": {
            "nvars": 2,
            "terms": [
                { "powers": [1, 1], "coeff": ["1"] },
                { "powers": [0, 0], "coeff": ["-1"] }
            ]
        },
        "order": "5"
    });
    let path = write_job(dir.path(), "xy.json", &job);
    let v = stdout_json(&run(&["branches", "--input", &path]));
    assert_eq!(v["order"], "5");
    let brs = v["branches"].as_array().unwrap();
    assert_eq!(brs.len(), 2);
    assert_eq!(
        brs.iter().filter(|b| b["at_pole"] == Value::Bool(true)).count(),
        1
    );
    for b in brs {
        assert_eq!(b["residual"]["kind"], "infinite", "exact branch");
    }

    // the flag overrides the order in the file
    let v9 = stdout_json(&run(&["branches", "--input", &path, "--truncation", "9"]));
    assert_eq!(v9["order"], "9");
}

#[test]
fn density_of_the_diagonal_with_an_offset() {
    let dir = tempfile::tempdir().unwrap();
    let job = json!({
        "schema": "v1",
        "command": "verify",
        "kind": "density",
        "subspace": {
            "mode": "real",
            "ambient": 2,
            "field": "rationals",
            "basis": [[["1"], ["1"]]]
        },
        "lattice": { "generators": identity_gens(2) },
        "eps": "1/3",
        "offsets": [["1/2", "0"]]
    });
    let path = write_job(dir.path(), "diag.json", &job);
    let v = stdout_json(&run(&["verify", "--input", &path]));
    assert_eq!(v["subtorus_dim"], 1);
    assert_eq!(v["within"], Value::Bool(true));
    assert_eq!(v["covered"], Value::Bool(true));
    assert_eq!(v["pass"], Value::Bool(true));
    let off = &v["offsets"][0];
    assert_eq!(rat_v(&off["dist_sq"]), rat("1/8"));
    assert_eq!(off["certified"], Value::Bool(true));
}

#[test]
fn attraction_on_the_hyperbola_and_its_negative_control() {
    let dir = tempfile::tempdir().unwrap();
    let tol = rat("1/20");

    let path = write_job(dir.path(), "attr.json", &hyperbola_attraction_job(&[]));
    let csv_path = dir.path().join("attr.csv");
    let v = stdout_json(&run(&[
        "verify",
        "--input",
        &path,
        "--csv",
        csv_path.to_str().unwrap(),
    ]));
    assert_eq!(v["pass"], Value::Bool(true));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row["family"], json!(i));
        assert_eq!(row["component"], json!(i), "each branch lands on its own flat");
        assert!(rat_v(&row["upper"]) <= tol);
        assert_eq!(row["certified"], Value::Bool(true));
    }
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x1,x2,x3,x4,component,distance"));
    assert_eq!(lines.count(), 2);

    // deleting the first flat leaves its branch stranded
    let path2 = write_job(dir.path(), "drop.json", &hyperbola_attraction_job(&[0]));
    let v2 = stdout_json(&run(&["verify", "--input", &path2]));
    assert_eq!(v2["pass"], Value::Bool(false));
    let rows2 = v2["rows"].as_array().unwrap();
    let stranded: Vec<&Value> = rows2
        .iter()
        .filter(|r| rat_v(&r["upper"]) > tol)
        .collect();
    assert_eq!(stranded.len(), 1);
    assert_eq!(stranded[0]["family"], json!(0));
}
