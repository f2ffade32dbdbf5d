use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn elg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elg")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

struct Tmp(PathBuf);

impl Tmp {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("elg-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        Tmp(p)
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, v: &Value) -> String {
        let p = self.path(name);
        std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
        p
    }
}

impl Drop for Tmp {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn read(p: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(Path::new(p)).unwrap()).unwrap()
}

#[test]
fn dataset_build_and_verify() {
    let t = Tmp::new("ds");
    let ds = t.path("ds.json");
    assert_eq!(code(&elg(&["dataset", "build", "--family", "exc", "--n", "4", "--out", &ds])), 0);
    let j = read(&ds);
    assert_eq!((j["dimE"].as_u64(), j["dimN"].as_u64()), (Some(10), Some(5)));
    assert_eq!(code(&elg(&["dataset", "verify", &ds])), 0);
}

#[test]
fn corrupted_g_basis_is_rejected_with_witness() {
    let t = Tmp::new("corrupt");
    let ds = t.path("ds.json");
    elg(&["dataset", "build", "--family", "exc", "--n", "3", "--out", &ds]);
    let mut j = read(&ds);
    j["g_basis"].as_array_mut().unwrap().remove(0);
    let bad = t.write("bad.json", &j);
    let rep = t.path("rep.json");
    let o = elg(&["dataset", "verify", &bad, "--out", &rep]);
    assert_eq!(code(&o), 1);
    let r = read(&rep);
    let check = &r["report"]["checks"][0];
    assert_eq!(check["name"], "admissible");
    assert_eq!(check["passed"], false);
    assert_eq!(check["detail"]["witness_unit"].as_array().unwrap().len(), 2);
}

#[test]
fn malformed_input_exits_2() {
    let t = Tmp::new("malformed");
    let p = t.path("x.json");
    std::fs::write(&p, "{ not json").unwrap();
    assert_eq!(code(&elg(&["dataset", "verify", &p])), 2);
    assert_eq!(code(&elg(&["elgebra", "verify", &p])), 2);
    assert_eq!(code(&elg(&["dataset", "verify", &t.path("missing.json")])), 2);
}

#[test]
fn algebra_verify_n6() {
    let o = elg(&["algebra", "verify", "--n", "6"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("dimension 79"), "{s}");
    assert!(s.contains("Jacobi pass"), "{s}");
}

fn heisenberg_plus_r() -> Value {
    // [e1, e2] = e3 in dimension 4
    json!({"dim": 4, "f": [[1, 2, 3, "1"]]})
}

#[test]
fn twisted_elgebra_round_trip() {
    let t = Tmp::new("twist");
    let k = t.write("k.json", &heisenberg_plus_r());
    // e^1 is closed, e^3 is not
    let closed = t.write("f1.json", &json!({"dim": 4, "deg": 1, "terms": [[[1], "2"]]}));
    let open = t.write("f1bad.json", &json!({"dim": 4, "deg": 1, "terms": [[[3], "1"]]}));
    let f4 = t.write("f4.json", &json!({"dim": 4, "deg": 4, "terms": [[[1, 2, 3, 4], "1/2"]]}));
    let good = t.path("good.json");
    let bad = t.path("bad.json");
    assert_eq!(code(&elg(&["elgebra", "from-lie", &k, "--F1", &closed, "--F4", &f4, "--out", &good])), 0);
    assert_eq!(code(&elg(&["elgebra", "from-lie", &k, "--F1", &open, "--out", &bad])), 0);
    assert_eq!(code(&elg(&["elgebra", "verify", &good])), 0);
    let rep = t.path("rep.json");
    assert_eq!(code(&elg(&["elgebra", "verify", &bad, "--out", &rep])), 1);
    let r = read(&rep);
    let leibniz = &r["report"]["checks"][0];
    assert_eq!(leibniz["name"], "leibniz");
    assert_eq!(leibniz["detail"]["witness"].as_array().unwrap().len(), 3);

    // a tampered D is refused
    let mut e = read(&good);
    e["D"].as_array_mut().unwrap().push(json!([1, 1, "1"]));
    let tampered = t.write("tampered.json", &e);
    assert_eq!(code(&elg(&["elgebra", "verify", &tampered])), 1);
}

fn so5() -> Value {
    // basis e_ij (i < j) of Λ²R⁵ in lexicographic order
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
    let idx = |a: usize, b: usize| -> (usize, i64) {
        if a < b {
            (pairs.iter().position(|&p| p == (a, b)).unwrap(), 1)
        } else {
            (pairs.iter().position(|&p| p == (b, a)).unwrap(), -1)
        }
    };
    // [E_ij, E_kl] = δ_jk E_il − δ_il E_kj − δ_jl E_ik + δ_ik E_lj  with E_ab = −E_ba
    let mut f = Vec::new();
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for (y, &(k, l)) in pairs.iter().enumerate().skip(x + 1) {
            let mut acc = vec![0i64; 10];
            let mut add = |a: usize, b: usize, c: i64| {
                if a != b {
                    let (z, s) = idx(a, b);
                    acc[z] += s * c;
                }
            };
            if j == k {
                add(i, l, 1);
            }
            if i == l {
                add(k, j, -1);
            }
            if j == l {
                add(i, k, -1);
            }
            if i == k {
                add(l, j, 1);
            }
            for (z, c) in acc.into_iter().enumerate() {
                if c != 0 {
                    f.push(json!([x + 1, y + 1, z + 1, c.to_string()]));
                }
            }
        }
    }
    json!({"dim": 10, "f": f})
}

#[test]
fn so5_parallelisation() {
    let t = Tmp::new("so5");
    let k = t.write("so5.json", &so5());
    let e = t.path("e.json");
    assert_eq!(code(&elg(&["elgebra", "from-lie", &k, "--family", "slwedge2", "--n", "4", "--out", &e])), 0);
    assert_eq!(code(&elg(&["elgebra", "verify", &e])), 0);
    let ds = json!({"family": "slwedge2", "n": 4});
    let unit = |i: usize| -> Vec<String> { (0..10).map(|j| if i == j { "1".into() } else { "0".into() }).collect() };
    // Λ²R⁴: pairs not involving the fifth index
    let so4: Vec<usize> = vec![0, 1, 2, 4, 5, 7];
    let v = t.write("v.json", &json!({"ambient": "E", "dataset": ds, "basis": so4.iter().map(|&i| unit(i)).collect::<Vec<_>>()}));
    let o = elg(&["parallelisation", "check", &e, &v]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("dim g_V = 6"));
    let w = t.write("w.json", &json!({"ambient": "E", "dataset": ds, "basis": [unit(0), unit(9)]}));
    assert_eq!(code(&elg(&["parallelisation", "check", &e, &w])), 1);
}

#[test]
fn torus_duality_and_subspaces() {
    let t = Tmp::new("torus");
    let k = t.write("k.json", &json!({"dim": 4, "f": []}));
    let e = t.path("e.json");
    assert_eq!(code(&elg(&["elgebra", "from-lie", &k, "--out", &e])), 0);
    let ds = json!({"family": "exc", "n": 4});
    let unit = |i: usize| -> Vec<String> { (0..10).map(|j| if i == j { "1".into() } else { "0".into() }).collect() };
    let v1 = t.write("v1.json", &json!({"ambient": "E", "dataset": ds, "basis": (4..10).map(unit).collect::<Vec<_>>()}));
    // an image of v1 under exp(w3) with w3 = e_1∧e_2∧e_3: σ2 ↦ σ2 + ι_σ2 w3 on e^{12}, e^{13}, e^{23}
    let mut rows: Vec<Vec<String>> = (4..10).map(unit).collect();
    rows[0][2] = "1".into();
    rows[1][1] = "-1".into();
    rows[3][0] = "1".into();
    let v2 = t.write("v2.json", &json!({"ambient": "E", "dataset": ds, "basis": rows}));
    for v in [&v1, &v2] {
        assert_eq!(code(&elg(&["subspace", "test", v, "--check", "colagrangian"])), 0);
        assert_eq!(code(&elg(&["subspace", "test", v, "--check", "lagrangian"])), 1);
    }
    let o = elg(&["duality", "check", &e, &v1, &v2]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let tangent = t.write("t.json", &json!({"ambient": "E", "dataset": ds, "basis": (0..4).map(unit).collect::<Vec<_>>()}));
    let nf = t.path("nf.json");
    assert_eq!(code(&elg(&["subspace", "normalize", &tangent, "--out", &nf])), 0);
    assert_eq!(read(&nf)["label"], "dim_n");
}

#[test]
fn reports_are_deterministic() {
    let t = Tmp::new("det");
    let p = t.path("r.json");
    let args = ["suite", "--quick", "--only", "6", "--seed", "3", "--out", &p];
    assert_eq!(code(&elg(&args)), 0);
    let ra = read(&p);
    assert_eq!(code(&elg(&args)), 0);
    let rb = read(&p);
    assert_eq!(serde_json::to_string(&ra["report"]).unwrap(), serde_json::to_string(&rb["report"]).unwrap());
    assert!(ra["timing"]["seconds"].is_number());
}

#[test]
fn quick_suite_passes() {
    let o = elg(&["suite", "--quick"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).matches(": pass").count(), 9);
}
