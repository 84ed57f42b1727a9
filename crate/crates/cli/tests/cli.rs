use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fcidump").join(rel)
}

fn haa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haa"))
        .args(args)
        .env_remove("HAA_CONFIG")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timings(mut v: Value) -> Value {
    v["manifest"].as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn gates_reports_resource_counts() {
    let v = json(&haa(&["gates", "--ansatz", "hea", "--system", "8", "--layers", "25"]));
    assert_eq!(v["result"]["n_params"], 600);

    let v = json(&haa(&["gates", "--system", "12", "--ancilla", "2"]));
    assert_eq!(v["result"]["n_params"], 72);
    assert_eq!(v["result"]["n_cz_after_decomposition"], 72);
    assert!(v["result"]["notes"][0].as_str().unwrap().contains("120"));

    let v = json(&haa(&["gates", "--system", "1", "--ancilla", "1"]));
    assert_eq!(v["result"]["n_two_qubit_gates"], 1);
    assert_eq!(v["result"]["n_params"], 3);
}

#[test]
fn gates_reads_width_from_fcidump() {
    let f = data("beh2_cas4e5o_1.33.fcidump");
    let v = json(&haa(&["gates", "-f", f.to_str().unwrap(), "--ancilla", "1", "--layers", "8"]));
    assert_eq!(v["result"]["n_params"], 240);
    assert_eq!(v["manifest"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn exit_codes() {
    let h2 = data("h2_0.7414.fcidump");
    let out = haa(&["energy", "-f", h2.to_str().unwrap(), "--ansatz", "hea", "--layers", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("layer"));

    assert_eq!(haa(&["energy", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(haa(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.fcidump");
    std::fs::write(&bad, "&FCI NORB=2\nnot a record\n").unwrap();
    assert_eq!(haa(&["energy", "-f", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(haa(&["exact", "-f", "/nonexistent.fcidump"]).status.code(), Some(2));
}

#[test]
fn energy_is_deterministic_apart_from_timings() {
    let h2 = data("h2_0.7414.fcidump");
    let args = ["energy", "-f", h2.to_str().unwrap(), "--ansatz", "hea", "--layers", "2", "--restarts", "3", "--seed", "7"];
    let (a, b) = (json(&haa(&args)), json(&haa(&args)));
    assert_eq!(without_timings(a.clone()), without_timings(b));
    let r = &a["result"];
    assert_eq!(r["restarts"].as_array().unwrap().len(), 3);
    assert_eq!(r["restarts"][0]["seed"], 7);
    for key in ["best_energy", "fci_energy", "error", "purity", "penalty_expectations"] {
        assert!(!r[key].is_null(), "{key}");
    }
    assert_eq!(a["manifest"]["chemical_accuracy_hartree"], 1.6e-3);
}

#[test]
fn energy_reaches_exact_h2_with_two_layers() {
    let h2 = data("h2_0.7414.fcidump");
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("conf.csv");
    let v = json(&haa(&[
        "energy",
        "-f",
        h2.to_str().unwrap(),
        "--layers",
        "2",
        "--seed",
        "7",
        "--configurations",
        conf.to_str().unwrap(),
    ]));
    let r = &v["result"];
    assert!(r["error"].as_f64().unwrap() < 1e-6);
    assert!(r["purity"].as_f64().unwrap() > 1.0 - 1e-6);
    assert!((r["penalty_expectations"]["number_mean"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!(r["configurations"]["max_deviation"].as_f64().unwrap() < 1e-6);
    let csv = std::fs::read_to_string(&conf).unwrap();
    assert!(csv.starts_with("index,bitstring,vqe_coefficient,fci_coefficient,deviation\n"));
    assert!(dir.path().join("conf.csv.manifest.json").exists());
}

#[test]
fn scan_isolates_failures_and_handles_empty_directories() {
    let dir = tempfile::tempdir().unwrap();
    let out = haa(&["scan", "--dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout), "key,vqe_energy,fci_energy,abs_error,purity,status,file,n_params\n");

    for r in ["r1.00", "r0.50"] {
        std::fs::copy(data(&format!("h2_scan/{r}.fcidump")), dir.path().join(format!("{r}.fcidump"))).unwrap();
    }
    std::fs::write(dir.path().join("r0.75.fcidump"), "garbage").unwrap();
    let csv_path = dir.path().join("scan.csv");
    let out = haa(&["scan", "--dir", dir.path().to_str().unwrap(), "--layers", "2", "--restarts", "4", "--out", csv_path.to_str().unwrap()]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    let keys: Vec<&str> = rows.iter().map(|r| &r[0]).collect();
    assert_eq!(keys, ["r0.50", "r0.75", "r1.00"]);
    assert!(rows[1][5].starts_with("error"));
    assert_eq!(rows.iter().filter(|r| &r[5] == "ok").count(), 2);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "scan");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 3);
}

#[test]
fn config_file_environment_and_flags_layer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nrestarts = 2\nseed = 3\nansatz = hea\n").unwrap();
    let h2 = data("h2_0.7414.fcidump");
    let run = |extra: &[&str], env: Option<(&str, &str)>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_haa"));
        cmd.args(["energy", "-f", h2.to_str().unwrap(), "--config", cfg.to_str().unwrap()]).args(extra);
        cmd.env_remove("HAA_CONFIG").env_remove("HAA_SEED").env_remove("HAA_RESTARTS");
        if let Some((k, v)) = env {
            cmd.env(k, v);
        }
        json(&cmd.output().unwrap())
    };
    let from_file = run(&[], None);
    assert_eq!(from_file["manifest"]["config"]["vqe"]["restarts"], 2);
    assert_eq!(from_file["manifest"]["config"]["vqe"]["base_seed"], 3);
    assert_eq!(from_file["result"]["ansatz"], "HEA(1)");
    let from_env = run(&[], Some(("HAA_SEED", "11")));
    assert_eq!(from_env["manifest"]["config"]["vqe"]["base_seed"], 11);
    let from_flag = run(&["--seed", "5"], Some(("HAA_SEED", "11")));
    assert_eq!(from_flag["manifest"]["config"]["vqe"]["base_seed"], 5);
    // the config file is part of the recorded inputs
    assert!(from_flag["manifest"]["inputs"].as_array().unwrap().iter().any(|i| i["path"].as_str().unwrap().ends_with("run.cfg")));

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_haa")).args(["gates", "--system", "2", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn descriptors_closed_form_and_repeatability() {
    // one system qubit, no ancilla: no gates, every fidelity is 1
    let args = ["descriptors", "--system", "1", "--ancilla", "0", "--pairs", "200", "--bootstrap", "10"];
    let a = haa(&args);
    assert!(a.status.success());
    let mut rdr = csv::Reader::from_reader(a.stdout.as_slice());
    let row = rdr.records().next().unwrap().unwrap();
    let d_kl: f64 = row[4].parse().unwrap();
    assert!((d_kl - 75f64.ln()).abs() < 1e-12);

    let args = ["descriptors", "--ancilla-range", "0:1", "--pairs", "200", "--samples", "100", "--bootstrap", "10", "--seed", "4"];
    let (a, b) = (haa(&args), haa(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8_lossy(&a.stdout).lines().count(), 3);
}

#[test]
fn sweep_single_cell() {
    let h2 = data("h2_0.7414.fcidump");
    let out = haa(&["sweep", "-f", h2.to_str().unwrap(), "--ancilla-range", "1", "--layer-range", "2", "--restarts", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("n_ancilla,layers,n_params"));
    assert!(lines[1].starts_with("1,2,24,"));
}

#[test]
fn exact_ground_state_of_h2() {
    let h2 = data("h2_0.7414.fcidump");
    let v = json(&haa(&["exact", "-f", h2.to_str().unwrap()]));
    assert!((v["result"]["energy"].as_f64().unwrap() + 1.137270174660903).abs() < 1e-8);
    assert_eq!(v["result"]["sector_dim"], 4);
    let out = haa(&["exact", "-f", h2.to_str().unwrap(), "--format", "csv"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("index,bitstring,coefficient\n"));
}

#[test]
fn min_layers_hea_on_h2() {
    let h2 = data("h2_0.7414.fcidump");
    let v = json(&haa(&["min-layers", "-f", h2.to_str().unwrap(), "--ansatz", "hea", "--max-layers", "3", "--restarts", "20"]));
    assert_eq!(v["result"]["min_layers"], 1);
    let out = haa(&["min-layers", "-f", h2.to_str().unwrap(), "--max-layers", "31"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn barrier_reports_kcal_difference() {
    let (a, b) = (data("h2_scan/r1.00.fcidump"), data("h2_scan/r2.00.fcidump"));
    let v = json(&haa(&["barrier", "--reactant", a.to_str().unwrap(), "--transition", b.to_str().unwrap(), "--layers", "2", "--restarts", "10"]));
    let r = &v["result"];
    let kcal = r["barrier_kcal_per_mol"].as_f64().unwrap();
    let exact = r["fci_barrier_kcal_per_mol"].as_f64().unwrap();
    assert!((kcal - exact).abs() < 1e-3, "{kcal} vs {exact}");
    assert!((r["barrier_hartree"].as_f64().unwrap() * 627.5094740631 - kcal).abs() < 1e-9);
}
