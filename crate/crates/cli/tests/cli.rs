use std::path::Path;

use ep_cli::field_io::{decode, encode, read_field, write_field, FieldIoError, MAGIC};
use ep_cli::run;
use ep_core::init::smooth_random;
use ep_core::PeriodicGrid;

fn cli(args: &[&str]) -> u8 {
    let mut full = vec!["ep-spectra"];
    full.extend_from_slice(args);
    run(full)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn zero_simulation_writes_a_flat_trajectory_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero");
    let code = cli(&["simulate", "--init", "zero", "--nx", "64", "--tfinal", "0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut rdr = csv::Reader::from_path(out.join("trajectory.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["t", "tl_norm", "besov_low_norm", "grad_linf", "energy"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert!(rows.len() >= 2);
    for r in &rows {
        for cell in r.iter().skip(1) {
            assert_eq!(cell.parse::<f64>().unwrap(), 0.0);
        }
    }
    let manifest = json(&out.join("manifest.json"));
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["config"]["nx"], "64");
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    let u = read_field(&out.join("final.field")).unwrap();
    assert!(u.components()[0].samples().iter().all(|v| *v == 0.0));
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(cli(&["simulate", "--nx", "64", "--tfinal", "0.05", "--out", a.to_str().unwrap()]), 0);
    let conf = a.join("resolved.conf");
    assert_eq!(cli(&["simulate", "--config", conf.to_str().unwrap(), "--out", b.to_str().unwrap()]), 0);
    assert_eq!(std::fs::read(a.join("final.field")).unwrap(), std::fs::read(b.join("final.field")).unwrap());
}

#[test]
fn counterexample_field_has_one_nonzero_block() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fn");
    assert_eq!(cli(&["simulate", "--init", "fn5", "--tfinal", "0", "--out", out.to_str().unwrap()]), 0);
    let req = ep_cli::commands::NormsRequest {
        input: &out.join("initial.field"),
        s: 2.0,
        p: 2.0,
        index: 2.0,
        kind: ep_core::SpaceKind::TriebelLizorkin,
    };
    let text = ep_cli::commands::norms_report(&req).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with('#') && !l.contains(" = ")).collect::<Vec<_>>().join("\n");
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let nonzero: Vec<i32> = rdr
        .records()
        .map(Result::unwrap)
        .filter(|r| r[1].parse::<f64>().unwrap() > 0.0)
        .map(|r| r[0].parse().unwrap())
        .collect();
    assert_eq!(nonzero, vec![5]);
}

#[test]
fn short_time_experiment_reports_second_order_remainder() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p31");
    let conf = dir.path().join("p31.conf");
    std::fs::write(&conf, "# short run\nnx = 128\ncount = 4\n").unwrap();
    let code = cli(&["--threads", "2", "experiment", "prop31", "--config", conf.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = json(&out.join("report.json"));
    assert!(report["second_order_slope"].as_f64().unwrap() >= 1.9);
    assert!(out.join("report.csv").exists());
    assert_eq!(json(&out.join("manifest.json"))["threads"], 2);
}

#[test]
fn field_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = PeriodicGrid::new(2, 16, 10.0).unwrap();
    let u = smooth_random(&g, 0.3, 2.0, 4).unwrap();
    let path = dir.path().join("u.field");
    write_field(&path, &u).unwrap();
    let v = read_field(&path).unwrap();
    assert_eq!(v.grid().period(), 10.0);
    assert_eq!(v.len(), 2);
    for (a, b) in u.components().iter().zip(v.components()) {
        let bits = |s: &[f64]| s.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(a.samples()), bits(b.samples()));
    }
    assert_eq!(encode(&u), std::fs::read(&path).unwrap());
}

#[test]
fn malformed_field_files_are_rejected() {
    let g = PeriodicGrid::new(1, 8, 1.0).unwrap();
    let good = encode(&ep_core::VectorField::zeros(&g));
    let mut odd = good.clone();
    odd[20..28].copy_from_slice(&7u64.to_le_bytes());
    assert!(matches!(decode(&odd), Err(FieldIoError::InvalidHeader(_))));
    let mut magic = good.clone();
    magic[0] = b'X';
    assert!(matches!(decode(&magic), Err(FieldIoError::BadMagic)));
    assert!(matches!(decode(&good[..good.len() - 1]), Err(FieldIoError::Length { .. })));
    assert_eq!(&good[..8], MAGIC);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("odd.field");
    std::fs::write(&path, &odd).unwrap();
    assert_eq!(cli(&["norms", "--in", path.to_str().unwrap()]), 2);
}

#[test]
fn simulation_output_feeds_norms_and_restarts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert_eq!(cli(&["simulate", "--nx", "64", "--tfinal", "0.05", "--out", a.to_str().unwrap()]), 0);
    let fin = a.join("final.field");
    assert_eq!(cli(&["norms", "--in", fin.to_str().unwrap(), "--kind", "besov", "--index", "inf"]), 0);
    let b = dir.path().join("b");
    let code = cli(&["simulate", "--init", fin.to_str().unwrap(), "--tfinal", "0.05", "--out", b.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(json(&b.join("manifest.json"))["config"]["nx"], "64");
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let o = out.to_str().unwrap();
    assert_eq!(cli(&["simulate", "--nx", "48", "--out", o]), 2);
    assert_eq!(cli(&["simulate", "--set", "dtt=0.1", "--out", o]), 2);
    assert_eq!(cli(&["simulate", "--dt=-1", "--out", o]), 2);
    assert_eq!(cli(&["simulate", "--init", "/nonexistent.field", "--out", o]), 2);
    assert_eq!(cli(&["experiment", "nonsense"]), 2);
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn blowup_exits_with_three_and_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("blow");
    let code = cli(&[
        "simulate", "--nx", "64", "--tfinal", "1", "--set", "blowup_abs=1e-6",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 3);
    assert_eq!(json(&out.join("manifest.json"))["status"], "blowup");
    assert!(out.join("trajectory.csv").exists());
    assert!(out.join("final.field").exists());
}

#[test]
fn rl_limit_experiment_runs_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rl");
    let code = cli(&["experiment", "rllimit", "--set", "n_min=4", "--set", "n_max=6", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = json(&out.join("report.json"));
    assert_eq!(report["rows"].as_array().unwrap().len(), 3);
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
}
