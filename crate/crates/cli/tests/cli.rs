use std::path::Path;
use std::process::{Command, Output};

use dpfilm::energy::{reduced_energy, Params};
use dpfilm::geometry::{cutoff_chi, signed_distance};
use dpfilm::io::save_field2d;
use dpfilm::{DomainSpec, Field2D};

fn dpfilm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpfilm")).args(args).current_dir(dir).env_remove("DPFILM_THREADS").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn verify_writes_reports_and_passes() {
    let d = tempfile::tempdir().unwrap();
    let o = dpfilm(&["verify", "--suite", "positivity", "--cases", "6", "--out", "v"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("v/verify_summary.csv")).unwrap();
    assert!(csv.starts_with("check,cases,worst_ratio,tol,pass\n"));
    assert!(csv.contains("positivity,"));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("v/verify.json")).unwrap()).unwrap();
    assert_eq!(json[0]["name"], "positivity");
    assert_eq!(json[0]["pass"], true);
}

#[test]
fn sweep_is_deterministic() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "sweep.json",
        r#"{"schema_version": 1, "sweep": {"eps": 0.125, "gamma": 20.0, "lambdas": [1.0, 8.0],
            "domain": {"shape": {"kind": "disc", "radius": 0.75}}, "max_iters": 150, "bisection_steps": 1}}"#,
    );
    let a = dpfilm(&["sweep", "--config", "sweep.json", "--out", "a"], d.path());
    let b = dpfilm(&["sweep", "--config", "sweep.json", "--out", "b", "--jobs", "1"], d.path());
    assert_ne!(a.status.code(), Some(2), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.status.code(), b.status.code());
    let ca = std::fs::read(d.path().join("a/sweep.csv")).unwrap();
    assert_eq!(ca, std::fs::read(d.path().join("b/sweep.csv")).unwrap());
    assert_eq!(std::fs::read(d.path().join("a/sweep.json")).unwrap(), std::fs::read(d.path().join("b/sweep.json")).unwrap());
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with("lambda,eps,best_energy,modulated,interface_length,iterations,converged\n"));
    assert_eq!(text.lines().count(), 1 + 3);
}

#[test]
fn energy_matches_the_library() {
    let d = tempfile::tempdir().unwrap();
    let spec = DomainSpec::disc(1.0);
    let grid = spec.grid(0.1, 0.2);
    // a file read back is centered with every node active
    let grid = dpfilm::Grid2D::centered(grid.nx, 0.5 * grid.nx as f64 * grid.dx);
    let sdf = signed_distance(&spec, &grid).unwrap();
    let f = Field2D::from_fn(grid, sdf.domain_mask(), |x, y| (3.0 * x).sin() * y.cos());
    save_field2d(&d.path().join("f.bin"), &f).unwrap();
    write(d.path(), "p.json", r#"{"delta": 0.2, "gamma": 1.5}"#);
    write(
        d.path(),
        "e.json",
        r#"{"schema_version": 1, "energy": "reduced", "domain": {"shape": {"kind": "disc", "radius": 1.0}}}"#,
    );
    let o = dpfilm(&["energy", "--config", "e.json", "--field", "f.bin", "--params", "p.json", "--out", "e"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(d.path().join("e/energy.json")).unwrap()).unwrap();
    let params = Params::new(0.2, 1.5);
    let want = reduced_energy(&f, &params, &cutoff_chi(&sdf, 0.2).unwrap()).unwrap().total;
    let got = json["breakdown"]["total"].as_f64().unwrap();
    assert!((got - want).abs() <= 1e-12 * want.abs(), "{got} vs {want}");
}

#[test]
fn minimize_and_thin_film_outputs() {
    let d = tempfile::tempdir().unwrap();
    write(
        d.path(),
        "m.json",
        r#"{"schema_version": 1, "domain": {"shape": {"kind": "disc", "radius": 0.5}}, "spacing": 0.05,
            "params": {"delta": 0.1, "gamma": 1.0, "rho_pin": 0.1},
            "minimize": {"max_iters": 3000, "grad_tol": 1e-6, "pin_collar": true, "init": {"name": "uniform", "value": 0.5}}}"#,
    );
    let o = dpfilm(&["minimize", "--config", "m.json", "--out", "m"], d.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    for f in ["field.bin", "minimize.json", "history.csv"] {
        assert!(d.path().join("m").join(f).exists(), "{f}");
    }
    let hist = std::fs::read_to_string(d.path().join("m/history.csv")).unwrap();
    let e: Vec<f64> = hist.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]));

    write(
        d.path(),
        "g.json",
        r#"{"schema_version": 1, "gioia": {"domain": {"shape": {"kind": "disc", "radius": 1.0}}, "gamma": 1.0,
            "deltas": [0.2, 0.1], "spacing": 0.1, "max_iters": 400}}"#,
    );
    let o = dpfilm(&["gioia", "--config", "g.json", "--out", "g"], d.path());
    assert_ne!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(d.path().join("g/gioia.csv")).unwrap();
    assert!(csv.starts_with("delta,scaled_energy,distance,iterations,converged\n"));
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn input_errors_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    write(d.path(), "bad.json", "{\"schema_version\": 1,\n \"domain\": {\"shape\": {\"kind\": \"disc\", \"radius\": true}}}");
    let o = dpfilm(&["minimize", "--config", "bad.json"], d.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("domain.shape") && err.contains("line 2"), "{err}");

    write(d.path(), "v.json", r#"{"schema_version": 7}"#);
    let o = dpfilm(&["verify", "--config", "v.json"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema_version"));

    let o = dpfilm(&["verify", "--suite", "nonexistent"], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = dpfilm(&["sweep", "--eps", "2^-4", "--lambda", "1..2:0.5", "--padding", "3"], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = Command::new(env!("CARGO_BIN_EXE_dpfilm"))
        .args(["verify", "--suite", "positivity", "--cases", "2"])
        .current_dir(d.path())
        .env("DPFILM_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("DPFILM_THREADS"));
}
