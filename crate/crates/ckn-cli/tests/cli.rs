use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn ckn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckn")).args(args).env_remove("CKN_CONFIG").output().expect("runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn stderr_error(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error object on stderr");
    assert!(v["message"].is_string());
    v["error"].as_str().unwrap().to_owned()
}

#[test]
fn constants_document() {
    let out = ckn(&["constants", "-N", "5", "-a", "1", "-b", "-2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v = json(&out);
    assert_eq!(num(&v, "M"), 10.0);
    assert!((num(&v, "p") - 10.0 / 3.0).abs() < 1e-15);
    assert!((num(&v, "beta_fs") - (3.0 - 32f64.sqrt())).abs() < 1e-15);
    assert!(num(&v, "S_r") > 0.0);
    // Keys sorted, floats at 17 significant digits.
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(text.contains("\"p\": 3.3333333333333335") && text.ends_with("}\n"));
}

#[test]
fn constants_at_the_origin_point() {
    let v = json(&ckn(&["constants", "-N", "5", "-a", "0", "-b", "-4"]));
    assert_eq!(v["region"], "CriticalUpperAlphaZero");
    assert!((num(&v, "S_r") / num(&v, "S0") - 1.0).abs() < 1e-10);
}

#[test]
fn validation_errors_exit_two() {
    let out = ckn(&["constants", "-N", "4", "-a", "1", "-b", "-2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out), "InvalidDimension");
    let out = ckn(&["spectrum", "-N", "5", "-a", "1", "-b", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out), "BetaOutOfRange");
    let out = ckn(&["minimize", "-N", "5", "-a", "1", "-b", "-3", "--perturb", "0.5"]);
    assert_eq!(stderr_error(&out), "AmplitudeTooLarge");
    assert_eq!(ckn(&["constants", "-N", "5"]).status.code(), Some(2));
    assert_eq!(ckn(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let out = ckn(&["verify", "rellich-limit", "-N", "5", "--eps", "0.3,0.1,0.03,0.01"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    let qs: Vec<f64> = checks.iter().take(4).map(|c| num(c, "measured")).collect();
    assert!(qs.windows(2).all(|w| w[1] < w[0]) && qs.iter().all(|&q| q > 0.0625));

    let out = ckn(&["verify", "linearized", "-N", "5", "-a", "1", "-b", "-2.6568542", "--which", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let out = ckn(&["verify", "linearized", "-N", "5", "-a", "1", "-b", "-2", "--which", "1"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(ckn(&["verify", "identities", "-N", "6", "-a", "-2"]).status.code(), Some(0));
    assert_eq!(ckn(&["verify", "identities", "-N", "6"]).status.code(), Some(2));
    let out = ckn(&["verify", "equivalence", "-N", "5", "-a", "-1", "-b", "-4", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(num(&json(&out), "seed"), 7.0);
}

#[test]
fn ode_suite_reports_the_rounding_floor() {
    // The default-grid residual sits above 1e-7 in double precision; the
    // suite must say so rather than pass.
    let out = ckn(&["verify", "ode", "-N", "5", "-a", "1", "-b", "-2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().filter(|c| c["check"].as_str().unwrap().starts_with("cosh")).all(|c| c["pass"] == true));
    assert_eq!(v["pass"], false);
}

#[test]
fn seeds_change_random_suites() {
    let a = json(&ckn(&["verify", "equivalence", "-N", "5", "-a", "1", "-b", "-2", "--seed", "1"]));
    let b = json(&ckn(&["verify", "equivalence", "-N", "5", "-a", "1", "-b", "-2", "--seed", "2"]));
    let c = json(&ckn(&["verify", "equivalence", "-N", "5", "-a", "1", "-b", "-2", "--seed", "1"]));
    assert_ne!(a["checks"], b["checks"]);
    assert_eq!(a, c);
}

#[test]
fn spectrum_table() {
    let out = ckn(&["spectrum", "-N", "5", "-a", "1", "-b", "-3", "--kmax", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let pm1 = num(&v, "p_minus_1");
    let modes = v["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 5);
    let first0 = modes.iter().find(|m| m["k"] == 0 && m["index"] == "first").unwrap();
    assert!((num(first0, "eigenvalue") - 1.0).abs() < 1e-3);
    let k1 = modes.iter().find(|m| m["k"] == 1).unwrap();
    assert!(num(k1, "eigenvalue") < pm1);

    let csv = String::from_utf8(ckn(&["spectrum", "-N", "5", "-a", "1", "-b", "-2", "--kmax", "1", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "k,index,eigenvalue,residual,iters,multiplicity");
    assert_eq!(csv.lines().count(), 4);
}

fn region_csv(extra: &[&str]) -> String {
    let mut args = vec!["region-map", "-N", "5", "--alpha-min", "0", "--alpha-max", "3", "--beta-min", "-5", "--beta-max", "1", "--format", "csv"];
    args.extend_from_slice(extra);
    let out = ckn(&args);
    assert_eq!(out.status.code(), Some(0));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn region_map_lattice() {
    let csv = region_csv(&["--resolution", "31"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "alpha,beta,region,beta_fs,second_variation_sign");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 31 * 31);
    let step = 6.0 / 30.0;
    let idx = |b: f64| ((b + 5.0) / step).round() as i64;
    for r in &rows {
        let (a, b, fs): (f64, f64, f64) = (r[0].parse().unwrap(), r[1].parse().unwrap(), r[3].parse().unwrap());
        if a == 0.0 {
            assert_eq!(fs, -4.0);
        }
        let lower = (a / 3.0) - 4.0;
        let on_fs = a > 0.0 && idx(b) == idx(fs) && idx(b) != idx(lower) && idx(b) != idx(a - 2.0);
        assert_eq!(r[2] == "FSCurve", on_fs, "{r:?}");
    }
    // Row-major with α outer.
    assert!(rows.windows(2).all(|w| w[0][0].parse::<f64>().unwrap() <= w[1][0].parse::<f64>().unwrap()));
    assert_eq!(region_csv(&["--resolution", "31", "--jobs", "1"]), region_csv(&["--resolution", "31", "--jobs", "4"]));
    assert_eq!(region_csv(&["--resolution", "1"]).lines().count(), 2);
}

#[test]
fn region_map_bad_ranges() {
    let out = ckn(&["region-map", "-N", "5", "--alpha-min", "2", "--alpha-max", "1", "--beta-min", "-5", "--beta-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ckn(&["region-map", "-N", "5", "--alpha-min", "0", "--alpha-max", "1", "--beta-min", "-5", "--beta-max", "1", "--resolution", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn minimize_reports() {
    let v = json(&ckn(&["minimize", "-N", "5", "-a", "1", "-b", "-2"]));
    assert!(num(&v, "rel_err").abs() < 5e-3);
    let v = json(&ckn(&["minimize", "-N", "5", "-a", "1", "-b", "-3", "--perturb", "0.05"]));
    assert_eq!(v["perturbed_below_S_r"], true);
    assert!(num(&v, "perturbed_plus") < num(&v, "S_r"));
}

#[test]
fn minimize_init_file() {
    let mut good = tempfile::NamedTempFile::new().unwrap();
    for i in -40..=40 {
        let t = i as f64 * 0.25;
        writeln!(good, "{} {}", t.exp(), (-t * t / 2.0).exp()).unwrap();
    }
    let path = good.path().to_str().unwrap();
    let v = json(&ckn(&["minimize", "-N", "6", "-a", "0.5", "-b", "-2.5", "--init", path]));
    assert!(num(&v, "rel_err").abs() < 5e-3);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "1.0 2.0\nnot a number\n").unwrap();
    let out = ckn(&["minimize", "-N", "5", "-a", "1", "-b", "-2", "--init", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out), "InputError");
    let out = ckn(&["minimize", "-N", "5", "-a", "1", "-b", "-2", "--init", "/nonexistent/profile"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_precedence() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "# pinned numerics\nnodes = 2001\nspan = 12\nformat = csv\nseed = 9").unwrap();
    let path = cfg.path().to_str().unwrap();
    let base = ["verify", "equivalence", "-N", "5", "-a", "1", "-b", "-2"];

    let out = ckn(&[&base[..], &["--config", path]].concat());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("check,measured,tolerance,pass"));

    let v = json(&ckn(&[&base[..], &["--config", path, "--format", "json", "--nodes", "1001"]].concat()));
    assert_eq!((num(&v, "nodes"), num(&v, "span"), num(&v, "seed")), (1001.0, 12.0, 9.0));

    let out = Command::new(env!("CARGO_BIN_EXE_ckn"))
        .args(base)
        .args(["--format", "json"])
        .env("CKN_CONFIG", path)
        .output()
        .unwrap();
    assert_eq!(num(&json(&out), "nodes"), 2001.0);

    let mut broken = tempfile::NamedTempFile::new().unwrap();
    writeln!(broken, "colour = red").unwrap();
    let out = ckn(&["constants", "-N", "5", "-a", "1", "-b", "-2", "--config", broken.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out), "ConfigError");
}

#[test]
fn text_format_is_readable() {
    let out = String::from_utf8(ckn(&["constants", "-N", "5", "-a", "1", "-b", "-2", "--format", "text"]).stdout).unwrap();
    assert!(out.lines().any(|l| l.starts_with("region") && l.ends_with("ConjecturedSymmetry")));
}
