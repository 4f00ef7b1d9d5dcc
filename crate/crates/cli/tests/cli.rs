use std::path::Path;
use std::process::{Command, Output};

fn iasd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iasd"))
        .args(args)
        .env("IASD_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("c.json");
    std::fs::write(
        &path,
        r#"{
  "link": {"N_t": 2, "N_r": 2, "N_s": 2, "snr_db": 4.0, "sir_db": 0.0, "mod_D": 4, "mod_I": 4},
  "scheme": "blc",
  "rate_D": 0.33,
  "rate_I": 0.33,
  "N": 2,
  "packets": 3,
  "subcarriers": 10,
  "codewords_per_packet": 2,
  "iasd_iters": 1,
  "turbo_iters": 2,
  "seed": 1,
  "info_bits": 80
}"#,
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn memory_spot_values() {
    let out = iasd(&["memory", "--scheme", "blc", "--nm", "2", "--ns", "2"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
    let out = iasd(&["memory", "--scheme", "slc-ic", "--nm", "2", "--ns", "2"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "8");
    let out = iasd(&["memory", "--scheme", "sslc", "--nm", "2", "--ns", "2", "--nr", "2", "--i", "3"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "16");
}

#[test]
fn unknown_scheme_is_a_config_error() {
    let out = iasd(&["memory", "--scheme", "mrc", "--nm", "2", "--ns", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_names_the_path() {
    let out = iasd(&["per", "--config", "/nonexistent/dir/cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/cfg.json"));
}

#[test]
fn malformed_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"N\": 4,\n  \"packets\": oops\n}").unwrap();
    let out = iasd(&["per", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn invalid_values_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n9.json");
    std::fs::write(&path, r#"{"N": 9}"#).unwrap();
    let out = iasd(&["per", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn per_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = iasd(&["per", "--config", &cfg, "--seed", "7", "--snr-db", "-2,4", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("snr_db,sir_db,scheme,tx_index,packets,failures,per"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn scheme_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = iasd(&["per", "--config", &cfg, "--scheme", "slcic"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).lines().nth(1).unwrap().contains(",slcic,"));
}

#[test]
fn throughput_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let o = iasd(&["throughput", "--config", &cfg, "--snr-db", "30"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "snr_db,mcs,throughput");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("30,qam4_r0.33,"));
}

#[test]
fn analyze_llr_csv() {
    let o = iasd(&["analyze-llr", "--snr-db", "5", "--instances", "20"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    assert!(text.starts_with("profile,snr_db,mean_abs_llr_mixture,mean_abs_llr_approx,mean_abs_gap\n"));
    assert_eq!(text.lines().count(), 4);
}
