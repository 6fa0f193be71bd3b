use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gbc_tin::{mi_exact_tin, ChannelParams, MiMethod, User};

fn gbc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbc-tin"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gbc-tin-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

/// Parses every field and re-emits it in the writer's format.
fn reserialize(text: &str) -> String {
    let mut out = String::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<String> = line
            .split(',')
            .map(|f| {
                if i == 0 || f.is_empty() || !f.contains('e') || f.parse::<f64>().is_err() {
                    f.to_string()
                } else {
                    format!("{:.16e}", f.parse::<f64>().unwrap())
                }
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[test]
fn csv_round_trips_byte_identically() {
    let dir = scratch("roundtrip");
    assert!(gbc(&["region", "--alpha-grid", "4"], &dir).status.success());
    assert!(gbc(&["fig5", "--alpha-grid", "11"], &dir).status.success());
    for f in ["rate_points.csv", "frontier.csv", "capacity.csv", "fig5.csv"] {
        let text = std::fs::read_to_string(dir.join(f)).unwrap();
        assert_eq!(reserialize(&text), text, "{f}");
    }
    let header = std::fs::read_to_string(dir.join("rate_points.csv")).unwrap();
    assert!(header.starts_with("scheme,m1,m2,alpha,ts_lambda,r1,r2,method,err_est\n"));
    assert!(header.contains("ts_combination,"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn minimal_alpha_grid_region() {
    let dir = scratch("grid2");
    let out = gbc(&["region", "--alpha-grid", "2", "--mi-method", "lb"], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.join("rate_points.csv")).unwrap();
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.starts_with("closed_form_lb") || l.starts_with("ts_combination")));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn empty_scan_warns_and_succeeds() {
    let dir = scratch("empty");
    let out = gbc(&["gap-scan", "--snr1-min-db", "10", "--snr1-max-db", "9"], &dir);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let text = std::fs::read_to_string(dir.join("gap_report.csv")).unwrap();
    assert_eq!(
        text,
        "snr1_db,snr2_db,case_tag,m1,m2,alpha,delta1,delta2,bound1,bound2,pass\n"
    );
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn lowered_bounds_exit_nonzero() {
    let dir = scratch("lowered");
    let out = gbc(&["gap-scan", "--snr1-max-db", "12", "--bound-scale", "0.5"], &dir);
    assert_eq!(out.status.code(), Some(1));
    let text = std::fs::read_to_string(dir.join("gap_report.csv")).unwrap();
    assert!(text.contains(",false"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn fig5_endpoint_rows() {
    let dir = scratch("fig5");
    assert!(gbc(&["fig5", "--alpha-grid", "11"], &dir).status.success());
    let mut r = csv::Reader::from_path(dir.join("fig5.csv")).unwrap();
    let rows: Vec<Vec<f64>> = r
        .records()
        .map(|x| x.unwrap().iter().map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert_eq!(last[1], 0.0);
    assert!(last[2..].iter().all(|&x| x >= 0.0));

    let ch = ChannelParams::<f64>::from_db(20.0, 10.0).unwrap();
    for (col, (m1, m2)) in [(2, (5, 2)), (3, (4, 2)), (4, (3, 3))] {
        let single = mi_exact_tin(User::Weak, &ch, 0.0, m1, m2, &MiMethod::default()).unwrap();
        assert_eq!(rows[0][col], single.value);
    }
    assert!(rows.iter().any(|r| r[4] > r[1]));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn json_mirrors_csv() {
    let dir = scratch("json");
    assert!(gbc(&["fig5", "--alpha-grid", "5", "--format", "json"], &dir)
        .status
        .success());
    assert!(gbc(&["fig5", "--alpha-grid", "5"], &dir).status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("fig5.json")).unwrap()).unwrap();
    let mut r = csv::Reader::from_path(dir.join("fig5.csv")).unwrap();
    for (rec, obj) in r.records().zip(v.as_array().unwrap()) {
        let rec = rec.unwrap();
        for (i, key) in ["alpha", "c2", "mi_52", "mi_42", "mi_33"].iter().enumerate() {
            assert_eq!(obj[key].as_f64().unwrap(), rec[i].parse::<f64>().unwrap());
        }
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn unwritable_out_dir_names_path() {
    let dir = scratch("blocked");
    std::fs::create_dir_all(dir.parent().unwrap()).unwrap();
    std::fs::write(&dir, "not a directory").unwrap();
    let out = gbc(&["fig5", "--alpha-grid", "3"], &dir.join("sub"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(&*dir.to_string_lossy()));
    std::fs::remove_file(dir).ok();
}

#[test]
fn config_file_and_flag_override() {
    let dir = scratch("cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "snr1_db = 20\nsnr2_db = 10\nalpha-grid = 3\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gbc-tin"))
        .args(["fig5", "--alpha-grid", "6", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.join("fig5.csv")).unwrap();
    assert_eq!(text.lines().count(), 7);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn rejects_equal_snrs() {
    let dir = scratch("equal");
    let out = gbc(&["region", "--snr1-db", "10", "--snr2-db", "10"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mi_query_prints_both_users() {
    let out = Command::new(env!("CARGO_BIN_EXE_gbc-tin"))
        .args(["mi", "--m1", "3", "--m2", "4", "--alpha", "0.05"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,3,4,") && lines[2].starts_with("2,3,4,"));
}
