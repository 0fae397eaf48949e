mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::fixture;
use mmray::io::{components_to_rows, parse_components_csv, write_components_csv};
use mmray::tracer::MultipathComponent;

fn mmray(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmray")).args(args).output().expect("binary runs")
}

fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn trace_into(out: &Path) -> Output {
    let cfg = fixture("trace.json");
    mmray(&["trace", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

#[test]
fn trace_is_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = trace_into(d.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (sa, sb) = (dir_snapshot(a.path()), dir_snapshot(b.path()));
    assert!(sa.iter().any(|(n, _)| n == "components_rx_near.csv"));
    assert!(sa.iter().any(|(n, _)| n == "trace_summary.csv"));
    assert_eq!(sa, sb);
}

#[test]
fn calibrate_is_byte_identical_for_a_fixed_seed() {
    let cfg = fixture("calibrate.json");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = mmray(&[
            "calibrate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let sa = dir_snapshot(a.path());
    assert_eq!(
        sa.iter().map(|f| f.0.as_str()).collect::<Vec<_>>(),
        ["materials.csv", "materials.txt", "residuals.csv"]
    );
    assert_eq!(sa, dir_snapshot(b.path()));
}

#[test]
fn component_csv_round_trips_at_printed_precision() {
    let out = tempfile::tempdir().unwrap();
    assert!(trace_into(out.path()).status.success());
    for entry in std::fs::read_dir(out.path()).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        if !name.starts_with("components_") {
            continue;
        }
        let text = std::fs::read_to_string(&p).unwrap();
        let rows = parse_components_csv(&text).unwrap();
        assert!(!rows.is_empty(), "{name}");
        assert_eq!(write_components_csv(&rows).unwrap(), text, "{name}");
        let comps: Vec<MultipathComponent> = rows.iter().map(|r| r.to_component().unwrap()).collect();
        assert_eq!(write_components_csv(&components_to_rows(&comps)).unwrap(), text, "{name}");
    }
}

#[test]
fn stats_and_compare_run_on_traced_tables() {
    let out = tempfile::tempdir().unwrap();
    assert!(trace_into(out.path()).status.success());
    let near = out.path().join("components_rx_near.csv");
    let corner = out.path().join("components_rx_corner.csv");
    let stats_dir = out.path().join("stats");
    let o = mmray(&[
        "stats",
        "--out",
        stats_dir.to_str().unwrap(),
        near.to_str().unwrap(),
        corner.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stats = stats_dir.join("stats.csv");
    let text = std::fs::read_to_string(&stats).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}");
    assert!(stats_dir.join("pdp_components_rx_near.svg").exists());

    // A table compared with itself differs by nothing.
    let cmp_dir = out.path().join("cmp");
    let o = mmray(&[
        "compare",
        "--measured",
        stats.to_str().unwrap(),
        "--predicted",
        stats.to_str().unwrap(),
        "--out",
        cmp_dir.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cmp = std::fs::read_to_string(cmp_dir.join("compare.csv")).unwrap();
    for line in cmp.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[3], "0", "{line}");
        assert_eq!(f[6], "0", "{line}");
    }
}

#[test]
fn invalid_input_exits_with_validation_code() {
    let out = tempfile::tempdir().unwrap();
    let cfg = fixture("trace.json");
    let o = mmray(&["trace", "--config", cfg.to_str().unwrap(), "--nt", "0", "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = mmray(&["trace", "--env", "/nonexistent/env.json", "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = mmray(&["stats", "--out", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(std::fs::read_dir(out.path()).unwrap().next().is_none(), "nothing written on failure");
}

fn az_el(v: [f64; 3]) -> (f64, f64) {
    (v[1].atan2(v[0]).to_degrees(), v[2].atan2(v[0].hypot(v[1])).to_degrees())
}

#[test]
fn los_only_measurements_exit_with_degeneracy_code() {
    let dir = tempfile::tempdir().unwrap();
    let tx = [1.5, 5.0, 2.5];
    let mut csv = String::from(
        "id,tx_x,tx_y,tx_z,rx_x,rx_y,rx_z,tx_az_deg,tx_el_deg,rx_az_deg,rx_el_deg,tx_power_dbm,measured_power_dbm,freq_ghz\n",
    );
    for (i, rx) in [[6.0, 4.0, 1.5], [9.0, 3.0, 1.2]].iter().enumerate() {
        let fwd = [rx[0] - tx[0], rx[1] - tx[1], rx[2] - tx[2]];
        let (ta, te) = az_el(fwd);
        let (ra, re) = az_el([-fwd[0], -fwd[1], -fwd[2]]);
        csv.push_str(&format!(
            "los{i},{},{},{},{},{},{},{ta},{te},{ra},{re},30,-40,28\n",
            tx[0], tx[1], tx[2], rx[0], rx[1], rx[2]
        ));
    }
    let meas = dir.path().join("los.csv");
    std::fs::write(&meas, csv).unwrap();
    let cfg = fixture("calibrate.json");
    let out = dir.path().join("out");
    let o = mmray(&[
        "calibrate",
        "--config",
        cfg.to_str().unwrap(),
        "--measurements",
        meas.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}
