use std::f64::consts::PI;
use std::process::{Command, Output};

fn zerocorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerocorr")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Header and rows of a CSV table, split on commas outside quotes.
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let split = |line: &str| {
        let mut cells = vec![String::new()];
        let mut quoted = false;
        for ch in line.chars() {
            match ch {
                '"' => quoted = !quoted,
                ',' if !quoted => cells.push(String::new()),
                _ => cells.last_mut().unwrap().push(ch),
            }
        }
        cells
    };
    let mut lines = text.lines();
    let header = split(lines.next().unwrap());
    (header, lines.map(split).collect())
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn kappa_grid_has_quadratic_onset() {
    let out = stdout(&zerocorr(&["kappa", "--k", "1", "--m", "1", "--r", "0..4:400"]));
    let (header, rows) = table(&out);
    assert_eq!(header, ["r", "kappa", "series", "asymptote"]);
    assert_eq!(rows.len(), 400);
    for row in &rows[1..5] {
        let r: f64 = row[0].parse().unwrap();
        let k: f64 = row[1].parse().unwrap();
        assert!((k / (0.5 * r * r) - 1.0).abs() < 1e-3, "r={r}: {k}");
    }
    let last: f64 = rows[399][0].parse().unwrap();
    assert_eq!(last, 4.0);
}

#[test]
fn codimension_two_pair_near_three_quarters() {
    let out = stdout(&zerocorr(&[
        "correlate", "--model", "heisenberg-limit", "--m", "2", "--k", "2", "--n", "2", "--r", "0.001",
    ]));
    let (header, rows) = table(&out);
    let v: f64 = rows[0][column(&header, "K_normalized")].parse().unwrap();
    assert!((v - 0.75).abs() < 1e-3, "{v}");
}

#[test]
fn fubini_study_density() {
    let out = stdout(&zerocorr(&["correlate", "--model", "fs", "--N", "10", "--m", "1", "--k", "1", "--n", "1"]));
    let (header, rows) = table(&out);
    let v: f64 = rows[0][column(&header, "K")].parse().unwrap();
    assert!((v - 10.0 / PI).abs() < 1e-12);
    assert_eq!(rows[0][column(&header, "N")], "10");
}

#[test]
fn monte_carlo_correlate_reports_stderr() {
    let out = stdout(&zerocorr(&["correlate", "--r", "1", "--method", "mc", "--samples", "200000", "--seed", "3"]));
    let (header, rows) = table(&out);
    let v: f64 = rows[0][column(&header, "K_normalized")].parse().unwrap();
    let se: f64 = rows[0][column(&header, "stderr_normalized")].parse().unwrap();
    assert!(se > 0.0 && ((v - 0.4736) / se).abs() < 4.0, "{v} ± {se}");
}

#[test]
fn converge_reports_decay_exponent() {
    let out = stdout(&zerocorr(&["converge", "--m", "1", "--r", "1", "--N", "64..1024:3:log"]));
    let (header, rows) = table(&out);
    assert_eq!(header, ["N", "deviation", "fitted_exponent"]);
    assert_eq!(rows.iter().map(|r| r[0].as_str()).collect::<Vec<_>>(), ["64", "256", "1024"]);
    let slope: f64 = rows[0][2].parse().unwrap();
    assert!(slope >= 0.45, "{slope}");
    let anchored = stdout(&zerocorr(&["converge", "--placement", "anchored", "--N", "64..1024:3:log"]));
    assert_ne!(anchored, out);
}

#[test]
fn mc_table_columns() {
    let out = stdout(&zerocorr(&["mc", "--N", "100", "--samples", "50", "--window", "2", "--bins", "0..2:5"]));
    let (header, rows) = table(&out);
    assert_eq!(
        header,
        ["bin_left", "bin_right", "count", "normalizer", "g_estimate", "stderr", "kappa_reference"]
    );
    assert_eq!(rows.len(), 4);
}

#[test]
fn kernel_check_and_connected() {
    let out = stdout(&zerocorr(&["kernel-check", "--N", "100..400:3:log"]));
    let (_, rows) = table(&out);
    assert_eq!(rows.len(), 3);
    let slope: f64 = rows[0][3].parse().unwrap();
    assert!(slope >= 0.45);

    let out = stdout(&zerocorr(&["connected", "--points", "0;2;1+1.6i"]));
    let (header, rows) = table(&out);
    assert_eq!(header, ["n", "m", "k", "connected", "decay_bound"]);
    let t: f64 = rows[0][3].parse().unwrap();
    let b: f64 = rows[0][4].parse().unwrap();
    assert!(t.is_finite() && b > 0.0);
}

#[test]
fn json_mirrors_csv() {
    let csv = stdout(&zerocorr(&["kappa", "--r", "0.5..1:2"]));
    let json = stdout(&zerocorr(&["kappa", "--r", "0.5..1:2", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let (_, rows) = table(&csv);
    for (i, row) in rows.iter().enumerate() {
        let from_csv: f64 = row[1].parse().unwrap();
        assert_eq!(v["rows"][i][1].as_f64().unwrap(), from_csv);
    }
}

#[test]
fn identical_runs_give_identical_files() {
    let dir = std::env::temp_dir().join(format!("zerocorr-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for path in [&a, &b] {
        let out = zerocorr(&[
            "mc", "--N", "100", "--samples", "30", "--window", "2", "--bins", "0..2:5", "--seed", "9", "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let single = Command::new(env!("CARGO_BIN_EXE_zerocorr"))
        .args(["correlate", "--method", "mc", "--samples", "50000", "--seed", "1"])
        .env("ZEROCORR_THREADS", "1")
        .output()
        .unwrap();
    let many = zerocorr(&["correlate", "--method", "mc", "--samples", "50000", "--seed", "1"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(stdout(&single), stdout(&many));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["kappa", "--bogus"][..],
        &["kappa", "--r", "0..4"],
        &["kappa", "--r", "0..4:0"],
        &["correlate", "--model", "fs"],
        &["correlate", "--points", "0;1,2"],
        &["nonsense"],
    ] {
        let out = zerocorr(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage") || String::from_utf8_lossy(&out.stderr).contains("--help"));
    }
    let out = Command::new(env!("CARGO_BIN_EXE_zerocorr")).args(["kappa"]).env("ZEROCORR_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_one_and_name_the_error() {
    let cases: [(&[&str], &str); 4] = [
        (&["correlate", "--r", "1e-7"], "NearSingular"),
        (&["kappa", "--k", "3", "--m", "3"], "DomainError"),
        (&["mc", "--N", "100", "--window", "3"], "InsufficientDegree"),
        (&["correlate", "--n", "4"], "SizeLimitExceeded"),
    ];
    for (args, kind) in cases {
        let out = zerocorr(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(kind), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_documents_columns() {
    let out = stdout(&zerocorr(&["mc", "--help"]));
    assert!(out.contains("kappa_reference"));
    let out = stdout(&zerocorr(&["--help"]));
    assert!(out.contains("ZEROCORR_THREADS"));
}
