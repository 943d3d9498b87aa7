use std::process::{Command, Output};

use hatt_core::bench::{read_rows, ResultRow, CSV_COLUMNS};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hatt-bench"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

const SMALL: [&str; 10] = [
    "--scenario",
    "custom",
    "--d",
    "3",
    "--n",
    "3",
    "--ranks",
    "3",
    "--targets",
    "2",
];

fn without_times(rows: Vec<ResultRow>) -> Vec<ResultRow> {
    rows.into_iter()
        .map(|r| ResultRow {
            wall_time_s: 0.0,
            ..r
        })
        .collect()
}

#[test]
fn writes_csv_to_stdout_by_default() {
    let out = bench(&[&SMALL[..], &["--seeds", "1,2"]].concat());
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let rows = read_rows(text.as_bytes()).unwrap();
    assert_eq!(rows.len(), 2 * 4);
    assert!(rows
        .iter()
        .all(|r| r.rel_error.unwrap() >= 0.0 && r.wall_time_s >= 0.0));
}

#[test]
fn out_file_and_deterministic_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let summary = dir.path().join("s.csv");
    for p in [&a, &b] {
        let out = bench(
            &[
                &SMALL[..],
                &[
                    "--out",
                    p.to_str().unwrap(),
                    "--summary-out",
                    summary.to_str().unwrap(),
                ],
            ]
            .concat(),
        );
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    let ra = read_rows(std::fs::File::open(&a).unwrap()).unwrap();
    let rb = read_rows(std::fs::File::open(&b).unwrap()).unwrap();
    assert_eq!(ra.len(), 5 * 4);
    assert_eq!(without_times(ra), without_times(rb));
    let s = std::fs::read_to_string(&summary).unwrap();
    assert!(s.starts_with("scenario,algorithm,d,n,r,s,ell,runs,failures,rel_error_mean"));
    assert_eq!(s.lines().count(), 1 + 4);
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        &["--bogus-flag"][..],
        &["--algorithms", "hatt-2", "--variant", "svd"],
        &["--scenario", "nope"],
        &["--seeds", "2,2"],
        &["--targets", "0"],
    ] {
        let out = bench(args);
        assert!(!out.status.success(), "{args:?}");
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn capped_cells_are_marked_and_strict_fails() {
    let capped = [&SMALL[..], &["--seeds", "1", "--dense-cap", "50"]].concat();
    let out = bench(&capped);
    assert!(out.status.success());
    let rows = read_rows(&out.stdout[..]).unwrap();
    let marked: Vec<_> = rows
        .iter()
        .filter(|r| r.is_error())
        .map(|r| r.algorithm.as_str())
        .collect();
    assert_eq!(marked, ["tt-rounding", "rand-orth"]);
    assert!(rows
        .iter()
        .filter(|r| r.is_error())
        .all(|r| r.output_ranks == "ERR:resource" && r.rel_error.is_none()));

    let strict = bench(&[&capped[..], &["--strict"]].concat());
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn flop_report_on_stderr() {
    let out = bench(&[&SMALL[..], &["--seeds", "1", "--flop-report"]].concat());
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("algorithm,d,n,r,s,ell,flops_model,flops_model_svd"));
    assert!(err.contains("hpcrl-2,3,3,3,3,2,"));
}
