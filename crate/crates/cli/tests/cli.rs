use std::path::PathBuf;
use std::process::{Command, Output};

fn trish(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trish"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
        .display()
        .to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&trish(&["--help"])), 0);
    let out = trish(&["--version"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("trish "));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&trish(&[])), 1);
    assert_eq!(code(&trish(&["frobnicate"])), 1);
    assert_eq!(code(&trish(&["verify", "--theorem", "6"])), 1);
    assert_eq!(
        code(&trish(&["run", "--dataset", &data("train.svm")])),
        1,
        "no method"
    );
    let train = data("train.svm");
    let out = trish(&[
        "run",
        "--dataset",
        &train,
        "--method",
        "sg",
        "--alpha",
        "1,2",
    ]);
    assert_eq!(code(&out), 1);
    let out = trish(&["verify", "--theorem", "2", "--alpha", "0.1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.svm");
    std::fs::write(&bad, "1 1:0.5\n-1 4:1 2:1\n").unwrap();
    let out = trish(&["stats", "--dataset", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("2:8"), "{err}");

    let missing = dir.path().join("missing.svm");
    let out = trish(&[
        "run",
        "--method",
        "sg",
        "--alpha",
        "1",
        "--epochs",
        "1",
        "--dataset",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn hypothesis_errors_exit_3() {
    let out = trish(&[
        "verify",
        "--theorem",
        "3",
        "--alpha",
        "0.9",
        "--seeds",
        "10",
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn verify_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t1.csv");
    let out = trish(&[
        "verify",
        "--theorem",
        "1",
        "--seeds",
        "100",
        "--iterations",
        "50",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,empirical_gap,standard_error,bound,violated");
    assert_eq!(lines.len(), 51);
    assert!(lines[1..].iter().all(|l| l.ends_with(",false")));
    assert!(dir.path().join("t1.csv.meta.json").exists());
}

#[test]
fn run_is_deterministic_and_matches_stats() {
    let train = data("train.svm");
    let args = [
        "run",
        "--dataset",
        &train,
        "--method",
        "trish",
        "--gamma1",
        "11",
        "--gamma2",
        "4.4",
        "--alpha",
        "1",
        "--batch",
        "5",
        "--epochs",
        "2",
        "--seeds",
        "3",
        "--seed",
        "7",
    ];
    let a = trish(&args);
    let b = trish(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "seed");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(!rows.is_empty());
    let seeds: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(seeds.into_iter().collect::<Vec<_>>(), ["7", "8", "9"]);
    let case_col = header.iter().position(|h| *h == "case1").unwrap();
    let it_col = header.iter().position(|h| *h == "iteration").unwrap();
    for r in &rows {
        let cases: u64 = (0..3)
            .map(|j| r[case_col + j].parse::<u64>().unwrap())
            .sum();
        assert_eq!(cases, r[it_col].parse::<u64>().unwrap());
    }

    let other = trish(&[
        "run",
        "--dataset",
        &train,
        "--method",
        "trish",
        "--gamma1",
        "11",
        "--gamma2",
        "4.4",
        "--alpha",
        "1",
        "--batch",
        "5",
        "--epochs",
        "2",
        "--seeds",
        "3",
        "--seed",
        "8",
    ]);
    assert_ne!(text.as_bytes(), other.stdout.as_slice());
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        format!(
            "# shared settings\nmethod = trish\ngamma1 = 15\ngamma2 = 6\nstepsize = fixed:5\n\
             dataset = {}\ntest_dataset = {}\nbatch = 10\nepochs = 1\nseeds = 2\n",
            data("train.svm"),
            data("test.svm")
        ),
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = trish(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--method",
        "sg",
        "--alpha",
        "10",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let meta = std::fs::read_to_string(dir.path().join("out.csv.meta.json")).unwrap();
    assert!(meta.contains("method = sg"), "{meta}");
    let text = std::fs::read_to_string(&csv).unwrap();
    // test columns are filled when a test set is configured
    let last = text.lines().last().unwrap();
    let cols: Vec<&str> = last.split(',').collect();
    assert!(!cols[5].is_empty() && !cols[6].is_empty(), "{last}");
}

#[test]
fn tune_marks_one_selected_row() {
    let train = data("train.svm");
    let out = trish(&[
        "tune",
        "--dataset",
        &train,
        "--method",
        "sg",
        "--batch",
        "5,20",
        "--alpha",
        "1,10",
        "--epochs",
        "1",
        "--seeds",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows.iter().filter(|r| r.ends_with(",true")).count(), 1);
}

#[test]
fn stats_reports_bundled_dataset() {
    let out = trish(&["stats", "--dataset", &data("test.svm")]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("count 600"));
    assert!(text.contains("nnz 7609"));
    assert!(text.contains("max_index 200"));
    assert!(text.contains("label_balance 0.265000"));
}
