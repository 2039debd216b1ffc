use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wavebound(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wavebound"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn theta_for_m2_certifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavebound(&["verify", "theta", "--m", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = fs::read_to_string(dir.path().join("verify-theta.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["status"], "certified");
    assert!(dir.path().join("manifest.txt").exists());
}

#[test]
fn malformed_config_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "n = 5\nthis line has no separator\n").unwrap();
    let o = wavebound(&["constants", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    fs::write(&cfg, "unknown_key = 1\n").unwrap();
    let o = wavebound(&["constants", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 1);
}

#[test]
fn clap_errors_and_help() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&wavebound(&["no-such-command"], dir.path())), 1);
    assert_eq!(code(&wavebound(&["verify", "nothing"], dir.path())), 1);
    assert_eq!(code(&wavebound(&["--help"], dir.path())), 0);
    assert_eq!(code(&wavebound(&["constants", "--n", "x"], dir.path())), 1);
}

#[test]
fn negative_control_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("control.cfg");
    fs::write(&cfg, "# flipped velocity\nn = 5\nnegate = g\ngrid = 8\n").unwrap();
    let o = wavebound(&["verify", "lower-odd", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    let csv = fs::read_to_string(dir.path().join("verify-lower-odd-violations.csv")).unwrap();
    assert!(csv.lines().count() > 1);

    let o = wavebound(&["verify", "lower-odd", "--grid", "8"], dir.path());
    assert_eq!(code(&o), 0);
}

#[test]
fn fdm_with_wrong_m_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let ok = wavebound(&["compare", "--set", "points=4"], dir.path());
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let bad = wavebound(&["compare", "--set", "points=4", "--m", "3"], dir.path());
    assert_eq!(code(&bad), 2);
}

#[test]
fn constants_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = wavebound(&["constants", "--p", "3", "--set", "m_range=2..4"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "m,eta_m,zeta_m,delta,C1m,C2m,Em,kappa0,p0");
    assert_eq!(lines.len(), 4);
    let row: Vec<f64> = lines[1].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&row[..5], &[2.0, 1.0, 1.0, 2.0, 2.0]);
    assert_eq!(row[7], 1.0);

    let o = wavebound(&["constants", "--set", "m_range=3..2"], dir.path());
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(dir.path().join("constants.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

fn no_temp_files(dir: &Path) {
    for e in fs::read_dir(dir).unwrap() {
        let name = e.unwrap().file_name().into_string().unwrap();
        assert!(!name.starts_with(".tmp"), "left behind {name}");
    }
}

#[test]
fn manifest_reproduces_outputs() {
    let cases: [(&[&str], &[&str]); 3] = [
        (&["free", "--n", "4", "--grid", "6", "--kappa", "0.7"], &["free.csv"]),
        (
            &["verify", "lower-odd", "--grid", "6", "--set", "negate=g"],
            &["verify-lower-odd-violations.csv"],
        ),
        (
            &["iterate", "--n", "3", "--set", "apex_r=40", "--set", "apex_t=12", "--set", "levels=8"],
            &["iterate.csv"],
        ),
    ];
    for (args, files) in cases {
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        wavebound(args, first.path());
        let manifest = first.path().join("manifest.txt");
        let cmd: Vec<&str> = args.iter().copied().take_while(|a| !a.starts_with("--")).collect();
        let mut rerun = cmd.clone();
        rerun.extend(["--config", manifest.to_str().unwrap()]);
        wavebound(&rerun, second.path());
        for f in files {
            let a = fs::read(first.path().join(f)).unwrap();
            let b = fs::read(second.path().join(f)).unwrap();
            assert!(!a.is_empty());
            assert_eq!(a, b, "{f} differs after rerun of {cmd:?}");
        }
        no_temp_files(first.path());
        no_temp_files(second.path());
    }
}
