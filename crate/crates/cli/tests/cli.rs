use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qsagin_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsagin"))
        .args(args)
        .env("QSAGIN_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn qsagin(args: &[&str]) -> Output {
    qsagin_with_threads(args, "1")
}

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_ok(args: &[&str]) -> String {
    let out = qsagin(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let stdout = run_ok(&["run", "--algo", "random", "--preset", "4", "--seeds", "0-2", "--epochs", "3", "--out", s(out)]);
        assert!(stdout.contains("random on tiny"), "{stdout}");
    }
    let epochs = fs::read_to_string(a.join("epochs.csv")).unwrap();
    assert_eq!(epochs.lines().count(), 1 + 3 * 3);
    for f in ["epochs.csv", "curve.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let args = ["run", "--algo", "qmarl", "--preset", "16", "--seeds", "0-2", "--epochs", "2", "--out", s(out)];
        let o = qsagin_with_threads(&args, threads);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["epochs.csv", "curve.csv", "summary.csv", "seeds/seed-1-final-steps.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn scenario_file_and_preset_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    let tiny = scenarios().join("tiny.toml");
    run_ok(&["run", "--scenario", s(&tiny), "--algo", "qmarl", "--preset", "2^2", "--epochs", "1", "--out", s(dir.path())]);
    let out = qsagin(&["run", "--scenario", s(&tiny), "--algo", "qmarl", "--preset", "16", "--out", s(dir.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("2^4 was requested"));
}

#[test]
fn usage_errors() {
    let out = qsagin(&["run", "--algo", "ppo", "--preset", "4", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown algorithm"));

    let out = qsagin(&["run", "--algo", "random", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qsagin(&["run", "--scenario", "/nonexistent.toml", "--algo", "random", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent.toml"));
}

#[test]
fn compare_ranks_runs() {
    let dir = tempfile::tempdir().unwrap();
    let mut dirs = Vec::new();
    for algo in ["random", "qmarl", "marl"] {
        let out = dir.path().join(algo);
        run_ok(&["run", "--algo", algo, "--preset", "2", "--seeds", "5", "--epochs", "2", "--out", s(&out)]);
        dirs.push(out);
    }
    let csv = dir.path().join("table.csv");
    let mut args = vec!["compare", "--out", s(&csv), "--in"];
    args.extend(dirs.iter().map(|d| s(d)));
    let table = run_ok(&args);
    assert!(table.starts_with("|A|"), "{table}");
    assert!(table.contains("2^1"));
    assert!(table.contains("1.0000"));
    let csv = fs::read_to_string(csv).unwrap();
    assert!(csv.starts_with("action_dim,scenario,qmarl,marl,random,ranking"));

    // Same action dimension, different scenario.
    let variant = dir.path().join("variant.toml");
    let text = fs::read_to_string(scenarios().join("single.toml")).unwrap().replace("name = \"single\"", "name = \"other\"");
    fs::write(&variant, text).unwrap();
    let other = dir.path().join("other");
    run_ok(&["run", "--scenario", s(&variant), "--algo", "dqn", "--epochs", "2", "--out", s(&other)]);
    let out = qsagin(&["compare", "--in", s(&dirs[0]), s(&other)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("mixes scenarios"));
}

#[test]
fn orbits_export() {
    let dir = tempfile::tempdir().unwrap();
    let tle = dir.path().join("iss.tle");
    fs::write(
        &tle,
        "ISS (ZARYA)\n\
         1 25544U 98067A   08264.51782528 -.00002182  00000-0 -11606-4 0  2927\n\
         2 25544  51.6416 247.4627 0006703 130.5360 325.0288 15.72125391563537\n",
    )
    .unwrap();
    let gs = dir.path().join("gs.csv");
    fs::write(&gs, "name,latitude_deg,longitude_deg,altitude\nseoul,37.5,127.0,40\nquito,-0.2,-78.5,2850\n").unwrap();
    let out = dir.path().join("track.csv");
    run_ok(&["orbits", "--tle", s(&tle), "--gs", s(&gs), "--span", "3600", "--step", "60", "--out", s(&out)]);
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "time,epoch,satellite,latitude_deg,longitude_deg,altitude,ground_station,elevation_deg,slant_range,surface_distance,visible"
    );
    assert_eq!(lines.count(), 61 * 2);

    let stdout = run_ok(&["orbits", "--tle", s(&tle), "--gs", s(&gs), "--span", "0", "--step", "1"]);
    assert_eq!(stdout.lines().count(), 3);
    assert!(stdout.contains("ISS (ZARYA)"));
}
