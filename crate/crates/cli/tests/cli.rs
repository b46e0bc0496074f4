use std::path::Path;
use std::process::{Command, Output};

fn shellmc(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shellmc")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

const SMALL: &str = "# small shell-source run\nr0 = 0\nsource = shell\nr_source = 0.45\nkappa_s = 0.3\nkappa_t = 1\nn = 2000\ntally_cells = 10\nseed = 5\n";

#[test]
fn lists_presets() {
    let dir = tempfile::tempdir().unwrap();
    let o = shellmc(&["list-presets"], dir.path());
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["table1", "table6", "verify_streaming", "verify_absorbing", "shell_profile"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = shellmc(&["run", "no_such_preset"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("table1"));

    std::fs::write(dir.path().join("bad.cfg"), "r0 = 0.1\nkappa_s = 1.1\nkappa_t = 1\n").unwrap();
    let o = shellmc(&["run", "bad.cfg"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("kappa_s exceeds kappa_t"));

    let o = shellmc(&["run", "table1", "--set", "colour=blue"], dir.path());
    assert_eq!(code(&o), 2);
    let o = shellmc(&["frobnicate"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn config_run_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    let o = shellmc(&["run", "small.cfg", "--out", "res"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read(dir.path().join("res/summary_analog.csv"));
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), "n_histories,flux,variance,std_dev,time1_s,time2_s,fom1,fom2,p_reach");
    assert!(lines.next().unwrap().starts_with("2000,"));
    let profile = read(dir.path().join("res/profile_analog.csv"));
    assert_eq!(profile.lines().next().unwrap(), "r_center,psi,psi_std,n_crossings");
    assert_eq!(profile.lines().count(), 11);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path().join("res/summary.json"))).unwrap();
    assert_eq!(json["passed"], true);
    let analog = &json["engines"]["analog"];
    for key in ["mean", "sigma2", "Sigma2", "time1_s", "time2_s", "fom1", "fom2", "p_reach"] {
        assert!(analog.get(key).is_some(), "{key} missing");
    }
}

#[test]
fn reruns_write_identical_statistics() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("small.cfg"), SMALL).unwrap();
    for out in ["a", "b"] {
        assert_eq!(code(&shellmc(&["run", "small.cfg", "--out", out], dir.path())), 0);
    }
    let a = read(dir.path().join("a/profile_analog.csv"));
    assert_eq!(a, read(dir.path().join("b/profile_analog.csv")));
    // Everything except the timing columns is byte-identical.
    let strip = |s: String| -> Vec<String> {
        s.lines()
            .map(|l| {
                let f: Vec<&str> = l.split(',').collect();
                [f[0], f[1], f[2], f[3], f[8]].join(",")
            })
            .collect()
    };
    assert_eq!(strip(read(dir.path().join("a/summary_analog.csv"))), strip(read(dir.path().join("b/summary_analog.csv"))));

    let o = shellmc(&["run", "small.cfg", "--out", "c", "--seed", "6", "--workers", "2"], dir.path());
    assert_eq!(code(&o), 0);
    assert_ne!(a, read(dir.path().join("c/profile_analog.csv")));
}

#[test]
fn failed_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = shellmc(&["run", "verify_absorbing", "--set", "kappa_t=3", "--set", "n=20", "--out", "x"], dir.path());
    assert_eq!(code(&o), 1, "{}", String::from_utf8_lossy(&o.stdout));
    let json: serde_json::Value = serde_json::from_str(&read(dir.path().join("x/summary.json"))).unwrap();
    assert_eq!(json["passed"], false);
    assert!(json["checks"][0]["delta"].as_f64().unwrap() < 0.0);
}

#[test]
fn stationary_preset_passes_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = shellmc(&["run", "table2", "--set", "n_r=30", "--set", "n_mu=120", "--out", "t2"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let json: serde_json::Value = serde_json::from_str(&read(dir.path().join("t2/summary.json"))).unwrap();
    let biased = &json["engines"]["biased"];
    assert!(biased["time1_s"].as_f64().unwrap() >= biased["time2_s"].as_f64().unwrap());
    assert!(json["config"].as_str().unwrap().contains("n_mu = 120"));
}

#[test]
fn dump_importance_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("desk.cfg"), "r0 = 0.1\nkappa_s = 0.9\nn_r = 12\nn_mu = 8\n").unwrap();
    let o = shellmc(&["dump-importance", "desk.cfg", "--out", "imp"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let phi = read(dir.path().join("imp/phi.csv"));
    assert_eq!(phi.lines().next().unwrap(), "r_center,phi");
    assert_eq!(phi.lines().count(), 13);
    let table = read(dir.path().join("imp/importance.csv"));
    assert_eq!(table.lines().next().unwrap(), "r_center,mu_center,I,kappa_s_tilde,kappa_t_tilde");
    assert_eq!(table.lines().count(), 1 + 12 * 8);
    for line in table.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[2] > 0.0 && v[3] >= 0.0);
    }
    assert_eq!(code(&shellmc(&["dump-importance", "missing.cfg"], dir.path())), 2);
}
