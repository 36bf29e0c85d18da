use std::path::Path;
use std::process::{Command, Output};

fn rescon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rescon")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_run_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scalar.toml");
    let trace = dir.path().join("scalar.csv");

    let out = rescon(&[
        "gen",
        "--template",
        "scalar-two-sided",
        "--n",
        "14",
        "--f",
        "1",
        "--split",
        "7/6",
        "--rounds",
        "200",
        "--seed",
        "4",
        "--adversary",
        "gaussian:2.0",
        "--out",
        path(&scenario),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = rescon(&[
        "run",
        "--scenario",
        path(&scenario),
        "--out",
        path(&trace),
        "--check-lemmas",
        "--rounds",
        "50",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(csv.lines().count(), 52);
    assert!(csv.starts_with("t,V,min_Vi,max_Vi,sum_phi,sum_S,sum_psi,agent_descent_ok"));
    assert!(dir.path().join("scalar.summary.toml").exists());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("failed_checks = []"));

    let out = rescon(&["analyze", "--scenario", path(&scenario)]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("redundant = true"));
    assert!(stdout.contains("rho = "));
}

#[test]
fn parallel_flag_gives_same_trace() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("fan.toml");
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    let out = rescon(&[
        "gen",
        "--template",
        "halfspace-fan-2d",
        "--n",
        "41",
        "--f",
        "1",
        "--k",
        "7",
        "--rounds",
        "100",
        "--adversary",
        "mirror:2.5",
        "--out",
        path(&scenario),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(rescon(&["run", "--scenario", path(&scenario), "--out", path(&serial)])
        .status
        .success());
    assert!(rescon(&[
        "run",
        "--scenario",
        path(&scenario),
        "--out",
        path(&parallel),
        "--parallel"
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&serial).unwrap(), std::fs::read(&parallel).unwrap());
}

#[test]
fn invalid_configs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("bad.toml");

    let out = rescon(&[
        "gen",
        "--template",
        "halfspace-fan-2d",
        "--n",
        "9",
        "--f",
        "1",
        "--k",
        "5",
        "--out",
        path(&scenario),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!scenario.exists());

    let out = rescon(&[
        "gen",
        "--template",
        "scalar-two-sided",
        "--n",
        "14",
        "--f",
        "1",
        "--split",
        "7/6",
        "--k",
        "5",
        "--out",
        path(&scenario),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("right side is 5"));

    std::fs::write(&scenario, "n = 3\nf = 5\n").unwrap();
    assert_eq!(rescon(&["run", "--scenario", path(&scenario)]).status.code(), Some(2));
    assert_eq!(
        rescon(&["analyze", "--scenario", path(&scenario)]).status.code(),
        Some(2)
    );
    assert_ne!(
        rescon(&["run", "--scenario", path(&dir.path().join("missing.toml"))])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn counterexample_stays_put() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("pinned.toml");
    let out = rescon(&[
        "gen",
        "--template",
        "thm1-counterexample",
        "--n",
        "5",
        "--f",
        "1",
        "--rounds",
        "500",
        "--out",
        path(&scenario),
    ]);
    assert!(out.status.success());
    let out = rescon(&["run", "--scenario", path(&scenario), "--check-lemmas"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("fitted_rate = 1.0"));
    assert!(stdout.contains("final_v = 3.0"));
}

/// A thin wedge whose true regularity constant is about 0.01, configured with `mu = 1`.
fn overstated_wedge() -> String {
    let mut s = String::from(
        "n = 19\nf = 1\nbyzantine_ids = [18]\nm = 2\nx_star = [0.0, 0.0]\nalpha = 0.002\nk = 6\nmu = 1.0\n\
         rounds = 300\nseed = 1\n\n[adversary]\nstrategy = \"echo_fixed_point\"\ntarget = [0.0, 5.0]\n\n\
         [init]\nkind = \"ball\"\ncenter = [0.0, 5.0]\nradius = 1.0\n",
    );
    for normal in ["[1.0, 0.01]", "[-1.0, 0.01]", "[0.0, -1.0]"] {
        for _ in 0..6 {
            s.push_str(&format!(
                "[[sets]]\ntype = \"halfspace\"\nnormal = {normal}\noffset = 0.0\n"
            ));
        }
    }
    s
}

#[test]
fn failed_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("wedge.toml");
    std::fs::write(&scenario, overstated_wedge()).unwrap();

    let out = rescon(&["run", "--scenario", path(&scenario), "--check-lemmas"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("aggregate_descent"));
    // without the flag the same run succeeds and only reports the failure
    let out = rescon(&["run", "--scenario", path(&scenario)]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("aggregate_descent"));

    // estimating mu exposes the family as far from the required redundancy
    std::fs::write(&scenario, overstated_wedge().replace("mu = 1.0", "mu = \"estimate\"")).unwrap();
    let out = rescon(&["analyze", "--scenario", path(&scenario)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infeasible parameters"));
}
