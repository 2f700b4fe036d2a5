use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mwrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwrc"))
        .args(args)
        .env("MWRC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn dof_example() {
    let o = mwrc(&["dof", configs().join("example.toml").to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("bound 6, achievable 6, regime P1.i.C2.cond3.1, OPTIMAL"));
}

#[test]
fn dof_fractional_value_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "c.toml", "clusters = [[3, 3], [2, 2]]\nrelay_antennas = 4\n");
    let o = mwrc(&["dof", &f]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("bound 8, achievable 20/3"), "{text}");
    assert!(text.contains("UNKNOWN optimality"));
}

#[test]
fn malformed_and_invalid_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.toml", "clusters = [[3, 2]\n");
    assert_eq!(mwrc(&["dof", &bad]).status.code(), Some(2));
    let zero = write(&dir, "zero.toml", "clusters = [[3, 0], [2, 2]]\nrelay_antennas = 3\n");
    let o = mwrc(&["dof", &zero]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("clusters[0][1]"));
    let extra = write(&dir, "extra.toml", "clusters = [[2, 2]]\nrelay_antennas = 3\nfoo = 1\n");
    assert_eq!(mwrc(&["dof", &extra]).status.code(), Some(2));
    assert_eq!(mwrc(&["dof", "/nonexistent/x.toml"]).status.code(), Some(2));
}

#[test]
fn plan_verify_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "s.toml", "clusters = [[3, 3], [3, 3]]\nrelay_antennas = 4\n");
    let a = mwrc(&["plan", &f, "--seed", "7", "--verify"]);
    assert!(a.status.success());
    let text = stdout(&a);
    assert!(text.contains("verify: PASS"), "{text}");
    let b = mwrc(&["plan", &f, "--seed", "7", "--verify"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn plan_without_scheme_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // 2N binds but none of its optimality conditions hold
    let f = write(&dir, "u.toml", "clusters = [[3, 3, 3], [3, 3, 3]]\nrelay_antennas = 7\n");
    let rep = stdout(&mwrc(&["dof", &f]));
    assert!(rep.contains(".unknown"), "{rep}");
    let o = mwrc(&["plan", &f]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no constructive scheme in catalog"));
}

#[test]
fn simulate_rows_and_precondition() {
    let ex = configs().join("example.toml");
    let ex = ex.to_str().unwrap();
    let o = mwrc(&["simulate", ex, "--seeds", "10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "seed,rate_lo,rate_hi,slope,predicted_dof");
    assert_eq!(lines.len(), 11);
    assert!(lines[1..].iter().all(|l| l.ends_with(",6")));
    assert_eq!(mwrc(&["simulate", ex, "--seeds", "10"]).stdout, o.stdout);

    let o = mwrc(&["simulate", ex, "--snr-lo", "1e4", "--snr-hi", "5e5"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn sweep_single_cell_and_y_channel() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(&dir, "one.toml", "[ranges]\nl = 2\nk = 2\nm = 3\nn = 4\n");
    let text = stdout(&mwrc(&["sweep", &one]));
    assert_eq!(text.lines().count(), 2);

    let y = write(
        &dir,
        "y.toml",
        "[ranges]\nl = 1\nk = 3\nm = 4\nn = { from = 3, to = 6 }\n",
    );
    let text = stdout(&mwrc(&["sweep", &y]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], "1,3,4;4;4,3,6,6,T4.ssa,optimal");
}

#[test]
fn sweep_with_seeds_adds_verification_column() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        &dir,
        "v.toml",
        "seeds = [1, 2, 3]\n[ranges]\nl = 2\nk = 2\nm = 3\nn = [4, 5]\n",
    );
    let text = stdout(&mwrc(&["sweep", &f]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "l,k,m_users,n,bound,achievable,regime,optimal,noiseless_pass");
    assert!(lines[1].ends_with(",3/3"), "{}", lines[1]);
}

#[test]
fn oversize_sweep_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        &dir,
        "big.toml",
        "[ranges]\nl = { from = 1, to = 50 }\nk = 2\nm1 = { from = 1, to = 200 }\nm2 = { from = 1, to = 200 }\nn = 4\n",
    );
    assert_eq!(mwrc(&["sweep", &f]).status.code(), Some(5));
}

#[test]
fn regime_map_sweep_matches_golden() {
    let o = mwrc(&["sweep", configs().join("regime_map_n16.toml").to_str().unwrap()]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/regime_map_n16.csv"),
    )
    .unwrap();
    assert_eq!(stdout(&o), golden);
}
