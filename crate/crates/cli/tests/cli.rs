use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_msheaf"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], cfg: &Path) -> Output {
    bin().args(args).arg(cfg).output().unwrap()
}

fn temp_cfg(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::Builder::new().suffix(".cfg").tempfile().unwrap();
    std::fs::write(f.path(), text).unwrap();
    f
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn shipped_configs_run_cleanly() {
    for (cmd, cfg) in [
        ("force", "torus.cfg"),
        ("force", "lattice.cfg"),
        ("force", "packet.cfg"),
        ("propagator", "propagator.cfg"),
        ("delta", "delta.cfg"),
        ("gmt", "gmt.cfg"),
        ("report", "torus.cfg"),
    ] {
        for format in ["csv", "json", "table"] {
            let out = run(&[cmd, "--format", format], &shipped(cfg));
            assert!(out.status.success(), "{cmd} {cfg} {format}: {}", String::from_utf8_lossy(&out.stderr));
            assert!(!out.stdout.is_empty());
        }
    }
}

#[test]
fn propagator_grid_has_one_row_per_combination() {
    let f = temp_cfg("[propagator]\nx1 = 0 1 2\nx0 = 0 0.5 1\nt = 0 0.5 1\ntau = 0 0.01\n");
    let out = run(&["propagator", "--format", "csv"], f.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x1,x0,t,tau,re_k,im_k,abs_k,arg_k,re_exact,im_exact,rel_err,error");
    assert_eq!(lines.len(), 1 + 54);
    // only the rows with t = 0 and tau = 0 are flagged
    let flagged: Vec<&&str> = lines[1..].iter().filter(|l| !l.ends_with(',')).collect();
    assert_eq!(flagged.len(), 9);
    assert!(flagged.iter().all(|l| l.contains(",0.0,0.0,")));

    let rows = json_lines(&run(&["propagator", "--format", "json"], f.path()));
    for r in rows.iter().filter(|r| r["t"] == 1.0 && r["tau"] == 0.01) {
        assert!(r["rel_err"].as_f64().unwrap() < 1e-3, "{r}");
    }
}

#[test]
fn expectations_drive_the_exit_code() {
    let base = "[sheaf]\nkind = torus\n[section a]\ncurve = 0.3\n[section b]\ncurve = 0.5\n";
    let good = temp_cfg(&format!("{base}[condition]\ntext = d(a, b) < 0.5\nat = point 1\nexpect = forced\n"));
    assert_eq!(run(&["force"], good.path()).status.code(), Some(0));
    let bad = temp_cfg(&format!("{base}[condition]\ntext = d(a, b) > 0.5\nat = point 1\nexpect = forced\n"));
    let out = run(&["force", "--format", "json"], bad.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_lines(&out)[0]["status"], "REFUTED");
    // a mismatch other than REFUTED-for-FORCED is reported but not fatal
    let soft = temp_cfg(&format!("{base}[condition]\ntext = d(a, b) < 0.5\nat = point 1\nexpect = refuted\n"));
    assert_eq!(run(&["force"], soft.path()).status.code(), Some(0));
}

#[test]
fn malformed_condition_becomes_an_error_record() {
    let f = temp_cfg(
        "[sheaf]\nkind = torus\n[section a]\ncurve = 0\n\
         [condition]\ntext = d(a, ) < 0.5\nat = point 0\n\
         [condition]\ntext = R(a) < 0.5\nat = point 0\n\
         [condition]\ntext = d(a, a) < 0.5\nat = point 0\n",
    );
    let out = run(&["force", "--format", "json"], f.path());
    assert!(out.status.success());
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["status"], "ERROR");
    assert!(rows[0]["error"].as_str().unwrap().contains("at 5"), "{}", rows[0]);
    assert!(rows[1]["error"].as_str().unwrap().contains("unknown relation symbol `R`"));
    assert_eq!(rows[2]["status"], "FORCED");
}

#[test]
fn config_errors_report_the_line() {
    let f = temp_cfg("[sheaf]\nkind = torus\n[section a]\ncurve = zero\n");
    let out = run(&["force"], f.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let f = temp_cfg("[sheaf]\nkind = torus\n[condition]\ntext = d(a, a) < 0.5\nat = somewhere\n");
    let out = run(&["force"], f.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));

    let out = bin().args(["force", "/definitely/not/here.cfg"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gmt_is_deterministic_and_seeded() {
    let cfg = shipped("gmt.cfg");
    let a = run(&["gmt", "--format", "csv"], &cfg);
    let b = run(&["gmt", "--format", "csv"], &cfg);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["gmt", "--format", "csv", "--seed", "99"], &cfg);
    assert_ne!(a.stdout, c.stdout);
    let rows = json_lines(&run(&["gmt", "--format", "json"], &cfg));
    let total = rows.last().unwrap();
    assert_eq!(total["index"], "total");
    assert!(total["agreement"].as_str().unwrap().contains("disagree=0"));
}

#[test]
fn depth_flag_overrides_chain_depth() {
    let f = temp_cfg(
        "[sheaf]\nkind = torus\n[section a]\ncurve = 0.3\n\
         [condition]\ntext = inf q. d(q, a) < 0.05\nat = chain arcs 0 1 4\n",
    );
    assert_eq!(json_lines(&run(&["force", "--format", "json"], f.path())).len(), 4);
    assert_eq!(json_lines(&run(&["force", "--format", "json", "--depth", "2"], f.path())).len(), 2);
}

#[test]
fn tol_flag_changes_the_verdict_band() {
    let f = temp_cfg(
        "[sheaf]\nkind = lattice\neigenvalues = 1 2 3\n\
         [condition]\nbuiltin = orthogonality 2 1e-6\nat = point {0,1,2}\n",
    );
    let loose = json_lines(&run(&["force", "--format", "json"], f.path()));
    assert_eq!(loose[0]["status"], "UNKNOWN");
    let tight = json_lines(&run(&["force", "--format", "json", "--tol", "1e-12"], f.path()));
    assert_eq!(tight[0]["status"], "FORCED");
}

#[test]
fn delta_errors_shrink_by_four() {
    let rows = json_lines(&run(&["delta", "--format", "json"], &shipped("delta.cfg")));
    assert_eq!(rows.len(), 4);
    for r in &rows[1..] {
        let ratio = r["ratio"].as_f64().unwrap();
        assert!((3.0..=5.0).contains(&ratio), "{r}");
        assert!(r["tail_bound"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn lattice_reads_a_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("h.txt"), "3\n2 0  0 1  0 0\n0 -1  2 0  0 0\n0 0  0 0  5 0\n").unwrap();
    let cfg = dir.path().join("m.cfg");
    std::fs::write(
        &cfg,
        "[sheaf]\nkind = lattice\nmatrix = h.txt\n[resolution]\ntol = 1e-12\n\
         [condition]\nbuiltin = orthogonality 2 1e-9\nat = point {0,1,2}\nexpect = forced\n",
    )
    .unwrap();
    let out = run(&["force", "--format", "json"], &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_lines(&out)[0]["status"], "FORCED");
}

#[test]
fn report_runs_every_block() {
    let f = temp_cfg("[propagator]\nx1 = 0\nx0 = 0\nt = 1\ntau = 0.01\n[delta]\ntau = 0.1 0.05\n");
    let out = run(&["report"], f.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("== propagator") && text.contains("== delta"));
}
