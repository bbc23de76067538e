use std::process::{Command, Output};

fn zeta_gram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeta-gram")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn points_at_small_height() {
    let o = zeta_gram(&["points", "--phi", "0", "--t-max", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "n,phi,t,zeta_re,zeta_im,z,sign");
    assert_eq!(lines.len(), 10);
    assert!(lines[1].starts_with("0,0.0,17.845599540410863,"));
}

#[test]
fn warm_cache_output_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["points", "--phi", "1", "--t-max", "2000", "--cache-dir", cache];
    let cold = zeta_gram(&args);
    let warm = zeta_gram(&args);
    assert!(cold.status.success() && warm.status.success());
    assert_eq!(cold.stdout, warm.stdout);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn phi_out_of_range_is_rejected() {
    let o = zeta_gram(&["points", "--phi", "3.2", "--t-max", "50"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("phi must be in [0, pi)"));
}

#[test]
fn verify_thm2_passes_and_vanishing_branch_runs() {
    let o = zeta_gram(&["verify", "thm2", "--phi", "0", "--t-max", "1e4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("thm2.main_term,true,true"));

    let o = zeta_gram(&["verify", "thm2", "--phi", "1.5707963268", "--t-max", "1e4", "--format", "json"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"thm2.vanishing\""));
}

#[test]
fn failing_criterion_gives_nonzero_exit() {
    let o = zeta_gram(&["verify", "cor2", "--t-max", "1e4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL cor2.ratio_increasing"));
}

#[test]
fn verify_thm1_with_single_exponent() {
    let o = zeta_gram(&["verify", "thm1", "--t-max", "5e3", "--p", "3", "--q", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("thm1.k3_2.holder,true"));
    assert!(!text.contains("thm1.k1_1"));
    assert!(!zeta_gram(&["verify", "thm1", "--p", "2", "--q", "4"]).status.success());
}

#[test]
fn thread_count_does_not_change_reports() {
    let a = zeta_gram(&["verify", "prop1", "--t-max", "5e3", "--threads", "1"]);
    let b = zeta_gram(&["verify", "prop1", "--t-max", "5e3", "--threads", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "phi = 0.5\nt_max = 100\nformat = json\n").unwrap();
    let o = zeta_gram(&["points", "--config", cfg.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().nth(1).unwrap().contains(",0.5,"));

    std::fs::write(&cfg, "unknown_key = 1\n").unwrap();
    assert_eq!(zeta_gram(&["points", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn maxscan_has_ratio_columns_and_tolerates_empty_classes() {
    let o = zeta_gram(&["maxscan", "--t-max", "1e4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("plus_over_3_2"));
    assert_eq!(text.lines().count(), 1 + 5);

    let o = zeta_gram(&["maxscan", "--t-max", "12"]);
    assert!(o.status.success());
}

#[test]
fn resonate_and_divisor_dumps_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("res.csv");
    let o = zeta_gram(&["resonate", "--x", "1e3,1e4", "--dump", dump.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(std::fs::read_to_string(&dump).unwrap().starts_with("# X=10000.0\nn,f\n1,"));

    let table = dir.path().join("d3.csv");
    let o = zeta_gram(&["divisor", "--k", "3", "--limit", "100", "--output", table.to_str().unwrap()]);
    assert!(o.status.success());
    let o = zeta_gram(&["divisor", "--load", table.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "kappa,limit,sum\n3.0,100,1471.0\n");

    std::fs::write(&table, "# kappa=3\n# limit=2\nn,d\n1,1\n").unwrap();
    assert!(!zeta_gram(&["divisor", "--load", table.to_str().unwrap()]).status.success());
}
