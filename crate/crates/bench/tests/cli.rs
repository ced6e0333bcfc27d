use std::path::PathBuf;
use std::process::{Command, Output};

fn gaussgrid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussgrid"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = gaussgrid(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn nodes_dump_uses_one_based_levels() {
    let csv = stdout(&["nodes", "dump", "--family", "leja", "--levels", "3"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "level,index,node,weight");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1 + 2 + 3);
    assert!(rows[0].starts_with("1,0,0e0,"));
    assert!(rows[5].starts_with("3,"));
}

#[test]
fn delta_norm_profile_has_one_row_per_degree() {
    let csv = stdout(&["profile", "delta-norms", "--family", "gh", "--k-max", "12"]);
    assert_eq!(csv.lines().count(), 14);
}

#[test]
fn quadrature_bench_is_reproducible_and_echoes_its_config() {
    let cfg = scratch("quad.toml");
    std::fs::write(
        &cfg,
        "experiment = \"quad\"\ndims = 2\n[grid]\nfamilies = [\"leja\", \"gh\"]\nw_max = 4\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    let a = stdout(&["bench", "quad", "--config", path]);
    let b = stdout(&["bench", "quad", "--config", path]);
    assert_eq!(a, b);
    assert!(a.lines().next().unwrap().starts_with("# config {"));
    assert!(a.lines().nth(1).unwrap().contains("error"));
    assert!(a.lines().count() > 10);
}

#[test]
fn randomized_runs_need_a_seed() {
    let cfg = scratch("interp.toml");
    std::fs::write(
        &cfg,
        "experiment = \"interp\"\ndims = 1\n[grid]\nw_max = 3\n[mc]\nbatches = 3\nsamples = 50\n",
    )
    .unwrap();
    let path = cfg.to_str().unwrap();
    assert!(!gaussgrid(&["bench", "interp", "--config", path]).status.success());
    let a = stdout(&["bench", "interp", "--config", path, "--seed", "4"]);
    assert_eq!(a, stdout(&["bench", "interp", "--config", path, "--seed", "4"]));
    assert_ne!(a, stdout(&["bench", "interp", "--config", path, "--seed", "5"]));
}

#[test]
fn unknown_keys_are_rejected() {
    let cfg = scratch("bad.toml");
    std::fs::write(&cfg, "experiment = \"quad\"\ndimz = 2\n").unwrap();
    let out = gaussgrid(&["bench", "quad", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
}
