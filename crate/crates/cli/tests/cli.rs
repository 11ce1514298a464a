//! End-to-end checks of the `sparsekit` binary: every pipeline goes through
//! real files and the process exit code.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sparsekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsekit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn assert_ok(out: &Output, context: &str) {
    assert!(
        out.status.success(),
        "{context} failed:\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.join(name);
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path_str(&out)]);
    let res = sparsekit(&full);
    assert_ok(&res, "generate");
    out
}

#[test]
fn cut_pipeline_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "g.net",
        &["--kind", "quasi-bipartite", "--k", "3", "--n", "20", "--seed", "7"],
    );
    let h = dir.path().join("h.net");
    let res = sparsekit(&[
        "sparsify-cut",
        path_str(&g),
        "--out",
        path_str(&h),
        "--report",
    ]);
    assert_ok(&res, "sparsify-cut");
    assert!(String::from_utf8_lossy(&res.stdout).contains("weak classes"));
    let res = sparsekit(&["verify-cut", path_str(&g), path_str(&h)]);
    assert_ok(&res, "verify-cut");
    assert!(String::from_utf8_lossy(&res.stdout).contains("ok"));
}

#[test]
fn verify_cut_fails_on_a_wrong_sparsifier() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "g.net",
        &["--kind", "quasi-bipartite", "--k", "2", "--n", "8", "--seed", "3"],
    );
    let other = generate(
        dir.path(),
        "other.net",
        &["--kind", "quasi-bipartite", "--k", "2", "--n", "8", "--seed", "4"],
    );
    let res = sparsekit(&["verify-cut", path_str(&g), path_str(&other)]);
    assert!(!res.status.success());
}

#[test]
fn flow_pipeline_verifies_a_demand_file() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "g.net",
        &["--kind", "quasi-bipartite", "--k", "3", "--n", "10", "--seed", "11"],
    );
    let h = dir.path().join("h.net");
    assert_ok(
        &sparsekit(&["sparsify-flow", path_str(&g), "--out", path_str(&h)]),
        "sparsify-flow",
    );
    let dem = dir.path().join("d.dem");
    std::fs::write(&dem, "d 1 2 3/2\nd 2 3 1/1\n").unwrap();
    let res = sparsekit(&[
        "verify-flow",
        path_str(&g),
        path_str(&h),
        "--demands",
        path_str(&dem),
    ]);
    assert_ok(&res, "verify-flow");
}

#[test]
fn cover_pipeline_uses_the_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "g.net",
        &[
            "--kind", "vertex-cover", "--k", "3", "--n", "12", "--a", "2", "--seed", "5",
        ],
    );
    let cover = PathBuf::from(format!("{}.cover", g.display()));
    assert!(cover.exists());
    let h = dir.path().join("h.net");
    assert_ok(
        &sparsekit(&[
            "sparsify-vc",
            path_str(&g),
            "--cover",
            path_str(&cover),
            "--out",
            path_str(&h),
        ]),
        "sparsify-vc",
    );
    assert_ok(&sparsekit(&["verify-cut", path_str(&g), path_str(&h)]), "verify-cut");
}

#[test]
fn integrity_pipeline_uses_the_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "g.net",
        &[
            "--kind", "vertex-integrity", "--k", "2", "--n", "11", "--a", "2", "--b", "2",
            "--seed", "9", "--distribution", "small-support",
        ],
    );
    let sep = PathBuf::from(format!("{}.sep", g.display()));
    assert!(sep.exists());
    let h = dir.path().join("h.net");
    assert_ok(
        &sparsekit(&[
            "sparsify-vi",
            path_str(&g),
            "--separator",
            path_str(&sep),
            "--bound",
            "2",
            "--out",
            path_str(&h),
        ]),
        "sparsify-vi",
    );
    assert_ok(&sparsekit(&["verify-cut", path_str(&g), path_str(&h)]), "verify-cut");
}

#[test]
fn treewidth_pipeline_uses_the_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "g.net",
        &[
            "--kind", "bounded-treewidth", "--k", "3", "--n", "12", "--w", "2", "--seed", "13",
        ],
    );
    let td = PathBuf::from(format!("{}.td", g.display()));
    assert!(td.exists());
    let h = dir.path().join("h.net");
    assert_ok(
        &sparsekit(&[
            "tw-reduce",
            path_str(&g),
            "--decomposition",
            path_str(&td),
            "--blackbox",
            "mimick",
            "--out",
            path_str(&h),
        ]),
        "tw-reduce",
    );
    assert_ok(&sparsekit(&["verify-cut", path_str(&g), path_str(&h)]), "verify-cut");
}

#[test]
fn split_demand_prints_both_parts() {
    let dir = tempfile::tempdir().unwrap();
    let c1 = dir.path().join("c1.vec");
    let c2 = dir.path().join("c2.vec");
    let dem = dir.path().join("d.dem");
    std::fs::write(&c1, "1 1 1\n").unwrap();
    std::fs::write(&c2, "1 1 1\n").unwrap();
    std::fs::write(&dem, "d 1 2 1\nd 1 3 1\nd 2 3 1\n").unwrap();
    let res = sparsekit(&["split-demand", path_str(&c1), path_str(&c2), path_str(&dem)]);
    assert_ok(&res, "split-demand");
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.contains("# star 1"));
    assert!(text.contains("# star 2"));
    assert!(text.contains("1/2"));
}

#[test]
fn inspection_verbs_run() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(
        dir.path(),
        "g.net",
        &["--kind", "quasi-bipartite", "--k", "3", "--n", "8", "--seed", "2"],
    );
    let res = sparsekit(&["signature", path_str(&g)]);
    assert_ok(&res, "signature");
    assert!(String::from_utf8_lossy(&res.stdout).contains("weak"));
    let res = sparsekit(&["decompose", path_str(&g)]);
    assert_ok(&res, "decompose");
    assert!(String::from_utf8_lossy(&res.stdout).contains("weight"));
    let res = sparsekit(&["enumerate-rays", "--k", "3"]);
    assert_ok(&res, "enumerate-rays");
    assert!(String::from_utf8_lossy(&res.stdout).contains("rays"));
}

#[test]
fn accept_rejects_unknown_suites() {
    let res = sparsekit(&["accept", "--suite", "bogus"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("unknown suite"));
}

#[test]
fn generated_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--kind", "bounded-treewidth", "--k", "2", "--n", "10", "--w", "2", "--seed", "21",
    ];
    let one = generate(dir.path(), "one.net", &args);
    let two = generate(dir.path(), "two.net", &args);
    assert_eq!(
        std::fs::read(&one).unwrap(),
        std::fs::read(&two).unwrap()
    );
    assert_eq!(
        std::fs::read(format!("{}.td", one.display())).unwrap(),
        std::fs::read(format!("{}.td", two.display())).unwrap()
    );
}
