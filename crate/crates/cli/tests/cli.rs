use std::path::Path;
use std::process::{Command, Output};

fn swapcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swapcount"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn write_election(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

const SMALL: &str = "3 3\n0,a\n1,b\n2,c\n0,1,2\n0,2,1\n1,0,2\n";

#[test]
fn generate_writes_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ic");
    let o = out.to_str().unwrap();
    let args = ["generate", "--culture", "ic", "--m", "10", "--n", "100", "--count", "5", "--seed", "7", "--out", o];
    assert!(swapcount(&args).status.success());
    let elections: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().unwrap() == "election")
        .collect();
    assert_eq!(elections.len(), 5);
    let manifest = read(&out.join("manifest.tsv"));
    assert!(manifest.contains("# seed 7"));
    assert!(manifest.contains("# config "));
    assert_eq!(manifest.lines().filter(|l| l.starts_with("ic-")).count(), 5);

    let first = read(&out.join("ic-000.election"));
    assert!(swapcount(&args).status.success());
    assert_eq!(read(&out.join("ic-000.election")), first);
    assert_eq!(read(&out.join("manifest.tsv")), manifest);
}

#[test]
fn mallows_phi_zero_gives_identical_votes() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let args = ["generate", "--culture", "mallows", "--phi", "0", "--m", "6", "--n", "30", "--count", "3", "--out", o];
    assert!(swapcount(&args).status.success());
    for k in 0..3 {
        let text = read(&dir.path().join(format!("mallows-phi0-{k:03}.election")));
        let votes: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(7).collect();
        assert_eq!(votes.len(), 30);
        assert!(votes.iter().all(|v| *v == votes[0]));
    }
}

#[test]
fn bad_culture_parameters_fail() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let bad = swapcount(&["generate", "--culture", "mallows", "--phi", "2", "--out", o]);
    assert_eq!(bad.status.code(), Some(1));
    let missing = swapcount(&["generate", "--culture", "urn", "--out", o]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn count_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let e = write_election(dir.path(), "small.election", SMALL);
    let zero = swapcount(&["count", "--input", &e, "--problem", "swap", "--rule", "plurality", "--p", "0", "--r", "0"]);
    assert_eq!(stdout(&zero), "1");
    for problem in ["swap", "shift"] {
        for r in 0..4 {
            let r = r.to_string();
            let base = ["count", "--input", &e, "--problem", problem, "--p", "c", "--r", &r];
            let fast = swapcount(&base);
            let slow = swapcount(&[&base[..], &["--oracle"]].concat());
            assert!(fast.status.success(), "{}", String::from_utf8_lossy(&fast.stderr));
            assert_eq!(stdout(&fast), stdout(&slow), "{problem} r={r}");
        }
    }
}

#[test]
fn count_with_costs_file() {
    let dir = tempfile::tempdir().unwrap();
    let e = write_election(dir.path(), "small.election", SMALL);
    let costs = dir.path().join("costs.txt");
    std::fs::write(&costs, "0,2,3\n0,1,5\n0,1,1\n").unwrap();
    let c = costs.to_str().unwrap();
    for rule in ["plurality", "borda"] {
        for r in 0..5 {
            let r = r.to_string();
            let base = ["count", "--input", &e, "--problem", "shift", "--rule", rule, "--p", "2", "--r", &r, "--costs", c];
            let fast = swapcount(&base);
            let slow = swapcount(&[&base[..], &["--oracle"]].concat());
            assert!(fast.status.success(), "{}", String::from_utf8_lossy(&fast.stderr));
            assert_eq!(stdout(&fast), stdout(&slow), "{rule} r={r}");
        }
    }
}

#[test]
fn unsupported_and_guarded() {
    let dir = tempfile::tempdir().unwrap();
    let e = write_election(dir.path(), "small.election", SMALL);
    let o = swapcount(&["count", "--input", &e, "--problem", "shift", "--mode", "destructive", "--rule", "borda", "--p", "0", "--r", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no exact algorithm"));

    let o = swapcount(&["count", "--input", &e, "--problem", "swap", "--p", "0", "--r", "1", "--max-voters", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_voters"));

    let o = swapcount(&["count", "--input", &e, "--problem", "swap", "--p", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = swapcount(&["count", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let e = write_election(dir.path(), "small.election", SMALL);
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, format!("input = {e}\nproblem = swap\np = 0\nr = 5\n")).unwrap();
    let c = cfg.to_str().unwrap();
    let from_file = swapcount(&["--config", c, "count"]);
    let override_r = swapcount(&["--config", c, "count", "--r", "0"]);
    let explicit = swapcount(&["count", "--input", &e, "--p", "0", "--r", "5"]);
    assert_eq!(stdout(&from_file), stdout(&explicit));
    assert_eq!(stdout(&override_r), "1");
}

fn small_dataset(dir: &Path) -> String {
    let o = dir.display().to_string();
    for (culture, extra) in [("ic", vec![]), ("urn", vec!["--alpha", "0.5"])] {
        let mut args = vec!["generate", "--culture", culture, "--m", "4", "--n", "6", "--count", "2", "--append", "--out", &o];
        args.extend(extra);
        assert!(swapcount(&args).status.success());
    }
    dir.join("manifest.tsv").display().to_string()
}

#[test]
fn estimate_smoke_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_dataset(&dir.path().join("data"));
    assert_eq!(read(Path::new(&manifest)).lines().filter(|l| l.contains('\t') && !l.starts_with("id")).count(), 4);
    let run = |out: &str, jobs: &str| {
        let out = dir.path().join(out).display().to_string();
        let o = swapcount(&["estimate", "--manifest", &manifest, "--out", &out, "--grid", "0.1,0.5,1", "--samples", "40", "--seed", "3", "--jobs", jobs]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a", "1");
    let b = run("b", "3");
    for f in ["estimates.csv", "summary.csv", "excluded.csv"] {
        let pa = Path::new(&a).join(f);
        assert_eq!(read(&pa), read(&Path::new(&b).join(f)), "{f}");
    }
    let est = read(&Path::new(&a).join("estimates.csv"));
    assert!(est.starts_with("# swapcount"));
    assert!(est.contains("\nelection_id,rule,radius_norm,radius_swaps,candidate,wins,samples,frequency\n"));
    let summary = read(&Path::new(&a).join("summary.csv"));
    assert!(summary.contains("\nelection_id,rule,culture,params,score_margin,threshold\n"));
    assert!(summary.contains("# seed 3"));

    let t = dir.path().join("t").display().to_string();
    let o = swapcount(&["threshold", "--manifest", &manifest, "--out", &t, "--grid", "0.1,0.5,1", "--samples", "40", "--seed", "3"]);
    assert!(o.status.success());
    let body = |s: &str| s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n");
    assert_eq!(body(&read(&Path::new(&t).join("summary.csv"))), body(&summary));
    assert!(!Path::new(&t).join("estimates.csv").exists());
}

#[test]
fn grid_must_exclude_zero() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_dataset(&dir.path().join("data"));
    let out = dir.path().join("o").display().to_string();
    let o = swapcount(&["estimate", "--manifest", &manifest, "--out", &out, "--grid", "0,0.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn selftest_quick_and_corrupt_cache() {
    let o = swapcount(&["selftest", "--quick"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS oracle-swap-plurality"));

    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("t.bin");
    let c = cache.to_str().unwrap();
    assert!(swapcount(&["tables", "--m", "5", "--n", "4", "--out", c]).status.success());
    assert!(swapcount(&["selftest", "--quick", "--cache", c]).status.success());
    let mut bytes = std::fs::read(&cache).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x10;
    std::fs::write(&cache, bytes).unwrap();
    let o = swapcount(&["selftest", "--quick", "--cache", c]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("FAIL table-cache"));
}
