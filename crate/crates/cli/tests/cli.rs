use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aep")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const GRAPH: &str = r#"
[experiment]
seed = 11
n = [40, 80]
replicates = 3
mode = "graph_critical"

[graph]
alphabet = ["a", "b"]
mu = [0.5, 0.5]
c = [2.0, 2.0, 2.0, 2.0]
family = "inv_n_log_n"
"#;

#[test]
fn aep_csv_is_reproducible_and_seed_sensitive() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", GRAPH);
    let outs: Vec<String> = ["a.csv", "b.csv", "c.csv"].iter().map(|f| dir.path().join(f).to_str().unwrap().into()).collect();
    for (out, workers) in [(&outs[0], "1"), (&outs[1], "3")] {
        let o = aep(&["aep", "--config", &cfg, "--out", out, "--workers", workers]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let a = fs::read_to_string(&outs[0]).unwrap();
    assert_eq!(a, fs::read_to_string(&outs[1]).unwrap());
    assert!(a.lines().any(|l| l == "n,replicate,seed,statistic,value,target,mode"));
    assert_eq!(a.lines().filter(|l| l.ends_with(",graph_critical")).count(), 2 * 3 * 4);

    assert!(aep(&["aep", "--config", &cfg, "--out", &outs[2], "--seed", "12"]).status.success());
    assert_ne!(a, fs::read_to_string(&outs[2]).unwrap());
}

#[test]
fn every_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.toml", GRAPH);
    let out = dir.path().join("o.csv");
    let out = out.to_str().unwrap();
    assert!(aep(&["codec", "--config", &cfg, "--out", out]).status.success());
    assert!(fs::read_to_string(out).unwrap().contains(",bits_per_vertex,"));

    let samples = dir.path().join("samples");
    assert!(aep(&["sample", "--config", &cfg, "--out", samples.to_str().unwrap()]).status.success());
    assert!(samples.join("graph_n80_r2.txt").exists());

    let rates = write(dir.path(), "r.toml", "[experiment]\nseed = 1\n[rates]\ninstances = 3\ninfeasible = 1\n");
    let o = aep(&["rates", "--config", &rates]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 4 * 3);

    let ex = write(dir.path(), "e.toml", "[examples]\nwhich = \"mtdna\"\nalpha = 0.5\n");
    let o = aep(&["examples", "--config", &ex, "--seed", "0"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("closed-form bits per vertex: 1.250000000000"));
    assert!(text.contains("irreducible = false"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // missing seed
    let cfg = write(dir.path(), "noseed.toml", "[experiment]\nn = [5]\nmode = \"tree\"\n[tree]\npreset = \"binary_critical\"\n");
    assert_eq!(aep(&["aep", "--config", &cfg]).status.code(), Some(2));
    // unknown key, missing file, out-of-range parameter
    let bad = write(dir.path(), "bad.toml", "[experiment]\nseed = 1\nbogus = 2\n");
    assert_eq!(aep(&["aep", "--config", &bad]).status.code(), Some(2));
    assert_eq!(aep(&["aep", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    let ex = write(dir.path(), "e.toml", "[experiment]\nseed = 1\n[examples]\nwhich = \"mtdna\"\nalpha = 2.0\n");
    assert_eq!(aep(&["examples", "--config", &ex]).status.code(), Some(2));
    // unusable command line
    assert_eq!(aep(&["aep"]).status.code(), Some(2));
    // runtime failure: output path is a directory
    let good = write(dir.path(), "t.toml", "[experiment]\nseed = 1\nn = [5]\nmode = \"tree\"\n[tree]\npreset = \"binary_critical\"\n");
    assert_eq!(aep(&["aep", "--config", &good, "--out", dir.path().to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(aep(&["aep", "--config", &good]).status.code(), Some(0));
}
