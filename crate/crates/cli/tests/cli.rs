use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hfc_core::{connectivity_metric, imbalance, is_balanced, parse_hmetis, parse_partition};
use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_hfc-refine");

fn instance() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/grid36.hgr")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

struct Run {
    dir: TempDir,
}

impl Run {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    /// Runs on the bundled instance, writing `<tag>.part` and `<tag>.json`.
    fn refine(&self, tag: &str, extra: &[&str]) -> Output {
        let part = self.path(&format!("{tag}.part"));
        let stats = self.path(&format!("{tag}.json"));
        let inst = instance();
        let mut args = vec![
            "--hypergraph",
            inst.to_str().unwrap(),
            "--output-partition",
            part.to_str().unwrap(),
            "--stats",
            stats.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        run(&args)
    }

    fn stats(&self, tag: &str) -> Value {
        serde_json::from_str(&std::fs::read_to_string(self.path(&format!("{tag}.json"))).unwrap()).unwrap()
    }
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn same_invocation_same_bytes() {
    let r = Run::new();
    for tag in ["a", "b"] {
        let out = r.refine(tag, &["-k", "3", "--seed", "1"]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let read = |name: &str| std::fs::read(r.path(name)).unwrap();
    assert_eq!(read("a.part"), read("b.part"));
    assert_eq!(read("a.json"), read("b.json"));
}

#[test]
fn report_matches_written_partition() {
    let hg = parse_hmetis(std::io::BufReader::new(std::fs::File::open(instance()).unwrap())).unwrap();
    let r = Run::new();
    for k in [2usize, 3, 4] {
        for seed in 0..4 {
            let tag = format!("k{k}s{seed}");
            let out = r.refine(&tag, &["-k", &k.to_string(), "--seed", &seed.to_string()]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
            let text = std::fs::read_to_string(r.path(&format!("{tag}.part"))).unwrap();
            let p = parse_partition(text.as_bytes(), &hg, k).unwrap();
            let s = r.stats(&tag);
            assert_eq!(s["final_connectivity"], connectivity_metric(&hg, &p));
            assert_eq!(s["final_imbalance"].as_f64().unwrap(), imbalance(&hg, &p));
            assert_eq!(s["balanced"], is_balanced(&hg, &p, 0.03));
            assert!(s["final_connectivity"].as_i64() <= s["initial_connectivity"].as_i64());
            assert!(s.get("timings").is_none());
        }
    }
}

#[test]
fn stats_keys_are_stable() {
    let r = Run::new();
    assert_eq!(code(&r.refine("t", &["-k", "2", "--timings"])), 0);
    let s = r.stats("t");
    for key in ["read_ms", "initial_ms", "refine_ms", "total_ms"] {
        assert!(s["timings"][key].is_number());
    }
    let text = std::fs::read_to_string(r.path("t.json")).unwrap();
    assert_eq!(text.lines().count(), 1);
    let order = ["\"hypergraph\"", "\"k\"", "\"seed\"", "\"initial_connectivity\"", "\"final_connectivity\"", "\"pierce_steps\"", "\"timings\""];
    let positions: Vec<usize> = order.iter().map(|key| text.find(key).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn relaxed_mode_builds_larger_flow_problems() {
    let r = Run::new();
    let mean = |tag: &str| {
        let s = r.stats(tag);
        s["flow_problem_vertices"].as_f64().unwrap() / s["flow_problems"].as_f64().unwrap()
    };
    for seed in 0..3 {
        let seed = seed.to_string();
        assert_eq!(code(&r.refine("hfc", &["-k", "2", "--seed", &seed, "--mode", "hfc"])), 0);
        assert_eq!(code(&r.refine("star", &["-k", "2", "--seed", &seed, "--mode", "hfc-star"])), 0);
        assert!(mean("star") >= mean("hfc"));
        assert_eq!(r.stats("star")["mode"], "hfc-star");
    }
}

#[test]
fn toggles_are_reported() {
    let r = Run::new();
    let out = r.refine("t", &["-k", "2", "--no-iso-dp", "--no-distance", "--no-mbc", "--mbc-repetitions", "3"]);
    assert_eq!(code(&out), 0);
    let s = r.stats("t");
    assert_eq!(s["iso_dp"], false);
    assert_eq!(s["distance_piercing"], false);
    assert_eq!(s["most_balanced_cut"], false);
    assert_eq!(s["mbc_steps"], 0);
}

#[test]
fn input_partition_is_refined() {
    let r = Run::new();
    // Rows 0-2 against rows 3-5 of the grid.
    let text: String = (0..36).map(|v| format!("{}\n", (v >= 18) as u8)).collect();
    let input = r.write("in.part", &text);
    let out = r.refine("t", &["-k", "2", "--input-partition", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(r.stats("t")["input_partition"], true);
}

#[test]
fn exit_codes() {
    let r = Run::new();
    let inst = instance();
    let inst = inst.to_str().unwrap();

    let missing = r.path("missing.hgr");
    assert_eq!(code(&run(&["--hypergraph", missing.to_str().unwrap(), "-k", "2"])), 1);

    let bad = r.write("bad.hgr", "2 3\n1 2\n");
    assert_eq!(code(&run(&["--hypergraph", bad.to_str().unwrap(), "-k", "2"])), 2);
    let short = r.write("short.part", "0\n1\n");
    assert_eq!(code(&run(&["--hypergraph", inst, "-k", "2", "--input-partition", short.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["--hypergraph", inst, "-k", "2", "-e", "-1"])), 2);

    assert_eq!(code(&run(&["--hypergraph", inst, "-k", "1"])), 3);
    assert_eq!(code(&run(&["--hypergraph", inst, "-k", "37"])), 3);
    let heavy = r.write("heavy.hgr", "1 3 10\n1 2 3\n5\n1\n1\n");
    assert_eq!(code(&run(&["--hypergraph", heavy.to_str().unwrap(), "-k", "2"])), 3);

    let lopsided: String = (0..36).map(|v| format!("{}\n", (v == 0) as u8)).collect();
    let lopsided = r.write("lopsided.part", &lopsided);
    let out = run(&["--hypergraph", inst, "-k", "2", "--input-partition", lopsided.to_str().unwrap()]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8_lossy(&out.stderr).contains("imbalance"));
}
