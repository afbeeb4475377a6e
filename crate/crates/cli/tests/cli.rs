use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lpim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpim"))
        .args(args)
        .output()
        .expect("spawn lpim")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

/// Ring lattice plus random chords, written with non-contiguous labels.
fn write_graph(path: &Path, n: u64, chords: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("# test graph\n");
    for i in 0..n {
        for d in 1..=2 {
            s.push_str(&format!("{}\t{}\n", 10 * i + 5, 10 * ((i + d) % n) + 5));
        }
    }
    for _ in 0..chords {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            s.push_str(&format!("{} {}\n", 10 * a + 5, 10 * b + 5));
        }
    }
    fs::write(path, s).unwrap();
}

#[test]
fn stats_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    fs::write(&g, "1 2\n2 3\n3 1\n3 4\n4 3\n9 9\n").unwrap();
    let out = lpim(&["stats", g.to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let s = text(&out.stdout);
    assert!(s.contains("nodes: 5"), "{s}");
    assert!(s.contains("edges: 4"), "{s}");
    assert!(s.contains("triangles: 1"), "{s}");
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 2\n2 x\n").unwrap();
    let out = lpim(&["stats", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains('2'), "{}", text(&out.stderr));
    let out = lpim(&["stats", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(lpim(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(lpim(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    write_graph(&g, 20, 0, 1);
    let cfg = dir.path().join("c.cfg");
    fs::write(&cfg, "dataset = g.txt\nbogus_key = 4\n").unwrap();
    let out = lpim(&["evaluate", "-c", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        text(&out.stderr).contains("bogus_key"),
        "{}",
        text(&out.stderr)
    );

    let out_dir = dir.path().join("out");
    let out = lpim(&[
        "evaluate",
        "--dataset",
        g.to_str().unwrap(),
        "--output-dir",
        out_dir.to_str().unwrap(),
        "--set",
        "k=21",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out_dir.join("report.csv").exists());
    let out = lpim(&[
        "select-seeds",
        g.to_str().unwrap(),
        "--method",
        "pagerank",
        "-k",
        "21",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    fs::write(
        &cfg,
        "dataset = /tmp/g.txt\nk = 7\nmethods = random, pagerank\nburn_in = 40\n",
    )
    .unwrap();
    let first = lpim(&[
        "evaluate",
        "-c",
        cfg.to_str().unwrap(),
        "--set",
        "num_sims=9",
        "--dump-config",
    ]);
    assert!(first.status.success(), "{}", text(&first.stderr));
    let dumped = dir.path().join("d.cfg");
    fs::write(&dumped, &first.stdout).unwrap();
    let second = lpim(&["evaluate", "-c", dumped.to_str().unwrap(), "--dump-config"]);
    assert_eq!(text(&first.stdout), text(&second.stdout));
    assert!(
        text(&first.stdout).contains("num_sims = 9"),
        "{}",
        text(&first.stdout)
    );
}

#[test]
fn predict_with_zero_additions_keeps_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    write_graph(&g, 30, 10, 2);
    let map = dir.path().join("map.txt");
    let done = dir.path().join("done.txt");
    let out = lpim(&[
        "predict",
        g.to_str().unwrap(),
        "--medial",
        "20",
        "--top-m",
        "0",
        "--map-out",
        map.to_str().unwrap(),
        "--graph-out",
        done.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let edges = |p: &Path| {
        let mut v: Vec<(u64, u64)> = fs::read_to_string(p)
            .unwrap()
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let mut it = l.split_whitespace().map(|x| x.parse::<u64>().unwrap());
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                (a.min(b), a.max(b))
            })
            .filter(|(a, b)| a != b)
            .collect();
        v.sort();
        v.dedup();
        v
    };
    assert_eq!(edges(&g), edges(&done));
    for line in fs::read_to_string(&map)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
    {
        let p: f64 = line.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&p), "{line}");
    }
}

#[test]
fn select_then_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    write_graph(&g, 40, 15, 3);
    let seeds = dir.path().join("seeds.txt");
    let out = lpim(&[
        "select-seeds",
        g.to_str().unwrap(),
        "--method",
        "static_greedy",
        "-k",
        "3",
        "--snapshots",
        "20",
        "--seed",
        "4",
        "-o",
        seeds.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let out = lpim(&[
        "simulate",
        g.to_str().unwrap(),
        "--seeds",
        seeds.to_str().unwrap(),
        "-p",
        "0",
        "--num-sims",
        "5",
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(
        text(&out.stdout).contains("mean_spread: 3"),
        "{}",
        text(&out.stdout)
    );
}

#[test]
fn evaluate_and_report_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    write_graph(&g, 40, 20, 5);
    let out_dir = dir.path().join("out");
    let cfg = dir.path().join("e.cfg");
    fs::write(
        &cfg,
        "dataset = g.txt\nmethods = pagerank, random\nk = 3\ndiff_ps = 0.2, 0.1\nsimilarities = 0.8\n\
         num_sims = 20\nnum_medial_graphs = 20\n",
    )
    .unwrap();
    let out = lpim(&[
        "--workers",
        "1",
        "evaluate",
        "-c",
        cfg.to_str().unwrap(),
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let report = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(
        lines[0],
        "dataset,method,diff_p,similarity,added,random,total,m1,m2,m3"
    );
    assert_eq!(lines.len(), 5);
    assert!(
        lines[1].contains(",0.20,") && lines[4].contains(",0.10,"),
        "{report}"
    );
    for f in ["best.csv", "trends.csv", "effective.cfg", "manifest.txt"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
    let best = dir.path().join("best.csv");
    let out = lpim(&[
        "report",
        out_dir.join("report.csv").to_str().unwrap(),
        "-o",
        best.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert_eq!(
        fs::read_to_string(best).unwrap(),
        fs::read_to_string(out_dir.join("best.csv")).unwrap()
    );
}
