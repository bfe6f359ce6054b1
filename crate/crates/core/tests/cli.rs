use std::path::Path;
use std::process::{Command, Output};

const MAP: &str = "type octile\nheight 4\nwidth 4\nmap\n....\n.@@.\n....\n....\n";
const SCEN: &str = "version 1\n\
0\tm.map\t4\t4\t0\t0\t3\t0\t3\n\
0\tm.map\t4\t4\t3\t0\t0\t0\t3\n\
0\tm.map\t4\t4\t0\t3\t3\t3\t3\n\
0\tm.map\t4\t4\t3\t3\t0\t3\t3\n";

fn ccbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccbs")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_writes_a_plan_and_render_draws_it() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "m.map", MAP);
    let scen = write(dir.path(), "m.scen", SCEN);
    let plan = dir.path().join("plan.txt");
    let out = ccbs(&[
        "solve",
        "--map",
        &map,
        "--scen",
        &scen,
        "--agents",
        "2",
        "--out",
        s(&plan),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&plan).unwrap();
    assert!(text.contains("agent 0") && text.contains("agent 1"));

    let svg = dir.path().join("plan.svg");
    let out = ccbs(&["render", "--map", &map, "--plan", s(&plan), "--out", s(&svg)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("disk radius"));
}

#[test]
fn render_rejects_unknown_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "m.map", MAP);
    let plan = write(dir.path(), "p.txt", "agent 0 99\n");
    let out = ccbs(&["render", "--map", &map, "--plan", &plan]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("99"));
}

#[test]
fn exit_codes_distinguish_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "m.map", MAP);
    let scen = write(dir.path(), "m.scen", SCEN);
    let out = ccbs(&["solve", "--map", &map, "--scen", &scen, "--time-limit", "0"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));

    let roadmap = write(dir.path(), "r.txt", "v 0 0 0\nv 1 1 0\nv 2 5 5\ne 0 1\n");
    let tasks = write(dir.path(), "t.txt", "0 2\n");
    let out = ccbs(&["solve", "--map", &roadmap, "--scen", &tasks]);
    assert_eq!(out.status.code(), Some(3));

    let out = ccbs(&["solve", "--map", &map, "--scen", &scen, "--variant", "fastest"]);
    assert_eq!(out.status.code(), Some(1));
    let out = ccbs(&["solve", "--map", "/nonexistent/m.map", "--scen", &scen]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bench_without_timing_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let map = write(dir.path(), "m.map", MAP);
    write(dir.path(), "m.scen", SCEN);
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = ccbs(&[
            "bench",
            "--map",
            &map,
            "--scen",
            s(dir.path()),
            "--variant",
            "vanilla,ds+pc+h",
            "--agents",
            "4",
            "--no-timing",
            "--out",
            s(&csv),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(csv).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert!(a.starts_with("map,scen,variant,n,solved,soc,expansions,runtime,precompute\n"));
    // Two variants, n = 2..4 each.
    assert_eq!(a.lines().count(), 1 + 2 * 3);

    let ratio = ccbs(&[
        "ratio",
        s(&dir.path().join("a.csv")),
        s(&dir.path().join("a.csv")),
        "--variant-a",
        "vanilla",
        "--variant-b",
        "ds+pc+h",
    ]);
    assert_eq!(
        ratio.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ratio.stderr)
    );
    assert!(String::from_utf8_lossy(&ratio.stdout).contains(",all,"));
}

#[test]
fn roadmap_generation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let o = ccbs(&[
            "gen-roadmap",
            "--width",
            "10",
            "--height",
            "10",
            "--nodes",
            "40",
            "--seed",
            seed,
            "--out",
            s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let a = gen("7", "a.txt");
    assert_eq!(a, gen("7", "b.txt"));
    assert_ne!(a, gen("8", "c.txt"));
    assert!(a.lines().any(|l| l.starts_with("e ")));
}
