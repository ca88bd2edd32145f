mod common;

use common::{sat3, SAT3, UNSAT4};
use corrsub::cli::{run, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
use corrsub::graph::{SubgraphMask, WeightedGraph};
use corrsub::reduction::compile;
use corrsub::verification::reduction_score;
use std::fs;
use std::path::{Path, PathBuf};
use tempfile::TempDir;

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn corrsub(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("corrsub").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const P3: &str = "3 2\n0 0\n1 1\n2 2\n0 1\n1 2\n";
const TRIANGLE: &str = "3 3\n0 0\n1 0\n2 10\n0 1\n0 2\n1 2\n";

#[test]
fn score_prints_value_and_total() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "p3.graph", P3);
    let m = write(dir.path(), "all.mask", "11\n");
    let o = corrsub(&["score", "-g", s(&g), "-s", s(&m)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout, "-1.386294361120\nS = 2/1\n");
}

#[test]
fn score_accepts_edge_id_lists() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "p3.graph", P3);
    let m = write(dir.path(), "ids.mask", "0 1\n");
    let o = corrsub(&["score", "-g", s(&g), "--mask", s(&m)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.starts_with("-1.386294361120\n"));
}

#[test]
fn solve_finds_the_triangle_optimum() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "tri.graph", TRIANGLE);
    let out = dir.path().join("best.mask");
    for method in ["--exact", "--local"] {
        let o = corrsub(&["solve", "-g", s(&g), method, "--out", s(&out)]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        assert!(
            o.stdout.starts_with("mask 101\nscore -14.338758701"),
            "{}",
            o.stdout
        );
        assert_eq!(fs::read_to_string(&out).unwrap(), "101\n");
    }
    let o = corrsub(&["solve", "-g", s(&g), "--exact", "--local"]);
    assert_eq!(o.code, EXIT_USAGE);
}

#[test]
fn reduce_then_score_matches_the_library() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "sat3.formula", SAT3);
    let prefix = dir.path().join("inst");
    let o = corrsub(&["reduce", "-f", s(&f), "-t", "2", "-o", s(&prefix)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stderr.contains("planar"), "{}", o.stderr);

    let graph_text = fs::read_to_string(dir.path().join("inst.graph")).unwrap();
    let roles = fs::read_to_string(dir.path().join("inst.roles")).unwrap();
    let inst = compile(&sat3(), 2).unwrap();
    assert_eq!(graph_text, inst.graph().to_text());
    assert_eq!(roles, inst.roles_text());
    assert!(roles.starts_with("0 u_1\n1 v_1\n"));

    let g = WeightedGraph::parse(&graph_text).unwrap();
    let m = write(
        dir.path(),
        "full.mask",
        &format!("{}\n", SubgraphMask::full(&g).to_bitstring()),
    );
    let o = corrsub(&[
        "score",
        "-g",
        s(&dir.path().join("inst.graph")),
        "-s",
        s(&m),
        "--multiplier",
        "3",
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let expected = reduction_score(&inst, &SubgraphMask::full(inst.graph())).unwrap();
    assert_eq!(o.stdout.lines().next().unwrap(), expected.to_string());
}

#[test]
fn witness_round_trip_scores_infinite() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "sat3.formula", SAT3);
    let prefix = dir.path().join("inst");
    assert_eq!(
        corrsub(&["reduce", "-f", s(&f), "-t", "3", "-o", s(&prefix)]).code,
        EXIT_OK
    );
    let w = dir.path().join("w.mask");
    let o = corrsub(&["witness", "-f", s(&f), "-t", "3", "-a", "FTF", "-o", s(&w)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let o = corrsub(&[
        "score",
        "-g",
        s(&dir.path().join("inst.graph")),
        "-s",
        s(&w),
    ]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    // Only z' and a' vertices and the leaves carry discrepancy.
    assert!(!o.stdout.starts_with("+inf"));
}

#[test]
fn verify_reports_pass_lines() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "sat3.formula", SAT3);
    let o = corrsub(&["verify", "-f", s(&f), "-t", "2", "--checks", "1,2,3,5"]);
    assert_eq!(o.code, EXIT_OK, "{}{}", o.stdout, o.stderr);
    assert!(o.stdout.contains("36 = 36"), "{}", o.stdout);
    let lines: Vec<_> = o
        .stdout
        .lines()
        .filter(|l| l.contains("formula="))
        .collect();
    assert!(!lines.is_empty());
    assert!(
        lines
            .iter()
            .all(|l| l.contains(" PASS ") && l.contains("n=3 t=2")),
        "{lines:?}"
    );
}

#[test]
fn verify_claim6_on_the_unsatisfiable_formula() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "unsat4.formula", UNSAT4);
    let o = corrsub(&["verify", "-f", s(&f), "-t", "2", "--checks", "6"]);
    assert_eq!(o.code, EXIT_OK, "{}{}", o.stdout, o.stderr);
    assert!(o.stdout.contains("claim6 PASS"), "{}", o.stdout);

    let o = corrsub(&[
        "verify",
        "-f",
        s(&f),
        "-t",
        "2",
        "--checks",
        "6",
        "--claim6-budget",
        "5",
    ]);
    assert_eq!(o.code, EXIT_CHECK_FAILED, "{}", o.stdout);
    assert!(o.stdout.contains("INCONCLUSIVE"));
}

#[test]
fn decide_prints_the_caveat() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "sat3.formula", SAT3);
    let o = corrsub(&["decide", "-f", s(&f)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.starts_with("answer YES\n"), "{}", o.stdout);
    assert!(o.stdout.contains("caveat:"));
    assert!(o.stdout.contains("t 9\n"));
}

#[test]
fn exit_codes_for_bad_input() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "p3.graph", P3);
    let f = write(dir.path(), "sat3.formula", SAT3);
    let isolated = write(dir.path(), "iso.graph", "3 1\n0 0\n1 1\n2 2\n0 1\n");
    let unsorted = write(
        dir.path(),
        "unsorted.graph",
        "3 2\n0 0\n1 1\n2 2\n1 2\n0 1\n",
    );
    let short_mask = write(dir.path(), "short.mask", "1\n");
    let bad_mask = write(dir.path(), "bad.mask", "01\n");
    let bad_formula = write(dir.path(), "bad.formula", "3 3\n1 2 3\n1 2 3\n1 2 2\n");
    let out = dir.path().join("o.mask");

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec![], EXIT_USAGE),
        (vec!["--help"], EXIT_OK),
        (vec!["--version"], EXIT_OK),
        (vec!["frobnicate"], EXIT_USAGE),
        (vec!["score", "-g", s(&g)], EXIT_USAGE),
        (
            vec!["score", "-g", s(&g), "-s", "/nonexistent/mask"],
            EXIT_USAGE,
        ),
        (
            vec!["score", "-g", s(&isolated), "-s", s(&short_mask)],
            EXIT_USAGE,
        ),
        (
            vec!["score", "-g", s(&unsorted), "-s", s(&short_mask)],
            EXIT_USAGE,
        ),
        (vec!["score", "-g", s(&g), "-s", s(&short_mask)], EXIT_USAGE),
        (vec!["score", "-g", s(&g), "-s", s(&bad_mask)], EXIT_USAGE),
        (
            vec![
                "score",
                "-g",
                s(&g),
                "-s",
                s(&bad_mask),
                "--multiplier",
                "0",
            ],
            EXIT_USAGE,
        ),
        (
            vec!["reduce", "-f", s(&f), "-t", "1", "-o", s(&out)],
            EXIT_USAGE,
        ),
        (
            vec!["reduce", "-f", s(&bad_formula), "-t", "2", "-o", s(&out)],
            EXIT_USAGE,
        ),
        (
            vec![
                "witness",
                "-f",
                s(&f),
                "-t",
                "2",
                "-a",
                "TTF",
                "-o",
                s(&out),
            ],
            EXIT_USAGE,
        ),
        (
            vec!["witness", "-f", s(&f), "-t", "2", "-a", "TF", "-o", s(&out)],
            EXIT_USAGE,
        ),
        (
            vec!["verify", "-f", s(&f), "-t", "2", "--checks", "9"],
            EXIT_USAGE,
        ),
        (vec!["solve", "-g", s(&g), "--threads", "0"], EXIT_USAGE),
    ];
    for (args, expected) in cases {
        let o = corrsub(&args);
        assert_eq!(o.code, expected, "{args:?}: {}{}", o.stdout, o.stderr);
        if expected == EXIT_USAGE {
            assert!(!o.stderr.is_empty(), "{args:?}");
        }
    }
    assert!(!out.exists());
}

#[test]
fn isolated_vertex_error_names_the_line() {
    let dir = TempDir::new().unwrap();
    let g = write(dir.path(), "iso.graph", "3 1\n0 0\n1 1\n2 2\n0 1\n");
    let m = write(dir.path(), "m.mask", "1\n");
    let o = corrsub(&["score", "-g", s(&g), "-s", s(&m)]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("line 4"), "{}", o.stderr);
}
