//! End-to-end tests of the `nonrank` binary: documents, diagnostics, exit
//! codes, and agreement with the library run in-process.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nonrank::{fuse_layers, Scoring, SimilarityMatrix};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nonrank"))
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/example10")
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    assert!(
        output.status.success(),
        "exit {:?}, stderr: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn ranked_labels(csv: &str) -> Vec<u64> {
    csv.lines()
        .skip(1)
        .map(|line| line.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn one_edge_graph_yields_unit_distance_matrix() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.txt"), "layer only pair.edges\n").unwrap();
    fs::write(dir.path().join("pair.edges"), "1 2\n").unwrap();
    let manifest = dir.path().join("m.txt");
    let out = stdout_of(&run(&[
        "distances",
        "--manifest",
        manifest.to_str().unwrap(),
    ]));
    assert_eq!(out, "# layer only\n1,2\n0,1\n1,0\n");
}

#[test]
fn example_network_distances_report_the_long_detour() {
    let manifest = fixture_dir().join("manifest.txt");
    let out = stdout_of(&run(&[
        "distances",
        "--manifest",
        manifest.to_str().unwrap(),
    ]));
    let layer_b: Vec<&str> = out
        .lines()
        .skip_while(|l| *l != "# layer b")
        .skip(2)
        .take(10)
        .collect();
    let row_2: Vec<u32> = layer_b[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row_2[3], 7, "hop distance from node 2 to node 4");
}

#[test]
fn missing_referenced_file_exits_two_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.txt"), "layer ghost nothing.edges\n").unwrap();
    let manifest = dir.path().join("m.txt");
    let out = run(&["distances", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("file not found"), "stderr: {stderr}");
}

#[test]
fn mismatched_matrix_sizes_exit_two_with_dimension_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("l.txt"), "layer a a.csv\nlayer b b.csv\n").unwrap();
    fs::write(dir.path().join("a.csv"), "1,2\n1.0,0.5\n0.5,1.0\n").unwrap();
    fs::write(
        dir.path().join("b.csv"),
        "1,2,3\n1.0,0.5,0.2\n0.5,1.0,0.4\n0.2,0.4,1.0\n",
    )
    .unwrap();
    let listing = dir.path().join("l.txt");
    let out = run(&["fuse", "--matrices", listing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("expected 2"), "stderr: {stderr}");
}

#[test]
fn roster_directive_in_matrix_listing_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("l.txt"), "nodes: 1 2\nlayer a a.csv\n").unwrap();
    fs::write(dir.path().join("a.csv"), "1,2\n1.0,0.5\n0.5,1.0\n").unwrap();
    let listing = dir.path().join("l.txt");
    let out = run(&["fuse", "--matrices", listing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nodes:"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let manifest = fixture_dir().join("manifest.txt");
    let args = ["rank", "--manifest", manifest.to_str().unwrap()];
    let first = stdout_of(&run(&args));
    let second = stdout_of(&run(&args));
    assert_eq!(first, second);
}

#[test]
fn fused_output_round_trips_bit_exactly_through_the_parser() {
    let listing = fixture_dir().join("matrices.txt");
    let out = stdout_of(&run(&["fuse", "--matrices", listing.to_str().unwrap()]));
    let reparsed = SimilarityMatrix::parse_csv("fused", &out).unwrap();

    let names = ["similarity_b.csv", "similarity_c.csv", "similarity_d.csv"];
    let layers: Vec<SimilarityMatrix> = names
        .iter()
        .map(|name| {
            let text = fs::read_to_string(fixture_dir().join(name)).unwrap();
            SimilarityMatrix::parse_csv(*name, &text).unwrap()
        })
        .collect();
    let direct = fuse_layers(&layers)
        .unwrap()
        .scalar_matrix(Scoring::SimilarMass);

    for i in 0..10 {
        for j in 0..10 {
            assert_eq!(reparsed.get(i, j).to_bits(), direct.get(i, j).to_bits());
        }
    }
}

#[test]
fn fused_example_element_matches_published_value() {
    let listing = fixture_dir().join("matrices.txt");
    let out = stdout_of(&run(&["fuse", "--matrices", listing.to_str().unwrap()]));
    let fused = SimilarityMatrix::parse_csv("fused", &out).unwrap();
    // Labels 3 and 4 sit at indices 2 and 3.
    assert!((fused.get(2, 3) - 0.7874).abs() < 5e-4);
}

#[test]
fn single_layer_ranking_equals_library_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.txt"), "layer b layer_b.edges\n").unwrap();
    fs::copy(
        fixture_dir().join("layer_b.edges"),
        dir.path().join("layer_b.edges"),
    )
    .unwrap();
    let manifest = dir.path().join("m.txt");
    let out = stdout_of(&run(&["rank", "--manifest", manifest.to_str().unwrap()]));

    let text = fs::read_to_string(fixture_dir().join("layer_b.edges")).unwrap();
    let parsed = nonrank::Manifest::parse("layer b layer_b.edges\n").unwrap();
    let network = nonrank::parse_multilayer(&parsed, &[&text]).unwrap();
    let layers = nonrank::layer_similarities(&network).unwrap();
    let ranking = fuse_layers(&layers).unwrap().rank(Scoring::SimilarMass);
    let expected: Vec<u64> = ranking.ordered_labels();

    assert_eq!(ranked_labels(&out), expected);
}

#[test]
fn pignistic_scoring_yields_a_complete_permutation() {
    let listing = fixture_dir().join("matrices.txt");
    let out = stdout_of(&run(&[
        "rank",
        "--matrices",
        listing.to_str().unwrap(),
        "--score",
        "pignistic",
    ]));
    let mut labels = ranked_labels(&out);
    labels.sort_unstable();
    assert_eq!(labels, (1..=10).collect::<Vec<u64>>());
}

#[test]
fn structured_text_report_carries_provenance() {
    let listing = fixture_dir().join("matrices.txt");
    let out = stdout_of(&run(&[
        "rank",
        "--matrices",
        listing.to_str().unwrap(),
        "--mode",
        "paper-rounded",
        "--format",
        "structured-text",
    ]));
    assert!(out.contains(concat!("tool: nonrank ", env!("CARGO_PKG_VERSION"))));
    assert!(out.contains("mode: paper-rounded"));
    assert!(out.contains("tie-break: descending score, then ascending node label"));
    let hash_line = out
        .lines()
        .find(|l| l.starts_with("input-sha256: "))
        .expect("digest line");
    assert_eq!(hash_line.len(), "input-sha256: ".len() + 64);
    assert!(out.contains("rank 1: node 7 "));
}

#[test]
fn transcript_streams_fold_steps_to_stderr() {
    let listing = fixture_dir().join("matrices.txt");
    let out = run(&[
        "fuse",
        "--matrices",
        listing.to_str().unwrap(),
        "--transcript",
    ]);
    assert!(out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    // 45 node pairs, three fold steps each.
    assert_eq!(stderr.lines().count(), 135);
    assert!(stderr.contains("element (3,4): layer 1 BPA ("));
    assert!(stderr.contains("K="));
}

#[test]
fn output_directory_receives_all_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let listing = fixture_dir().join("matrices.txt");
    let out = run(&[
        "rank",
        "--matrices",
        listing.to_str().unwrap(),
        "--output",
        out_dir.to_str().unwrap(),
        "--transcript",
    ]);
    assert!(out.status.success());
    assert!(out_dir.join("ranking.csv").is_file());
    assert!(out_dir.join("transcript.txt").is_file());
    let csv = fs::read_to_string(out_dir.join("ranking.csv")).unwrap();
    assert_eq!(ranked_labels(&csv)[0], 7);
}
