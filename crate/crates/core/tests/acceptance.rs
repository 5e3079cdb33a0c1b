//! Acceptance criteria. Each test prints one PASS/FAIL line with its wall time.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gkm_quadrics::cohomology::degree_component;
use gkm_quadrics::cp1::{lattice_index, verify_cp1_presentation};
use gkm_quadrics::decomposition::{
    verify_graded_ranks, verify_surjective_decomposition, verify_unique_decomposition,
};
use gkm_quadrics::generators::{make_delta, make_m, make_q};
use gkm_quadrics::graph::{Edge, GkmGraph};
use gkm_quadrics::ordinary::{betti_full, verify_ordinary_presentation};
use gkm_quadrics::poly::Polynomial;
use gkm_quadrics::relations::{
    relation1_suite, verify_even_relations, verify_iota_injective, verify_iota_star_correspondence,
    verify_relation2, verify_relation3, verify_relation4, CheckRecord,
};
use num_bigint::BigInt;
use serde_json::Value;

fn report(id: u32, name: &str, start: Instant, bound: Option<Duration>, ok: bool) {
    let t = start.elapsed();
    let in_time = bound.is_none_or(|b| t < b);
    let verdict = if ok && in_time { "PASS" } else { "FAIL" };
    let limit = bound.map(|b| format!(" (limit {b:?})")).unwrap_or_default();
    println!("criterion {id} {name}: {verdict} in {t:?}{limit}");
    assert!(ok, "criterion {id} {name}: check failed");
    assert!(in_time, "criterion {id} {name}: {t:?} exceeds {bound:?}");
}

fn all_pass(records: &[CheckRecord]) -> bool {
    let bad: Vec<_> = records.iter().filter(|r| !r.passed()).collect();
    for r in &bad {
        println!("  failed: {} {}", r.relation, r.instance);
    }
    bad.is_empty()
}

fn p(n: usize, s: &str) -> Polynomial {
    Polynomial::parse(n, s).unwrap()
}

fn odd(n: usize) -> Arc<GkmGraph> {
    Arc::new(GkmGraph::odd_quadric(n).unwrap())
}

fn even(n: usize) -> Arc<GkmGraph> {
    Arc::new(GkmGraph::even_quadric(n).unwrap())
}

// Rows: source vertex 1..6, columns: target 1..6 ("" on the diagonal).
const AXIAL_N3: [[&str; 6]; 6] = [
    ["", "-a1 + a2", "-a1 + a3", "-a1 - a3", "-a1 - a2", "-a1"],
    ["a1 - a2", "", "-a2 + a3", "-a2 - a3", "-a2", "-a1 - a2"],
    ["a1 - a3", "a2 - a3", "", "-a3", "-a2 - a3", "-a1 - a3"],
    ["a1 + a3", "a2 + a3", "a3", "", "-a2 + a3", "-a1 + a3"],
    ["a1 + a2", "a2", "a2 + a3", "a2 - a3", "", "-a1 + a2"],
    ["a1", "a1 + a2", "a1 + a3", "a1 - a3", "a1 - a2", ""],
];

const M_N3: [[&str; 6]; 6] = [
    ["0", "a1 - a2", "a1 - a3", "a1 + a3", "a1 + a2", "2*a1"],
    ["a2 - a1", "0", "a2 - a3", "a2 + a3", "2*a2", "a2 + a1"],
    ["a3 - a1", "a3 - a2", "0", "2*a3", "a3 + a2", "a3 + a1"],
    ["-a3 - a1", "-a3 - a2", "-2*a3", "0", "-a3 + a2", "-a3 + a1"],
    ["-a2 - a1", "-2*a2", "-a2 - a3", "-a2 + a3", "0", "-a2 + a1"],
    ["-2*a1", "-a1 - a2", "-a1 - a3", "-a1 + a3", "-a1 + a2", "0"],
];

const Q_N3: [&str; 6] = ["-a1", "-a2", "-a3", "a3", "a2", "a1"];

const M4_N2: [&str; 4] = ["-2*a1", "-a2 - a1", "a2 - a1", "0"];

const DELTA_456: [&str; 6] = [
    "0",
    "0",
    "0",
    "a3*(a1 + a3)*(a2 + a3)",
    "a2*(a1 + a2)*(a2 + a3)",
    "a1*(a1 + a2)*(a1 + a3)",
];

#[test]
fn criterion_1_fixture_fidelity() {
    let start = Instant::now();
    let g = odd(3);
    let mut ok = g.num_edges() == 30;
    for (i, row) in AXIAL_N3.iter().enumerate() {
        for (j, want) in row.iter().enumerate() {
            let e = Edge::new(i + 1, j + 1);
            ok &= match g.axial(e) {
                None => want.is_empty(),
                Some(l) => !want.is_empty() && l.to_polynomial() == p(3, want),
            };
        }
    }
    for (v, row) in M_N3.iter().enumerate() {
        let m = make_m(&g, v + 1).unwrap();
        ok &= row
            .iter()
            .enumerate()
            .all(|(j, s)| m.value(j + 1) == &p(3, s));
    }
    let q = make_q(&g).unwrap();
    ok &= Q_N3
        .iter()
        .enumerate()
        .all(|(j, s)| q.value(j + 1) == &p(3, s));
    let m4 = make_m(&odd(2), 4).unwrap();
    ok &= M4_N2
        .iter()
        .enumerate()
        .all(|(j, s)| m4.value(j + 1) == &p(2, s));
    let d = make_delta(&g, &[4, 5, 6]).unwrap();
    ok &= DELTA_456
        .iter()
        .enumerate()
        .all(|(j, s)| d.value(j + 1) == &p(3, s));
    report(
        1,
        "fixture fidelity",
        start,
        Some(Duration::from_secs(1)),
        ok,
    );
}

#[test]
fn criterion_2_axiom_suite() {
    let start = Instant::now();
    let mut graphs: Vec<GkmGraph> = (1..=4).map(|n| GkmGraph::odd_quadric(n).unwrap()).collect();
    graphs.extend((2..=4).map(|n| GkmGraph::even_quadric(n).unwrap()));
    graphs.extend((1..=8).map(|n| GkmGraph::cp1(n).unwrap()));
    let mut ok = true;
    for g in &graphs {
        let r = g.verify_axial_axioms();
        if !r.is_ok() {
            println!("  {}: {:?}", g.display_name(), r.violations);
            ok = false;
        }
    }
    // A single flipped label must be caught.
    let g = GkmGraph::odd_quadric(3).unwrap();
    let bad = g
        .with_axial(Edge::new(1, 2), g.alpha(1, 3).clone())
        .unwrap();
    ok &= !bad.verify_axial_axioms().is_ok();
    report(2, "axiom suite", start, Some(Duration::from_secs(5)), ok);
}

#[test]
fn criterion_3_relation_suite() {
    let start = Instant::now();
    let mut ok = true;
    for n in 1..=4 {
        let g = odd(n);
        ok &= all_pass(&verify_relation2(&g).unwrap());
        ok &= all_pass(&verify_relation3(&g).unwrap());
        ok &= all_pass(&verify_relation4(&g).unwrap());
    }
    for n in 1..=3 {
        ok &= all_pass(&relation1_suite(&odd(n), 2).unwrap());
    }
    ok &= all_pass(&relation1_suite(&odd(2), 3).unwrap());
    for n in 2..=4 {
        ok &= all_pass(&verify_even_relations(&even(n), 2).unwrap());
    }
    report(
        3,
        "relation suite",
        start,
        Some(Duration::from_secs(60)),
        ok,
    );
}

#[test]
fn criterion_4_decomposition_round_trips() {
    let start = Instant::now();
    let mut ok = true;
    for n in 2..=4 {
        let g = odd(n);
        ok &= verify_unique_decomposition(&g, 100, 1000 + n as u64)
            .unwrap()
            .is_ok();
        ok &= verify_surjective_decomposition(&g, 100, 2000 + n as u64)
            .unwrap()
            .is_ok();
    }
    for n in 2..=3 {
        let g = even(n);
        ok &= verify_unique_decomposition(&g, 100, 3000 + n as u64)
            .unwrap()
            .is_ok();
        ok &= verify_surjective_decomposition(&g, 100, 4000 + n as u64)
            .unwrap()
            .is_ok();
    }
    report(4, "decomposition round trips", start, None, ok);
}

#[test]
fn criterion_5_graded_structure() {
    let start = Instant::now();
    let mut ok = true;
    for n in 1..=3 {
        ok &= all_pass(&verify_graded_ranks(&odd(n), 4).unwrap());
        // Independent count: a free module on one generator in each degree 0..2n-1
        // over n variables has Σ_k C(d-k+n-1, n-1) classes in degree d.
        for d in 0..=4u32 {
            let want: u64 = (0..2 * n as u32)
                .filter(|&k| k <= d)
                .map(|k| binom((d - k) as u64 + n as u64 - 1, n as u64 - 1))
                .sum();
            ok &= degree_component(&odd(n), d).rank() as u64 == want;
        }
    }
    report(5, "graded structure", start, None, ok);
}

fn binom(a: u64, b: u64) -> u64 {
    (0..b).fold(1, |acc, i| acc * (a - i) / (i + 1))
}

#[test]
fn criterion_6_ordinary_cohomology() {
    let start = Instant::now();
    let cases: [(GkmGraph, Vec<usize>); 4] = [
        (GkmGraph::odd_quadric(2).unwrap(), vec![1, 1, 1, 1]),
        (GkmGraph::odd_quadric(3).unwrap(), vec![1; 6]),
        (GkmGraph::even_quadric(2).unwrap(), vec![1, 2, 1]),
        (GkmGraph::even_quadric(3).unwrap(), vec![1, 1, 2, 1, 1]),
    ];
    let mut ok = true;
    for (g, want) in &cases {
        let t = betti_full(g);
        ok &= &t.ranks() == want && t.is_torsion_free();
    }
    for n in 1..=3 {
        ok &= all_pass(&verify_ordinary_presentation(n).unwrap());
    }
    report(
        6,
        "ordinary cohomology",
        start,
        Some(Duration::from_secs(30)),
        ok,
    );
}

#[test]
fn criterion_7_iota() {
    let start = Instant::now();
    let mut ok = true;
    for n in 2..=3 {
        ok &= all_pass(&verify_iota_star_correspondence(n).unwrap());
        for d in 0..=4 {
            ok &= verify_iota_injective(n, d).unwrap().passed();
        }
    }
    report(7, "pullback checks", start, None, ok);
}

#[test]
fn criterion_8_cp1() {
    let start = Instant::now();
    let mut ok = true;
    for n in 1..=5 {
        ok &= all_pass(&verify_cp1_presentation(n).unwrap());
    }
    for n in 1..=12usize {
        ok &= lattice_index(n).unwrap() == BigInt::from(n);
    }
    ok &= lattice_index(1).unwrap() != lattice_index(2).unwrap();
    report(8, "CP1 actions", start, None, ok);
}

fn gkmq(args: &[&str]) -> (i32, Vec<u8>, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gkmq"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        out.stdout,
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn criterion_9_cli() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let path = |s: &str| dir.path().join(s).to_str().unwrap().to_string();
    let (g_json, q_json, dot) = (path("g.json"), path("q.json"), path("g.dot"));
    let mut ok = true;

    ok &= gkmq(&[
        "build", "--family", "odd", "--n", "2", "--out", &g_json, "--dot", &dot,
    ])
    .0 == 0;
    let reloaded = GkmGraph::from_json(
        &serde_json::from_str(&std::fs::read_to_string(&g_json).unwrap()).unwrap(),
    )
    .unwrap();
    ok &= reloaded == *odd(2);
    ok &= gkmq(&["class", "--graph", &g_json, "--kind", "Q", "--out", &q_json]).0 == 0;
    ok &= gkmq(&["verify", "--graph", &g_json, "--all"]).0 == 0;
    let (code, out, _) = gkmq(&["decompose", "--graph", &g_json, "--class", &q_json]);
    ok &= code == 0;
    let v: Value = serde_json::from_slice(&out).unwrap();
    let coeffs: Vec<Polynomial> = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| Polynomial::from_json(2, c).unwrap())
        .collect();
    ok &= coeffs == vec![p(2, "-a1"), p(2, "1"), p(2, "0"), p(2, "0")];

    let text = std::fs::read_to_string(&dot).unwrap();
    ok &= dot_parser::ast::Graph::try_from(text.as_str()).is_ok();
    for (family, n) in [("even", "2"), ("cp1", "3"), ("odd", "3")] {
        let (code, out, _) = gkmq(&["export-dot", "--family", family, "--n", n]);
        ok &= code == 0
            && dot_parser::ast::Graph::try_from(String::from_utf8(out).unwrap().as_str()).is_ok();
    }

    let runs: Vec<Vec<&str>> = vec![
        vec!["build", "--family", "even", "--n", "3"],
        vec![
            "verify", "--family", "odd", "--n", "2", "--all", "--seed", "7", "--json",
        ],
        vec!["decompose", "--graph", &g_json, "--class", &q_json],
        vec!["betti", "--family", "even", "--n", "3", "--json"],
        vec!["export-dot", "--family", "odd", "--n", "3"],
    ];
    for args in &runs {
        let a = gkmq(args);
        let b = gkmq(args);
        ok &= a.0 == 0 && a.1 == b.1;
    }
    report(9, "CLI pipeline", start, None, ok);
}
