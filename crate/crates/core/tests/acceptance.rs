//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so that the lines come out in order and
//! are always shown. Exits non-zero when a gating criterion fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use kinkfree::fixtures;
use kinkfree::kinks::{self, Strategy};
use kinkfree::random::Ends;
use kinkfree::ribbon::EdgeId;
use kinkfree::selftest::{self, Report};
use kinkfree::walks::{self, parse_walk, Walk};

const SEED: u64 = 20_240_601;
const FUZZ_TRIANGULATIONS: usize = 20;
const FUZZ_WALKS_PER_TRIANGULATION: usize = 500;
const FUZZ_RANDOM_STRATEGIES: usize = 10;
const FUZZ_MAX_LEN: usize = 200;
const FUZZ_TIME_LIMIT: Duration = Duration::from_secs(300);

/// Criteria that fail for reasons recorded outside the code base; they
/// are still run and reported.
const KNOWN_FAILING: &[(u32, &str)] = &[(
    6,
    "resolving an inner curl can restore an enclosing curl of the same total",
)];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &'static str, pass: bool, detail: impl Into<String>) -> Outcome {
    let o = Outcome {
        id,
        name,
        pass,
        detail: detail.into(),
    };
    println!(
        "{} {:>2} {}: {}",
        if o.pass { "PASS" } else { "FAIL" },
        o.id,
        o.name,
        o.detail
    );
    o
}

fn from_suite(id: u32, name: &'static str, r: &Report, tolerance: &str) -> Outcome {
    let note = if r.note.is_empty() {
        String::new()
    } else {
        format!(" ({})", r.note)
    };
    let mut detail = format!(
        "{} cases, {} failures{note}; tolerance {tolerance}",
        r.cases, r.failures
    );
    if let Some(c) = &r.counterexample {
        detail.push_str(&format!("; first counterexample: {}", c.message));
    }
    report(id, name, r.passed(), detail)
}

fn annulus_regression() -> Outcome {
    let lg = fixtures::annulus().leafy_dual_graph().unwrap();
    let g = &lg.graph;
    let walks = [
        fixtures::ANNULUS_F1,
        fixtures::ANNULUS_F2,
        fixtures::ANNULUS_F3,
        fixtures::ANNULUS_F4,
    ]
    .map(|w| parse_walk(g, w).unwrap());
    let expected_signs = ["+----+", "+-++-++--+", "+-++---++--+", "+-+-+-+--+"];
    let expected_kinks: [Vec<(usize, usize, usize, usize)>; 4] =
        [vec![], vec![], vec![(2, 4, 9, 1)], vec![(1, 3, 8, 1)]];
    let mut bad = Vec::new();
    for (i, w) in walks.iter().enumerate() {
        let s = walks::sign_sequence(g, w).unwrap().to_string();
        if s != expected_signs[i] {
            bad.push(format!("s(f{}) = {s}", i + 1));
        }
        let ks: Vec<_> = kinks::find_kinks(&lg, w)
            .unwrap()
            .iter()
            .map(|k| (k.multiplicity, k.j, k.m, k.r))
            .collect();
        if ks != expected_kinks[i] {
            bad.push(format!("kinks(f{}) = {ks:?}", i + 1));
        }
    }
    report(
        1,
        "annulus sign sequences and kinks",
        bad.is_empty(),
        if bad.is_empty() {
            "4 sign strings, 4 kink reports; tolerance exact".to_string()
        } else {
            bad.join(", ")
        },
    )
}

fn powers_regression() -> Outcome {
    let g = fixtures::three_edge_graph();
    let f = parse_walk(&g, "u0 alpha eta1 eta2 alpha").unwrap();
    let f_inv = walks::invert(&f);
    let [alpha, eta1, eta2] = ["alpha", "eta1", "eta2"].map(|l| g.edge_by_label(l).unwrap());
    let shape = |n: usize, a: EdgeId, b: EdgeId| {
        let mut v = vec![alpha];
        for _ in 0..n {
            v.extend([a, b]);
        }
        v.push(alpha);
        v
    };
    let mut bad = Vec::new();
    let (mut pos, mut neg) = (f.clone(), f_inv.clone());
    for n in 1..=10 {
        if n > 1 {
            pos = walks::compose(&pos, &f).unwrap();
            neg = walks::compose(&neg, &f_inv).unwrap();
        }
        let word: Vec<EdgeId> = (0..n).flat_map(|_| f.edges.iter().copied()).collect();
        let direct = walks::standard_form(&g, f.start, &word).unwrap();
        if pos.edges != shape(n, eta1, eta2) || direct != pos {
            bad.push(format!("f^{n}"));
        }
        if neg.edges != shape(n, eta2, eta1) {
            bad.push(format!("f^-{n}"));
        }
    }
    report(
        2,
        "standard forms of powers",
        bad.is_empty(),
        if bad.is_empty() {
            "n = 1..10, eta-run length 2n; tolerance exact".to_string()
        } else {
            format!("wrong shape: {}", bad.join(", "))
        },
    )
}

/// All irreducible words reachable by deleting adjacent equal pairs in any order.
fn all_free_reductions(word: &[EdgeId]) -> HashSet<Vec<EdgeId>> {
    let mut seen = HashSet::new();
    let mut finals = HashSet::new();
    let mut stack = vec![word.to_vec()];
    while let Some(w) = stack.pop() {
        if !seen.insert(w.clone()) {
            continue;
        }
        let mut irreducible = true;
        for i in 1..w.len() {
            if w[i - 1] == w[i] {
                irreducible = false;
                let mut next = w.clone();
                next.drain(i - 1..=i);
                stack.push(next);
            }
        }
        if irreducible {
            finals.insert(w);
        }
    }
    finals
}

fn normalization_regression() -> Outcome {
    let lg = fixtures::annulus().leafy_dual_graph().unwrap();
    let g = &lg.graph;
    let p = |w| parse_walk(g, w).unwrap();
    let cases = [
        (p(fixtures::ANNULUS_F4), p(fixtures::ANNULUS_F2), "f4 -> f2"),
        (p(fixtures::ANNULUS_F3), p(fixtures::ANNULUS_F1), "f3 -> f1"),
    ];
    let strategies: Vec<Strategy> = std::iter::once(Strategy::LeftmostInnermost)
        .chain((0..10).map(Strategy::Random))
        .collect();
    let mut bad = Vec::new();
    let mut steps_checked = 0;
    for (input, expected, name) in &cases {
        for &s in &strategies {
            let (out, steps) = kinks::normalize_traced(&lg, input, s).unwrap();
            if out != *expected {
                bad.push(format!("{name} under {s:?}"));
            }
            let mut cur: Walk = input.clone();
            for st in &steps {
                let mut swapped = cur.edges.clone();
                swapped.swap(st.swap - 1, st.swap);
                let finals = all_free_reductions(&swapped);
                let result = st.result.clone().unwrap();
                if finals.len() != 1 || !finals.contains(&result.edges) {
                    bad.push(format!("{name}: step at {} disagrees with the oracle", st.swap));
                }
                steps_checked += 1;
                cur = result;
            }
        }
    }
    report(
        3,
        "normalization of the annulus examples",
        bad.is_empty(),
        if bad.is_empty() {
            format!(
                "2 walks x {} strategies, {steps_checked} steps matched the all-orders reducer; tolerance exact",
                strategies.len()
            )
        } else {
            bad.join(", ")
        },
    )
}

fn main() -> ExitCode {
    println!("acceptance: seed {SEED}, rng {}", selftest::RNG_NAME);
    let mut outcomes = vec![
        annulus_regression(),
        powers_regression(),
        normalization_regression(),
    ];

    let t = Instant::now();
    let fuzz = selftest::confluence_fuzz(
        SEED,
        FUZZ_TRIANGULATIONS,
        FUZZ_WALKS_PER_TRIANGULATION,
        FUZZ_RANDOM_STRATEGIES,
        FUZZ_MAX_LEN,
        Ends::Basepoints,
    );
    let elapsed = t.elapsed();
    let mut o4 = from_suite(
        4,
        "global confluence fuzz",
        &fuzz.confluence,
        &format!("100% agreement, under {}s", FUZZ_TIME_LIMIT.as_secs()),
    );
    println!("        fuzz time {:.1}s", elapsed.as_secs_f64());
    o4.pass &= elapsed < FUZZ_TIME_LIMIT;
    outcomes.push(o4);
    outcomes.push(from_suite(5, "drop lemmas", &fuzz.drop_lemmas, "zero violations"));
    outcomes.push(from_suite(6, "strict decrease", &fuzz.strict_decrease, "zero violations"));
    outcomes.push(from_suite(7, "K-membership", &selftest::k_membership(SEED, 1000), "100%/100%"));
    outcomes.push(from_suite(8, "section property", &selftest::section(SEED, 1000), "100%"));
    outcomes.push(from_suite(9, "order-two detection", &selftest::order_two(SEED, 1000), "100%"));
    outcomes.push(from_suite(10, "flip invariance", &selftest::flip_invariance(SEED, 500), "100%"));
    outcomes.push(from_suite(11, "key-lemma instances", &selftest::key_lemma(SEED, 100), "100%"));

    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    let mut gating_failed = false;
    for o in outcomes.iter().filter(|o| !o.pass) {
        match KNOWN_FAILING.iter().find(|(id, _)| *id == o.id) {
            Some((_, why)) => println!("known failure {} ({}): {why}", o.id, o.name),
            None => gating_failed = true,
        }
    }
    for (id, _) in KNOWN_FAILING {
        if outcomes.iter().any(|o| o.id == *id && o.pass) {
            println!("criterion {id} is listed as failing but passed");
        }
    }
    if gating_failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
