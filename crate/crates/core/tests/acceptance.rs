//! One PASS/FAIL line per acceptance criterion.

mod common;

use std::time::{Duration, Instant};

use common::fixtures;
use ppid_core::corpus;
use ppid_core::decomposition::verify_target_chain_rule;
use ppid_core::kelly::RaceMarket;
use ppid_core::lattice::{enumerate_nodes, meet, node_leq};
use ppid_core::verify;
use ppid_core::{
    decompose, DecomposeOptions, JointDistribution, LatticeNode, Measures, SourceEvent,
};

const TOL: f64 = 1e-9;

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn from_failures(failures: Vec<String>, ok: &str) -> Self {
        Self {
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                ok.to_string()
            } else {
                failures.join("; ")
            },
        }
    }
}

fn timed(limit: Duration, mut failures: Vec<String>, elapsed: Duration) -> Vec<String> {
    if elapsed >= limit {
        failures.push(format!("took {elapsed:?}, limit {limit:?}"));
    }
    failures
}

fn bivariate_corpus() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    for name in ["xor", "pwunq", "tbc", "unq", "and"] {
        bad.extend(fixtures::average_mismatches(name, Some(false)));
    }
    for name in ["and", "rdnerr"] {
        bad.extend(fixtures::average_mismatches(name, Some(true)));
    }
    let bad = timed(Duration::from_secs(1), bad, start.elapsed());
    Outcome::from_failures(
        bad,
        "XOR, PwUnq, Tbc, Unq exact; And and RdnErr(1/4) to 1e-3; And closed forms to 1e-9",
    )
}

fn pointwise_fixtures() -> Outcome {
    let mut bad = Vec::new();
    for name in ["xor", "pwunq", "rdnerr", "tbc", "unq", "and"] {
        bad.extend(fixtures::pointwise_mismatches(name));
    }
    Outcome::from_failures(bad, "all 14 columns of 24 fixture rows within 1e-9")
}

fn trivariate_tbep() -> Outcome {
    let start = Instant::now();
    let bad = fixtures::tbep_mismatches();
    let bad = timed(Duration::from_secs(1), bad, start.elapsed());
    Outcome::from_failures(
        bad,
        "π+ = 1 at {1}{2}{3} and {12}{13}{23}, zero at the other 16 nodes; π- = 0",
    )
}

fn lattice_structure() -> Outcome {
    let mut bad = Vec::new();
    for (n, want) in [(1, 1), (2, 4), (3, 18)] {
        let got = enumerate_nodes(n, 4).unwrap().len();
        if got != want {
            bad.push(format!("n={n}: {got} nodes"));
        }
    }
    let oracle = common::brute_force_antichains(4);
    let mut nodes: Vec<Vec<u32>> = enumerate_nodes(4, 4)
        .unwrap()
        .iter()
        .map(|v| {
            let mut m: Vec<u32> = v.sources().iter().map(|s| s.mask()).collect();
            m.sort_unstable();
            m
        })
        .collect();
    nodes.sort();
    let mut oracle_sorted = oracle.clone();
    oracle_sorted.sort();
    if oracle.len() != 166 || nodes != oracle_sorted {
        bad.push(format!(
            "n=4: {} nodes, oracle {}",
            nodes.len(),
            oracle.len()
        ));
    }
    for n in 1..=3 {
        let all = enumerate_nodes(n, 4).unwrap();
        let leq = |a: &LatticeNode, b: &LatticeNode| node_leq(a, b).unwrap();
        for a in &all {
            if !leq(a, a) {
                bad.push(format!("{a} not reflexive"));
            }
            for b in &all {
                if a != b && leq(a, b) && leq(b, a) {
                    bad.push(format!("{a} {b} not antisymmetric"));
                }
                let m = meet(a, b).unwrap();
                if !leq(&m, a) || !leq(&m, b) {
                    bad.push(format!("meet({a},{b}) not a lower bound"));
                }
                for c in &all {
                    if leq(a, b) && leq(b, c) && !leq(a, c) {
                        bad.push(format!("{a} {b} {c} not transitive"));
                    }
                    if leq(c, a) && leq(c, b) && !leq(c, &m) {
                        bad.push(format!("meet({a},{b}) not greatest"));
                    }
                }
            }
        }
    }
    bad.truncate(5);
    Outcome::from_failures(
        bad,
        "counts 1, 4, 18; n=4 equals the 166-node oracle; order and meet exhaustive for n<=3",
    )
}

fn with_corpus(random: &[JointDistribution]) -> Vec<JointDistribution> {
    let mut all: Vec<JointDistribution> = corpus::NAMES
        .iter()
        .map(|n| corpus::build(n, None).unwrap())
        .collect();
    all.extend_from_slice(random);
    all
}

fn theorem_suites(random: &[JointDistribution]) -> Outcome {
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, d) in with_corpus(random).iter().enumerate() {
        let t = decompose(d, &DecomposeOptions::default()).unwrap();
        let checks = [
            verify::axioms(d, &t, TOL).unwrap(),
            verify::monotonicity(&t, TOL),
            verify::non_negativity(&t, TOL),
            verify::closed_form(d, &t, TOL).unwrap(),
        ];
        for c in checks {
            worst = worst.max(c.max_violation);
            if !c.passed {
                bad.push(format!("instance {k} {}: {}", c.name, c.max_violation));
            }
        }
    }
    bad.truncate(5);
    Outcome::from_failures(
        bad,
        &format!("axioms, monotonicity, non-negativity, closed form on corpus + {} random; worst {worst:.1e}", random.len()),
    )
}

fn chain_rule(random_composite: &[JointDistribution]) -> Outcome {
    let mut bad = Vec::new();
    let tbc = corpus::build("tbc", None).unwrap();
    let mut worst: f64 = 0.0;
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        let r = verify_target_chain_rule(&tbc, &[a], &[b], &DecomposeOptions::default()).unwrap();
        worst = worst.max(r.max_residual());
    }
    for d in random_composite {
        let c = verify::chain_rule(d, &DecomposeOptions::default(), TOL).unwrap();
        worst = worst.max(c.max_violation);
    }
    if worst > TOL {
        bad.push(format!("residual {worst}"));
    }
    bad.extend(fixtures::tbc_chain_mismatches());
    Outcome::from_failures(
        bad,
        &format!("Tbc pairs and {} random composites, worst residual {worst:.1e}; Tbc component rows reproduced", random_composite.len()),
    )
}

fn conditional_forms(random_composite: &[JointDistribution]) -> Outcome {
    let mut bad = Vec::new();
    for (k, d) in random_composite.iter().enumerate() {
        for c in verify::conditional_corollaries(d, &DecomposeOptions::default(), TOL).unwrap() {
            if !c.passed {
                bad.push(format!("instance {k} {}: {}", c.name, c.max_violation));
            }
        }
    }
    bad.truncate(5);
    Outcome::from_failures(
        bad,
        &format!(
            "three identities on {} random composite targets",
            random_composite.len()
        ),
    )
}

fn two_event(random: &[JointDistribution]) -> Outcome {
    let mut bad = Vec::new();
    for (k, d) in with_corpus(random).iter().enumerate() {
        let t = decompose(d, &DecomposeOptions::default()).unwrap();
        let c = verify::two_event_invariance(d, &t, TOL);
        if !c.passed {
            bad.push(format!("instance {k}: {}", c.max_violation));
        }
    }
    bad.truncate(5);
    Outcome::from_failures(
        bad,
        &format!(
            "corpus + {} random, every node and realisation",
            random.len()
        ),
    )
}

fn kelly() -> Outcome {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst_mc: f64 = 0.0;
    for name in corpus::NAMES {
        let d = corpus::build(name, None).unwrap();
        for mask in 1u32..(1 << d.n()) {
            let wire = SourceEvent::from_mask(mask).unwrap().indices();
            let m = RaceMarket::fair(d.clone(), &wire).unwrap();
            match m.value_of_side_information() {
                Ok(dw) => {
                    let mi = Measures::new(&d)
                        .mutual_information(SourceEvent::from_mask(mask).unwrap())
                        .unwrap()
                        .value;
                    if (dw.value - mi).abs() > TOL {
                        bad.push(format!("{name} {wire:?}: ΔW {} vs I {mi}", dw.value));
                    }
                }
                Err(e) => bad.push(format!("{name} {wire:?}: {e}")),
            }
        }
        let wire: Vec<usize> = (0..d.n()).collect();
        let m = RaceMarket::fair(d.clone(), &wire).unwrap();
        let sims = m
            .simulate_seeds(100_000, &(0..10).collect::<Vec<_>>())
            .unwrap();
        let mean = sims.iter().map(|s| s.empirical_rate).sum::<f64>() / 10.0;
        let gap = (mean - sims[0].analytic_rate).abs();
        worst_mc = worst_mc.max(gap);
        if gap > 0.05 {
            bad.push(format!(
                "{name}: empirical {mean} vs analytic {}",
                sims[0].analytic_rate
            ));
        }
    }

    let tbc = corpus::build("tbc", None).unwrap();
    let orders: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    for wire in [vec![0], vec![1], vec![0, 1]] {
        let m = RaceMarket::fair(tbc.clone(), &wire).unwrap();
        for r in tbc.realisations() {
            let s: Vec<u32> = wire.iter().map(|&i| r.row()[i]).collect();
            let totals: Vec<f64> = orders
                .iter()
                .map(|o| {
                    m.accumulator_log_return(&s, r.target_components(2), o)
                        .unwrap()
                        .total
                })
                .collect();
            if totals.iter().any(|t| (t - totals[0]).abs() > TOL) {
                bad.push(format!("accumulator orders disagree: {totals:?}"));
            }
        }
    }
    for (wire, msg, factor) in [(vec![0], vec![0], 2.0), (vec![0, 1], vec![0, 0], 4.0)] {
        let m = RaceMarket::fair(tbc.clone(), &wire).unwrap();
        let r = m.pointwise_return(&msg, &[0, 0, 0]).unwrap().value;
        if (r.exp2() - factor).abs() > TOL {
            bad.push(format!("wire {wire:?}: wealth ×{}", r.exp2()));
        }
    }
    let bad = timed(Duration::from_secs(30), bad, start.elapsed());
    Outcome::from_failures(
        bad,
        &format!("ΔW = I(S;T) on every corpus wire; Monte Carlo gap <= {worst_mc:.3}; accumulators order-free; Tbc ×2 and ×4"),
    )
}

fn negativity() -> Outcome {
    let bi = |name| {
        decompose(
            &corpus::build(name, None).unwrap(),
            &DecomposeOptions::default(),
        )
        .unwrap()
        .bivariate()
        .unwrap()
    };
    let rdn = bi("rdnerr").unique2;
    let unq = bi("unq").unique2;
    let mut bad = Vec::new();
    if rdn >= 0.0 {
        bad.push(format!("RdnErr U2 = {rdn}"));
    }
    if (unq + 1.0).abs() > TOL {
        bad.push(format!("Unq U2 = {unq}"));
    }
    Outcome::from_failures(bad, &format!("RdnErr U2 = {rdn:.3}, Unq U2 = {unq}"))
}

fn main() {
    let random = common::random_suite(2024, common::RANDOM_INSTANCES, false);
    let random_composite = common::random_suite(2025, common::RANDOM_INSTANCES, true);

    let criteria: Vec<Criterion> = vec![
        ("bivariate corpus averages", Box::new(bivariate_corpus)),
        ("pointwise fixture columns", Box::new(pointwise_fixtures)),
        ("trivariate Tbep atoms", Box::new(trivariate_tbep)),
        ("lattice structure", Box::new(lattice_structure)),
        (
            "theorem property suites",
            Box::new(|| theorem_suites(&random)),
        ),
        (
            "target chain rule",
            Box::new(|| chain_rule(&random_composite)),
        ),
        (
            "conditional-form identities",
            Box::new(|| conditional_forms(&random_composite)),
        ),
        ("two-event invariance", Box::new(|| two_event(&random))),
        ("Kelly gambling", Box::new(kelly)),
        ("negative averaged atoms", Box::new(negativity)),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {name}: {}", k + 1, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
