#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use ppid_core::{DistributionBuilder, JointDistribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RANDOM_INSTANCES: usize = 500;

/// A random distribution with rational masses over a few support rows.
///
/// Predictor alphabets have 2..=3 letters. A composite target has 2 or 3
/// components of 2..=3 letters each.
pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize, composite: bool) -> JointDistribution {
    let pred_sizes: Vec<u32> = (0..n).map(|_| rng.random_range(2..=3)).collect();
    let comp_sizes: Vec<u32> = if composite {
        (0..rng.random_range(2..=3))
            .map(|_| rng.random_range(2..=3))
            .collect()
    } else {
        vec![rng.random_range(2..=3)]
    };
    let names: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut b = DistributionBuilder::new(&names, "t");
    if composite {
        let comps: Vec<String> = (1..=comp_sizes.len()).map(|j| format!("t{j}")).collect();
        let comps: Vec<&str> = comps.iter().map(String::as_str).collect();
        b = b.composite(&comps);
    }
    let rows = rng.random_range(2..=10);
    let weights: Vec<i64> = (0..rows).map(|_| rng.random_range(1..=6)).collect();
    let total: i64 = weights.iter().sum();
    for w in weights {
        let labels: Vec<String> = pred_sizes
            .iter()
            .chain(&comp_sizes)
            .map(|&k| rng.random_range(0..k).to_string())
            .collect();
        b.push(
            BigRational::new(BigInt::from(w), BigInt::from(total)),
            labels,
        );
    }
    b.build().expect("random distribution")
}

/// `count` seeded instances, alternating two and three predictors.
pub fn random_suite(seed: u64, count: usize, composite: bool) -> Vec<JointDistribution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| random_distribution(&mut rng, 2 + k % 2, composite))
        .collect()
}

/// Every antichain of nonempty subsets of `{0..n}`, found by filtering the
/// whole double power set. Subsets are bitmasks; each antichain is sorted.
pub fn brute_force_antichains(n: usize) -> Vec<Vec<u32>> {
    let subsets: Vec<u32> = (1u32..(1 << n)).collect();
    let mut out = Vec::new();
    for family in 1u64..(1u64 << subsets.len()) {
        let members: Vec<u32> = subsets
            .iter()
            .enumerate()
            .filter(|(k, _)| family >> k & 1 == 1)
            .map(|(_, &s)| s)
            .collect();
        let antichain = members
            .iter()
            .all(|&a| members.iter().all(|&b| a == b || a & b != a));
        if antichain {
            out.push(members);
        }
    }
    out
}

pub mod fixtures {
    use ppid_core::corpus::{self, Expected, BIVARIATE_COLUMNS};
    use ppid_core::{decompose, DecomposeOptions, TargetView};

    pub const ZERO: f64 = 1e-12;

    /// Pointwise columns of a two-predictor entry that differ from the fixture.
    pub fn pointwise_mismatches(name: &str) -> Vec<String> {
        let d = corpus::build(name, None).unwrap();
        let fx = corpus::expected_atoms(name, None).unwrap();
        let table = decompose(&d, &DecomposeOptions::default()).unwrap();
        let mut bad = Vec::new();
        if fx.pointwise.len() != table.realisations().len() {
            bad.push(format!("{name}: {} fixture rows", fx.pointwise.len()));
        }
        for row in &fx.pointwise {
            let Some(k) = table
                .realisations()
                .iter()
                .position(|ra| d.schema().row_labels(ra.realisation.row()) == row.outcome)
            else {
                bad.push(format!("{name}: no realisation {:?}", row.outcome));
                continue;
            };
            let got = table.pointwise_bivariate(k).unwrap().to_row();
            for (c, (want, have)) in row.columns.iter().zip(got).enumerate() {
                if (want.eval() - have).abs() > Expected::EXACT_TOLERANCE {
                    bad.push(format!(
                        "{name} {:?} {}: expected {want} = {}, got {have}",
                        row.outcome,
                        BIVARIATE_COLUMNS[c],
                        want.eval()
                    ));
                }
            }
        }
        if let Some(expected) = &fx.expected_row {
            let got = table.expected_bivariate().unwrap().to_row();
            for (c, (want, have)) in expected.iter().zip(got).enumerate() {
                if !want.matches(have) {
                    bad.push(format!(
                        "{name} E[{}]: expected {want}, got {have}",
                        BIVARIATE_COLUMNS[c]
                    ));
                }
            }
        }
        bad
    }

    /// Averaged atoms that differ from the fixture, optionally restricted to
    /// exact or printed expectations.
    pub fn average_mismatches(name: &str, printed: Option<bool>) -> Vec<String> {
        let d = corpus::build(name, None).unwrap();
        let fx = corpus::expected_atoms(name, None).unwrap();
        let b = decompose(&d, &DecomposeOptions::default())
            .unwrap()
            .bivariate()
            .unwrap();
        let got = [b.redundant, b.unique1, b.unique2, b.complementary];
        let mut bad = Vec::new();
        for ((atom, wants), have) in fx.averages.as_ref().unwrap().atoms().into_iter().zip(got) {
            for want in wants {
                let is_printed = matches!(want, Expected::Printed(_));
                if printed.is_some_and(|p| p != is_printed) {
                    continue;
                }
                if !want.matches(have) {
                    bad.push(format!("{name} {atom}: expected {want}, got {have}"));
                }
            }
        }
        bad
    }

    /// Tbep: nonzero partial atoms only where the fixture lists them.
    pub fn tbep_mismatches() -> Vec<String> {
        let d = corpus::build("tbep", None).unwrap();
        let fx = corpus::expected_atoms("tbep", None).unwrap();
        let table = decompose(&d, &DecomposeOptions::default()).unwrap();
        let mut bad = Vec::new();
        let mut rows: Vec<(&str, Vec<_>)> = table
            .realisations()
            .iter()
            .map(|ra| ("pointwise", ra.atoms.clone()))
            .collect();
        rows.push(("average", table.averages().to_vec()));
        for (kind, atoms) in rows {
            for (node, a) in table.nodes().iter().zip(atoms.iter()) {
                let label = node.to_string();
                let (plus, minus) = fx
                    .trivariate
                    .iter()
                    .find(|e| e.node == label)
                    .map(|e| (e.pi_plus.eval(), e.pi_minus.eval()))
                    .unwrap_or((0.0, 0.0));
                let tol = if plus == 0.0 {
                    ZERO
                } else {
                    Expected::EXACT_TOLERANCE
                };
                if (a.pi_plus - plus).abs() > tol || (a.pi_minus - minus).abs() > ZERO {
                    bad.push(format!(
                        "tbep {kind} {label}: π+ {} π- {}, expected {plus} {minus}",
                        a.pi_plus, a.pi_minus
                    ));
                }
            }
        }
        bad
    }

    /// The averaged component-target rows of Tbc.
    pub fn tbc_chain_mismatches() -> Vec<String> {
        let d = corpus::build("tbc", None).unwrap();
        let fx = corpus::expected_atoms("tbc", None).unwrap();
        let target = d.schema().target().unwrap();
        let idx = |names: &[&str]| -> Vec<usize> {
            names
                .iter()
                .map(|n| target.component_index(n).unwrap())
                .collect()
        };
        let mut bad = Vec::new();
        for row in &fx.chain_rule {
            let view = TargetView::about(&idx(&row.about)).given(&idx(&row.given));
            let table = decompose(
                &d,
                &DecomposeOptions {
                    view: Some(view),
                    ..Default::default()
                },
            )
            .unwrap();
            let b = table.bivariate().unwrap();
            for (atom, have) in [
                ("R", b.redundant),
                ("U1", b.unique1),
                ("U2", b.unique2),
                ("C", b.complementary),
            ] {
                let want = row
                    .atoms
                    .iter()
                    .find(|(a, _)| *a == atom)
                    .map(|(_, v)| v.eval())
                    .unwrap_or(0.0);
                if (want - have).abs() > Expected::EXACT_TOLERANCE {
                    bad.push(format!(
                        "tbc {:?}|{:?} {atom}: expected {want}, got {have}",
                        row.about, row.given
                    ));
                }
            }
        }
        bad
    }
}
