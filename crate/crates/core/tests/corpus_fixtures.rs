mod common;

use common::fixtures;
use ppid_core::corpus;
use ppid_core::decomposition::{rmin_minus, rmin_plus, rmin_plus_conditional, rmin_recombined};
use ppid_core::{decompose, DecomposeOptions, LatticeNode, Measures};

const TOL: f64 = 1e-9;

fn assert_clean(bad: Vec<String>) {
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn pointwise_columns_match() {
    for name in ["xor", "pwunq", "rdnerr", "tbc", "unq", "and"] {
        assert_clean(fixtures::pointwise_mismatches(name));
    }
}

#[test]
fn averaged_atoms_match() {
    for name in ["xor", "pwunq", "rdnerr", "tbc", "unq", "and"] {
        assert_clean(fixtures::average_mismatches(name, None));
    }
}

#[test]
fn tbep_atoms() {
    assert_clean(fixtures::tbep_mismatches());
}

#[test]
fn tbc_component_rows() {
    assert_clean(fixtures::tbc_chain_mismatches());
}

fn realisation(d: &ppid_core::JointDistribution, labels: &[&str]) -> ppid_core::Realisation {
    d.realisations()
        .iter()
        .find(|r| d.schema().row_labels(r.row()) == labels)
        .unwrap()
        .clone()
}

#[test]
fn single_redundancy_values() {
    let node = |n, s| LatticeNode::parse(n, s).unwrap();

    let d = corpus::build("pwunq", None).unwrap();
    let m = Measures::new(&d);
    let r = realisation(&d, &["0", "1", "1"]);
    assert!((rmin_plus(&m, &node(2, "{1}{2}"), &r).unwrap().value - 1.0).abs() < TOL);

    let d = corpus::build("tbep", None).unwrap();
    let m = Measures::new(&d);
    let r = d.realisations()[1].clone();
    assert!((rmin_plus(&m, &node(3, "{12}{13}{23}"), &r).unwrap().value - 2.0).abs() < TOL);

    let d = corpus::build("and", None).unwrap();
    let m = Measures::new(&d);
    let r = realisation(&d, &["0", "0", "0"]);
    let v = rmin_minus(&m, &node(2, "{1}{2}"), &r).unwrap().value;
    assert!((v - 1.5f64.log2()).abs() < TOL);

    let d = corpus::build("rdnerr", None).unwrap();
    let m = Measures::new(&d);
    let r = realisation(&d, &["0", "0", "0"]);
    assert!(rmin_minus(&m, &node(2, "{1}{2}"), &r).unwrap().value.abs() < TOL);

    let d = corpus::build("xor", None).unwrap();
    let m = Measures::new(&d);
    for r in d.realisations() {
        assert!(
            rmin_recombined(&m, &node(2, "{1}{2}"), r)
                .unwrap()
                .value
                .abs()
                < TOL
        );
    }

    let d = corpus::build("tbc", None).unwrap();
    let m = Measures::new(&d);
    for r in d.realisations() {
        let v = rmin_recombined(&m, &node(2, "{1}{2}"), r).unwrap().value;
        assert!((v - 1.0).abs() < TOL);
        let given_t1 = rmin_plus_conditional(&m, &node(2, "{1}{2}"), r, &[0])
            .unwrap()
            .value;
        assert!(given_t1.abs() < TOL);
        let given_nothing = rmin_plus_conditional(&m, &node(2, "{1}{2}"), r, &[])
            .unwrap()
            .value;
        assert_eq!(
            given_nothing,
            rmin_plus(&m, &node(2, "{1}{2}"), r).unwrap().value
        );
    }
}

#[test]
fn copied_predictors_have_no_ambiguity() {
    let d = corpus::build("tbep", None).unwrap();
    let t = decompose(&d, &DecomposeOptions::default()).unwrap();
    for ra in t.realisations() {
        assert!(ra.atoms.iter().all(|a| a.r_minus == 0.0));
    }
}

#[test]
fn rdnerr_sweep_is_finite() {
    for k in 1..=16 {
        let eps = num_rational::BigRational::new(k.into(), 32.into());
        let d = corpus::build("rdnerr", Some(&eps)).unwrap();
        let t = decompose(&d, &DecomposeOptions::default()).unwrap();
        assert!(
            t.averages().iter().all(|a| a.pi.is_finite()),
            "epsilon {eps}"
        );
    }
}

#[test]
fn negative_unique_information() {
    let rdn = decompose(
        &corpus::build("rdnerr", None).unwrap(),
        &DecomposeOptions::default(),
    )
    .unwrap()
    .bivariate()
    .unwrap();
    assert!(rdn.unique2 < 0.0);
    let unq = decompose(
        &corpus::build("unq", None).unwrap(),
        &DecomposeOptions::default(),
    )
    .unwrap()
    .bivariate()
    .unwrap();
    assert!((unq.unique2 + 1.0).abs() < TOL);
}
