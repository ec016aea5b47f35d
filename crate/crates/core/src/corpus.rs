//! Canonical example distributions and their expected atoms.
//!
//! Fixture values are kept symbolically as `q + Σ cᵢ·log₂(xᵢ)` with
//! rational `q`, `cᵢ`, `xᵢ` and only evaluated when compared.

use std::fmt;

use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::distribution::{DistributionBuilder, JointDistribution, Probability};
use crate::error::{Error, Result};

pub const NAMES: [&str; 7] = ["xor", "pwunq", "rdnerr", "tbc", "tbep", "unq", "and"];

/// Error probability used by the `rdnerr` fixtures.
pub fn default_epsilon() -> Probability {
    BigRational::new(1.into(), 4.into())
}

/// A rational constant plus a rational combination of base-2 logs of rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    constant: Rational64,
    logs: Vec<(Rational64, Rational64)>,
}

impl ClosedForm {
    pub fn int(k: i64) -> Self {
        Self::frac(k, 1)
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self {
            constant: Rational64::new(num, den),
            logs: Vec::new(),
        }
    }

    /// `log₂(num/den)`.
    pub fn lg(num: i64, den: i64) -> Self {
        Self {
            constant: Rational64::zero(),
            logs: vec![(Rational64::one(), Rational64::new(num, den))],
        }
    }

    pub fn scale(mut self, num: i64, den: i64) -> Self {
        let c = Rational64::new(num, den);
        self.constant *= c;
        for (coef, _) in &mut self.logs {
            *coef *= c;
        }
        self
    }

    pub fn plus(mut self, other: ClosedForm) -> Self {
        self.constant += other.constant;
        self.logs.extend(other.logs);
        self
    }

    pub fn eval(&self) -> f64 {
        let r = |q: &Rational64| *q.numer() as f64 / *q.denom() as f64;
        self.logs
            .iter()
            .fold(r(&self.constant), |acc, (c, x)| acc + r(c) * r(x).log2())
    }
}

impl std::ops::Neg for ClosedForm {
    type Output = Self;

    fn neg(self) -> Self {
        self.scale(-1, 1)
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.logs.is_empty() {
            parts.push(self.constant.to_string());
        }
        for (c, x) in &self.logs {
            let coef = if c.is_one() {
                String::new()
            } else if *c == -Rational64::one() {
                "-".into()
            } else {
                format!("{c}·")
            };
            parts.push(format!("{coef}lg({x})"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// One expected value: exact closed form, or a value printed to three decimals.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    Exact(ClosedForm),
    Printed(f64),
}

impl Expected {
    pub const PRINTED_TOLERANCE: f64 = 1e-3;
    pub const EXACT_TOLERANCE: f64 = 1e-9;

    pub fn value(&self) -> f64 {
        match self {
            Expected::Exact(c) => c.eval(),
            Expected::Printed(x) => *x,
        }
    }

    pub fn tolerance(&self) -> f64 {
        match self {
            Expected::Exact(_) => Self::EXACT_TOLERANCE,
            Expected::Printed(_) => Self::PRINTED_TOLERANCE,
        }
    }

    pub fn matches(&self, x: f64) -> bool {
        (x - self.value()).abs() <= self.tolerance()
    }
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Exact(c) => write!(f, "{c}"),
            Expected::Printed(x) => write!(f, "{x:.3}"),
        }
    }
}

/// Column names of a bivariate pointwise row, in table order.
pub const BIVARIATE_COLUMNS: [&str; 14] = [
    "i1+", "i1-", "i2+", "i2-", "i12+", "i12-", "r+", "u1+", "u2+", "c+", "r-", "u1-", "u2-", "c-",
];

#[derive(Debug, Clone)]
pub struct PointwiseRow {
    /// Predictor labels followed by the target label.
    pub outcome: Vec<String>,
    pub columns: [ClosedForm; 14],
}

/// Averaged atoms of a two-predictor example.
#[derive(Debug, Clone)]
pub struct BivariateExpected {
    pub redundant: Vec<Expected>,
    pub unique1: Vec<Expected>,
    pub unique2: Vec<Expected>,
    pub complementary: Vec<Expected>,
}

impl BivariateExpected {
    pub fn atoms(&self) -> [(&'static str, &[Expected]); 4] {
        [
            ("R", &self.redundant),
            ("U1", &self.unique1),
            ("U2", &self.unique2),
            ("C", &self.complementary),
        ]
    }
}

/// Nonzero partial atoms of a three-predictor example; every other node is zero.
#[derive(Debug, Clone)]
pub struct NodeExpected {
    pub node: &'static str,
    pub pi_plus: ClosedForm,
    pub pi_minus: ClosedForm,
}

/// One decomposition of a component target view with its nonzero averaged atoms.
#[derive(Debug, Clone)]
pub struct ChainRow {
    pub about: Vec<&'static str>,
    pub given: Vec<&'static str>,
    pub atoms: Vec<(&'static str, ClosedForm)>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub pointwise: Vec<PointwiseRow>,
    /// Expectation of each pointwise column.
    pub expected_row: Option<Vec<Expected>>,
    pub averages: Option<BivariateExpected>,
    /// Holds both per realisation and on average.
    pub trivariate: Vec<NodeExpected>,
    pub chain_rule: Vec<ChainRow>,
}

fn q(num: i64, den: i64) -> Probability {
    BigRational::new(num.into(), den.into())
}

pub fn build(name: &str, epsilon: Option<&Probability>) -> Result<JointDistribution> {
    let name = name.to_ascii_lowercase();
    if epsilon.is_some() && name != "rdnerr" {
        return Err(Error::OutOfRange(format!("{name} takes no epsilon")));
    }
    let quarter = || q(1, 4);
    let two = |rows: &[[&str; 3]]| {
        let mut b = DistributionBuilder::new(&["s1", "s2"], "t");
        for r in rows {
            b = b.row(quarter(), r);
        }
        b.build()
    };
    match name.as_str() {
        "xor" => two(&[
            ["0", "0", "0"],
            ["0", "1", "1"],
            ["1", "0", "1"],
            ["1", "1", "0"],
        ]),
        "pwunq" => two(&[
            ["0", "1", "1"],
            ["1", "0", "1"],
            ["0", "2", "2"],
            ["2", "0", "2"],
        ]),
        "unq" => two(&[
            ["0", "0", "0"],
            ["0", "1", "0"],
            ["1", "0", "1"],
            ["1", "1", "1"],
        ]),
        "and" => two(&[
            ["0", "0", "0"],
            ["0", "1", "0"],
            ["1", "0", "0"],
            ["1", "1", "1"],
        ]),
        "rdnerr" => {
            let eps = epsilon.cloned().unwrap_or_else(default_epsilon);
            if eps <= BigRational::zero() || eps > q(1, 2) {
                return Err(Error::OutOfRange(format!(
                    "rdnerr epsilon {eps} outside (0, 1/2]"
                )));
            }
            let half = q(1, 2);
            let hit = (BigRational::one() - &eps) * &half;
            let miss = eps * half;
            DistributionBuilder::new(&["s1", "s2"], "t")
                .row(hit.clone(), &["0", "0", "0"])
                .row(hit, &["1", "1", "1"])
                .row(miss.clone(), &["0", "1", "0"])
                .row(miss, &["1", "0", "1"])
                .build()
        }
        "tbc" => {
            let mut b =
                DistributionBuilder::new(&["s1", "s2"], "t1,t2,t3").composite(&["t1", "t2", "t3"]);
            for (s1, s2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let labels = [s1, s2, s1, s2, s1 ^ s2].map(|v: i32| v.to_string());
                let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
                b = b.row(quarter(), &labels);
            }
            b.build()
        }
        "tbep" => {
            let mut b = DistributionBuilder::new(&["s1", "s2", "s3"], "t1,t2,t3")
                .composite(&["t1", "t2", "t3"]);
            for (s1, s2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let s3 = s1 ^ s2;
                let labels = [s1, s2, s3, s1, s2, s3].map(|v: i32| v.to_string());
                let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
                b = b.row(quarter(), &labels);
            }
            b.build()
        }
        _ => Err(Error::UnknownCorpus(name)),
    }
}

fn row(outcome: &[&str], columns: [ClosedForm; 14]) -> PointwiseRow {
    PointwiseRow {
        outcome: outcome.iter().map(|s| s.to_string()).collect(),
        columns,
    }
}

fn ints(values: [i64; 14]) -> [ClosedForm; 14] {
    values.map(ClosedForm::int)
}

fn exact(values: [ClosedForm; 4]) -> BivariateExpected {
    let [r, u1, u2, c] = values.map(|v| vec![Expected::Exact(v)]);
    BivariateExpected {
        redundant: r,
        unique1: u1,
        unique2: u2,
        complementary: c,
    }
}

fn exact_ints(values: [i64; 4]) -> BivariateExpected {
    exact(values.map(ClosedForm::int))
}

fn expected_row(values: Vec<Expected>) -> Option<Vec<Expected>> {
    Some(values)
}

fn fixture(name: &'static str) -> Fixture {
    Fixture {
        name,
        pointwise: Vec::new(),
        expected_row: None,
        averages: None,
        trivariate: Vec::new(),
        chain_rule: Vec::new(),
    }
}

/// Expected atoms for a corpus entry; `rdnerr` fixtures exist only at ε = 1/4.
pub fn expected_atoms(name: &str, epsilon: Option<&Probability>) -> Result<Fixture> {
    let name = name.to_ascii_lowercase();
    if let Some(eps) = epsilon {
        if name != "rdnerr" || *eps != default_epsilon() {
            return Err(Error::OutOfRange(format!(
                "no fixtures for {name} at epsilon {eps}"
            )));
        }
    }
    let lg = ClosedForm::lg;
    let int = ClosedForm::int;
    let f = match name.as_str() {
        "xor" => {
            let cols = [1, 1, 1, 1, 2, 1, 1, 0, 0, 1, 1, 0, 0, 0];
            let mut f = fixture("xor");
            f.pointwise = ["000", "011", "101", "110"]
                .iter()
                .map(|o| row(&split(o), ints(cols)))
                .collect();
            f.expected_row = expected_row(cols.iter().map(|&v| Expected::Exact(int(v))).collect());
            f.averages = Some(exact_ints([0, 0, 0, 1]));
            f
        }
        "pwunq" => {
            let a = [1, 1, 2, 1, 2, 1, 1, 0, 1, 0, 1, 0, 0, 0];
            let b = [2, 1, 1, 1, 2, 1, 1, 1, 0, 0, 1, 0, 0, 0];
            let mut f = fixture("pwunq");
            f.pointwise = vec![
                row(&["0", "1", "1"], ints(a)),
                row(&["1", "0", "1"], ints(b)),
                row(&["0", "2", "2"], ints(a)),
                row(&["2", "0", "2"], ints(b)),
            ];
            let frac = |n, d| Expected::Exact(ClosedForm::frac(n, d));
            f.expected_row = expected_row(vec![
                frac(3, 2),
                frac(1, 1),
                frac(3, 2),
                frac(1, 1),
                frac(2, 1),
                frac(1, 1),
                frac(1, 1),
                frac(1, 2),
                frac(1, 2),
                frac(0, 1),
                frac(1, 1),
                frac(0, 1),
                frac(0, 1),
                frac(0, 1),
            ]);
            f.averages = Some(exact([
                int(0),
                ClosedForm::frac(1, 2),
                ClosedForm::frac(1, 2),
                int(0),
            ]));
            f
        }
        "rdnerr" => {
            let l = || lg(4, 3);
            let likely = [
                int(1),
                int(0),
                int(1),
                l(),
                lg(8, 3),
                l(),
                int(1),
                int(0),
                int(0),
                l(),
                int(0),
                int(0),
                l(),
                int(0),
            ];
            let unlikely = ints([1, 0, 1, 2, 3, 2, 1, 0, 0, 2, 0, 0, 2, 0]);
            let mut f = fixture("rdnerr");
            f.pointwise = vec![
                row(&["0", "0", "0"], likely.clone()),
                row(&["1", "1", "1"], likely),
                row(&["0", "1", "0"], unlikely.clone()),
                row(&["1", "0", "1"], unlikely),
            ];
            let u2 = l().scale(3, 4).plus(ClosedForm::frac(1, 2));
            f.averages = Some(BivariateExpected {
                redundant: vec![Expected::Printed(1.0), Expected::Exact(int(1))],
                unique1: vec![Expected::Printed(0.0), Expected::Exact(int(0))],
                unique2: vec![Expected::Printed(-0.811), Expected::Exact(-u2.clone())],
                complementary: vec![Expected::Printed(0.811), Expected::Exact(u2)],
            });
            f
        }
        "tbc" => {
            let cols = [1, 0, 1, 0, 2, 0, 1, 0, 0, 1, 0, 0, 0, 0];
            let mut f = fixture("tbc");
            f.pointwise = [("0", "0"), ("0", "1"), ("1", "0"), ("1", "1")]
                .iter()
                .map(|&(a, b)| {
                    let t3 = if a == b { "0" } else { "1" };
                    let t = format!("{a},{b},{t3}");
                    row(&[a, b, &t], ints(cols))
                })
                .collect();
            f.expected_row = expected_row(cols.iter().map(|&v| Expected::Exact(int(v))).collect());
            f.averages = Some(exact_ints([1, 0, 0, 1]));
            let chain = |about: &[&'static str],
                         given: &[&'static str],
                         atoms: &[(&'static str, i64)]| ChainRow {
                about: about.to_vec(),
                given: given.to_vec(),
                atoms: atoms.iter().map(|&(a, v)| (a, int(v))).collect(),
            };
            f.chain_rule = vec![
                chain(&["t1", "t3"], &[], &[("R", 1), ("C", 1)]),
                chain(&["t1"], &[], &[("U2", -1), ("R", 1), ("C", 1)]),
                chain(&["t3"], &["t1"], &[("U2", 1)]),
                chain(&["t3"], &[], &[("C", 1)]),
                chain(&["t1"], &["t3"], &[("R", 1)]),
            ];
            f
        }
        "unq" => {
            let cols = [1, 0, 1, 1, 2, 1, 1, 0, 0, 1, 0, 0, 1, 0];
            let mut f = fixture("unq");
            f.pointwise = ["000", "010", "101", "111"]
                .iter()
                .map(|o| row(&split(o), ints(cols)))
                .collect();
            f.expected_row = expected_row(cols.iter().map(|&v| Expected::Exact(int(v))).collect());
            f.averages = Some(exact_ints([1, 0, -1, 1]));
            f
        }
        "and" => {
            let l32 = || lg(3, 2);
            let l3 = || lg(3, 1);
            let mut f = fixture("and");
            f.pointwise = vec![
                row(
                    &["0", "0", "0"],
                    [
                        int(1),
                        l32(),
                        int(1),
                        l32(),
                        int(2),
                        l3(),
                        int(1),
                        int(0),
                        int(0),
                        int(1),
                        l32(),
                        int(0),
                        int(0),
                        int(1),
                    ],
                ),
                row(
                    &["0", "1", "0"],
                    [
                        int(1),
                        l32(),
                        int(1),
                        l3(),
                        int(2),
                        l3(),
                        int(1),
                        int(0),
                        int(0),
                        int(1),
                        l32(),
                        int(0),
                        int(1),
                        int(0),
                    ],
                ),
                row(
                    &["1", "0", "0"],
                    [
                        int(1),
                        l3(),
                        int(1),
                        l32(),
                        int(2),
                        l3(),
                        int(1),
                        int(0),
                        int(0),
                        int(1),
                        l32(),
                        int(1),
                        int(0),
                        int(0),
                    ],
                ),
                row(
                    &["1", "1", "1"],
                    ints([1, 0, 1, 0, 2, 0, 1, 0, 0, 1, 0, 0, 0, 0]),
                ),
            ];
            let p = Expected::Printed;
            f.expected_row = expected_row(vec![
                p(1.0),
                p(0.689),
                p(1.0),
                p(0.689),
                p(2.0),
                p(1.189),
                p(1.0),
                p(0.0),
                p(0.0),
                p(1.0),
                p(0.439),
                p(0.250),
                p(0.250),
                p(0.25),
            ]);
            let r = int(1).plus(l32().scale(-3, 4));
            f.averages = Some(BivariateExpected {
                redundant: vec![p(0.561), Expected::Exact(r)],
                unique1: vec![p(-0.25), Expected::Exact(ClosedForm::frac(-1, 4))],
                unique2: vec![p(-0.25), Expected::Exact(ClosedForm::frac(-1, 4))],
                complementary: vec![p(0.75), Expected::Exact(ClosedForm::frac(3, 4))],
            });
            f
        }
        "tbep" => {
            let mut f = fixture("tbep");
            f.trivariate = vec![
                NodeExpected {
                    node: "{1}{2}{3}",
                    pi_plus: int(1),
                    pi_minus: int(0),
                },
                NodeExpected {
                    node: "{12}{13}{23}",
                    pi_plus: int(1),
                    pi_minus: int(0),
                },
            ];
            f
        }
        _ => return Err(Error::UnknownCorpus(name)),
    };
    Ok(f)
}

fn split(outcome: &str) -> Vec<&str> {
    (0..outcome.len()).map(|i| &outcome[i..i + 1]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds() {
        for name in NAMES {
            let d = build(name, None).unwrap();
            assert_eq!(d.total_mass(), BigRational::one());
            assert!(expected_atoms(name, None).is_ok());
        }
        assert!(matches!(build("nope", None), Err(Error::UnknownCorpus(_))));
    }

    #[test]
    fn rdnerr_at_half_is_unq() {
        let d = build("rdnerr", Some(&q(1, 2))).unwrap();
        assert!(d.same_distribution(&build("unq", None).unwrap()));
    }

    #[test]
    fn rdnerr_epsilon_range() {
        assert!(build("rdnerr", Some(&q(0, 1))).is_err());
        assert!(build("rdnerr", Some(&q(3, 4))).is_err());
        assert!(build("xor", Some(&q(1, 4))).is_err());
        assert!(expected_atoms("rdnerr", Some(&q(1, 3))).is_err());
    }

    #[test]
    fn closed_forms() {
        let c = ClosedForm::lg(4, 3)
            .scale(3, 4)
            .plus(ClosedForm::frac(1, 2));
        assert!((c.eval() - 0.811_278_124_459_132_8).abs() < 1e-12);
        assert_eq!((-ClosedForm::lg(3, 2)).to_string(), "-lg(3/2)");
        assert_eq!(ClosedForm::int(2).to_string(), "2");
    }

    #[test]
    fn tbep_is_even_parity() {
        let d = build("tbep", None).unwrap();
        assert_eq!(d.support_size(), 4);
        for r in d.realisations() {
            let row = r.row();
            assert_eq!(row[0] ^ row[1], row[2]);
            assert_eq!(&row[..3], &row[3..]);
        }
    }

    #[test]
    fn fixture_outcomes_are_in_support() {
        for name in NAMES {
            let d = build(name, None).unwrap();
            for pr in expected_atoms(name, None).unwrap().pointwise {
                let names: Vec<String> = d
                    .schema()
                    .predictors()
                    .iter()
                    .map(|v| v.name.clone())
                    .collect();
                assert_eq!(pr.outcome.len(), names.len() + 1, "{name}");
                assert!(d
                    .realisations()
                    .iter()
                    .any(|r| d.schema().row_labels(r.row()) == pr.outcome));
            }
        }
    }
}
