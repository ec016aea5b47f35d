//! Inputs shared by the decomposition benchmarks.

use ppid_core::{ratio, DistributionBuilder, JointDistribution};

/// Uniform distribution over `n` binary predictors with their parity as target.
pub fn parity(n: usize) -> JointDistribution {
    let names: Vec<String> = (1..=n).map(|i| format!("s{i}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut b = DistributionBuilder::new(&names, "t");
    let rows = 1i64 << n;
    for k in 0..rows {
        let mut labels: Vec<String> = (0..n).map(|i| ((k >> i) & 1).to_string()).collect();
        labels.push((k.count_ones() % 2).to_string());
        b.push(ratio(1, rows), labels);
    }
    b.build().expect("parity distribution")
}
