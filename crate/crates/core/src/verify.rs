//! Invariant suite for `r⁺min`, `r⁻min` and the decomposition they induce.

use serde::Serialize;

use crate::decomposition::{
    decompose, two_event_invariance_check, verify_target_chain_rule, AtomTable, DecomposeOptions,
    TargetView,
};
use crate::distribution::{JointDistribution, Realisation, SourceEvent};
use crate::error::{Error, Result};
use crate::measures::Measures;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Largest deviation seen across all cases.
    pub max_violation: f64,
    pub cases: usize,
}

struct Tracker {
    name: &'static str,
    tol: f64,
    worst: f64,
    cases: usize,
    failed: bool,
}

impl Tracker {
    fn new(name: &'static str, tol: f64) -> Self {
        Self {
            name,
            tol,
            worst: 0.0,
            cases: 0,
            failed: false,
        }
    }

    /// Records `amount`, which violates the property when it exceeds `tol`.
    fn excess(&mut self, amount: f64) {
        self.cases += 1;
        if amount.is_nan() {
            self.failed = true;
            return;
        }
        self.worst = self.worst.max(amount);
    }

    fn equal(&mut self, a: f64, b: f64) {
        self.excess((a - b).abs());
    }

    fn fail(&mut self) {
        self.cases += 1;
        self.failed = true;
    }

    fn finish(self) -> PropertyCheck {
        PropertyCheck {
            name: self.name,
            passed: !self.failed && self.worst <= self.tol,
            max_violation: self.worst,
            cases: self.cases,
        }
    }
}

/// Runs every applicable property on `dist` at tolerance `tol`.
pub fn run_suite(
    dist: &JointDistribution,
    options: &DecomposeOptions,
    tol: f64,
) -> Result<Vec<PropertyCheck>> {
    let table = decompose(dist, options)?;
    let mut checks = vec![
        axioms(dist, &table, tol)?,
        monotonicity(&table, tol),
        non_negativity(&table, tol),
        closed_form(dist, &table, tol)?,
        decomposition_sums(dist, &table, tol)?,
        total_information(dist, &table, tol)?,
        two_event_invariance(dist, &table, tol),
    ];
    if dist.n() == 2 {
        checks.push(bivariate_consistency(&table, tol));
    }
    let target = dist.schema().require_target()?;
    if target.is_composite() && target.components().len() >= 2 {
        checks.extend(conditional_corollaries(dist, options, tol)?);
        checks.push(chain_rule(dist, options, tol)?);
    }
    Ok(checks)
}

fn specificity_and_ambiguity(
    m: &Measures,
    r: &Realisation,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut spec = vec![f64::NAN; 1 << n];
    let mut amb = vec![f64::NAN; 1 << n];
    for mask in 1u32..(1 << n) {
        let a = SourceEvent::from_mask(mask)?;
        spec[mask as usize] = m.specificity(a, r)?.value;
        amb[mask as usize] = m.ambiguity(a, r)?.value;
    }
    Ok((spec, amb))
}

/// Symmetry, self-redundancy and invariance to adding a superset source event.
pub fn axioms(dist: &JointDistribution, table: &AtomTable, tol: f64) -> Result<PropertyCheck> {
    let mut t = Tracker::new("axioms", tol);
    let m = Measures::new(dist).with_base(table.base());
    let n = dist.n();
    for ra in table.realisations() {
        let (spec, amb) = specificity_and_ambiguity(&m, &ra.realisation, n)?;
        for (node, atoms) in table.nodes().iter().zip(&ra.atoms) {
            let sources = node.sources();
            let rev = |v: &[f64]| {
                sources
                    .iter()
                    .rev()
                    .map(|a| v[a.mask() as usize])
                    .fold(f64::INFINITY, f64::min)
            };
            t.equal(rev(&spec), atoms.r_plus);
            t.equal(rev(&amb), atoms.r_minus);
            if let [a] = sources {
                t.equal(spec[a.mask() as usize], atoms.r_plus);
                t.equal(amb[a.mask() as usize], atoms.r_minus);
            }
            for a in sources {
                for sup in 1u32..(1 << n) {
                    if sup & a.mask() != a.mask() {
                        continue;
                    }
                    let with = |v: &[f64]| rev(v).min(v[sup as usize]);
                    t.equal(with(&spec), atoms.r_plus);
                    t.equal(with(&amb), atoms.r_minus);
                }
            }
        }
    }
    Ok(t.finish())
}

/// `α ⪯ β ⟹ r±(α) ≤ r±(β)` over every comparable pair.
pub fn monotonicity(table: &AtomTable, tol: f64) -> PropertyCheck {
    let mut t = Tracker::new("monotonicity", tol);
    let lattice = table.lattice();
    for ra in table.realisations() {
        for a in 0..lattice.len() {
            for b in 0..lattice.len() {
                if a != b && lattice.leq(b, a) {
                    t.excess(ra.atoms[b].r_plus - ra.atoms[a].r_plus);
                    t.excess(ra.atoms[b].r_minus - ra.atoms[a].r_minus);
                }
            }
        }
    }
    t.finish()
}

pub fn non_negativity(table: &AtomTable, tol: f64) -> PropertyCheck {
    let mut t = Tracker::new("non-negativity", tol);
    for ra in table.realisations() {
        for a in &ra.atoms {
            t.excess(-a.pi_plus);
            t.excess(-a.pi_minus);
        }
    }
    t.finish()
}

/// Closed-form partial atoms agree with recursive Möbius inversion.
pub fn closed_form(dist: &JointDistribution, table: &AtomTable, tol: f64) -> Result<PropertyCheck> {
    let mut t = Tracker::new("closed-form", tol);
    let m = Measures::new(dist).with_base(table.base());
    let lattice = table.lattice();
    for ra in table.realisations() {
        let (spec, amb) = specificity_and_ambiguity(&m, &ra.realisation, dist.n())?;
        for (i, atoms) in ra.atoms.iter().enumerate() {
            t.equal(
                lattice.closed_form_partial_at(i, |a| spec[a.mask() as usize]),
                atoms.pi_plus,
            );
            t.equal(
                lattice.closed_form_partial_at(i, |a| amb[a.mask() as usize]),
                atoms.pi_minus,
            );
        }
    }
    Ok(t.finish())
}

/// `Σ π⁺ = h(s₁…ₙ)` and `Σ π⁻ = h(s₁…ₙ|t)` per realisation.
pub fn decomposition_sums(
    dist: &JointDistribution,
    table: &AtomTable,
    tol: f64,
) -> Result<PropertyCheck> {
    let mut t = Tracker::new("atom sums", tol);
    let m = Measures::new(dist).with_base(table.base());
    let all = SourceEvent::from_mask((1u32 << dist.n()) - 1)?;
    for ra in table.realisations() {
        let plus: f64 = ra.atoms.iter().map(|a| a.pi_plus).sum();
        let minus: f64 = ra.atoms.iter().map(|a| a.pi_minus).sum();
        t.equal(plus, m.specificity(all, &ra.realisation)?.value);
        t.equal(minus, m.ambiguity(all, &ra.realisation)?.value);
    }
    Ok(t.finish())
}

/// `Σ Π = I(S₁,…,Sₙ;T)`.
pub fn total_information(
    dist: &JointDistribution,
    table: &AtomTable,
    tol: f64,
) -> Result<PropertyCheck> {
    let mut t = Tracker::new("total information", tol);
    let m = Measures::new(dist).with_base(table.base());
    let all = SourceEvent::from_mask((1u32 << dist.n()) - 1)?;
    t.equal(table.total(), m.mutual_information(all)?.value);
    Ok(t.finish())
}

pub fn two_event_invariance(
    dist: &JointDistribution,
    table: &AtomTable,
    tol: f64,
) -> PropertyCheck {
    let mut t = Tracker::new("two-event invariance", tol);
    for ra in table.realisations() {
        for node in table.nodes() {
            match two_event_invariance_check(dist, node, &ra.realisation, f64::INFINITY) {
                Ok(report) => t.excess(report.residual()),
                Err(_) => t.fail(),
            }
        }
    }
    t.finish()
}

/// `r + u₁ = i₁`, `r + u₂ = i₂`, `r + u₁ + u₂ + c = i₁₂` on both lattices.
pub fn bivariate_consistency(table: &AtomTable, tol: f64) -> PropertyCheck {
    let mut t = Tracker::new("bivariate consistency", tol);
    for k in 0..table.realisations().len() {
        let Some(cols) = table.pointwise_bivariate(k) else {
            t.fail();
            break;
        };
        for s in [cols.plus, cols.minus] {
            t.equal(s.r + s.u1, s.i1);
            t.equal(s.r + s.u2, s.i2);
            t.equal(s.r + s.u1 + s.u2 + s.c, s.i12);
        }
    }
    t.finish()
}

fn view_table(
    dist: &JointDistribution,
    options: &DecomposeOptions,
    view: TargetView,
) -> Result<AtomTable> {
    decompose(
        dist,
        &DecomposeOptions {
            view: Some(view),
            ..options.clone()
        },
    )
}

/// Conditional-form identities over every ordered pair of target components.
pub fn conditional_corollaries(
    dist: &JointDistribution,
    options: &DecomposeOptions,
    tol: f64,
) -> Result<Vec<PropertyCheck>> {
    let m = dist.schema().component_count();
    if m < 2 {
        return Err(Error::NotComposite(
            dist.schema().require_target()?.name().to_string(),
        ));
    }
    let mut given_is_ambiguity = Tracker::new("r+(t1|t2) = r-(t2)", tol);
    let mut independence = Tracker::new("r+ target independence", tol);
    let mut joint_ambiguity = Tracker::new("r-(t1|t2) = r-(t1,t2)", tol);
    let full = decompose(dist, options)?;
    for j in 0..m {
        let about_j = view_table(dist, options, TargetView::about(&[j]))?;
        for (x, y) in full.realisations().iter().zip(about_j.realisations()) {
            for (a, b) in x.atoms.iter().zip(&y.atoms) {
                independence.equal(a.r_plus, b.r_plus);
            }
        }
        for k in (0..m).filter(|&k| k != j) {
            let j_given_k = view_table(dist, options, TargetView::about(&[j]).given(&[k]))?;
            let about_k = view_table(dist, options, TargetView::about(&[k]))?;
            let joint = view_table(dist, options, TargetView::about(&[j, k]))?;
            let rows = j_given_k
                .realisations()
                .iter()
                .zip(about_k.realisations())
                .zip(joint.realisations());
            for ((c, tk), jk) in rows {
                for i in 0..c.atoms.len() {
                    given_is_ambiguity.equal(c.atoms[i].r_plus, tk.atoms[i].r_minus);
                    joint_ambiguity.equal(c.atoms[i].r_minus, jk.atoms[i].r_minus);
                }
            }
        }
    }
    Ok(vec![
        given_is_ambiguity.finish(),
        independence.finish(),
        joint_ambiguity.finish(),
    ])
}

/// Target chain rule in both orders for every pair of components.
pub fn chain_rule(
    dist: &JointDistribution,
    options: &DecomposeOptions,
    tol: f64,
) -> Result<PropertyCheck> {
    let mut t = Tracker::new("target chain rule", tol);
    let m = dist.schema().component_count();
    for j in 0..m {
        for k in (j + 1)..m {
            let report = verify_target_chain_rule(dist, &[j], &[k], options)?;
            for e in &report.entries {
                t.excess(e.forward_residual().abs());
                t.excess(e.reverse_residual().abs());
            }
        }
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn corpus_passes() {
        for name in corpus::NAMES {
            let d = corpus::build(name, None).unwrap();
            for c in run_suite(&d, &DecomposeOptions::default(), 1e-9).unwrap() {
                assert!(c.passed, "{name}: {c:?}");
                assert!(c.cases > 0, "{name}: {c:?}");
            }
        }
    }

    #[test]
    fn tracker_flags_violations() {
        let mut t = Tracker::new("x", 1e-9);
        t.equal(1.0, 1.1);
        assert!(!t.finish().passed);
        let mut t = Tracker::new("x", 1e-9);
        t.excess(f64::NAN);
        assert!(!t.finish().passed);
    }
}
