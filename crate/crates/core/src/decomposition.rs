//! Pointwise partial information decomposition with `r⁺min` and `r⁻min`.
//!
//! For each support realisation the redundant specificity of a node is the
//! smallest specificity among its source events and the redundant ambiguity
//! the smallest ambiguity. Möbius inversion over the lattice gives the
//! partial atoms `π⁺`, `π⁻`, which recombine as `π = π⁺ − π⁻` and average
//! into the classical atoms.

use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{
    to_f64, JointDistribution, MassMode, Realisation, SourceEvent, VariableSchema,
};
use crate::error::{Error, Result};
use crate::lattice::{LatticeNode, RedundancyLattice, DEFAULT_CAP};
use crate::measures::{CompensatedSum, InfoValue, LogBase, Measures};

/// Partial atoms this close to zero are reported as zero for exact inputs.
pub const ZERO_SNAP: f64 = 1e-12;

/// Which target (or conditional target) a decomposition is about.
///
/// Specificity is measured given the `given` components and ambiguity given
/// `about ∪ given`, so `about = T₂, given = T₁` decomposes `i(s; t₂ | t₁)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TargetView {
    about: Vec<usize>,
    given: Vec<usize>,
}

impl TargetView {
    /// The whole target.
    pub fn full(schema: &VariableSchema) -> Self {
        Self {
            about: (0..schema.component_count()).collect(),
            given: Vec::new(),
        }
    }

    pub fn about(components: &[usize]) -> Self {
        Self {
            about: components.to_vec(),
            given: Vec::new(),
        }
    }

    pub fn given(mut self, components: &[usize]) -> Self {
        self.given = components.to_vec();
        self
    }

    pub fn about_components(&self) -> &[usize] {
        &self.about
    }

    pub fn given_components(&self) -> &[usize] {
        &self.given
    }

    fn ambiguity_components(&self) -> Vec<usize> {
        let mut all = self.given.clone();
        all.extend(
            self.about
                .iter()
                .copied()
                .filter(|j| !self.given.contains(j)),
        );
        all
    }

    fn validate(&self, schema: &VariableSchema) -> Result<()> {
        schema.require_target()?;
        let m = schema.component_count();
        if self.about.is_empty() {
            return Err(Error::EmptySelection);
        }
        if let Some(j) = self.about.iter().chain(&self.given).find(|&&j| j >= m) {
            return Err(Error::UnknownVariable(format!(
                "target component {}",
                j + 1
            )));
        }
        if self.about.iter().any(|j| self.given.contains(j)) {
            return Err(Error::Schema(
                "a component cannot be both decomposed and conditioned on".into(),
            ));
        }
        Ok(())
    }

    pub fn describe(&self, schema: &VariableSchema) -> String {
        let names = |js: &[usize]| {
            js.iter()
                .map(|&j| {
                    schema
                        .target()
                        .map(|t| t.components()[j].name.clone())
                        .unwrap_or_default()
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        let full = self.given.is_empty() && self.about.len() == schema.component_count();
        let about = match schema.target() {
            Some(t) if full && self.about.iter().enumerate().all(|(k, &j)| k == j) => {
                t.name().to_string()
            }
            _ => names(&self.about),
        };
        if self.given.is_empty() {
            about
        } else {
            format!("{about}|{}", names(&self.given))
        }
    }
}

fn check_node(dist: &JointDistribution, alpha: &LatticeNode) -> Result<()> {
    if alpha.n() != dist.n() {
        return Err(Error::MismatchedNodes(alpha.n(), dist.n()));
    }
    Ok(())
}

fn min_value(
    alpha: &LatticeNode,
    mut f: impl FnMut(SourceEvent) -> Result<InfoValue>,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for &a in alpha.sources() {
        best = best.min(f(a)?.value);
    }
    Ok(best)
}

/// `r⁺min(α → t) = min_{a∈α} h(a)`.
pub fn rmin_plus(m: &Measures, alpha: &LatticeNode, r: &Realisation) -> Result<InfoValue> {
    check_node(m.dist(), alpha)?;
    Ok(InfoValue::new(
        min_value(alpha, |a| m.specificity(a, r))?,
        m.base(),
    ))
}

/// `r⁻min(α → t) = min_{a∈α} h(a|t)`.
pub fn rmin_minus(m: &Measures, alpha: &LatticeNode, r: &Realisation) -> Result<InfoValue> {
    check_node(m.dist(), alpha)?;
    Ok(InfoValue::new(
        min_value(alpha, |a| m.ambiguity(a, r))?,
        m.base(),
    ))
}

/// `r⁺min(α → t₁ | t₂) = min_{a∈α} h(a|t₂)` for the `given` components.
pub fn rmin_plus_conditional(
    m: &Measures,
    alpha: &LatticeNode,
    r: &Realisation,
    given: &[usize],
) -> Result<InfoValue> {
    check_node(m.dist(), alpha)?;
    Ok(InfoValue::new(
        min_value(alpha, |a| m.conditional_specificity(a, r, given))?,
        m.base(),
    ))
}

/// `r⁻min(α → t₁ | t₂) = min_{a∈α} h(a|t₁,t₂)`.
pub fn rmin_minus_conditional(
    m: &Measures,
    alpha: &LatticeNode,
    r: &Realisation,
    about: &[usize],
    given: &[usize],
) -> Result<InfoValue> {
    check_node(m.dist(), alpha)?;
    let mut all = given.to_vec();
    all.extend(about.iter().copied().filter(|j| !given.contains(j)));
    Ok(InfoValue::new(
        min_value(alpha, |a| m.conditional_ambiguity(a, r, &all))?,
        m.base(),
    ))
}

/// `r⁺min − r⁻min`; may be negative.
pub fn rmin_recombined(m: &Measures, alpha: &LatticeNode, r: &Realisation) -> Result<InfoValue> {
    let plus = rmin_plus(m, alpha, r)?;
    let minus = rmin_minus(m, alpha, r)?;
    Ok(InfoValue::new(plus.value - minus.value, m.base()))
}

/// `(r⁺min, r⁻min)` of a node with respect to a target view.
pub fn rmin_view(
    m: &Measures,
    alpha: &LatticeNode,
    r: &Realisation,
    view: &TargetView,
) -> Result<(f64, f64)> {
    view.validate(m.dist().schema())?;
    let plus = rmin_plus_conditional(m, alpha, r, &view.given)?;
    let minus = rmin_minus_conditional(m, alpha, r, &view.about, &view.given)?;
    Ok((plus.value, minus.value))
}

#[derive(Debug, Clone)]
pub struct DecomposeOptions {
    pub base: LogBase,
    pub cap: usize,
    pub jobs: usize,
    pub view: Option<TargetView>,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            base: LogBase::BITS,
            cap: DEFAULT_CAP,
            jobs: 1,
            view: None,
        }
    }
}

/// Cumulative and partial values at one node. In `AtomTable::averages` the
/// same fields hold `R⁺, R⁻, Π⁺, Π⁻, Π`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct NodeAtoms {
    pub r_plus: f64,
    pub r_minus: f64,
    pub pi_plus: f64,
    pub pi_minus: f64,
    pub pi: f64,
}

impl NodeAtoms {
    /// Recombined redundancy `r⁺ − r⁻`.
    pub fn r(&self) -> f64 {
        self.r_plus - self.r_minus
    }
}

#[derive(Debug, Clone)]
pub struct RealisationAtoms {
    pub realisation: Realisation,
    pub atoms: Vec<NodeAtoms>,
}

/// Averaged bivariate atoms: redundant, two unique, complementary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BivariateAtoms {
    pub redundant: f64,
    pub unique1: f64,
    pub unique2: f64,
    pub complementary: f64,
}

/// One side (specificity or ambiguity) of a bivariate pointwise row.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BivariateSide {
    pub i1: f64,
    pub i2: f64,
    pub i12: f64,
    pub r: f64,
    pub u1: f64,
    pub u2: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct BivariateColumns {
    pub plus: BivariateSide,
    pub minus: BivariateSide,
}

impl BivariateColumns {
    /// `i1± i2± i12±` interleaved, then `r⁺ u1⁺ u2⁺ c⁺`, then `r⁻ u1⁻ u2⁻ c⁻`.
    pub fn to_row(&self) -> [f64; 14] {
        let (p, m) = (&self.plus, &self.minus);
        [
            p.i1, m.i1, p.i2, m.i2, p.i12, m.i12, p.r, p.u1, p.u2, p.c, m.r, m.u1, m.u2, m.c,
        ]
    }
}

#[derive(Debug, Clone)]
pub struct AtomTable {
    schema: VariableSchema,
    lattice: RedundancyLattice,
    view: TargetView,
    base: LogBase,
    mode: MassMode,
    realisations: Vec<RealisationAtoms>,
    averages: Vec<NodeAtoms>,
}

impl AtomTable {
    pub fn schema(&self) -> &VariableSchema {
        &self.schema
    }

    pub fn lattice(&self) -> &RedundancyLattice {
        &self.lattice
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        self.lattice.nodes()
    }

    pub fn view(&self) -> &TargetView {
        &self.view
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    pub fn mode(&self) -> MassMode {
        self.mode
    }

    pub fn realisations(&self) -> &[RealisationAtoms] {
        &self.realisations
    }

    pub fn averages(&self) -> &[NodeAtoms] {
        &self.averages
    }

    pub fn average_at(&self, node: &str) -> Option<&NodeAtoms> {
        let node = LatticeNode::parse(self.lattice.n(), node).ok()?;
        self.lattice.index_of(&node).map(|i| &self.averages[i])
    }

    /// `Σ_α Π(α)`, which equals the mutual information of all predictors.
    pub fn total(&self) -> f64 {
        self.averages
            .iter()
            .map(|a| a.pi)
            .collect::<CompensatedSum>()
            .total()
    }

    /// Conventional names for nodes when there are two predictors.
    pub fn atom_name(&self, i: usize) -> String {
        if self.lattice.n() == 2 {
            ["R", "U1", "U2", "C"][i].to_string()
        } else {
            self.lattice.node(i).to_string()
        }
    }

    pub fn bivariate(&self) -> Option<BivariateAtoms> {
        (self.lattice.n() == 2).then(|| BivariateAtoms {
            redundant: self.averages[0].pi,
            unique1: self.averages[1].pi,
            unique2: self.averages[2].pi,
            complementary: self.averages[3].pi,
        })
    }

    fn columns(atoms: &[NodeAtoms]) -> BivariateColumns {
        let side = |cum: fn(&NodeAtoms) -> f64, part: fn(&NodeAtoms) -> f64| BivariateSide {
            i1: cum(&atoms[1]),
            i2: cum(&atoms[2]),
            i12: cum(&atoms[3]),
            r: part(&atoms[0]),
            u1: part(&atoms[1]),
            u2: part(&atoms[2]),
            c: part(&atoms[3]),
        };
        BivariateColumns {
            plus: side(|a| a.r_plus, |a| a.pi_plus),
            minus: side(|a| a.r_minus, |a| a.pi_minus),
        }
    }

    /// Specificity and ambiguity columns of one realisation (two predictors).
    pub fn pointwise_bivariate(&self, k: usize) -> Option<BivariateColumns> {
        (self.lattice.n() == 2).then(|| Self::columns(&self.realisations[k].atoms))
    }

    /// Expected values of the pointwise columns (two predictors).
    pub fn expected_bivariate(&self) -> Option<BivariateColumns> {
        (self.lattice.n() == 2).then(|| Self::columns(&self.averages))
    }
}

struct SourceProfile {
    spec: Vec<f64>,
    amb: Vec<f64>,
}

fn source_profile(m: &Measures, r: &Realisation, view: &TargetView) -> Result<SourceProfile> {
    let n = m.dist().n();
    let amb_components = view.ambiguity_components();
    let mut spec = vec![f64::NAN; 1 << n];
    let mut amb = vec![f64::NAN; 1 << n];
    for mask in 1u32..(1 << n) {
        let a = SourceEvent::from_mask(mask)?;
        spec[mask as usize] = m.conditional_specificity(a, r, &view.given)?.value;
        amb[mask as usize] = m.conditional_ambiguity(a, r, &amb_components)?.value;
    }
    Ok(SourceProfile { spec, amb })
}

fn snap(x: f64, exact: bool) -> f64 {
    if exact && x.abs() < ZERO_SNAP {
        0.0
    } else {
        x
    }
}

fn decompose_realisation(
    m: &Measures,
    lattice: &RedundancyLattice,
    r: &Realisation,
    view: &TargetView,
) -> Result<RealisationAtoms> {
    let profile = source_profile(m, r, view)?;
    let r_plus: Vec<f64> = lattice
        .nodes()
        .iter()
        .map(|v| v.min_over(|a| profile.spec[a.mask() as usize]))
        .collect();
    let r_minus: Vec<f64> = lattice
        .nodes()
        .iter()
        .map(|v| v.min_over(|a| profile.amb[a.mask() as usize]))
        .collect();
    let pi_plus = lattice.mobius_invert(&r_plus)?;
    let pi_minus = lattice.mobius_invert(&r_minus)?;
    let exact = m.dist().mode() == MassMode::Rational;
    let atoms = (0..lattice.len())
        .map(|k| {
            let pp = snap(pi_plus[k], exact);
            let pm = snap(pi_minus[k], exact);
            NodeAtoms {
                r_plus: r_plus[k],
                r_minus: r_minus[k],
                pi_plus: pp,
                pi_minus: pm,
                pi: snap(pp - pm, exact),
            }
        })
        .collect();
    Ok(RealisationAtoms {
        realisation: r.clone(),
        atoms,
    })
}

/// Full pointwise and averaged decomposition of `dist`.
pub fn decompose(dist: &JointDistribution, options: &DecomposeOptions) -> Result<AtomTable> {
    let schema = dist.schema();
    schema.require_target()?;
    let view = options
        .view
        .clone()
        .unwrap_or_else(|| TargetView::full(schema));
    view.validate(schema)?;
    let lattice = RedundancyLattice::with_cap(dist.n(), options.cap)?;
    let m = Measures::new(dist).with_base(options.base);

    let rows = dist.realisations();
    let realisations: Vec<RealisationAtoms> = if options.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(options.jobs)
            .build()
            .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
        pool.install(|| {
            rows.par_iter()
                .map(|r| decompose_realisation(&m, &lattice, r, &view))
                .collect::<Result<Vec<_>>>()
        })?
    } else {
        rows.iter()
            .map(|r| decompose_realisation(&m, &lattice, r, &view))
            .collect::<Result<Vec<_>>>()?
    };

    let weights: Vec<f64> = rows.iter().map(|r| to_f64(r.probability())).collect();
    let exact = dist.mode() == MassMode::Rational;
    let average = |field: fn(&NodeAtoms) -> f64, k: usize| {
        realisations
            .iter()
            .zip(&weights)
            .map(|(ra, w)| w * field(&ra.atoms[k]))
            .collect::<CompensatedSum>()
            .total()
    };
    let averages = (0..lattice.len())
        .map(|k| {
            let pp = snap(average(|a| a.pi_plus, k), exact);
            let pm = snap(average(|a| a.pi_minus, k), exact);
            NodeAtoms {
                r_plus: average(|a| a.r_plus, k),
                r_minus: average(|a| a.r_minus, k),
                pi_plus: pp,
                pi_minus: pm,
                pi: snap(pp - pm, exact),
            }
        })
        .collect();

    Ok(AtomTable {
        schema: schema.clone(),
        lattice,
        view,
        base: options.base,
        mode: dist.mode(),
        realisations,
        averages,
    })
}

/// Per-realisation, per-node chain-rule terms (recombined redundancy).
#[derive(Debug, Clone, Serialize)]
pub struct ChainRuleEntry {
    pub realisation: usize,
    pub node: String,
    pub joint: f64,
    pub first: f64,
    pub second_given_first: f64,
    pub second: f64,
    pub first_given_second: f64,
}

impl ChainRuleEntry {
    pub fn forward_residual(&self) -> f64 {
        self.joint - self.first - self.second_given_first
    }

    pub fn reverse_residual(&self) -> f64 {
        self.joint - self.second - self.first_given_second
    }
}

#[derive(Debug, Clone)]
pub struct ChainRuleReport {
    pub max_forward_residual: f64,
    pub max_reverse_residual: f64,
    pub entries: Vec<ChainRuleEntry>,
    pub joint: AtomTable,
    pub first: AtomTable,
    pub second_given_first: AtomTable,
    pub second: AtomTable,
    pub first_given_second: AtomTable,
}

impl ChainRuleReport {
    pub fn max_residual(&self) -> f64 {
        self.max_forward_residual.max(self.max_reverse_residual)
    }

    pub fn tables(&self) -> [(&'static str, &AtomTable); 5] {
        [
            ("joint", &self.joint),
            ("first", &self.first),
            ("second_given_first", &self.second_given_first),
            ("second", &self.second),
            ("first_given_second", &self.first_given_second),
        ]
    }
}

/// Evaluates `r(α→t₁,₂) = r(α→t₁) + r(α→t₂|t₁) = r(α→t₂) + r(α→t₁|t₂)` on
/// every realisation and node, for two disjoint groups of target components.
pub fn verify_target_chain_rule(
    dist: &JointDistribution,
    first: &[usize],
    second: &[usize],
    options: &DecomposeOptions,
) -> Result<ChainRuleReport> {
    let target = dist.schema().require_target()?;
    if !target.is_composite() || target.components().len() < 2 {
        return Err(Error::NotComposite(target.name().to_string()));
    }
    if first.is_empty() || second.is_empty() {
        return Err(Error::EmptySelection);
    }
    let mut joint_components = first.to_vec();
    joint_components.extend_from_slice(second);
    let run = |view: TargetView| {
        decompose(
            dist,
            &DecomposeOptions {
                view: Some(view),
                ..options.clone()
            },
        )
    };
    let joint = run(TargetView::about(&joint_components))?;
    let first_t = run(TargetView::about(first))?;
    let second_given_first = run(TargetView::about(second).given(first))?;
    let second_t = run(TargetView::about(second))?;
    let first_given_second = run(TargetView::about(first).given(second))?;

    let mut entries = Vec::new();
    let (mut fwd, mut rev) = (0.0f64, 0.0f64);
    for k in 0..joint.realisations.len() {
        for (i, node) in joint.nodes().iter().enumerate() {
            let term = |t: &AtomTable| t.realisations[k].atoms[i].r();
            let entry = ChainRuleEntry {
                realisation: k,
                node: node.to_string(),
                joint: term(&joint),
                first: term(&first_t),
                second_given_first: term(&second_given_first),
                second: term(&second_t),
                first_given_second: term(&first_given_second),
            };
            fwd = fwd.max(entry.forward_residual().abs());
            rev = rev.max(entry.reverse_residual().abs());
            entries.push(entry);
        }
    }
    Ok(ChainRuleReport {
        max_forward_residual: fwd,
        max_reverse_residual: rev,
        entries,
        joint,
        first: first_t,
        second_given_first,
        second: second_t,
        first_given_second,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub before_plus: f64,
    pub before_minus: f64,
    pub after_plus: f64,
    pub after_minus: f64,
}

impl InvarianceReport {
    pub fn residual(&self) -> f64 {
        (self.before_plus - self.after_plus)
            .abs()
            .max((self.before_minus - self.after_minus).abs())
    }
}

/// Recomputes `r±min` after pooling every unrealised target event into one.
/// Fails with `IdentityViolated` if the values move by more than `tol`.
pub fn two_event_invariance_check(
    dist: &JointDistribution,
    alpha: &LatticeNode,
    r: &Realisation,
    tol: f64,
) -> Result<InvarianceReport> {
    let n = dist.n();
    let target = dist.schema().require_target()?;
    let label = target.label_of(r.target_components(n));
    let coarse = dist.coarsen_target_to_two_events(&label)?;
    let mut row = r.predictor_events(n).to_vec();
    row.push(0);
    let coarse_r = coarse
        .find(&row)
        .ok_or_else(|| Error::ZeroProbability("coarsened realisation".into()))?;
    let m = Measures::new(dist);
    let mc = Measures::new(&coarse);
    let report = InvarianceReport {
        before_plus: rmin_plus(&m, alpha, r)?.value,
        before_minus: rmin_minus(&m, alpha, r)?.value,
        after_plus: rmin_plus(&mc, alpha, coarse_r)?.value,
        after_minus: rmin_minus(&mc, alpha, coarse_r)?.value,
    };
    if report.residual() > tol {
        return Err(Error::IdentityViolated(format!(
            "two-event coarsening moved r±min at {alpha} by {}",
            report.residual()
        )));
    }
    Ok(report)
}
