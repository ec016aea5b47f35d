//! The redundancy lattice: antichains of source events ordered by
//! `α ⪯ β ⇔ ∀b∈β ∃a∈α : a ⊆ b`, with Möbius inversion over it.
//!
//! The same structure serves as the specificity lattice and the ambiguity
//! lattice; only the cumulative function placed on it differs.

use std::collections::HashMap;
use std::fmt;

use crate::distribution::SourceEvent;
use crate::error::{Error, Result};

/// Default largest predictor count for which a lattice is built.
pub const DEFAULT_CAP: usize = 4;

/// Absolute limit; beyond this the node count (7579 at five predictors)
/// grows past anything tractable.
pub const HARD_CAP: usize = 5;

/// An antichain of source events over `n` predictors, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeNode {
    n: usize,
    sources: Vec<SourceEvent>,
}

impl LatticeNode {
    pub fn new(n: usize, mut sources: Vec<SourceEvent>) -> Result<Self> {
        if sources.is_empty() {
            return Err(Error::InvalidNode("empty node".into()));
        }
        sources.sort();
        sources.dedup();
        for a in &sources {
            if a.span() > n {
                return Err(Error::InvalidNode(format!("{a} exceeds {n} predictors")));
            }
        }
        for (i, a) in sources.iter().enumerate() {
            for b in &sources[i + 1..] {
                if a.is_subset_of(*b) || b.is_subset_of(*a) {
                    return Err(Error::InvalidNode(format!(
                        "{{{a}}} and {{{b}}} are nested"
                    )));
                }
            }
        }
        Ok(Self { n, sources })
    }

    /// Parses the `{1}{2}` / `{12}{13}` notation.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let body = text.trim();
        let inner = body
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| Error::InvalidNode(text.to_string()))?;
        let sources = inner
            .split("}{")
            .map(SourceEvent::parse)
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::InvalidNode(text.to_string()))?;
        Self::new(n, sources)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sources(&self) -> &[SourceEvent] {
        &self.sources
    }

    /// Minimum of `f` over the member source events.
    pub fn min_over(&self, mut f: impl FnMut(SourceEvent) -> f64) -> f64 {
        self.sources
            .iter()
            .map(|&a| f(a))
            .fold(f64::INFINITY, f64::min)
    }

    fn leq_raw(&self, other: &LatticeNode) -> bool {
        other
            .sources
            .iter()
            .all(|b| self.sources.iter().any(|a| a.is_subset_of(*b)))
    }
}

impl fmt::Display for LatticeNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.sources {
            write!(f, "{{{a}}}")?;
        }
        Ok(())
    }
}

impl Ord for LatticeNode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.sources.cmp(&other.sources))
    }
}

impl PartialOrd for LatticeNode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::PredictorCount {
            expected: "at least 1".into(),
            found: 0,
        });
    }
    if n > cap.min(HARD_CAP) {
        return Err(Error::LatticeCap {
            n,
            cap: cap.min(HARD_CAP),
        });
    }
    Ok(())
}

/// All antichains of nonempty subsets of `{1..n}`, each once, grown by
/// extending antichains over subsets in (size, lexicographic) order.
pub fn enumerate_nodes(n: usize, cap: usize) -> Result<Vec<LatticeNode>> {
    check_cap(n, cap)?;
    let mut subsets: Vec<SourceEvent> = (1u32..(1 << n))
        .map(|m| SourceEvent::from_mask(m).expect("nonzero"))
        .collect();
    subsets.sort();

    fn extend(
        n: usize,
        subsets: &[SourceEvent],
        start: usize,
        current: &mut Vec<SourceEvent>,
        out: &mut Vec<LatticeNode>,
    ) {
        for (k, &candidate) in subsets.iter().enumerate().skip(start) {
            // Earlier members are never larger, so only containment of an
            // earlier member can break the antichain.
            if current.iter().any(|m| m.is_subset_of(candidate)) {
                continue;
            }
            current.push(candidate);
            out.push(LatticeNode {
                n,
                sources: current.clone(),
            });
            extend(n, subsets, k + 1, current, out);
            current.pop();
        }
    }

    let mut out = Vec::new();
    extend(n, &subsets, 0, &mut Vec::new(), &mut out);
    out.sort();
    Ok(out)
}

/// `α ⪯ β`.
pub fn node_leq(alpha: &LatticeNode, beta: &LatticeNode) -> Result<bool> {
    if alpha.n != beta.n {
        return Err(Error::MismatchedNodes(alpha.n, beta.n));
    }
    Ok(alpha.leq_raw(beta))
}

/// Greatest lower bound: the ⊆-minimal members of `α ∪ β`.
pub fn meet(alpha: &LatticeNode, beta: &LatticeNode) -> Result<LatticeNode> {
    if alpha.n != beta.n {
        return Err(Error::MismatchedNodes(alpha.n, beta.n));
    }
    let union: Vec<SourceEvent> = alpha.sources.iter().chain(&beta.sources).copied().collect();
    let minimal: Vec<SourceEvent> = union
        .iter()
        .copied()
        .filter(|&a| !union.iter().any(|&b| b != a && b.is_subset_of(a)))
        .collect();
    LatticeNode::new(alpha.n, minimal)
}

/// The full lattice for `n` predictors. Nodes are stored in a linear
/// extension of `⪯` (bottom first, top last).
#[derive(Debug, Clone)]
pub struct RedundancyLattice {
    n: usize,
    nodes: Vec<LatticeNode>,
    index: HashMap<LatticeNode, usize>,
    /// `below[α]` has bit β set iff `β ⪯ α`.
    below: Vec<Vec<u64>>,
    lower_covers: Vec<Vec<usize>>,
}

impl RedundancyLattice {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_cap(n, DEFAULT_CAP)
    }

    pub fn with_cap(n: usize, cap: usize) -> Result<Self> {
        let canonical = enumerate_nodes(n, cap)?;
        let size = canonical.len();
        let words = size.div_ceil(64);
        let mut below = vec![vec![0u64; words]; size];
        let mut down_size = vec![0usize; size];
        for (a, alpha) in canonical.iter().enumerate() {
            for (b, beta) in canonical.iter().enumerate() {
                if beta.leq_raw(alpha) {
                    below[a][b / 64] |= 1 << (b % 64);
                    down_size[a] += 1;
                }
            }
        }
        // Strictly smaller nodes have strictly smaller down-sets, so sorting
        // by down-set size gives a linear extension.
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&x, &y| down_size[x].cmp(&down_size[y]).then(x.cmp(&y)));
        let nodes: Vec<LatticeNode> = order.iter().map(|&k| canonical[k].clone()).collect();
        let mut rank = vec![0usize; size];
        for (new, &old) in order.iter().enumerate() {
            rank[old] = new;
        }
        let mut sorted_below = vec![vec![0u64; words]; size];
        for (new, &old) in order.iter().enumerate() {
            for b in 0..size {
                if below[old][b / 64] & (1 << (b % 64)) != 0 {
                    let nb = rank[b];
                    sorted_below[new][nb / 64] |= 1 << (nb % 64);
                }
            }
        }
        let index = nodes
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let mut lattice = Self {
            n,
            nodes,
            index,
            below: sorted_below,
            lower_covers: Vec::new(),
        };
        lattice.lower_covers = (0..size).map(|a| lattice.compute_lower_covers(a)).collect();
        Ok(lattice)
    }

    fn compute_lower_covers(&self, a: usize) -> Vec<usize> {
        // Walking the strict down-set from the top of the linear extension,
        // an element is maximal iff it is below no maximal element found so far.
        let mut covers: Vec<usize> = Vec::new();
        for b in (0..a).rev() {
            if self.leq(b, a) && !covers.iter().any(|&c| self.leq(b, c)) {
                covers.push(b);
            }
        }
        covers.sort_unstable();
        covers
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[LatticeNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &LatticeNode {
        &self.nodes[i]
    }

    pub fn index_of(&self, node: &LatticeNode) -> Option<usize> {
        self.index.get(node).copied()
    }

    fn require(&self, node: &LatticeNode) -> Result<usize> {
        self.index_of(node)
            .ok_or_else(|| Error::ForeignNode(node.to_string()))
    }

    /// The node of all singletons.
    pub fn bottom(&self) -> usize {
        0
    }

    /// The node holding the full predictor set.
    pub fn top(&self) -> usize {
        self.nodes.len() - 1
    }

    /// `nodes[b] ⪯ nodes[a]`.
    pub fn leq(&self, b: usize, a: usize) -> bool {
        self.below[a][b / 64] & (1 << (b % 64)) != 0
    }

    pub fn lower_covers(&self, a: usize) -> &[usize] {
        &self.lower_covers[a]
    }

    /// Cover relation as `(lower, upper)` index pairs.
    pub fn cover_edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<(usize, usize)> = self
            .lower_covers
            .iter()
            .enumerate()
            .flat_map(|(a, cs)| cs.iter().map(move |&b| (b, a)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn down_set_indices(&self, a: usize) -> Vec<usize> {
        (0..=a).filter(|&b| self.leq(b, a)).collect()
    }

    pub fn down_set(&self, alpha: &LatticeNode) -> Result<Vec<&LatticeNode>> {
        let a = self.require(alpha)?;
        Ok(self
            .down_set_indices(a)
            .into_iter()
            .map(|b| &self.nodes[b])
            .collect())
    }

    /// Partial contributions `π(α) = c(α) − Σ_{β≺α} π(β)`, indexed like `nodes()`.
    pub fn mobius_invert(&self, cumulative: &[f64]) -> Result<Vec<f64>> {
        if cumulative.len() != self.len() {
            return Err(Error::MissingValue(format!(
                "expected {} node values, got {}",
                self.len(),
                cumulative.len()
            )));
        }
        let mut partial = vec![0.0; self.len()];
        for a in 0..self.len() {
            let below: f64 = (0..a).filter(|&b| self.leq(b, a)).map(|b| partial[b]).sum();
            partial[a] = cumulative[a] - below;
        }
        Ok(partial)
    }

    pub fn mobius_invert_map(
        &self,
        cumulative: &HashMap<LatticeNode, f64>,
    ) -> Result<HashMap<LatticeNode, f64>> {
        let values = self
            .nodes
            .iter()
            .map(|v| {
                cumulative
                    .get(v)
                    .copied()
                    .ok_or_else(|| Error::MissingValue(v.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let partial = self.mobius_invert(&values)?;
        Ok(self.nodes.iter().cloned().zip(partial).collect())
    }

    /// `Σ_{β⪯α} π(β)` for every node.
    pub fn cumulate(&self, partial: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|a| {
                (0..=a)
                    .filter(|&b| self.leq(b, a))
                    .map(|b| partial[b])
                    .sum()
            })
            .collect()
    }

    /// Closed form of the partial contribution for min-type cumulative
    /// functions: `min_{a∈α} v(a) − max_{β∈α⁻} min_{b∈β} v(b)`.
    pub fn closed_form_partial_at(
        &self,
        a: usize,
        mut value: impl FnMut(SourceEvent) -> f64,
    ) -> f64 {
        let own = self.nodes[a].min_over(&mut value);
        let covers = &self.lower_covers[a];
        if covers.is_empty() {
            return own;
        }
        let best = covers
            .iter()
            .map(|&b| self.nodes[b].min_over(&mut value))
            .fold(f64::NEG_INFINITY, f64::max);
        own - best
    }

    pub fn closed_form_partial(
        &self,
        inputs: &HashMap<SourceEvent, f64>,
        alpha: &LatticeNode,
    ) -> Result<f64> {
        let a = self.require(alpha)?;
        let mut needed = self.nodes[a].sources().to_vec();
        for &b in &self.lower_covers[a] {
            needed.extend_from_slice(self.nodes[b].sources());
        }
        if let Some(missing) = needed.iter().find(|s| !inputs.contains_key(s)) {
            return Err(Error::MissingValue(format!("source event {{{missing}}}")));
        }
        Ok(self.closed_form_partial_at(a, |s| inputs[&s]))
    }

    /// One node per line, then one `α -> β` line per cover edge.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in &self.nodes {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        for (b, a) in self.cover_edges() {
            out.push_str(&format!("{} -> {}\n", self.nodes[b], self.nodes[a]));
        }
        out
    }
}
