//! Discrete joint distributions over predictor variables and a (possibly
//! composite) target.
//!
//! Masses are exact rationals. Every variable is stored as an index into its
//! alphabet, and a composite target is stored component-wise, so a support
//! row is the tuple `(s_1, ..., s_n, t_1, ..., t_m)`. Bit `i` of an event mask
//! addresses predictor `i`; bit `n + j` addresses target component `j`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Probability = BigRational;

/// Allowed deviation of the total mass from one in decimal mode.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Largest number of atomic variables (predictors plus target components).
pub const MAX_ATOMS: usize = 63;

pub fn to_f64(p: &Probability) -> f64 {
    p.to_f64().unwrap_or(f64::NAN)
}

/// Parses `1/4`, `3`, `0.25` or `2.5e-1` into an exact rational. The flag is
/// true when the text was written in decimal notation.
pub fn parse_probability(text: &str) -> Result<(Probability, bool)> {
    let s = text.trim();
    let bad = || Error::InvalidProbability(text.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok((BigRational::new(num, den), false));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num_traits::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    if negative {
        value = -value;
    }
    let decimal = digits.contains('.') || exponent != 0 || s.contains(['e', 'E']);
    Ok((value, decimal))
}

/// A named finite variable; labels are kept in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub alphabet: Vec<String>,
}

impl Variable {
    pub fn new(name: impl Into<String>, alphabet: Vec<String>) -> Self {
        Self {
            name: name.into(),
            alphabet,
        }
    }

    pub fn index_of(&self, label: &str) -> Option<u32> {
        self.alphabet
            .iter()
            .position(|l| l == label)
            .map(|i| i as u32)
    }

    pub fn label(&self, index: u32) -> &str {
        &self.alphabet[index as usize]
    }

    fn lookup(&self, label: &str) -> Result<u32> {
        self.index_of(label).ok_or_else(|| Error::UnknownLabel {
            variable: self.name.clone(),
            label: label.to_string(),
        })
    }
}

/// The target variable. A composite target `T = (T_1, ..., T_m)` has the
/// Cartesian product of its component alphabets as its own alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSchema {
    name: String,
    components: Vec<Variable>,
    composite: bool,
}

impl TargetSchema {
    pub fn simple(variable: Variable) -> Self {
        Self {
            name: variable.name.clone(),
            components: vec![variable],
            composite: false,
        }
    }

    pub fn composite(name: impl Into<String>, components: Vec<Variable>) -> Self {
        Self {
            name: name.into(),
            components,
            composite: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn components(&self) -> &[Variable] {
        &self.components
    }

    pub fn is_composite(&self) -> bool {
        self.composite
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name == name)
    }

    /// Full target alphabet; composite labels are comma-joined component labels.
    pub fn alphabet(&self) -> Vec<String> {
        let mut labels = vec![String::new()];
        for (k, comp) in self.components.iter().enumerate() {
            labels = labels
                .iter()
                .flat_map(|prefix| {
                    comp.alphabet.iter().map(move |l| {
                        if k == 0 {
                            l.clone()
                        } else {
                            format!("{prefix},{l}")
                        }
                    })
                })
                .collect();
        }
        labels
    }

    pub fn label_of(&self, values: &[u32]) -> String {
        values
            .iter()
            .zip(&self.components)
            .map(|(&v, c)| c.label(v))
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn parse_label(&self, label: &str) -> Result<Vec<u32>> {
        if !self.composite {
            return Ok(vec![self.components[0].lookup(label)?]);
        }
        let parts: Vec<&str> = label.split(',').collect();
        if parts.len() != self.components.len() {
            return Err(Error::UnknownLabel {
                variable: self.name.clone(),
                label: label.to_string(),
            });
        }
        parts
            .iter()
            .zip(&self.components)
            .map(|(p, c)| c.lookup(p.trim()))
            .collect()
    }
}

/// Reference to one variable (or the whole target) of a schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRef {
    Predictor(usize),
    Target,
    Component(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableSchema {
    predictors: Vec<Variable>,
    target: Option<TargetSchema>,
}

impl VariableSchema {
    pub fn new(predictors: Vec<Variable>, target: Option<TargetSchema>) -> Result<Self> {
        let schema = Self { predictors, target };
        schema.validate()?;
        Ok(schema)
    }

    fn validate(&self) -> Result<()> {
        let mut names: Vec<&str> = self.predictors.iter().map(|v| v.name.as_str()).collect();
        let mut vars: Vec<&Variable> = self.predictors.iter().collect();
        if let Some(t) = &self.target {
            names.push(&t.name);
            if t.composite {
                if t.components.is_empty() {
                    return Err(Error::Schema("composite target without components".into()));
                }
                names.extend(t.components.iter().map(|c| c.name.as_str()));
            }
            vars.extend(t.components.iter());
        }
        for v in vars {
            if v.alphabet.is_empty() {
                return Err(Error::Schema(format!(
                    "variable {} has an empty alphabet",
                    v.name
                )));
            }
            let mut seen = v.alphabet.clone();
            seen.sort();
            seen.dedup();
            if seen.len() != v.alphabet.len() {
                return Err(Error::Schema(format!(
                    "variable {} repeats a label",
                    v.name
                )));
            }
        }
        let mut sorted = names.clone();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Schema(format!("duplicate variable name {}", w[0])));
        }
        if self.atom_count() > MAX_ATOMS {
            return Err(Error::Schema(format!(
                "at most {MAX_ATOMS} variables are supported"
            )));
        }
        Ok(())
    }

    pub fn predictors(&self) -> &[Variable] {
        &self.predictors
    }

    pub fn target(&self) -> Option<&TargetSchema> {
        self.target.as_ref()
    }

    pub fn require_target(&self) -> Result<&TargetSchema> {
        self.target.as_ref().ok_or(Error::NoTarget)
    }

    /// Number of predictors.
    pub fn n(&self) -> usize {
        self.predictors.len()
    }

    pub fn component_count(&self) -> usize {
        self.target.as_ref().map_or(0, |t| t.components.len())
    }

    /// Predictors plus target components.
    pub fn atom_count(&self) -> usize {
        self.n() + self.component_count()
    }

    pub fn predictor_bit(&self, i: usize) -> u64 {
        1 << i
    }

    pub fn component_bit(&self, j: usize) -> u64 {
        1 << (self.n() + j)
    }

    pub fn predictor_mask(&self) -> u64 {
        (1u64 << self.n()) - 1
    }

    pub fn target_mask(&self) -> u64 {
        ((1u64 << self.component_count()) - 1) << self.n()
    }

    /// Mask of the listed target components.
    pub fn components_mask(&self, components: &[usize]) -> u64 {
        components.iter().fold(0, |m, &j| m | self.component_bit(j))
    }

    fn atom(&self, k: usize) -> &Variable {
        if k < self.n() {
            &self.predictors[k]
        } else {
            &self
                .target
                .as_ref()
                .expect("component atom without target")
                .components[k - self.n()]
        }
    }

    /// Resolves a predictor, target or target-component name.
    pub fn resolve(&self, name: &str) -> Result<VarRef> {
        if let Some(i) = self.predictors.iter().position(|p| p.name == name) {
            return Ok(VarRef::Predictor(i));
        }
        if let Some(t) = &self.target {
            if t.name == name {
                return Ok(VarRef::Target);
            }
            if let Some(j) = t.component_index(name) {
                return Ok(VarRef::Component(j));
            }
        }
        Err(Error::UnknownVariable(name.to_string()))
    }

    pub fn mask_of(&self, vars: &[VarRef]) -> Result<u64> {
        let mut mask = 0;
        for v in vars {
            mask |= match *v {
                VarRef::Predictor(i) if i < self.n() => self.predictor_bit(i),
                VarRef::Target => {
                    self.require_target()?;
                    self.target_mask()
                }
                VarRef::Component(j) if j < self.component_count() => self.component_bit(j),
                other => return Err(Error::UnknownVariable(format!("{other:?}"))),
            };
        }
        Ok(mask)
    }

    /// Builds a partial assignment from `(variable name, label)` pairs.
    pub fn event(&self, assignment: &[(&str, &str)]) -> Result<Event> {
        let mut event = Event::empty(self.atom_count());
        for (name, label) in assignment {
            match self.resolve(name)? {
                VarRef::Predictor(i) => {
                    event.set(i, self.predictors[i].lookup(label)?);
                }
                VarRef::Component(j) => {
                    let t = self.require_target()?;
                    event.set(self.n() + j, t.components[j].lookup(label)?);
                }
                VarRef::Target => {
                    let t = self.require_target()?;
                    for (j, v) in t.parse_label(label)?.into_iter().enumerate() {
                        event.set(self.n() + j, v);
                    }
                }
            }
        }
        Ok(event)
    }

    pub fn describe_event(&self, event: &Event) -> String {
        let parts: Vec<String> = (0..self.atom_count())
            .filter(|&k| event.mask & (1 << k) != 0)
            .map(|k| {
                let v = self.atom(k);
                format!("{}={}", v.name, v.label(event.values[k]))
            })
            .collect();
        if parts.is_empty() {
            "{}".to_string()
        } else {
            parts.join(",")
        }
    }

    /// Labels of a full row: predictor labels, then the target label.
    pub fn row_labels(&self, row: &[u32]) -> Vec<String> {
        let n = self.n();
        let mut labels: Vec<String> = (0..n)
            .map(|i| self.predictors[i].label(row[i]).to_string())
            .collect();
        if let Some(t) = &self.target {
            labels.push(t.label_of(&row[n..]));
        }
        labels
    }
}

/// A partial assignment over the atomic variables of a schema.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Event {
    mask: u64,
    values: Vec<u32>,
}

impl Event {
    pub fn empty(atoms: usize) -> Self {
        Self {
            mask: 0,
            values: vec![0; atoms],
        }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn value(&self, atom: usize) -> Option<u32> {
        (self.mask & (1 << atom) != 0).then(|| self.values[atom])
    }

    pub fn set(&mut self, atom: usize, value: u32) {
        self.mask |= 1 << atom;
        self.values[atom] = value;
    }

    pub fn restrict(&self, mask: u64) -> Self {
        Self {
            mask: self.mask & mask,
            values: self.values.clone(),
        }
    }

    /// Conjunction of two events; `None` when they disagree on a variable.
    pub fn join(&self, other: &Event) -> Option<Event> {
        let mut out = self.clone();
        for k in 0..self.values.len() {
            if other.mask & (1 << k) != 0 {
                if self.mask & (1 << k) != 0 && self.values[k] != other.values[k] {
                    return None;
                }
                out.set(k, other.values[k]);
            }
        }
        Some(out)
    }

    pub fn matches(&self, row: &[u32]) -> bool {
        (0..self.values.len()).all(|k| self.mask & (1 << k) == 0 || row[k] == self.values[k])
    }

    fn key(&self) -> Vec<u32> {
        project(&self.values, self.mask)
    }
}

fn project(row: &[u32], mask: u64) -> Vec<u32> {
    (0..row.len())
        .filter(|&k| mask & (1 << k) != 0)
        .map(|k| row[k])
        .collect()
}

/// One support point of a joint distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Realisation {
    row: Vec<u32>,
    probability: Probability,
}

impl Realisation {
    pub fn row(&self) -> &[u32] {
        &self.row
    }

    pub fn probability(&self) -> &Probability {
        &self.probability
    }

    pub fn predictor_events(&self, n: usize) -> &[u32] {
        &self.row[..n]
    }

    pub fn target_components(&self, n: usize) -> &[u32] {
        &self.row[n..]
    }

    /// The realised values on the variables in `mask`.
    pub fn event(&self, mask: u64) -> Event {
        Event {
            mask,
            values: self.row.clone(),
        }
    }
}

/// A set of predictor positions (0-based internally, rendered 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SourceEvent(u32);

impl SourceEvent {
    pub fn new(indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidSourceEvent("empty source event".into()));
        }
        let mut mask = 0u32;
        for &i in indices {
            if i >= 32 {
                return Err(Error::InvalidSourceEvent(format!("index {i} out of range")));
            }
            if mask & (1 << i) != 0 {
                return Err(Error::InvalidSourceEvent(format!(
                    "duplicate index {}",
                    i + 1
                )));
            }
            mask |= 1 << i;
        }
        Ok(Self(mask))
    }

    pub fn from_mask(mask: u32) -> Result<Self> {
        if mask == 0 {
            return Err(Error::InvalidSourceEvent("empty source event".into()));
        }
        Ok(Self(mask))
    }

    /// Parses the compact 1-based form used in node notation, e.g. `12`.
    pub fn parse(text: &str) -> Result<Self> {
        let indices = text
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d >= 1)
                    .map(|d| d as usize - 1)
                    .ok_or_else(|| Error::InvalidSourceEvent(text.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&indices)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.0 & (1 << i) != 0).collect()
    }

    pub fn is_subset_of(self, other: SourceEvent) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest predictor position plus one.
    pub fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }
}

impl Ord for SourceEvent {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.indices().cmp(&other.indices()))
    }
}

impl PartialOrd for SourceEvent {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SourceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in self.indices() {
            if i < 9 {
                write!(f, "{}", i + 1)?;
            } else {
                write!(f, "({})", i + 1)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassMode {
    Rational,
    Decimal,
}

type MarginalTable = HashMap<Vec<u32>, Probability>;

#[derive(Default)]
struct MarginalMemo {
    tables: RwLock<HashMap<u64, Arc<MarginalTable>>>,
}

/// Joint probability mass over predictors and target, stored on its support.
pub struct JointDistribution {
    schema: VariableSchema,
    rows: Vec<Realisation>,
    mode: MassMode,
    warnings: Vec<String>,
    memo: MarginalMemo,
}

impl Clone for JointDistribution {
    fn clone(&self) -> Self {
        Self {
            schema: self.schema.clone(),
            rows: self.rows.clone(),
            mode: self.mode,
            warnings: self.warnings.clone(),
            memo: MarginalMemo::default(),
        }
    }
}

impl fmt::Debug for JointDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JointDistribution")
            .field("schema", &self.schema)
            .field("rows", &self.rows)
            .field("mode", &self.mode)
            .finish()
    }
}

impl JointDistribution {
    /// Validates and stores the given rows. Duplicate rows are merged and
    /// zero-mass rows dropped, each with a recorded warning.
    pub fn new(
        schema: VariableSchema,
        rows: Vec<(Vec<u32>, Probability)>,
        mode: MassMode,
    ) -> Result<Self> {
        let atoms = schema.atom_count();
        let mut warnings = Vec::new();
        let mut order: Vec<Vec<u32>> = Vec::new();
        let mut merged: HashMap<Vec<u32>, Probability> = HashMap::new();
        for (row, p) in rows {
            if row.len() != atoms {
                return Err(Error::Schema(format!(
                    "row has {} values, schema has {atoms} variables",
                    row.len()
                )));
            }
            for (k, &v) in row.iter().enumerate() {
                if v as usize >= schema.atom(k).alphabet.len() {
                    return Err(Error::UnknownLabel {
                        variable: schema.atom(k).name.clone(),
                        label: format!("#{v}"),
                    });
                }
            }
            match merged.get_mut(&row) {
                Some(total) => {
                    warnings.push(format!(
                        "duplicate outcome {} merged",
                        schema.row_labels(&row).join(" ")
                    ));
                    *total += p;
                }
                None => {
                    order.push(row.clone());
                    merged.insert(row, p);
                }
            }
        }
        let mut support = Vec::with_capacity(order.len());
        let mut dropped = 0usize;
        for row in order {
            let p = merged.remove(&row).expect("merged row");
            if p.is_negative() {
                return Err(Error::NonPositiveMass {
                    outcome: schema.row_labels(&row).join(" "),
                    mass: p.to_string(),
                });
            }
            if p.is_zero() {
                dropped += 1;
                continue;
            }
            support.push(Realisation {
                row,
                probability: p,
            });
        }
        if dropped > 0 {
            warnings.push(format!("{dropped} zero-probability outcome(s) dropped"));
        }
        let total: Probability = support.iter().map(|r| r.probability.clone()).sum();
        let ok = match mode {
            MassMode::Rational => total.is_one(),
            MassMode::Decimal => (to_f64(&total) - 1.0).abs() <= MASS_TOLERANCE,
        };
        if !ok || support.is_empty() {
            return Err(Error::MassNotNormalised(total.to_string()));
        }
        Ok(Self {
            schema,
            rows: support,
            mode,
            warnings,
            memo: MarginalMemo::default(),
        })
    }

    pub fn schema(&self) -> &VariableSchema {
        &self.schema
    }

    pub fn n(&self) -> usize {
        self.schema.n()
    }

    pub fn realisations(&self) -> &[Realisation] {
        &self.rows
    }

    pub fn support_size(&self) -> usize {
        self.rows.len()
    }

    pub fn mode(&self) -> MassMode {
        self.mode
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn find(&self, row: &[u32]) -> Option<&Realisation> {
        self.rows.iter().find(|r| r.row == row)
    }

    pub fn total_mass(&self) -> Probability {
        self.rows.iter().map(|r| r.probability.clone()).sum()
    }

    /// Probability of a partial assignment; zero outside the support.
    pub fn probability(&self, event: &Event) -> Probability {
        if event.mask == 0 {
            return Probability::one();
        }
        let table = self.marginal_table(event.mask);
        table
            .get(&event.key())
            .cloned()
            .unwrap_or_else(Probability::zero)
    }

    fn marginal_table(&self, mask: u64) -> Arc<MarginalTable> {
        if let Some(t) = self.memo.tables.read().expect("memo lock").get(&mask) {
            return Arc::clone(t);
        }
        let mut table = MarginalTable::new();
        for r in &self.rows {
            *table
                .entry(project(&r.row, mask))
                .or_insert_with(Probability::zero) += &r.probability;
        }
        let table = Arc::new(table);
        self.memo
            .tables
            .write()
            .expect("memo lock")
            .entry(mask)
            .or_insert(table)
            .clone()
    }

    /// Label-level equality: same variable names and the same mass on every
    /// labelled outcome, independent of row or alphabet order.
    pub fn same_distribution(&self, other: &JointDistribution) -> bool {
        let names = |d: &JointDistribution| {
            let mut v: Vec<String> = d.schema.predictors.iter().map(|p| p.name.clone()).collect();
            if let Some(t) = &d.schema.target {
                v.push(t.name.clone());
            }
            v
        };
        if names(self) != names(other) || self.rows.len() != other.rows.len() {
            return false;
        }
        let labelled = |d: &JointDistribution| {
            d.rows
                .iter()
                .map(|r| (d.schema.row_labels(&r.row), r.probability.clone()))
                .collect::<HashMap<_, _>>()
        };
        labelled(self) == labelled(other)
    }

    /// Marginal over the selected variables (predictor order and component
    /// order are preserved).
    pub fn marginal(&self, vars: &[VarRef]) -> Result<JointDistribution> {
        if vars.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mask = self.schema.mask_of(vars)?;
        let predictors: Vec<usize> = (0..self.n())
            .filter(|&i| mask & self.schema.predictor_bit(i) != 0)
            .collect();
        let components: Vec<usize> = (0..self.schema.component_count())
            .filter(|&j| mask & self.schema.component_bit(j) != 0)
            .collect();
        let keep_whole = components.len() == self.schema.component_count();
        self.project(
            &predictors,
            &components,
            keep_whole,
            self.rows.iter().cloned(),
        )
    }

    /// Conditional distribution given `evidence`, over the variables the
    /// evidence does not fix.
    pub fn condition(&self, evidence: &Event) -> Result<JointDistribution> {
        let p = self.probability(evidence);
        if p.is_zero() {
            return Err(Error::ZeroProbability(self.schema.describe_event(evidence)));
        }
        let predictors: Vec<usize> = (0..self.n())
            .filter(|&i| evidence.mask & self.schema.predictor_bit(i) == 0)
            .collect();
        let components: Vec<usize> = (0..self.schema.component_count())
            .filter(|&j| evidence.mask & self.schema.component_bit(j) == 0)
            .collect();
        let keep_whole = components.len() == self.schema.component_count();
        let rows = self
            .rows
            .iter()
            .filter(|r| evidence.matches(&r.row))
            .map(|r| Realisation {
                row: r.row.clone(),
                probability: &r.probability / &p,
            });
        self.project(&predictors, &components, keep_whole, rows)
    }

    /// Replaces the target alphabet by `{t, ~t}`, pooling every other target
    /// event into `~t`.
    pub fn coarsen_target_to_two_events(&self, target_label: &str) -> Result<JointDistribution> {
        let target = self.schema.require_target()?;
        let values = target.parse_label(target_label)?;
        let n = self.n();
        let mut event = Event::empty(self.schema.atom_count());
        for (j, &v) in values.iter().enumerate() {
            event.set(n + j, v);
        }
        if self.probability(&event).is_zero() {
            return Err(Error::ZeroProbability(self.schema.describe_event(&event)));
        }
        let label = target.label_of(&values);
        let coarse = Variable::new(target.name(), vec![label.clone(), format!("~{label}")]);
        let schema = VariableSchema::new(
            self.schema.predictors.clone(),
            Some(TargetSchema::simple(coarse)),
        )?;
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut row = r.row[..n].to_vec();
                row.push(u32::from(r.row[n..] != values[..]));
                (row, r.probability.clone())
            })
            .collect();
        Self::new_unchecked_total(schema, rows, self.mode)
    }

    /// Retargets onto the listed components of a composite target, in the
    /// given order. A single component yields a simple target.
    pub fn compose_targets(&self, components: &[&str]) -> Result<JointDistribution> {
        let target = self.schema.require_target()?;
        if components.is_empty() {
            return Err(Error::EmptySelection);
        }
        let indices = components
            .iter()
            .map(|name| {
                target
                    .component_index(name)
                    .filter(|_| target.is_composite())
                    .ok_or_else(|| Error::UnknownVariable((*name).to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let predictors: Vec<usize> = (0..self.n()).collect();
        let keep_whole = indices.len() == target.components.len()
            && indices.iter().enumerate().all(|(k, &j)| k == j);
        self.project(&predictors, &indices, keep_whole, self.rows.iter().cloned())
    }

    fn project(
        &self,
        predictors: &[usize],
        components: &[usize],
        keep_whole_target: bool,
        rows: impl Iterator<Item = Realisation>,
    ) -> Result<JointDistribution> {
        let n = self.n();
        let target = match &self.schema.target {
            None => None,
            Some(_) if components.is_empty() => None,
            Some(t) if keep_whole_target => Some(t.clone()),
            Some(t) if components.len() == 1 => {
                Some(TargetSchema::simple(t.components[components[0]].clone()))
            }
            Some(t) => {
                let picked: Vec<Variable> = components
                    .iter()
                    .map(|&j| t.components[j].clone())
                    .collect();
                let name = picked
                    .iter()
                    .map(|c| c.name.as_str())
                    .collect::<Vec<_>>()
                    .join(",");
                Some(TargetSchema::composite(name, picked))
            }
        };
        let schema = VariableSchema::new(
            predictors
                .iter()
                .map(|&i| self.schema.predictors[i].clone())
                .collect(),
            target,
        )?;
        let projected = rows
            .map(|r| {
                let mut row: Vec<u32> = predictors.iter().map(|&i| r.row[i]).collect();
                row.extend(components.iter().map(|&j| r.row[n + j]));
                (row, r.probability)
            })
            .collect();
        Self::new_unchecked_total(schema, projected, self.mode)
    }

    /// Merges rows without re-warning; the caller guarantees the total mass.
    fn new_unchecked_total(
        schema: VariableSchema,
        rows: Vec<(Vec<u32>, Probability)>,
        mode: MassMode,
    ) -> Result<Self> {
        let mut out = Self::new(schema, rows, mode)?;
        out.warnings.clear();
        Ok(out)
    }
}

/// Accumulates rows by label, inferring alphabets in first-appearance order.
#[derive(Debug, Clone)]
pub struct DistributionBuilder {
    predictor_names: Vec<String>,
    target_name: String,
    component_names: Option<Vec<String>>,
    rows: Vec<(Probability, Vec<String>)>,
    mode: MassMode,
}

impl DistributionBuilder {
    pub fn new(predictor_names: &[&str], target_name: &str) -> Self {
        Self {
            predictor_names: predictor_names.iter().map(|s| s.to_string()).collect(),
            target_name: target_name.to_string(),
            component_names: None,
            rows: Vec::new(),
            mode: MassMode::Rational,
        }
    }

    /// Declares the target composite with the given component names.
    pub fn composite(mut self, components: &[&str]) -> Self {
        self.component_names = Some(components.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn mode(mut self, mode: MassMode) -> Self {
        self.mode = mode;
        self
    }

    /// Appends a row: predictor labels followed by one label per target
    /// component (one label for a simple target).
    pub fn row(mut self, p: Probability, labels: &[&str]) -> Self {
        self.push(p, labels.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn push(&mut self, p: Probability, labels: Vec<String>) {
        self.rows.push((p, labels));
    }

    pub fn build(self) -> Result<JointDistribution> {
        let n = self.predictor_names.len();
        let comps = self
            .component_names
            .clone()
            .unwrap_or_else(|| vec![self.target_name.clone()]);
        let width = n + comps.len();
        let mut alphabets: Vec<Vec<String>> = vec![Vec::new(); width];
        for (line, (_, labels)) in self.rows.iter().enumerate() {
            if labels.len() != width {
                return Err(Error::ColumnCount {
                    line: line + 1,
                    expected: width,
                    found: labels.len(),
                });
            }
            for (k, l) in labels.iter().enumerate() {
                if !alphabets[k].contains(l) {
                    alphabets[k].push(l.clone());
                }
            }
        }
        let mut vars: Vec<Variable> = self
            .predictor_names
            .iter()
            .chain(comps.iter())
            .zip(alphabets)
            .map(|(name, alphabet)| Variable::new(name.clone(), alphabet))
            .collect();
        let component_vars = vars.split_off(n);
        let target = match self.component_names {
            Some(_) => TargetSchema::composite(self.target_name.clone(), component_vars),
            None => TargetSchema::simple(component_vars.into_iter().next().expect("target")),
        };
        let schema = VariableSchema::new(vars, Some(target))?;
        let rows = self
            .rows
            .into_iter()
            .map(|(p, labels)| {
                let row = labels
                    .iter()
                    .enumerate()
                    .map(|(k, l)| schema.atom(k).index_of(l).expect("inferred label"))
                    .collect();
                (row, p)
            })
            .collect();
        JointDistribution::new(schema, rows, self.mode)
    }
}

pub fn ratio(num: i64, den: i64) -> Probability {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
