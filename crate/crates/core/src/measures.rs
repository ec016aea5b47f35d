//! Pointwise information quantities.
//!
//! Every pointwise quantity is a log of an exact probability ratio: the ratio
//! is formed in rational arithmetic and only the final log is taken in
//! binary64. Specificity is `h(a)` and ambiguity is `h(a|t)`, so
//! `i(a;t) = h(a) - h(a|t)`.

use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::distribution::{
    to_f64, Event, JointDistribution, Probability, Realisation, SourceEvent,
};
use crate::error::{Error, Result};

/// Logarithm base; bits by default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBase(f64);

impl LogBase {
    pub const BITS: LogBase = LogBase(2.0);
    pub const NATS: LogBase = LogBase(std::f64::consts::E);

    pub fn new(base: f64) -> Result<Self> {
        if !base.is_finite() || base <= 0.0 || base == 1.0 {
            return Err(Error::InvalidBase(base));
        }
        Ok(Self(base))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn log(self, x: f64) -> f64 {
        if self.0 == 2.0 {
            x.log2()
        } else if self.0 == std::f64::consts::E {
            x.ln()
        } else if self.0 == 10.0 {
            x.log10()
        } else {
            x.ln() / self.0.ln()
        }
    }

    /// Log of an exact ratio.
    pub fn log_ratio(self, p: &Probability) -> f64 {
        self.log(to_f64(p))
    }
}

impl Default for LogBase {
    fn default() -> Self {
        Self::BITS
    }
}

impl Serialize for LogBase {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.0)
    }
}

/// An information value together with the base it was measured in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InfoValue {
    pub value: f64,
    pub base: LogBase,
}

impl InfoValue {
    pub fn new(value: f64, base: LogBase) -> Self {
        Self { value, base }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Evaluates pointwise quantities on one distribution.
#[derive(Debug, Clone, Copy)]
pub struct Measures<'d> {
    dist: &'d JointDistribution,
    base: LogBase,
}

impl<'d> Measures<'d> {
    pub fn new(dist: &'d JointDistribution) -> Self {
        Self {
            dist,
            base: LogBase::BITS,
        }
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }

    pub fn dist(&self) -> &'d JointDistribution {
        self.dist
    }

    pub fn base(&self) -> LogBase {
        self.base
    }

    fn value(&self, v: f64) -> InfoValue {
        InfoValue::new(v, self.base)
    }

    fn positive(&self, event: &Event) -> Result<Probability> {
        let p = self.dist.probability(event);
        if p.is_zero() {
            return Err(Error::ZeroProbability(
                self.dist.schema().describe_event(event),
            ));
        }
        Ok(p)
    }

    /// `h(e) = -log p(e)`.
    pub fn pointwise_entropy(&self, event: &Event) -> Result<InfoValue> {
        let p = self.positive(event)?;
        Ok(self.value(-self.base.log_ratio(&p)))
    }

    /// `h(a|b) = -log p(a|b)`.
    pub fn conditional_entropy(&self, event: &Event, given: &Event) -> Result<InfoValue> {
        let pg = self.positive(given)?;
        let joint = event
            .join(given)
            .ok_or_else(|| Error::ZeroProbability("contradictory events".into()))?;
        let pj = self.positive(&joint)?;
        Ok(self.value(-self.base.log_ratio(&(pj / pg))))
    }

    /// `i(s;t) = log p(t|s) / p(t)`; negative values are misinformative.
    pub fn pointwise_mutual_information(
        &self,
        source: &Event,
        target: &Event,
    ) -> Result<InfoValue> {
        let ps = self.positive(source)?;
        let pt = self.positive(target)?;
        let joint = source
            .join(target)
            .ok_or_else(|| Error::ZeroProbability("contradictory events".into()))?;
        let pj = self.positive(&joint)?;
        Ok(self.value(self.base.log_ratio(&(pj / (ps * pt)))))
    }

    fn source_mask(&self, a: SourceEvent) -> Result<u64> {
        if a.span() > self.dist.n() {
            return Err(Error::InvalidSourceEvent(format!(
                "{a} refers to a predictor beyond {}",
                self.dist.n()
            )));
        }
        Ok(u64::from(a.mask()))
    }

    /// Specificity `h(a)` of the source event `a` realised in `r`.
    pub fn specificity(&self, a: SourceEvent, r: &Realisation) -> Result<InfoValue> {
        self.pointwise_entropy(&r.event(self.source_mask(a)?))
    }

    /// Ambiguity `h(a|t)` of the source event `a` realised in `r`.
    pub fn ambiguity(&self, a: SourceEvent, r: &Realisation) -> Result<InfoValue> {
        self.dist.schema().require_target()?;
        let target = r.event(self.dist.schema().target_mask());
        self.conditional_entropy(&r.event(self.source_mask(a)?), &target)
    }

    /// `h(a | t_given)` for the listed target components.
    pub fn conditional_specificity(
        &self,
        a: SourceEvent,
        r: &Realisation,
        given: &[usize],
    ) -> Result<InfoValue> {
        self.conditional_ambiguity(a, r, given)
    }

    /// `h(a | t_j for j in targets)`; an empty list is plain specificity.
    pub fn conditional_ambiguity(
        &self,
        a: SourceEvent,
        r: &Realisation,
        targets: &[usize],
    ) -> Result<InfoValue> {
        let schema = self.dist.schema();
        if let Some(&j) = targets.iter().find(|&&j| j >= schema.component_count()) {
            return Err(Error::UnknownVariable(format!(
                "target component {}",
                j + 1
            )));
        }
        let given = r.event(schema.components_mask(targets));
        self.conditional_entropy(&r.event(self.source_mask(a)?), &given)
    }

    /// Pointwise mutual information between source event `a` and the target
    /// event of `r`.
    pub fn source_information(&self, a: SourceEvent, r: &Realisation) -> Result<InfoValue> {
        self.dist.schema().require_target()?;
        let target = r.event(self.dist.schema().target_mask());
        self.pointwise_mutual_information(&r.event(self.source_mask(a)?), &target)
    }

    /// `i(s1;t) + i(s2;t) - i(s1,s2;t)` for two predictors.
    pub fn co_information(&self, r: &Realisation) -> Result<InfoValue> {
        if self.dist.n() != 2 {
            return Err(Error::PredictorCount {
                expected: "exactly 2".into(),
                found: self.dist.n(),
            });
        }
        let i1 = self.source_information(SourceEvent::from_mask(0b01)?, r)?;
        let i2 = self.source_information(SourceEvent::from_mask(0b10)?, r)?;
        let i12 = self.source_information(SourceEvent::from_mask(0b11)?, r)?;
        Ok(self.value(i1.value + i2.value - i12.value))
    }

    /// Probability-weighted expectation of a pointwise functional over the support.
    pub fn average<F>(&self, mut f: F) -> Result<InfoValue>
    where
        F: FnMut(&Realisation) -> Result<f64>,
    {
        let mut sum = CompensatedSum::default();
        for r in self.dist.realisations() {
            sum.add(to_f64(r.probability()) * f(r)?);
        }
        Ok(self.value(sum.total()))
    }

    /// `I(A;T)` for a source event pattern.
    pub fn mutual_information(&self, a: SourceEvent) -> Result<InfoValue> {
        self.average(|r| Ok(self.source_information(a, r)?.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{ratio, DistributionBuilder};

    const TOL: f64 = 1e-12;

    fn and() -> JointDistribution {
        DistributionBuilder::new(&["s1", "s2"], "t")
            .row(ratio(1, 4), &["0", "0", "0"])
            .row(ratio(1, 4), &["0", "1", "0"])
            .row(ratio(1, 4), &["1", "0", "0"])
            .row(ratio(1, 4), &["1", "1", "1"])
            .build()
            .unwrap()
    }

    fn s(indices: &[usize]) -> SourceEvent {
        SourceEvent::new(indices).unwrap()
    }

    #[test]
    fn entropy_of_certain_event_is_zero() {
        let d = DistributionBuilder::new(&["s1"], "t")
            .row(ratio(1, 1), &["0", "0"])
            .build()
            .unwrap();
        let m = Measures::new(&d);
        let e = d.schema().event(&[("s1", "0")]).unwrap();
        assert_eq!(m.pointwise_entropy(&e).unwrap().value, 0.0);
    }

    #[test]
    fn and_misinformation() {
        let d = and();
        let m = Measures::new(&d);
        let s1 = d.schema().event(&[("s1", "1")]).unwrap();
        let t0 = d.schema().event(&[("t", "0")]).unwrap();
        let i = m.pointwise_mutual_information(&s1, &t0).unwrap().value;
        assert!((i - (2.0f64 / 3.0).log2()).abs() < TOL);
        let r = &d.realisations()[0];
        let amb = m.ambiguity(s(&[0]), r).unwrap().value;
        assert!((amb - 1.5f64.log2()).abs() < TOL);
    }

    #[test]
    fn zero_probability_is_an_error() {
        let d = and();
        let m = Measures::new(&d);
        let e = d
            .schema()
            .event(&[("s1", "1"), ("s2", "1"), ("t", "0")])
            .unwrap();
        assert!(matches!(
            m.pointwise_entropy(&e),
            Err(Error::ZeroProbability(_))
        ));
    }

    #[test]
    fn co_information_needs_two_predictors() {
        let d = DistributionBuilder::new(&["s1"], "t")
            .row(ratio(1, 1), &["0", "0"])
            .build()
            .unwrap();
        assert!(Measures::new(&d)
            .co_information(&d.realisations()[0])
            .is_err());
    }

    #[test]
    fn independent_target_has_zero_information() {
        let d = DistributionBuilder::new(&["s1", "s2"], "t")
            .row(ratio(1, 4), &["0", "0", "0"])
            .row(ratio(1, 4), &["0", "0", "1"])
            .row(ratio(1, 4), &["1", "1", "0"])
            .row(ratio(1, 4), &["1", "1", "1"])
            .build()
            .unwrap();
        let m = Measures::new(&d);
        for r in d.realisations() {
            assert!(m.co_information(r).unwrap().value.abs() < TOL);
            assert!(m.source_information(s(&[0]), r).unwrap().value.abs() < TOL);
        }
    }

    #[test]
    fn base_is_recorded() {
        let d = and();
        let m = Measures::new(&d).with_base(LogBase::NATS);
        let r = &d.realisations()[0];
        let v = m.specificity(s(&[0]), r).unwrap();
        assert_eq!(v.base, LogBase::NATS);
        assert!((v.value - 2f64.ln()).abs() < TOL);
        assert!(LogBase::new(1.0).is_err());
        assert!(LogBase::new(-2.0).is_err());
    }

    #[test]
    fn average_of_zero_is_zero() {
        let d = and();
        assert_eq!(Measures::new(&d).average(|_| Ok(0.0)).unwrap().value, 0.0);
    }

    #[test]
    fn compensated_sum() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.total(), 2.0);
    }
}
