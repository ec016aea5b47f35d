//! Kelly betting on a race whose winner is the target, with predictors as
//! side-information wires.
//!
//! The gambler bets `b(t|s) = p(t|s)` on every horse, so one race returns
//! `log₂ p(t|s)·o(t)` bits of log-wealth; with fair odds `o(t) = 1/p(t)` this is
//! the pointwise mutual information `i(s;t)`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{to_f64, JointDistribution, Probability, Realisation, SourceEvent};
use crate::error::{Error, Result};
use crate::measures::{CompensatedSum, InfoValue, LogBase, Measures};

pub const RNG_ALGORITHM: &str = "ChaCha8";
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct RaceMarket {
    dist: JointDistribution,
    wire: Vec<usize>,
    /// Target values of every horse with positive probability, in support order.
    horses: Vec<(Vec<u32>, Probability)>,
    odds: Vec<Probability>,
}

impl RaceMarket {
    /// Fair odds `1/p(t)` and the listed predictors on the wire.
    pub fn fair(dist: JointDistribution, wire: &[usize]) -> Result<Self> {
        let horses = race(&dist)?;
        let odds = horses.iter().map(|(_, p)| p.recip()).collect();
        Self::assemble(dist, wire, horses, odds)
    }

    /// Given odds per horse (support order); the odds must have no track take.
    pub fn with_odds(
        dist: JointDistribution,
        wire: &[usize],
        odds: Vec<Probability>,
    ) -> Result<Self> {
        let market = Self::hypothetical(dist, wire, odds)?;
        let take: f64 = market.odds.iter().map(|o| to_f64(&o.recip())).sum();
        if (take - 1.0).abs() > IDENTITY_TOLERANCE {
            return Err(Error::InvalidMarket(format!(
                "Σ 1/o(t) = {take}, expected 1"
            )));
        }
        Ok(market)
    }

    /// Any positive odds, including ones a bookmaker could not offer.
    pub fn hypothetical(
        dist: JointDistribution,
        wire: &[usize],
        odds: Vec<Probability>,
    ) -> Result<Self> {
        let horses = race(&dist)?;
        if odds.len() != horses.len() {
            return Err(Error::InvalidMarket(format!(
                "{} odds for {} horses",
                odds.len(),
                horses.len()
            )));
        }
        if odds.iter().any(|o| *o <= Probability::zero()) {
            return Err(Error::InvalidMarket("odds must be positive".into()));
        }
        Self::assemble(dist, wire, horses, odds)
    }

    fn assemble(
        dist: JointDistribution,
        wire: &[usize],
        horses: Vec<(Vec<u32>, Probability)>,
        odds: Vec<Probability>,
    ) -> Result<Self> {
        let n = dist.n();
        let mut w = wire.to_vec();
        w.sort_unstable();
        w.dedup();
        if let Some(&i) = w.iter().find(|&&i| i >= n) {
            return Err(Error::UnknownVariable(format!("predictor {}", i + 1)));
        }
        Ok(Self {
            dist,
            wire: w,
            horses,
            odds,
        })
    }

    pub fn dist(&self) -> &JointDistribution {
        &self.dist
    }

    pub fn wire(&self) -> &[usize] {
        &self.wire
    }

    pub fn horses(&self) -> impl Iterator<Item = (&[u32], &Probability, &Probability)> {
        self.horses
            .iter()
            .zip(&self.odds)
            .map(|((t, p), o)| (t.as_slice(), p, o))
    }

    pub fn is_fair(&self) -> bool {
        self.horses
            .iter()
            .zip(&self.odds)
            .all(|((_, p), o)| (p * o).is_one())
    }

    fn odds_of(&self, t: &[u32]) -> Option<&Probability> {
        self.horses
            .iter()
            .position(|(h, _)| h == t)
            .map(|k| &self.odds[k])
    }

    fn wire_mask(&self) -> u64 {
        let schema = self.dist.schema();
        self.wire
            .iter()
            .fold(0, |m, &i| m | schema.predictor_bit(i))
    }

    /// `log₂ p(t|s)·o(t)` at a realisation.
    fn realised_return(&self, r: &Realisation) -> Result<f64> {
        let n = self.dist.n();
        let schema = self.dist.schema();
        let s = r.event(self.wire_mask());
        let st = r.event(self.wire_mask() | schema.target_mask());
        let ps = self.dist.probability(&s);
        let pst = self.dist.probability(&st);
        if pst.is_zero() {
            return Err(Error::ZeroProbability(schema.describe_event(&st)));
        }
        let o = self
            .odds_of(r.target_components(n))
            .ok_or_else(|| Error::ZeroProbability(schema.describe_event(&st)))?;
        Ok(LogBase::BITS.log_ratio(&(pst / ps * o)))
    }

    /// `W*(T) = Σ p(t) log₂ p(t)·o(t)`.
    pub fn optimal_doubling_rate(&self) -> InfoValue {
        let w = self
            .horses
            .iter()
            .zip(&self.odds)
            .map(|((_, p), o)| to_f64(p) * LogBase::BITS.log_ratio(&(p * o)))
            .collect::<CompensatedSum>()
            .total();
        InfoValue::new(w, LogBase::BITS)
    }

    /// `W*(T|S) = Σ p(s,t) log₂ p(t|s)·o(t)` with the wire as `S`.
    pub fn conditional_doubling_rate(&self) -> Result<InfoValue> {
        let mut sum = CompensatedSum::default();
        for r in self.dist.realisations() {
            sum.add(to_f64(r.probability()) * self.realised_return(r)?);
        }
        Ok(InfoValue::new(sum.total(), LogBase::BITS))
    }

    /// `I(S;T)` between the wire and the winner.
    pub fn wire_information(&self) -> Result<InfoValue> {
        if self.wire.is_empty() {
            return Ok(InfoValue::new(0.0, LogBase::BITS));
        }
        Measures::new(&self.dist).mutual_information(SourceEvent::new(&self.wire)?)
    }

    /// `ΔW = W*(T|S) − W*(T)`, checked against `I(S;T)`.
    pub fn value_of_side_information(&self) -> Result<InfoValue> {
        if self.wire.is_empty() {
            return Err(Error::MissingValue("side-information wire".into()));
        }
        if !self.is_fair() {
            return Err(Error::InvalidMarket(
                "side-information value needs fair odds".into(),
            ));
        }
        let dw = self.conditional_doubling_rate()?.value - self.optimal_doubling_rate().value;
        let mi = self.wire_information()?.value;
        if (dw - mi).abs() > IDENTITY_TOLERANCE {
            return Err(Error::IdentityViolated(format!(
                "ΔW = {dw} but I(S;T) = {mi}"
            )));
        }
        Ok(InfoValue::new(dw, LogBase::BITS))
    }

    fn find(&self, wire_values: &[u32], target: &[u32]) -> Result<&Realisation> {
        let n = self.dist.n();
        if wire_values.len() != self.wire.len() {
            return Err(Error::InvalidMarket(format!(
                "{} wire values for {} wired predictors",
                wire_values.len(),
                self.wire.len()
            )));
        }
        self.dist
            .realisations()
            .iter()
            .find(|r| {
                r.target_components(n) == target
                    && self
                        .wire
                        .iter()
                        .zip(wire_values)
                        .all(|(&i, &v)| r.predictor_events(n)[i] == v)
            })
            .ok_or_else(|| Error::ZeroProbability("wire message and winner".into()))
    }

    /// Log-return of one race with message `s` and winner `t`.
    pub fn pointwise_return(&self, wire_values: &[u32], target: &[u32]) -> Result<InfoValue> {
        let r = self.find(wire_values, target)?;
        Ok(InfoValue::new(self.realised_return(r)?, LogBase::BITS))
    }

    /// Chained bets on target components in `order`, each leg at fair odds
    /// `1/p(tᵢ|earlier legs)` and staked on `p(tᵢ|s, earlier legs)`.
    pub fn accumulator_log_return(
        &self,
        wire_values: &[u32],
        target: &[u32],
        order: &[usize],
    ) -> Result<AccumulatorReturn> {
        let schema = self.dist.schema();
        let m = schema.component_count();
        if order.is_empty() {
            return Err(Error::EmptySelection);
        }
        for (k, &j) in order.iter().enumerate() {
            if j >= m || order[..k].contains(&j) {
                return Err(Error::InvalidMarket(format!("bad leg order {order:?}")));
            }
        }
        let r = self.find(wire_values, target)?;
        let s = self.wire_mask();
        let prob = |mask: u64| self.dist.probability(&r.event(mask));
        let mut earlier = 0u64;
        let mut legs = Vec::with_capacity(order.len());
        for &j in order {
            let leg = schema.component_bit(j);
            let with_wire = prob(s | earlier | leg) / prob(s | earlier);
            let without = prob(earlier | leg) / prob(earlier);
            legs.push(LogBase::BITS.log_ratio(&(with_wire / without)));
            earlier |= leg;
        }
        let total = legs.iter().copied().collect::<CompensatedSum>().total();
        Ok(AccumulatorReturn { legs, total })
    }

    /// Kelly betting over `races` independent draws of `(s, t)`.
    pub fn simulate_races(&self, races: usize, seed: u64) -> Result<Simulation> {
        if races == 0 {
            return Err(Error::OutOfRange("race count must be at least 1".into()));
        }
        let rows = self.dist.realisations();
        let returns: Vec<f64> = rows
            .iter()
            .map(|r| self.realised_return(r))
            .collect::<Result<_>>()?;
        let mut cumulative = Vec::with_capacity(rows.len());
        let mut acc = 0.0;
        for r in rows {
            acc += to_f64(r.probability());
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut log_wealth = 0.0;
        let mut trajectory = Vec::with_capacity(races);
        for _ in 0..races {
            let u: f64 = rng.random::<f64>() * acc;
            let k = cumulative.partition_point(|&c| c <= u).min(rows.len() - 1);
            log_wealth += returns[k];
            trajectory.push(log_wealth);
        }
        let analytic = if self.wire.is_empty() {
            self.optimal_doubling_rate().value
        } else {
            self.conditional_doubling_rate()?.value
        };
        Ok(Simulation {
            algorithm: RNG_ALGORITHM,
            seed,
            races,
            analytic_rate: analytic,
            empirical_rate: log_wealth / races as f64,
            trajectory,
        })
    }

    /// One simulation per seed, run in parallel; results follow seed order.
    pub fn simulate_seeds(&self, races: usize, seeds: &[u64]) -> Result<Vec<Simulation>> {
        seeds
            .par_iter()
            .map(|&seed| self.simulate_races(races, seed))
            .collect()
    }
}

fn race(dist: &JointDistribution) -> Result<Vec<(Vec<u32>, Probability)>> {
    let n = dist.n();
    let schema = dist.schema();
    schema.require_target()?;
    let mut horses: Vec<(Vec<u32>, Probability)> = Vec::new();
    for r in dist.realisations() {
        let t = r.target_components(n);
        match horses.iter_mut().find(|(h, _)| h == t) {
            Some((_, p)) => *p += r.probability(),
            None => horses.push((t.to_vec(), r.probability().clone())),
        }
    }
    Ok(horses)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccumulatorReturn {
    pub legs: Vec<f64>,
    pub total: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Simulation {
    pub algorithm: &'static str,
    pub seed: u64,
    pub races: usize,
    pub analytic_rate: f64,
    pub empirical_rate: f64,
    /// Cumulative `log₂` wealth after each race.
    #[serde(skip)]
    pub trajectory: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectorySummary {
    pub final_log2_wealth: f64,
    pub min_log2_wealth: f64,
    pub max_log2_wealth: f64,
    /// Ten evenly spaced points of the trajectory.
    pub checkpoints: Vec<Checkpoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint {
    pub race: usize,
    pub log2_wealth: f64,
}

impl Simulation {
    pub fn summary(&self) -> TrajectorySummary {
        let t = &self.trajectory;
        let step = t.len().div_ceil(10).max(1);
        let at = |race: usize| Checkpoint {
            race,
            log2_wealth: t[race - 1],
        };
        let mut checkpoints: Vec<Checkpoint> = (step..=t.len()).step_by(step).map(at).collect();
        if checkpoints.last().map(|c| c.race) != Some(t.len()) {
            checkpoints.push(at(t.len()));
        }
        TrajectorySummary {
            final_log2_wealth: *t.last().unwrap_or(&0.0),
            min_log2_wealth: t.iter().copied().fold(0.0, f64::min),
            max_log2_wealth: t.iter().copied().fold(0.0, f64::max),
            checkpoints,
        }
    }
}

/// Wire predictors by name or 1-based position.
pub fn wire_indices(dist: &JointDistribution, names: &[&str]) -> Result<Vec<usize>> {
    let preds = dist.schema().predictors();
    names
        .iter()
        .map(|name| {
            preds
                .iter()
                .position(|v| v.name == *name)
                .or_else(|| {
                    name.parse::<usize>()
                        .ok()
                        .filter(|&i| i >= 1 && i <= preds.len())
                        .map(|i| i - 1)
                })
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::distribution::{ratio, DistributionBuilder};

    const TOL: f64 = 1e-12;

    fn uniform_race(k: usize) -> JointDistribution {
        let mut b = DistributionBuilder::new(&["s1"], "t");
        for i in 0..k {
            b = b.row(ratio(1, k as i64), &["0", &i.to_string()]);
        }
        b.build().unwrap()
    }

    #[test]
    fn fair_race_has_zero_rate() {
        let m = RaceMarket::fair(uniform_race(4), &[]).unwrap();
        assert_eq!(m.optimal_doubling_rate().value, 0.0);
        assert!(m.is_fair());
    }

    #[test]
    fn doubled_odds_give_one_bit() {
        let odds = vec![ratio(8, 1); 4];
        let m = RaceMarket::hypothetical(uniform_race(4), &[], odds.clone()).unwrap();
        assert!((m.optimal_doubling_rate().value - 1.0).abs() < TOL);
        assert!(RaceMarket::with_odds(uniform_race(4), &[], odds).is_err());
    }

    #[test]
    fn tbc_wire_doubles_and_quadruples() {
        let d = corpus::build("tbc", None).unwrap();
        let one = RaceMarket::fair(d.clone(), &[0]).unwrap();
        assert!((one.value_of_side_information().unwrap().value - 1.0).abs() < TOL);
        let both = RaceMarket::fair(d, &[0, 1]).unwrap();
        assert!((both.value_of_side_information().unwrap().value - 2.0).abs() < TOL);
        let r = one.pointwise_return(&[0], &[0, 0, 0]).unwrap().value;
        assert!((r - 1.0).abs() < TOL);
    }

    #[test]
    fn accumulator_orders_agree() {
        let d = corpus::build("tbc", None)
            .unwrap()
            .compose_targets(&["t1", "t3"])
            .unwrap();
        let m = RaceMarket::fair(d, &[0]).unwrap();
        let a = m.accumulator_log_return(&[0], &[0, 0], &[0, 1]).unwrap();
        let b = m.accumulator_log_return(&[0], &[0, 0], &[1, 0]).unwrap();
        assert_eq!(a.legs, vec![1.0, 0.0]);
        assert_eq!(b.legs, vec![0.0, 1.0]);
        assert!((a.total - b.total).abs() < TOL);
    }

    #[test]
    fn no_wire_keeps_wealth() {
        let m = RaceMarket::fair(corpus::build("and", None).unwrap(), &[]).unwrap();
        let sim = m.simulate_races(1000, 7).unwrap();
        assert!(sim.trajectory.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn simulation_is_deterministic() {
        let m = RaceMarket::fair(corpus::build("tbc", None).unwrap(), &[0]).unwrap();
        let a = m.simulate_races(500, 3).unwrap();
        let b = m.simulate_races(500, 3).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.summary().checkpoints.len(), 10);
    }

    #[test]
    fn missing_wire_is_an_error() {
        let m = RaceMarket::fair(corpus::build("xor", None).unwrap(), &[]).unwrap();
        assert!(matches!(
            m.value_of_side_information(),
            Err(Error::MissingValue(_))
        ));
        assert!(RaceMarket::fair(corpus::build("xor", None).unwrap(), &[5]).is_err());
    }
}
