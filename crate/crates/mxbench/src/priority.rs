//! Error-proportional priority sampling for training loops.
//!
//! Units (examples, or classes of examples) carry an exponential moving
//! average of observed error. Batches are drawn with replacement with
//! probability proportional to that average, floored so no unit starves.
//! Units never updated inherit the largest average seen so far, which keeps
//! them attractive until measured; before any update the sampler is uniform.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What carries an error average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorityMode {
    /// Every example has its own average.
    PerExample,
    /// Examples share their class's average; a draw picks a class by weight,
    /// then a uniform member, so class mass splits equally among members.
    PerClass,
}

/// Lower bound on effective sampling weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum FloorSpec {
    Absolute(f64),
    /// Floor at this fraction of the mean raw weight.
    MeanFraction(f64),
}

impl Default for FloorSpec {
    fn default() -> Self {
        FloorSpec::MeanFraction(1e-3)
    }
}

impl FloorSpec {
    fn validate(&self) -> Result<()> {
        let v = match self {
            FloorSpec::Absolute(v) | FloorSpec::MeanFraction(v) => *v,
        };
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::invalid(format!("floor must be finite and >= 0, got {v}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointState {
    alpha: f64,
    mode: PriorityMode,
    floor: FloorSpec,
    class_of: Vec<usize>,
    ewma: Vec<Option<f64>>,
}

#[derive(Debug, Clone)]
pub struct PrioritySampler {
    alpha: f64,
    mode: PriorityMode,
    floor: FloorSpec,
    /// Example index to unit index. Identity in per-example mode.
    class_of: Vec<usize>,
    /// Unit index to member example indices.
    members: Vec<Vec<usize>>,
    ewma: Vec<Option<f64>>,
}

impl PrioritySampler {
    pub fn per_example(n_examples: usize, alpha: f64, floor: FloorSpec) -> Result<Self> {
        Self::build(
            (0..n_examples).collect(),
            PriorityMode::PerExample,
            alpha,
            floor,
        )
    }

    /// `class_of[i]` is the class of example i; classes must be contiguous
    /// 0..k and each must have at least one member.
    pub fn per_class(class_of: Vec<usize>, alpha: f64, floor: FloorSpec) -> Result<Self> {
        Self::build(class_of, PriorityMode::PerClass, alpha, floor)
    }

    fn build(
        class_of: Vec<usize>,
        mode: PriorityMode,
        alpha: f64,
        floor: FloorSpec,
    ) -> Result<Self> {
        if class_of.is_empty() {
            return Err(Error::invalid("sampler needs at least one example"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        floor.validate()?;
        let units = class_of.iter().max().unwrap() + 1;
        let mut members = vec![Vec::new(); units];
        for (example, &unit) in class_of.iter().enumerate() {
            members[unit].push(example);
        }
        if let Some(empty) = members.iter().position(Vec::is_empty) {
            return Err(Error::invalid(format!("class {empty} has no members")));
        }
        Ok(PrioritySampler {
            alpha,
            mode,
            floor,
            class_of,
            members,
            ewma: vec![None; units],
        })
    }

    pub fn n_examples(&self) -> usize {
        self.class_of.len()
    }

    pub fn n_units(&self) -> usize {
        self.members.len()
    }

    pub fn ewma(&self, unit: usize) -> Option<f64> {
        self.ewma[unit]
    }

    /// Pins a unit's average, as if it had a measurement history.
    pub fn set_ewma(&mut self, unit: usize, value: f64) -> Result<()> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::invalid(format!("ewma must be finite and >= 0, got {value}")));
        }
        self.ewma[unit] = Some(value);
        Ok(())
    }

    /// Folds one observed error into a unit's average. The first observation
    /// replaces the unset average instead of blending with it.
    pub fn update(&mut self, unit: usize, err: f64) -> Result<()> {
        if unit >= self.ewma.len() {
            return Err(Error::invalid(format!("unit {unit} out of range")));
        }
        if !(err >= 0.0 && err.is_finite()) {
            return Err(Error::invalid(format!("error must be finite and >= 0, got {err}")));
        }
        self.ewma[unit] = Some(match self.ewma[unit] {
            None => err,
            Some(old) => self.alpha * err + (1.0 - self.alpha) * old,
        });
        Ok(())
    }

    /// Routes an example's error to the unit that owns it.
    pub fn update_example(&mut self, example: usize, err: f64) -> Result<()> {
        let &unit = self
            .class_of
            .get(example)
            .ok_or_else(|| Error::invalid(format!("example {example} out of range")))?;
        self.update(unit, err)
    }

    /// Raw per-unit weights: unmeasured units borrow the largest measured
    /// average; a sampler with no measurements at all is uniform.
    fn raw_weights(&self) -> Vec<f64> {
        let max_seen = self
            .ewma
            .iter()
            .flatten()
            .fold(None, |acc: Option<f64>, &w| Some(acc.map_or(w, |a| a.max(w))));
        match max_seen {
            None => vec![1.0; self.ewma.len()],
            Some(m) => self.ewma.iter().map(|e| e.unwrap_or(m)).collect(),
        }
    }

    /// Floored weights actually used for sampling.
    pub fn effective_weights(&self) -> Vec<f64> {
        let raw = self.raw_weights();
        let floor = match self.floor {
            FloorSpec::Absolute(v) => v,
            FloorSpec::MeanFraction(frac) => {
                frac * raw.iter().sum::<f64>() / raw.len() as f64
            }
        };
        let floored: Vec<f64> = raw.iter().map(|&w| w.max(floor)).collect();
        if floored.iter().sum::<f64>() > 0.0 {
            floored
        } else {
            // every average is zero and so is the floor: degenerate, uniform
            vec![1.0; floored.len()]
        }
    }

    /// Exact per-example sampling probabilities.
    pub fn probabilities(&self) -> Vec<f64> {
        let weights = self.effective_weights();
        let total: f64 = weights.iter().sum();
        match self.mode {
            PriorityMode::PerExample => weights.iter().map(|w| w / total).collect(),
            PriorityMode::PerClass => self
                .class_of
                .iter()
                .map(|&unit| weights[unit] / total / self.members[unit].len() as f64)
                .collect(),
        }
    }

    /// Draws `batch` example indices with replacement.
    pub fn sample_batch(&self, batch: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
        let weights = self.effective_weights();
        let dist = WeightedIndex::new(&weights)
            .map_err(|e| Error::invalid(format!("bad weights: {e}")))?;
        let mut out = Vec::with_capacity(batch);
        for _ in 0..batch {
            let unit = dist.sample(rng);
            let example = match self.mode {
                PriorityMode::PerExample => unit,
                PriorityMode::PerClass => {
                    let members = &self.members[unit];
                    members[rng.random_range(0..members.len())]
                }
            };
            out.push(example);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String> {
        let state = CheckpointState {
            alpha: self.alpha,
            mode: self.mode,
            floor: self.floor,
            class_of: self.class_of.clone(),
            ewma: self.ewma.clone(),
        };
        Ok(serde_json::to_string_pretty(&state)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let state: CheckpointState = serde_json::from_str(text)?;
        let mut sampler = Self::build(state.class_of, state.mode, state.alpha, state.floor)?;
        if state.ewma.len() != sampler.ewma.len() {
            return Err(Error::parse(format!(
                "checkpoint has {} averages for {} units",
                state.ewma.len(),
                sampler.ewma.len()
            )));
        }
        for w in state.ewma.iter().flatten() {
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(Error::parse(format!("checkpoint ewma {w} invalid")));
            }
        }
        sampler.ewma = state.ewma;
        Ok(sampler)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ewma_blends_history_once_initialized() {
        let mut s = PrioritySampler::per_example(1, 0.5, FloorSpec::Absolute(0.0)).unwrap();
        s.set_ewma(0, 0.0).unwrap();
        s.update(0, 0.0).unwrap();
        assert_eq!(s.ewma(0), Some(0.0));
        s.update(0, 4.0).unwrap();
        assert_eq!(s.ewma(0), Some(2.0));
    }

    #[test]
    fn first_update_replaces_an_unset_average() {
        let mut s = PrioritySampler::per_example(2, 0.1, FloorSpec::default()).unwrap();
        s.update(0, 5.0).unwrap();
        assert_eq!(s.ewma(0), Some(5.0), "no blending with a phantom zero");
        s.update(0, 5.0).unwrap();
        assert_eq!(s.ewma(0), Some(5.0));
        assert_eq!(s.ewma(1), None);
    }

    #[test]
    fn unmeasured_units_borrow_the_maximum_average()  {
        let mut s = PrioritySampler::per_example(3, 0.5, FloorSpec::Absolute(0.0)).unwrap();
        s.update(0, 2.0).unwrap();
        s.update(1, 6.0).unwrap();
        let w = s.effective_weights();
        assert_eq!(w, vec![2.0, 6.0, 6.0]);
    }

    #[test]
    fn fresh_sampler_is_uniform_by_chi_square() {
        let k = 20;
        let draws = 100_000usize;
        let s = PrioritySampler::per_example(k, 0.5, FloorSpec::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let batch = s.sample_batch(draws, &mut rng).unwrap();
        let mut counts = vec![0usize; k];
        for i in batch {
            counts[i] += 1;
        }
        let expected = draws as f64 / k as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // chi2(19): mean 19, sd sqrt(38); 4 sigma above the mean
        let bound = 19.0 + 4.0 * 38.0f64.sqrt();
        assert!(chi2 < bound, "chi2 = {chi2}, bound = {bound}");
    }

    #[test]
    fn sampling_frequencies_track_weights() {
        let mut s = PrioritySampler::per_example(3, 1.0, FloorSpec::Absolute(0.0)).unwrap();
        s.update(0, 1.0).unwrap();
        s.update(1, 2.0).unwrap();
        s.update(2, 7.0).unwrap();
        let probs = s.probabilities();
        assert!((probs[0] - 0.1).abs() < 1e-12);
        assert!((probs[1] - 0.2).abs() < 1e-12);
        assert!((probs[2] - 0.7).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let draws = 50_000usize;
        let batch = s.sample_batch(draws, &mut rng).unwrap();
        let mut counts = [0usize; 3];
        for i in batch {
            counts[i] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let expect = probs[i] * draws as f64;
            let sigma = (expect * (1.0 - probs[i])).sqrt();
            assert!(
                (c as f64 - expect).abs() < 5.0 * sigma,
                "unit {i}: {c} vs {expect}"
            );
        }
    }

    #[test]
    fn per_class_splits_mass_equally_among_members() {
        let mut s =
            PrioritySampler::per_class(vec![0, 0, 1], 1.0, FloorSpec::Absolute(0.0)).unwrap();
        s.update(0, 3.0).unwrap();
        s.update(1, 3.0).unwrap();
        let probs = s.probabilities();
        assert!((probs[0] - 0.25).abs() < 1e-12);
        assert!((probs[1] - 0.25).abs() < 1e-12);
        assert!((probs[2] - 0.5).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 40_000usize;
        let batch = s.sample_batch(draws, &mut rng).unwrap();
        let mut counts = [0usize; 3];
        for i in batch {
            counts[i] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let expect = probs[i] * draws as f64;
            let sigma = (expect * (1.0 - probs[i])).sqrt();
            assert!((c as f64 - expect).abs() < 5.0 * sigma, "example {i}: {c}");
        }
    }

    #[test]
    fn update_example_routes_to_the_owning_class() {
        let mut s =
            PrioritySampler::per_class(vec![0, 0, 1], 0.5, FloorSpec::default()).unwrap();
        s.update_example(1, 4.0).unwrap();
        assert_eq!(s.ewma(0), Some(4.0));
        assert_eq!(s.ewma(1), None);
        assert!(s.update_example(9, 1.0).is_err());
    }

    #[test]
    fn floors_keep_low_error_units_alive() {
        let mut s = PrioritySampler::per_example(2, 1.0, FloorSpec::Absolute(0.5)).unwrap();
        s.update(0, 0.0).unwrap();
        s.update(1, 9.5).unwrap();
        let probs = s.probabilities();
        assert!((probs[0] - 0.05).abs() < 1e-12);

        let mut s = PrioritySampler::per_example(2, 1.0, FloorSpec::MeanFraction(0.1)).unwrap();
        s.update(0, 0.0).unwrap();
        s.update(1, 10.0).unwrap();
        // mean raw weight 5, floor 0.5
        let w = s.effective_weights();
        assert_eq!(w, vec![0.5, 10.0]);
    }

    #[test]
    fn probability_is_monotone_in_a_units_error() {
        for floor in [FloorSpec::Absolute(0.2), FloorSpec::MeanFraction(0.05)] {
            let mut prev = 0.0;
            for err in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
                let mut s = PrioritySampler::per_example(4, 1.0, floor).unwrap();
                s.update(0, err).unwrap();
                s.update(1, 1.0).unwrap();
                s.update(2, 2.0).unwrap();
                s.update(3, 3.0).unwrap();
                let p = s.probabilities()[0];
                assert!(
                    p >= prev - 1e-15,
                    "floor {floor:?}: p({err}) = {p} < {prev}"
                );
                prev = p;
            }
        }
    }

    #[test]
    fn all_zero_errors_fall_back_to_uniform() {
        let mut s = PrioritySampler::per_example(3, 0.5, FloorSpec::MeanFraction(1e-3)).unwrap();
        for i in 0..3 {
            s.update(i, 0.0).unwrap();
        }
        let probs = s.probabilities();
        for p in probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn checkpoint_round_trips_and_resumes_identically() {
        let mut s =
            PrioritySampler::per_class(vec![0, 1, 1, 2], 0.3, FloorSpec::MeanFraction(0.01))
                .unwrap();
        s.update(0, 1.5).unwrap();
        s.update(2, 0.25).unwrap();
        let json = s.to_json().unwrap();
        let restored = PrioritySampler::from_json(&json).unwrap();
        assert_eq!(restored.probabilities(), s.probabilities());
        let mut rng_a = ChaCha8Rng::seed_from_u64(8);
        let mut rng_b = ChaCha8Rng::seed_from_u64(8);
        assert_eq!(
            s.sample_batch(100, &mut rng_a).unwrap(),
            restored.sample_batch(100, &mut rng_b).unwrap()
        );
        assert!(PrioritySampler::from_json("{}").is_err());
    }

    #[test]
    fn construction_validates_inputs() {
        assert!(PrioritySampler::per_example(0, 0.5, FloorSpec::default()).is_err());
        assert!(PrioritySampler::per_example(2, 0.0, FloorSpec::default()).is_err());
        assert!(PrioritySampler::per_example(2, 1.5, FloorSpec::default()).is_err());
        assert!(PrioritySampler::per_example(2, 0.5, FloorSpec::Absolute(-1.0)).is_err());
        // class 1 missing
        assert!(PrioritySampler::per_class(vec![0, 2], 0.5, FloorSpec::default()).is_err());
        let mut s = PrioritySampler::per_example(2, 0.5, FloorSpec::default()).unwrap();
        assert!(s.update(0, -1.0).is_err());
        assert!(s.update(0, f64::NAN).is_err());
        assert!(s.update(5, 1.0).is_err());
    }
}
