use rand::Rng;
use serde::{Deserialize, Serialize};

use super::engine::{run_trials, ViolationEstimate};
use crate::error::{Error, Result};
use crate::inputs::InputModel;
use crate::model::{Duration, RandomSeed};
use crate::timestamp::{stamp_raw, TwiSpec};

/// One input of a fan-out: the source event reaches the input's sender after
/// `delay` (action time for links, zero for sensors whose model already
/// includes `τ_s`) and is then registered after the input's own delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanOutInput {
    #[serde(default)]
    pub delay: Duration,
    pub model: InputModel,
}

/// A single event at `t = 0` perceived through `N` inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FanOutScenario {
    pub inputs: Vec<FanOutInput>,
}

impl FanOutScenario {
    pub fn new(inputs: Vec<FanOutInput>) -> Result<Self> {
        let s = Self { inputs };
        s.validate()?;
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::param("inputs", "a fan-out needs at least one input"));
        }
        self.inputs.iter().try_for_each(|i| i.model.validate())
    }

    /// Arrivals followed by the unit phase draw.
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R, arrivals: &mut Vec<f64>) -> f64 {
        arrivals.clear();
        arrivals.extend(self.inputs.iter().map(|i| i.delay.secs() + i.model.draw_delay(rng)));
        rng.random::<f64>()
    }
}

fn split(arrivals: &[f64], window: f64, omega: f64) -> bool {
    let first = arrivals[0];
    if window == 0.0 {
        arrivals[1..].iter().any(|&t| t != first)
    } else {
        let s0 = stamp_raw(first, window, omega);
        arrivals[1..].iter().any(|&t| stamp_raw(t, window, omega) != s0)
    }
}

/// Probability that the `N` perceptions of one event do not all share a stamp.
pub fn estimate_sim_violation(
    s: &FanOutScenario,
    twi: &TwiSpec,
    trials: u64,
    seed: RandomSeed,
) -> Result<ViolationEstimate> {
    s.validate()?;
    twi.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let w = twi.window.secs();
    let hits = run_trials(trials, seed, || 0u64, |acc, rng| {
        let mut arrivals = Vec::with_capacity(s.n());
        let u = s.draw(rng, &mut arrivals);
        *acc += u64::from(split(&arrivals, w, twi.offset_from_unit(u).secs()));
    });
    Ok(ViolationEstimate::from_counts(hits, trials, seed))
}
