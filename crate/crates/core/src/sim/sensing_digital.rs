//! A receiver with one synchronous (or asynchronous) sensor and one digital
//! link observing two causally related events.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::engine::{run_trials, ViolationEstimate};
use crate::error::{Error, Result};
use crate::inputs::{LinkSpec, SensorSpec};
use crate::model::{Duration, RandomSeed, TimePoint};
use crate::timestamp::{relate, Relation, TwiSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalDirection {
    /// A physical event is sensed by the receiver and, after `τ_a`, makes a
    /// sender transmit: `t_S = τ_s + φ_s + T_s`, `t_D = τ_a + T_AB`.
    PhysicalTriggersDigital,
    /// A sender transmits and, after `τ_a`, causes a physical event the
    /// receiver senses: `t_D = T_AB`, `t_S = τ_a + τ_s + φ_s + T_s`.
    DigitalTriggersPhysical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensingDigitalScenario {
    pub direction: CausalDirection,
    pub sensor: SensorSpec,
    pub link: LinkSpec,
    pub tau_a: Duration,
}

/// Registration times `(t_S, t_D)` of one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingDigitalDraw {
    pub t_sensing: TimePoint,
    pub t_digital: TimePoint,
}

impl SensingDigitalScenario {
    pub fn validate(&self) -> Result<()> {
        self.sensor.validate()?;
        self.link.validate()
    }

    /// Draws `T_AB`, then the sensor phase, then the unit window phase.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (SensingDigitalDraw, f64) {
        let t_ab = self.link.t_ab.draw(rng);
        let sensed = self.sensor.draw_detection(rng);
        let tau_a = self.tau_a.secs();
        let (t_s, t_d) = match self.direction {
            CausalDirection::PhysicalTriggersDigital => (sensed, tau_a + t_ab),
            CausalDirection::DigitalTriggersPhysical => (tau_a + sensed, t_ab),
        };
        let draw = SensingDigitalDraw {
            t_sensing: TimePoint::from_secs(t_s),
            t_digital: TimePoint::from_secs(t_d),
        };
        (draw, rng.random())
    }

    /// Whether the effect is stamped strictly before the cause.
    pub fn is_violation(&self, d: &SensingDigitalDraw, twi: &TwiSpec, omega: Duration) -> bool {
        let (cause, effect) = match self.direction {
            CausalDirection::PhysicalTriggersDigital => (d.t_sensing, d.t_digital),
            CausalDirection::DigitalTriggersPhysical => (d.t_digital, d.t_sensing),
        };
        relate(effect, cause, twi, omega) == Relation::HappenedBefore
    }
}

/// Monte-Carlo `Pr[V_c]` over the sensor phase, the link and the window phase.
pub fn estimate_sensing_digital_violation(
    s: &SensingDigitalScenario,
    twi: &TwiSpec,
    trials: u64,
    seed: RandomSeed,
) -> Result<ViolationEstimate> {
    s.validate()?;
    twi.validate()?;
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let hits = run_trials(trials, seed, || 0u64, |acc, rng| {
        let (d, u) = s.draw(rng);
        *acc += u64::from(s.is_violation(&d, twi, twi.offset_from_unit(u)));
    });
    Ok(ViolationEstimate::from_counts(hits, trials, seed))
}
