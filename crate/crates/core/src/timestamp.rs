//! Timestamping with a Temporal Window of Integration (TWI).
//!
//! A receiver with window `W > 0` and phase `ω` assigns every registered
//! event the integer stamp `⌈(t − ω)/W⌉`. Windows are the left-open,
//! right-closed intervals `((k−1)W + ω, kW + ω]`, so a time exactly on an
//! edge belongs to the earlier window. `W = 0` means "no TWI": events are
//! ordered by their raw arrival times and are simultaneous only on an exact
//! tie.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Duration, PerceivedEvent, TimePoint};

/// How the window phase `ω` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetMode {
    Fixed(Duration),
    /// `ω ~ U[0, W)`, drawn once per trial and shared by all inputs.
    UniformRandom,
}

/// Window width and phase policy of a receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwiSpec {
    pub window: Duration,
    pub offset: OffsetMode,
}

impl TwiSpec {
    /// Raw-time ordering, no window.
    pub fn none() -> Self {
        Self {
            window: Duration::ZERO,
            offset: OffsetMode::Fixed(Duration::ZERO),
        }
    }

    pub fn fixed(window: Duration, offset: Duration) -> Result<Self> {
        let spec = Self {
            window,
            offset: OffsetMode::Fixed(offset),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Window with a uniformly random phase. `W = 0` collapses to [`TwiSpec::none`].
    pub fn uniform(window: Duration) -> Self {
        if window.secs() == 0.0 {
            Self::none()
        } else {
            Self {
                window,
                offset: OffsetMode::UniformRandom,
            }
        }
    }

    pub fn is_raw(&self) -> bool {
        self.window.secs() == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.window.secs();
        match self.offset {
            OffsetMode::Fixed(o) if w > 0.0 && o.secs() >= w => Err(Error::param(
                "offset",
                format!("phase {o} must lie in [0, W) with W = {}", self.window),
            )),
            OffsetMode::Fixed(o) if w == 0.0 && o.secs() != 0.0 => Err(Error::param(
                "offset",
                "a receiver without TWI has no phase; use a zero offset",
            )),
            OffsetMode::UniformRandom if w == 0.0 => Err(Error::param(
                "offset",
                "a random phase needs W > 0",
            )),
            _ => Ok(()),
        }
    }

    /// Resolves the phase for one trial. Draws from `rng` only for a random phase.
    pub fn resolve_offset<R: Rng + ?Sized>(&self, rng: &mut R) -> Duration {
        match self.offset {
            OffsetMode::Fixed(o) => o,
            OffsetMode::UniformRandom => self.offset_from_unit(rng.random()),
        }
    }

    /// Maps a unit draw `u ∈ [0,1)` onto the phase range. Reusing `u` across
    /// windows gives common random numbers in a W sweep.
    pub fn offset_from_unit(&self, u: f64) -> Duration {
        match self.offset {
            OffsetMode::Fixed(o) => o,
            OffsetMode::UniformRandom => Duration::from_secs(u * self.window.secs()),
        }
    }
}

/// Order of two events as perceived by one receiver. Two events at the same
/// receiver are never concurrent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    HappenedBefore,
    SimultaneousWith,
    HappenedAfter,
}

impl Relation {
    pub fn inverse(self) -> Relation {
        match self {
            Relation::HappenedBefore => Relation::HappenedAfter,
            Relation::SimultaneousWith => Relation::SimultaneousWith,
            Relation::HappenedAfter => Relation::HappenedBefore,
        }
    }
}

impl From<Ordering> for Relation {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => Relation::HappenedBefore,
            Ordering::Equal => Relation::SimultaneousWith,
            Ordering::Greater => Relation::HappenedAfter,
        }
    }
}

#[inline]
pub(crate) fn stamp_raw(t: f64, w: f64, omega: f64) -> i64 {
    ((t - omega) / w).ceil() as i64
}

/// TWI timestamp `⌈(t − ω)/W⌉`.
pub fn stamp(t: TimePoint, window: Duration, omega: Duration) -> Result<i64> {
    let w = window.secs();
    if w <= 0.0 {
        return Err(Error::domain(
            "stamp needs W > 0; compare raw times when there is no TWI",
        ));
    }
    if omega.secs() >= w {
        return Err(Error::domain(format!(
            "phase {omega} must lie in [0, W) with W = {window}"
        )));
    }
    Ok(stamp_raw(t.secs(), w, omega.secs()))
}

/// Relation between two arrivals under a resolved phase `omega`.
pub fn relate(t_i: TimePoint, t_j: TimePoint, twi: &TwiSpec, omega: Duration) -> Relation {
    let w = twi.window.secs();
    if w == 0.0 {
        // total_cmp is fine: time points are finite and nonnegative.
        t_i.secs().total_cmp(&t_j.secs()).into()
    } else {
        let si = stamp_raw(t_i.secs(), w, omega.secs());
        let sj = stamp_raw(t_j.secs(), w, omega.secs());
        si.cmp(&sj).into()
    }
}

/// Causality violation at one receiver: `cause` truly precedes `effect`, yet
/// the effect is perceived strictly earlier. A shared window is not a violation.
pub fn detect_causality_violation(
    cause: &PerceivedEvent,
    effect: &PerceivedEvent,
    twi: &TwiSpec,
    omega: Duration,
) -> bool {
    relate(effect.arrival, cause.arrival, twi, omega) == Relation::HappenedBefore
}

/// Simultaneity violation: arrivals stemming from one event do not all share
/// a stamp (or, without TWI, are not all exactly equal).
pub fn detect_simultaneity_violation(
    arrivals: &[TimePoint],
    twi: &TwiSpec,
    omega: Duration,
) -> Result<bool> {
    let (first, rest) = arrivals
        .split_first()
        .ok_or_else(|| Error::domain("simultaneity needs at least one arrival"))?;
    Ok(rest
        .iter()
        .any(|&t| relate(*first, t, twi, omega) != Relation::SimultaneousWith))
}

/// Temporal-resolution penalty `W / T0` of a window relative to an input's
/// minimal inter-event time `T0`.
pub fn event_throughput_loss(window: Duration, min_inter_event: Duration) -> Result<f64> {
    if min_inter_event.secs() <= 0.0 {
        return Err(Error::domain("minimal inter-event time must be positive"));
    }
    Ok(window.secs() / min_inter_event.secs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EventKind;
    use proptest::prelude::*;

    fn ms(x: f64) -> TimePoint {
        TimePoint::from_millis(x)
    }
    fn dms(x: f64) -> Duration {
        Duration::from_millis(x)
    }

    fn perceived(arrival: f64, idx: usize) -> PerceivedEvent {
        PerceivedEvent::new(0, EventKind::Digital, TimePoint::from_secs(arrival), idx, TimePoint::ZERO)
            .unwrap()
    }

    #[test]
    fn stamp_examples() {
        assert_eq!(stamp(ms(5.0), dms(10.0), Duration::ZERO).unwrap(), 1);
        assert_eq!(stamp(ms(10.0), dms(10.0), Duration::ZERO).unwrap(), 1);
        assert_eq!(stamp(ms(10.001), dms(10.0), Duration::ZERO).unwrap(), 2);
        assert_eq!(stamp(TimePoint::ZERO, dms(10.0), Duration::ZERO).unwrap(), 0);
        assert!(matches!(
            stamp(ms(1.0), Duration::ZERO, Duration::ZERO),
            Err(Error::Domain(_))
        ));
        assert!(stamp(ms(1.0), dms(10.0), dms(10.0)).is_err());
    }

    #[test]
    fn relate_examples() {
        let t = TimePoint::from_secs;
        let w10 = TwiSpec::fixed(Duration::from_secs(10.0), Duration::ZERO).unwrap();
        assert_eq!(relate(t(3.0), t(7.0), &w10, Duration::ZERO), Relation::SimultaneousWith);
        assert_eq!(relate(t(3.0), t(17.0), &w10, Duration::ZERO), Relation::HappenedBefore);
        assert_eq!(relate(t(3.0), t(7.0), &TwiSpec::none(), Duration::ZERO), Relation::HappenedBefore);
        assert_eq!(relate(t(4.0), t(4.0), &TwiSpec::none(), Duration::ZERO), Relation::SimultaneousWith);
    }

    #[test]
    fn causality_examples() {
        let w10 = TwiSpec::fixed(Duration::from_secs(10.0), Duration::ZERO).unwrap();
        let z = Duration::ZERO;
        assert!(detect_causality_violation(&perceived(5.0, 0), &perceived(3.0, 1), &TwiSpec::none(), z));
        assert!(!detect_causality_violation(&perceived(5.0, 0), &perceived(3.0, 1), &w10, z));
        assert!(detect_causality_violation(&perceived(12.0, 0), &perceived(8.0, 1), &w10, z));
        assert!(!detect_causality_violation(&perceived(3.0, 0), &perceived(5.0, 1), &TwiSpec::none(), z));
    }

    #[test]
    fn simultaneity_examples() {
        let w = TwiSpec::fixed(dms(10.0), Duration::ZERO).unwrap();
        let z = Duration::ZERO;
        assert!(!detect_simultaneity_violation(&[ms(1.0), ms(2.0), ms(6.0)], &w, z).unwrap());
        assert!(detect_simultaneity_violation(&[ms(1.0), ms(2.0), ms(11.0)], &w, z).unwrap());
        let four = TimePoint::from_secs(4.0);
        assert!(!detect_simultaneity_violation(&[four; 3], &TwiSpec::none(), z).unwrap());
        assert!(detect_simultaneity_violation(&[], &w, z).is_err());
    }

    #[test]
    fn throughput_loss_examples() {
        assert_eq!(event_throughput_loss(dms(30.0), dms(10.0)).unwrap(), 3.0);
        assert_eq!(event_throughput_loss(Duration::ZERO, dms(10.0)).unwrap(), 0.0);
        assert!((event_throughput_loss(dms(54.0), dms(10.0)).unwrap() - 5.4).abs() < 1e-12);
        assert!(event_throughput_loss(dms(54.0), Duration::ZERO).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(TwiSpec::fixed(Duration::ZERO, dms(1.0)).is_err());
        assert!(TwiSpec::fixed(dms(10.0), dms(10.0)).is_err());
        assert!(TwiSpec::fixed(dms(10.0), dms(9.0)).is_ok());
        assert_eq!(TwiSpec::uniform(Duration::ZERO), TwiSpec::none());
    }

    #[test]
    fn phase_sweep_matches_spread_over_window() {
        // Fraction of phases that split {1, 2, 6} over a 10-wide window.
        let arrivals = [1.0, 2.0, 6.0].map(TimePoint::from_secs);
        let w = Duration::from_secs(10.0);
        let spec = TwiSpec::uniform(w);
        let n = 100_000;
        let hits = (0..n)
            .filter(|&k| {
                let omega = spec.offset_from_unit((k as f64 + 0.5) / n as f64);
                detect_simultaneity_violation(&arrivals, &spec, omega).unwrap()
            })
            .count();
        assert!((hits as f64 / n as f64 - 0.5).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn stamp_is_monotone(a in 0.0f64..1e3, b in 0.0f64..1e3, w in 1e-3f64..50.0, u in 0.0f64..1.0) {
            let omega = Duration::from_secs(u * w * 0.999);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let w = Duration::from_secs(w);
            prop_assert!(stamp(TimePoint::from_secs(lo), w, omega)? <= stamp(TimePoint::from_secs(hi), w, omega)?);
        }

        #[test]
        fn shift_by_whole_windows(ticks in proptest::collection::vec(0u32..4096, 1..8),
                                  wt in 1u32..64, ot in 0u32..64, k in 0i64..16) {
            // Dyadic grid keeps every operation exact.
            let unit = 1.0 / 1024.0;
            let w = wt as f64 * unit;
            let omega = (ot % wt) as f64 * unit;
            let spec = TwiSpec::fixed(Duration::from_secs(w), Duration::from_secs(omega)).unwrap();
            let o = Duration::from_secs(omega);
            let ts: Vec<f64> = ticks.iter().map(|&t| t as f64 * unit).collect();
            for (i, &a) in ts.iter().enumerate() {
                let sa = stamp(TimePoint::from_secs(a), spec.window, o)?;
                let shifted = a + k as f64 * w;
                prop_assert_eq!(stamp(TimePoint::from_secs(shifted), spec.window, o)?, sa + k);
                for &b in &ts[i..] {
                    let r = relate(TimePoint::from_secs(a), TimePoint::from_secs(b), &spec, o);
                    let rs = relate(
                        TimePoint::from_secs(a + k as f64 * w),
                        TimePoint::from_secs(b + k as f64 * w),
                        &spec,
                        o,
                    );
                    prop_assert_eq!(r, rs);
                }
            }
        }

        #[test]
        fn relation_is_antisymmetric(a in 0.0f64..100.0, b in 0.0f64..100.0, w in 0.0f64..20.0, u in 0.0f64..1.0) {
            let spec = TwiSpec::uniform(Duration::from_secs(w));
            let omega = spec.offset_from_unit(u);
            let (ta, tb) = (TimePoint::from_secs(a), TimePoint::from_secs(b));
            let r = relate(ta, tb, &spec, omega);
            prop_assert_eq!(relate(tb, ta, &spec, omega), r.inverse());
            if r == Relation::SimultaneousWith {
                prop_assert!(!detect_causality_violation(&perceived(a, 0), &perceived(b, 1), &spec, omega));
                prop_assert!(!detect_causality_violation(&perceived(b, 0), &perceived(a, 1), &spec, omega));
            }
        }
    }
}
