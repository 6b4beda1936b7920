//! Shared domain types: time values, event kinds, transmission-time
//! distributions and reproducible per-trial random streams.
//!
//! Time is continuous and measured in seconds (`f64`). Slot quantization is a
//! separate concern handled by [`crate::planner`].

use std::fmt;
use std::ops::{Add, Mul, Sub};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_seconds(name: &'static str, secs: f64) -> Result<f64> {
    if !secs.is_finite() {
        return Err(Error::param(name, format!("{secs} is not finite")));
    }
    if secs < 0.0 {
        return Err(Error::param(name, format!("{secs} is negative")));
    }
    Ok(secs)
}

macro_rules! seconds_newtype {
    ($(#[$meta:meta])* $name:ident, $label:literal) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
        #[serde(try_from = "f64", into = "f64")]
        pub struct $name(f64);

        impl $name {
            pub const ZERO: Self = Self(0.0);

            /// Panics if `secs` is negative or not finite.
            pub fn from_secs(secs: f64) -> Self {
                Self::try_from_secs(secs).unwrap_or_else(|e| panic!("{e}"))
            }

            pub fn try_from_secs(secs: f64) -> Result<Self> {
                check_seconds($label, secs).map(Self)
            }

            pub fn from_millis(ms: f64) -> Self {
                Self::from_secs(ms * 1e-3)
            }

            pub fn from_micros(us: f64) -> Self {
                Self::from_secs(us * 1e-6)
            }

            #[inline]
            pub fn secs(self) -> f64 {
                self.0
            }

            #[inline]
            pub fn millis(self) -> f64 {
                self.0 * 1e3
            }
        }

        impl TryFrom<f64> for $name {
            type Error = Error;
            fn try_from(secs: f64) -> Result<Self> {
                Self::try_from_secs(secs)
            }
        }

        impl From<$name> for f64 {
            fn from(v: $name) -> f64 {
                v.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{} s", self.0)
            }
        }
    };
}

seconds_newtype!(
    /// An instant on the receiver's continuous time axis, in seconds.
    TimePoint,
    "time point"
);
seconds_newtype!(
    /// A nonnegative span of time, in seconds.
    Duration,
    "duration"
);

impl Add<Duration> for TimePoint {
    type Output = TimePoint;
    fn add(self, rhs: Duration) -> TimePoint {
        TimePoint(self.0 + rhs.0)
    }
}

impl Add for Duration {
    type Output = Duration;
    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0 + rhs.0)
    }
}

impl Mul<f64> for Duration {
    type Output = Duration;
    fn mul(self, k: f64) -> Duration {
        Duration::from_secs(self.0 * k)
    }
}

/// Signed difference in seconds.
impl Sub for TimePoint {
    type Output = f64;
    fn sub(self, rhs: TimePoint) -> f64 {
        self.0 - rhs.0
    }
}

/// The three event types a perceptive receiver deals with. Actuation is not modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Physical,
    Sensing,
    Digital,
}

/// An event as registered by a digital receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceivedEvent {
    pub input_id: u32,
    pub kind: EventKind,
    pub arrival: TimePoint,
    /// Index of the ground-truth event that caused this perception.
    pub source_index: usize,
}

impl PerceivedEvent {
    /// `source_time` is the occurrence time of the causing event; perception
    /// cannot precede it.
    pub fn new(
        input_id: u32,
        kind: EventKind,
        arrival: TimePoint,
        source_index: usize,
        source_time: TimePoint,
    ) -> Result<Self> {
        if kind == EventKind::Physical {
            return Err(Error::param(
                "kind",
                "perceived events are sensing or digital, never physical",
            ));
        }
        if arrival < source_time {
            return Err(Error::param(
                "arrival",
                format!("arrival {arrival} precedes its source at {source_time}"),
            ));
        }
        Ok(Self {
            input_id,
            kind,
            arrival,
            source_index,
        })
    }
}

/// Support `[lower, upper]` of a transmission-time distribution. `upper` is
/// `None` for unbounded tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lower: Duration,
    pub upper: Option<Duration>,
}

impl Support {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.lower.secs() && self.upper.is_none_or(|u| t <= u.secs())
    }
}

/// Distribution of a digital transmission time `T`, all parameters in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TransmissionTimeModel {
    Constant { value: f64 },
    Uniform { low: f64, high: f64 },
    /// `shift + Exp(rate)`.
    ShiftedExponential { shift: f64, rate: f64 },
    /// `low` with probability `p_low`, otherwise `high`.
    TwoPoint { low: f64, high: f64, p_low: f64 },
    /// Replay of measured values; draws uniformly from the list.
    Empirical { samples: Vec<f64> },
}

impl TransmissionTimeModel {
    pub fn constant(value: f64) -> Self {
        Self::Constant { value }
    }

    pub fn uniform(low: f64, high: f64) -> Self {
        Self::Uniform { low, high }
    }

    pub fn exponential(rate: f64) -> Self {
        Self::ShiftedExponential { shift: 0.0, rate }
    }

    pub fn shifted_exponential(shift: f64, rate: f64) -> Self {
        Self::ShiftedExponential { shift, rate }
    }

    pub fn two_point(low: f64, high: f64, p_low: f64) -> Self {
        Self::TwoPoint { low, high, p_low }
    }

    pub fn empirical(samples: Vec<f64>) -> Self {
        Self::Empirical { samples }
    }

    /// Short tag used in result tables.
    pub fn tag(&self) -> String {
        match self {
            Self::Constant { value } => format!("const({value})"),
            Self::Uniform { low, high } => format!("uniform({low};{high})"),
            Self::ShiftedExponential { shift, rate } => format!("sexp({shift};{rate})"),
            Self::TwoPoint { low, high, p_low } => format!("twopoint({low};{high};{p_low})"),
            Self::Empirical { samples } => format!("empirical(n={})", samples.len()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { value } => {
                check_seconds("value", value)?;
            }
            Self::Uniform { low, high } => {
                check_seconds("low", low)?;
                check_seconds("high", high)?;
                if low > high {
                    return Err(Error::param("low", format!("{low} > high {high}")));
                }
            }
            Self::ShiftedExponential { shift, rate } => {
                check_seconds("shift", shift)?;
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::param("rate", format!("{rate} must be positive")));
                }
            }
            Self::TwoPoint { low, high, p_low } => {
                check_seconds("low", low)?;
                check_seconds("high", high)?;
                if low > high {
                    return Err(Error::param("low", format!("{low} > high {high}")));
                }
                if !(0.0..=1.0).contains(&p_low) {
                    return Err(Error::param("p_low", format!("{p_low} not in [0, 1]")));
                }
            }
            Self::Empirical { ref samples } => {
                if samples.is_empty() {
                    return Err(Error::param("samples", "empirical model needs samples"));
                }
                for &s in samples {
                    check_seconds("samples", s)?;
                }
            }
        }
        Ok(())
    }

    /// Draws one transmission time.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Duration> {
        self.validate()?;
        Ok(Duration(self.draw(rng)))
    }

    /// Unchecked draw for hot loops over already validated models.
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Uniform { low, high } => low + (high - low) * rng.random::<f64>(),
            Self::ShiftedExponential { shift, rate } => {
                shift + Exp::new(rate).expect("validated rate").sample(rng)
            }
            Self::TwoPoint { low, high, p_low } => {
                if rng.random::<f64>() < p_low {
                    low
                } else {
                    high
                }
            }
            Self::Empirical { ref samples } => samples[rng.random_range(0..samples.len())],
        }
    }

    /// Tight support bounds.
    pub fn support(&self) -> Support {
        let (lo, hi) = match *self {
            Self::Constant { value } => (value, Some(value)),
            Self::Uniform { low, high } => (low, Some(high)),
            Self::ShiftedExponential { shift, .. } => (shift, None),
            Self::TwoPoint { low, high, p_low } => {
                if p_low >= 1.0 {
                    (low, Some(low))
                } else if p_low <= 0.0 {
                    (high, Some(high))
                } else {
                    (low, Some(high))
                }
            }
            Self::Empirical { ref samples } => {
                let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, Some(hi))
            }
        };
        Support {
            lower: Duration(lo),
            upper: hi.map(Duration),
        }
    }

    /// Analytic expectation `E[T]`.
    pub fn mean(&self) -> Duration {
        let m = match *self {
            Self::Constant { value } => value,
            Self::Uniform { low, high } => 0.5 * (low + high),
            Self::ShiftedExponential { shift, rate } => shift + 1.0 / rate,
            Self::TwoPoint { low, high, p_low } => p_low * low + (1.0 - p_low) * high,
            Self::Empirical { ref samples } => samples.iter().sum::<f64>() / samples.len() as f64,
        };
        Duration(m)
    }

    /// Analytic variance `Var[T]`.
    pub fn variance(&self) -> f64 {
        match *self {
            Self::Constant { .. } => 0.0,
            Self::Uniform { low, high } => (high - low).powi(2) / 12.0,
            Self::ShiftedExponential { rate, .. } => 1.0 / (rate * rate),
            Self::TwoPoint { low, high, p_low } => p_low * (1.0 - p_low) * (high - low).powi(2),
            Self::Empirical { ref samples } => {
                let n = samples.len() as f64;
                let m = samples.iter().sum::<f64>() / n;
                samples.iter().map(|s| (s - m).powi(2)).sum::<f64>() / n
            }
        }
    }
}

/// The random stream handed to a single trial.
pub type TrialRng = ChaCha8Rng;

/// Root seed of an experiment. Trial `i` always receives the same stream,
/// independent of scheduling, because the stream is keyed by `(seed, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RandomSeed(pub u64);

impl RandomSeed {
    pub fn trial_rng(self, trial_index: u64) -> TrialRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(trial_index);
        rng
    }

    /// A statistically unrelated seed for sub-experiment `salt` (SplitMix64 finalizer).
    pub fn derive(self, salt: u64) -> RandomSeed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(salt.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RandomSeed(z ^ (z >> 31))
    }
}

impl fmt::Display for RandomSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
