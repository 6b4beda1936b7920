//! Timing of sensory and digital inputs at a receiver.
//!
//! A sensor needs a full integration window `T_s` of observation before it
//! reports an event. A synchronous sensor runs a periodic grid of windows
//! (period `T_s`, no idle time), so an event that becomes detectable at an
//! arbitrary instant waits `φ_s ∈ [0, T_s)` for the next window to start. An
//! asynchronous sensor starts a window when an event becomes detectable, but
//! cannot start a new one while another is running.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Duration, TimePoint, TransmissionTimeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorMode {
    Synchronous,
    Asynchronous,
}

/// A sensor: integration window `t_s`, detectability delay `tau_s`, and
/// `d_s` bits of data per detection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorSpec {
    pub t_s: Duration,
    pub tau_s: Duration,
    pub mode: SensorMode,
    #[serde(default = "default_bits")]
    pub d_s: u64,
}

fn default_bits() -> u64 {
    1
}

impl SensorSpec {
    pub fn new(t_s: Duration, tau_s: Duration, mode: SensorMode) -> Result<Self> {
        let spec = Self {
            t_s,
            tau_s,
            mode,
            d_s: 1,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_bits(mut self, d_s: u64) -> Result<Self> {
        self.d_s = d_s;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_s.secs() <= 0.0 {
            return Err(Error::param("t_s", "integration window must be positive"));
        }
        if self.d_s == 0 {
            return Err(Error::param("d_s", "data size must be at least one bit"));
        }
        Ok(())
    }

    /// Detection delay `T_{p,s} = τ_s + φ_s + T_s` measured from the
    /// physical event. Synchronous sensors draw `φ_s ~ U[0, T_s)`.
    pub fn sample_detection_time<R: Rng + ?Sized>(&self, rng: &mut R) -> Duration {
        Duration::from_secs(self.draw_detection(rng))
    }

    pub(crate) fn draw_detection<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let phi = match self.mode {
            SensorMode::Synchronous => self.t_s.secs() * rng.random::<f64>(),
            SensorMode::Asynchronous => 0.0,
        };
        self.tau_s.secs() + phi + self.t_s.secs()
    }

    /// Maximal data rate `D_s / T_s` in bits per second.
    pub fn max_event_rate(&self) -> f64 {
        self.d_s as f64 / self.t_s.secs()
    }

    /// Runs the sensor over a sequence of physical events.
    ///
    /// `window_phase` places the synchronous window grid at
    /// `window_phase + k·T_s`; it is ignored by asynchronous sensors.
    pub fn detect_stream(
        &self,
        physical_events: &[TimePoint],
        window_phase: Duration,
    ) -> Result<Vec<DetectionRecord>> {
        self.validate()?;
        if physical_events.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::domain("physical event times must be strictly increasing"));
        }
        let t_s = self.t_s.secs();
        let tau = self.tau_s.secs();
        let mut out = Vec::with_capacity(physical_events.len());
        match self.mode {
            SensorMode::Synchronous => {
                let phase = window_phase.secs();
                for (i, &t) in physical_events.iter().enumerate() {
                    let ready = t.secs() + tau;
                    // first window starting at or after `ready`
                    let start = phase + ((ready - phase) / t_s).ceil() * t_s;
                    out.push(DetectionRecord::detected(i, start.max(ready) + t_s));
                }
            }
            SensorMode::Asynchronous => {
                let mut busy_until = f64::NEG_INFINITY;
                for (i, &t) in physical_events.iter().enumerate() {
                    let ready = t.secs() + tau;
                    if ready >= busy_until {
                        busy_until = ready + t_s;
                        out.push(DetectionRecord::detected(i, busy_until));
                    } else {
                        out.push(DetectionRecord::missed(i));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Outcome of one physical event at a sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionRecord {
    pub source_index: usize,
    /// `None` when the event fell into a running asynchronous window.
    pub arrival: Option<TimePoint>,
}

impl DetectionRecord {
    fn detected(source_index: usize, at: f64) -> Self {
        Self {
            source_index,
            arrival: Some(TimePoint::from_secs(at)),
        }
    }

    fn missed(source_index: usize) -> Self {
        Self {
            source_index,
            arrival: None,
        }
    }

    pub fn detected_flag(&self) -> bool {
        self.arrival.is_some()
    }
}

/// A digital link. `t_ab` aggregates sender processing, propagation and
/// receiver processing (`T_A + τ_d + T_B`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub t_ab: TransmissionTimeModel,
    #[serde(default = "default_bits")]
    pub d_d: u64,
}

impl LinkSpec {
    pub fn new(t_ab: TransmissionTimeModel) -> Result<Self> {
        let spec = Self { t_ab, d_d: 1 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.t_ab.validate()?;
        if self.d_d == 0 {
            return Err(Error::param("d_d", "data size must be at least one bit"));
        }
        Ok(())
    }

    pub fn sample_arrival<R: Rng + ?Sized>(&self, send_time: TimePoint, rng: &mut R) -> TimePoint {
        send_time + Duration::from_secs(self.t_ab.draw(rng))
    }
}

/// Either kind of receiver input. Sensors carry an identity so that scenarios
/// can refuse to route two inputs through one sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "input", rename_all = "snake_case")]
pub enum InputModel {
    Link(LinkSpec),
    Sensor {
        sensor_id: u32,
        #[serde(flatten)]
        spec: SensorSpec,
    },
}

impl InputModel {
    pub fn link(t_ab: TransmissionTimeModel) -> Self {
        InputModel::Link(LinkSpec { t_ab, d_d: 1 })
    }

    pub fn sensor(sensor_id: u32, spec: SensorSpec) -> Self {
        InputModel::Sensor { sensor_id, spec }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InputModel::Link(l) => l.validate(),
            InputModel::Sensor { spec, .. } => spec.validate(),
        }
    }

    /// Delay from the causing event to registration at the receiver.
    pub(crate) fn draw_delay<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            InputModel::Link(l) => l.t_ab.draw(rng),
            InputModel::Sensor { spec, .. } => spec.draw_detection(rng),
        }
    }

    /// Lower end of the delay support.
    pub fn min_delay(&self) -> f64 {
        match self {
            InputModel::Link(l) => l.t_ab.support().lower.secs(),
            InputModel::Sensor { spec, .. } => spec.tau_s.secs() + spec.t_s.secs(),
        }
    }

    /// Upper end of the delay support (`INFINITY` for unbounded tails).
    pub fn max_delay(&self) -> f64 {
        match self {
            InputModel::Link(l) => l
                .t_ab
                .support()
                .upper
                .map_or(f64::INFINITY, Duration::secs),
            InputModel::Sensor { spec, .. } => {
                let phi = match spec.mode {
                    SensorMode::Synchronous => spec.t_s.secs(),
                    SensorMode::Asynchronous => 0.0,
                };
                spec.tau_s.secs() + phi + spec.t_s.secs()
            }
        }
    }

    pub fn tag(&self) -> String {
        match self {
            InputModel::Link(l) => l.t_ab.tag(),
            InputModel::Sensor { sensor_id, spec } => format!(
                "sensor{sensor_id}({:?};{};{})",
                spec.mode,
                spec.t_s.secs(),
                spec.tau_s.secs()
            ),
        }
    }
}
