//! System-level calculators: radio latency budgets derived from a TWI,
//! probability of missing a window edge, and slot quantization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Duration, TimePoint, TransmissionTimeModel};

/// Split of the end-to-end transmission budget between sender processing
/// and the radio link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencyBudget {
    /// Largest admissible `T_AB` before the sensed effect can overtake the
    /// digital cause, `T_s + τ_a + τ_s`.
    pub max_t_ab: Duration,
    pub sender_budget_t_a: Duration,
    pub radio_budget: Duration,
}

/// Budget for a digital cause whose physical effect is sensed by the receiver.
pub fn latency_budget_case2(
    t_s: Duration,
    tau_a: Duration,
    tau_s: Duration,
    sender_budget: Duration,
) -> Result<LatencyBudget> {
    let max_t_ab = t_s + tau_a + tau_s;
    // relative slack so that 30 ms - 30 ms is not rejected over rounding
    let slack = 1e-12 * max_t_ab.secs().max(1e-300);
    if sender_budget.secs() > max_t_ab.secs() + slack {
        return Err(Error::InfeasibleBudget {
            sender: sender_budget.secs(),
            max: max_t_ab.secs(),
        });
    }
    Ok(LatencyBudget {
        max_t_ab,
        sender_budget_t_a: sender_budget,
        radio_budget: Duration::from_secs((max_t_ab.secs() - sender_budget.secs()).max(0.0)),
    })
}

/// `Pr[T > x]` under the model.
pub fn tail_probability(model: &TransmissionTimeModel, x: f64) -> f64 {
    match *model {
        TransmissionTimeModel::Constant { value } => f64::from(u8::from(value > x)),
        TransmissionTimeModel::Uniform { low, high } => {
            if x < low {
                1.0
            } else if x >= high {
                0.0
            } else {
                (high - x) / (high - low)
            }
        }
        TransmissionTimeModel::ShiftedExponential { shift, rate } => {
            if x <= shift {
                1.0
            } else {
                (-rate * (x - shift)).exp()
            }
        }
        TransmissionTimeModel::TwoPoint { low, high, p_low } => {
            let mut p = 0.0;
            if low > x {
                p += p_low;
            }
            if high > x {
                p += 1.0 - p_low;
            }
            p
        }
        TransmissionTimeModel::Empirical { ref samples } => {
            samples.iter().filter(|&&s| s > x).count() as f64 / samples.len() as f64
        }
    }
}

/// `E[min(T, x)]` under the model.
fn expected_min(model: &TransmissionTimeModel, x: f64) -> f64 {
    match *model {
        TransmissionTimeModel::Constant { value } => value.min(x),
        TransmissionTimeModel::Uniform { low, high } => {
            if x <= low {
                x
            } else if x >= high {
                0.5 * (low + high)
            } else {
                ((x * x - low * low) / 2.0 + x * (high - x)) / (high - low)
            }
        }
        TransmissionTimeModel::ShiftedExponential { shift, rate } => {
            if x <= shift {
                x
            } else {
                shift + (1.0 - (-rate * (x - shift)).exp()) / rate
            }
        }
        TransmissionTimeModel::TwoPoint { low, high, p_low } => {
            p_low * low.min(x) + (1.0 - p_low) * high.min(x)
        }
        TransmissionTimeModel::Empirical { ref samples } => {
            samples.iter().map(|s| s.min(x)).sum::<f64>() / samples.len() as f64
        }
    }
}

/// Miss probability when the sender knows where the window ends: `Pr[T > W]`.
pub fn p_miss_known_edge(model: &TransmissionTimeModel, w: Duration) -> Result<f64> {
    model.validate()?;
    Ok(tail_probability(model, w.secs()))
}

/// Miss probability when the window phase is unknown to the sender.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnknownEdgeMiss {
    /// `min{1, E[T]/W}`; exact only when `T ≤ W` almost surely.
    pub paper_value: f64,
    /// `E[min(T/W, 1)]`, exact for any `T`.
    pub exact_value: f64,
}

pub fn p_miss_unknown_edge(model: &TransmissionTimeModel, w: Duration) -> Result<UnknownEdgeMiss> {
    model.validate()?;
    let w = w.secs();
    if w <= 0.0 {
        return Err(Error::domain("unknown-edge miss probability needs W > 0"));
    }
    Ok(UnknownEdgeMiss {
        paper_value: (model.mean().secs() / w).min(1.0),
        exact_value: (expected_min(model, w) / w).min(1.0),
    })
}

/// Uniform slot grid of the radio frame structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SlotGrid(Duration);

impl SlotGrid {
    /// Shortest 5G NR slot.
    pub const NR_SHORTEST_SLOT_SECS: f64 = 62.5e-6;

    pub fn new(slot: Duration) -> Result<Self> {
        if slot.secs() <= 0.0 {
            return Err(Error::param("slot", "slot length must be positive"));
        }
        Ok(Self(slot))
    }

    pub fn nr_shortest() -> Self {
        Self(Duration::from_secs(Self::NR_SHORTEST_SLOT_SECS))
    }

    pub fn slot(&self) -> Duration {
        self.0
    }
}

impl TryFrom<f64> for SlotGrid {
    type Error = Error;
    fn try_from(secs: f64) -> Result<Self> {
        SlotGrid::new(Duration::try_from_secs(secs)?)
    }
}

impl From<SlotGrid> for f64 {
    fn from(g: SlotGrid) -> f64 {
        g.0.secs()
    }
}

// Ratios within this relative distance of an integer count as exact.
const GRID_TOLERANCE: f64 = 1e-9;

fn snapped_ratio(t: f64, slot: f64) -> f64 {
    let r = t / slot;
    let nearest = r.round();
    if (r - nearest).abs() <= GRID_TOLERANCE * nearest.abs().max(1.0) {
        nearest
    } else {
        r
    }
}

/// Slot index `⌈t/slot⌉`; a time on a slot boundary belongs to the earlier slot.
pub fn quantize_to_slots(t: TimePoint, grid: SlotGrid) -> i64 {
    snapped_ratio(t.secs(), grid.0.secs()).ceil() as i64
}

/// End of the slot containing `t`.
pub fn quantized_time(t: TimePoint, grid: SlotGrid) -> TimePoint {
    TimePoint::from_secs(quantize_to_slots(t, grid) as f64 * grid.0.secs())
}

/// Whether a window is a whole number of slots.
pub fn validate_twi_on_grid(w: Duration, grid: SlotGrid) -> bool {
    let r = w.secs() / grid.0.secs();
    (r - r.round()).abs() <= GRID_TOLERANCE * r.round().abs().max(1.0)
}
