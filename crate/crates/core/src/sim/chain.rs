use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::engine::{run_trials, ViolationEstimate};
use crate::bounds::PairwiseProbVector;
use crate::error::{Error, Result};
use crate::inputs::InputModel;
use crate::model::{Duration, RandomSeed, TimePoint};
use crate::planner::{quantized_time, SlotGrid};
use crate::timestamp::{stamp_raw, TwiSpec};

/// Where the window grid's phase is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwiAnchor {
    /// Phase measured from `t = 0`, the occurrence of the first source event.
    #[default]
    Absolute,
    /// Phase measured from the first input's arrival.
    FirstArrival,
}

/// `N` causally ordered source events: event `k` causes event `k+1` after
/// `action_times[k]`; event `i` reaches the receiver through `inputs[i]`.
///
/// Arrival of event `i` is `T_i + Σ_{k<i} τ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalChainScenario {
    pub action_times: Vec<Duration>,
    pub inputs: Vec<InputModel>,
    #[serde(default)]
    pub anchor: TwiAnchor,
    /// When set, arrivals are moved to the end of their radio slot.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantize: Option<SlotGrid>,
}

impl CausalChainScenario {
    pub fn new(action_times: Vec<Duration>, inputs: Vec<InputModel>) -> Result<Self> {
        let s = Self {
            action_times,
            inputs,
            anchor: TwiAnchor::Absolute,
            quantize: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// `n` i.i.d. inputs with a constant action time.
    pub fn iid(n: usize, tau: Duration, input: InputModel) -> Result<Self> {
        Self::new(vec![tau; n.saturating_sub(1)], vec![input; n])
    }

    pub fn with_anchor(mut self, anchor: TwiAnchor) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_quantization(mut self, grid: SlotGrid) -> Self {
        self.quantize = Some(grid);
        self
    }

    pub fn n(&self) -> usize {
        self.inputs.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.inputs.len();
        if n < 2 {
            return Err(Error::param("inputs", "a causal chain needs at least two events"));
        }
        if self.action_times.len() != n - 1 {
            return Err(Error::param(
                "action_times",
                format!("expected {} action times for {n} events, got {}", n - 1, self.action_times.len()),
            ));
        }
        let mut sensors = HashSet::new();
        for input in &self.inputs {
            input.validate()?;
            if let InputModel::Sensor { sensor_id, .. } = input {
                if !sensors.insert(*sensor_id) {
                    return Err(Error::param(
                        "inputs",
                        format!("sensor {sensor_id} feeds two events; chain inputs must use distinct sensors"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Draws the arrival times of one trial, then the unit phase draw.
    /// Every trial consumes its stream in this fixed layout, whatever the
    /// window, so one seed gives common random numbers across windows.
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R, arrivals: &mut Vec<f64>) -> f64 {
        arrivals.clear();
        let mut offset = 0.0;
        for (i, input) in self.inputs.iter().enumerate() {
            if i > 0 {
                offset += self.action_times[i - 1].secs();
            }
            arrivals.push(input.draw_delay(rng) + offset);
        }
        if let Some(grid) = self.quantize {
            for t in arrivals.iter_mut() {
                *t = quantized_time(TimePoint::from_secs(*t), grid).secs();
            }
        }
        rng.random::<f64>()
    }
}

/// Result of one chain trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub arrival_times: Vec<TimePoint>,
    /// Present when the window is positive.
    pub stamps: Option<Vec<i64>>,
    pub violated: bool,
    /// Zero-based `(k, k+1)` pairs perceived in reverse order.
    pub violating_pairs: Vec<(usize, usize)>,
    /// Neighboring pairs with exactly equal raw arrivals (window 0 only).
    pub tied_pairs: Vec<(usize, usize)>,
}

/// Per-pair ordering flags `I_{k,k+1}` (true = correctly ordered) and tie flags.
fn pair_flags(arrivals: &[f64], window: f64, omega: f64, anchor: TwiAnchor, ok: &mut Vec<bool>) -> usize {
    ok.clear();
    let mut ties = 0;
    if window == 0.0 {
        for p in arrivals.windows(2) {
            ok.push(p[0] <= p[1]);
            ties += usize::from(p[0] == p[1]);
        }
    } else {
        let origin = match anchor {
            TwiAnchor::Absolute => 0.0,
            TwiAnchor::FirstArrival => arrivals[0],
        };
        let mut prev = stamp_raw(arrivals[0] - origin, window, omega);
        for &t in &arrivals[1..] {
            let s = stamp_raw(t - origin, window, omega);
            ok.push(prev <= s);
            prev = s;
        }
    }
    ties
}

/// Runs one trial of the chain under `twi`. A random phase is drawn once and
/// shared by all events.
pub fn run_chain_trial<R: Rng + ?Sized>(
    s: &CausalChainScenario,
    twi: &TwiSpec,
    rng: &mut R,
) -> TrialOutcome {
    let mut arrivals = Vec::with_capacity(s.n());
    let u = s.draw(rng, &mut arrivals);
    let w = twi.window.secs();
    let omega = twi.offset_from_unit(u).secs();
    let mut ok = Vec::with_capacity(s.n());
    pair_flags(&arrivals, w, omega, s.anchor, &mut ok);
    let violating_pairs: Vec<(usize, usize)> = ok
        .iter()
        .enumerate()
        .filter(|(_, &good)| !good)
        .map(|(k, _)| (k, k + 1))
        .collect();
    let tied_pairs = if w == 0.0 {
        arrivals
            .windows(2)
            .enumerate()
            .filter(|(_, p)| p[0] == p[1])
            .map(|(k, _)| (k, k + 1))
            .collect()
    } else {
        Vec::new()
    };
    let stamps = (w > 0.0).then(|| {
        let origin = match s.anchor {
            TwiAnchor::Absolute => 0.0,
            TwiAnchor::FirstArrival => arrivals[0],
        };
        arrivals.iter().map(|&t| stamp_raw(t - origin, w, omega)).collect()
    });
    TrialOutcome {
        arrival_times: arrivals.into_iter().map(TimePoint::from_secs).collect(),
        stamps,
        violated: !violating_pairs.is_empty(),
        violating_pairs,
        tied_pairs,
    }
}

/// Joint and per-pair estimates for one window, taken from the same trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainEstimate {
    pub window: Duration,
    /// Probability of correct causal ordering of all events, `1 − Pr[V_c]`.
    pub joint: ViolationEstimate,
    /// `Pr[I_{k,k+1} = 1]` for each neighboring pair.
    pub pairwise: Vec<ViolationEstimate>,
    /// Trials containing at least one exact tie between neighbors (window 0).
    pub tied_trials: u64,
}

impl ChainEstimate {
    pub fn pairwise_probs(&self) -> PairwiseProbVector {
        PairwiseProbVector::new(self.pairwise.iter().map(|e| e.p_hat).collect())
            .expect("estimated probabilities lie in [0, 1]")
    }
}

/// How a sweep over windows draws its randomness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    /// Fresh trials per window.
    #[default]
    Independent,
    /// Same transmission times and unit phase draw reused at every window.
    CommonRandomNumbers,
}

// Counter layout: [joint, pair_0 .. pair_{n-2}, tied] per window.
fn counts_per_window(n: usize) -> usize {
    n + 1
}

fn collect(
    counts: &[u64],
    n: usize,
    window: Duration,
    trials: u64,
    seed: RandomSeed,
) -> ChainEstimate {
    ChainEstimate {
        window,
        joint: ViolationEstimate::from_counts(counts[0], trials, seed),
        pairwise: (0..n - 1)
            .map(|k| ViolationEstimate::from_counts(counts[1 + k], trials, seed))
            .collect(),
        tied_trials: counts[n],
    }
}

/// Joint and pairwise estimates for several windows from one pass of trials:
/// every window sees the same transmission times and unit phase draw.
pub fn estimate_chain_windows(
    s: &CausalChainScenario,
    twis: &[TwiSpec],
    trials: u64,
    seed: RandomSeed,
) -> Result<Vec<ChainEstimate>> {
    s.validate()?;
    for t in twis {
        t.validate()?;
    }
    if trials == 0 {
        return Err(Error::param("trials", "need at least one trial"));
    }
    let n = s.n();
    let stride = counts_per_window(n);
    let width = stride * twis.len();
    let counts = run_trials(
        trials,
        seed,
        || vec![0u64; width],
        |acc, rng| {
            let mut arrivals = Vec::with_capacity(n);
            let mut ok = Vec::with_capacity(n);
            let u = s.draw(rng, &mut arrivals);
            for (j, twi) in twis.iter().enumerate() {
                let omega = twi.offset_from_unit(u).secs();
                let ties = pair_flags(&arrivals, twi.window.secs(), omega, s.anchor, &mut ok);
                let base = j * stride;
                let mut all = true;
                for (k, &good) in ok.iter().enumerate() {
                    acc[base + 1 + k] += u64::from(good);
                    all &= good;
                }
                acc[base] += u64::from(all);
                acc[base + n] += u64::from(ties > 0);
            }
        },
    );
    Ok(twis
        .iter()
        .enumerate()
        .map(|(j, t)| collect(&counts[j * stride..(j + 1) * stride], n, t.window, trials, seed))
        .collect())
}

/// Joint and pairwise ordering estimates for one window.
pub fn estimate_chain(
    s: &CausalChainScenario,
    twi: &TwiSpec,
    trials: u64,
    seed: RandomSeed,
) -> Result<ChainEstimate> {
    Ok(estimate_chain_windows(s, std::slice::from_ref(twi), trials, seed)?.remove(0))
}

/// Estimate of `1 − Pr[V_c]`, the probability that all events are perceived
/// in causal order.
pub fn estimate_no_violation_prob(
    s: &CausalChainScenario,
    twi: &TwiSpec,
    trials: u64,
    seed: RandomSeed,
) -> Result<ViolationEstimate> {
    Ok(estimate_chain(s, twi, trials, seed)?.joint)
}

/// Per-pair probabilities `Pr[I_{k,k+1} = 1]`.
pub fn estimate_pairwise_probs(
    s: &CausalChainScenario,
    twi: &TwiSpec,
    trials: u64,
    seed: RandomSeed,
) -> Result<PairwiseProbVector> {
    Ok(estimate_chain(s, twi, trials, seed)?.pairwise_probs())
}

/// Sweeps the window with a uniformly random phase (no TWI at `W = 0`).
pub fn estimate_chain_sweep(
    s: &CausalChainScenario,
    windows: &[Duration],
    trials: u64,
    seed: RandomSeed,
    mode: SweepMode,
) -> Result<Vec<ChainEstimate>> {
    let twis: Vec<TwiSpec> = windows.iter().map(|&w| TwiSpec::uniform(w)).collect();
    match mode {
        SweepMode::CommonRandomNumbers => estimate_chain_windows(s, &twis, trials, seed),
        SweepMode::Independent => twis
            .iter()
            .enumerate()
            .map(|(j, t)| estimate_chain(s, t, trials, seed.derive(j as u64)))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inputs::{SensorMode, SensorSpec};
    use crate::model::TransmissionTimeModel;
    use crate::timestamp::OffsetMode;

    fn s(x: f64) -> Duration {
        Duration::from_secs(x)
    }

    fn deterministic(ts: &[f64], tau: f64) -> CausalChainScenario {
        CausalChainScenario::new(
            vec![s(tau); ts.len() - 1],
            ts.iter().map(|&t| InputModel::link(TransmissionTimeModel::constant(t))).collect(),
        )
        .unwrap()
    }

    fn two_rate(n: usize) -> CausalChainScenario {
        // T0 = 1 > τ = 0.5
        CausalChainScenario::iid(n, s(0.5), InputModel::link(TransmissionTimeModel::two_point(1.0, 2.0, 0.5)))
            .unwrap()
    }

    #[test]
    fn hand_evaluated_trial() {
        let sc = deterministic(&[0.5, 2.8, 0.2], 1.0);
        let mut rng = RandomSeed(0).trial_rng(0);
        let out = run_chain_trial(&sc, &TwiSpec::none(), &mut rng);
        let a: Vec<f64> = out.arrival_times.iter().map(|t| t.secs()).collect();
        assert_eq!(a.len(), 3);
        assert!((a[0] - 0.5).abs() < 1e-12 && (a[1] - 3.8).abs() < 1e-12 && (a[2] - 2.2).abs() < 1e-12);
        assert!(out.violated);
        assert_eq!(out.violating_pairs, vec![(1, 2)]);
        assert_eq!(out.stamps, None);

        let w5 = TwiSpec::fixed(s(5.0), Duration::ZERO).unwrap();
        let out = run_chain_trial(&sc, &w5, &mut rng);
        assert_eq!(out.stamps, Some(vec![1, 1, 1]));
        assert!(!out.violated);
    }

    #[test]
    fn equal_constant_inputs_stay_ordered() {
        let sc = deterministic(&[0.3, 0.3], 1.0);
        let out = run_chain_trial(&sc, &TwiSpec::none(), &mut RandomSeed(1).trial_rng(0));
        assert!(!out.violated);
        assert!(out.tied_pairs.is_empty());
        let e = estimate_chain(&sc, &TwiSpec::none(), 1000, RandomSeed(1)).unwrap();
        assert_eq!(e.joint.p_hat, 1.0);
        assert_eq!(e.pairwise_probs().probs(), &[1.0]);
    }

    #[test]
    fn ties_are_reported() {
        let sc = deterministic(&[1.0, 0.0], 1.0);
        let out = run_chain_trial(&sc, &TwiSpec::none(), &mut RandomSeed(1).trial_rng(0));
        assert!(!out.violated);
        assert_eq!(out.tied_pairs, vec![(0, 1)]);
        let e = estimate_chain(&sc, &TwiSpec::none(), 100, RandomSeed(1)).unwrap();
        assert_eq!(e.tied_trials, 100);
    }

    #[test]
    fn two_rate_chain_matches_enumeration() {
        let e = estimate_chain(&two_rate(5), &TwiSpec::none(), 1_000_000, RandomSeed(5)).unwrap();
        assert!(e.joint.agrees_with(6.0 / 32.0, 3.0), "{:?}", e.joint);
        for p in &e.pairwise {
            assert!(p.agrees_with(0.75, 3.0), "{p:?}");
        }
    }

    #[test]
    fn huge_window_swallows_everything() {
        let sc = two_rate(6);
        // all arrivals lie in [1, 4.5], inside the first window
        let twi = TwiSpec::fixed(s(100.0), Duration::ZERO).unwrap();
        let e = estimate_chain(&sc, &twi, 10_000, RandomSeed(2)).unwrap();
        assert_eq!(e.joint.p_hat, 1.0);
    }

    #[test]
    fn validation() {
        let l = InputModel::link(TransmissionTimeModel::constant(1.0));
        assert!(CausalChainScenario::new(vec![s(1.0)], vec![l.clone()]).is_err());
        let err = CausalChainScenario::new(vec![s(1.0), s(1.0)], vec![l.clone(), l.clone()]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "action_times", .. }));
        let sensor = SensorSpec::new(s(1.0), s(0.1), SensorMode::Synchronous).unwrap();
        let dup = CausalChainScenario::new(
            vec![s(1.0), s(1.0)],
            vec![InputModel::sensor(4, sensor), l, InputModel::sensor(4, sensor)],
        );
        assert!(matches!(dup, Err(Error::InvalidParameter { name: "inputs", .. })));
    }

    #[test]
    fn crn_sweep_is_same_as_single_runs() {
        let sc = CausalChainScenario::iid(4, s(1.0), InputModel::link(TransmissionTimeModel::exponential(2.0))).unwrap();
        let ws = [s(0.0), s(0.5), s(1.5)];
        let sweep = estimate_chain_sweep(&sc, &ws, 20_000, RandomSeed(9), SweepMode::CommonRandomNumbers).unwrap();
        for (e, &w) in sweep.iter().zip(&ws) {
            let single = estimate_chain(&sc, &TwiSpec::uniform(w), 20_000, RandomSeed(9)).unwrap();
            assert_eq!(e, &single);
        }
        let indep = estimate_chain_sweep(&sc, &ws, 20_000, RandomSeed(9), SweepMode::Independent).unwrap();
        assert_ne!(indep[1].joint.successes, sweep[1].joint.successes);
    }

    #[test]
    fn first_arrival_anchor_matches_in_distribution() {
        let sc = CausalChainScenario::iid(3, s(1.0), InputModel::link(TransmissionTimeModel::exponential(2.0))).unwrap();
        let twi = TwiSpec {
            window: s(1.0),
            offset: OffsetMode::UniformRandom,
        };
        let a = estimate_chain(&sc, &twi, 400_000, RandomSeed(3)).unwrap().joint;
        let b = estimate_chain(&sc.clone().with_anchor(TwiAnchor::FirstArrival), &twi, 400_000, RandomSeed(4))
            .unwrap()
            .joint;
        let se = (a.std_err.powi(2) + b.std_err.powi(2)).sqrt();
        assert!((a.p_hat - b.p_hat).abs() < 4.0 * se);
    }
}
