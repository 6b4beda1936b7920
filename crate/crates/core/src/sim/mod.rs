//! Monte-Carlo estimation of violation probabilities.
//!
//! Every estimator is deterministic given its seed: trial `i` draws from the
//! stream keyed by `(seed, i)` and results are aggregated as integer counts,
//! so the thread count never changes an estimate.

mod chain;
mod engine;
mod fanout;
mod sensing_digital;

pub use chain::{
    estimate_chain, estimate_chain_sweep, estimate_chain_windows, estimate_no_violation_prob, estimate_pairwise_probs,
    run_chain_trial, CausalChainScenario, ChainEstimate, SweepMode, TrialOutcome, TwiAnchor,
};
pub use engine::ViolationEstimate;
pub(crate) use engine::run_trials;
pub use fanout::{estimate_sim_violation, FanOutInput, FanOutScenario};
pub use sensing_digital::{
    estimate_sensing_digital_violation, CausalDirection, SensingDigitalDraw, SensingDigitalScenario,
};
