//! Timestamping and event-ordering analysis for receivers that perceive the
//! world through both sensors and digital links.
//!
//! A receiver registers sensing events (a sensor integrated long enough to
//! detect something) and digital events (a packet was decoded). Each input
//! adds its own, often random, delay, so the perceived order of events can
//! disagree with the order in which they happened. Grouping arrivals into a
//! Temporal Window of Integration (TWI) of width `W` trades temporal
//! resolution for robustness: everything stamped into the same window counts
//! as simultaneous.
//!
//! The crate is organized by capability:
//!
//! * [`model`]: time values, transmission-time distributions, seeding.
//! * [`timestamp`]: the TWI stamp `⌈(t − ω)/W⌉` and the happened-before /
//!   simultaneous-with relations and violation predicates.
//! * [`inputs`]: synchronous and asynchronous sensors, digital links.
//! * [`analytics`]: closed-form violation probabilities and minimal windows.
//! * [`bounds`]: upper bounds on correct causal ordering of `N` events and
//!   an exponential-tail lower bound on pairwise violation.
//! * [`sim`]: deterministic, parallel Monte-Carlo estimators.
//! * [`planner`]: latency budgets, window-edge miss probabilities, slots.
//! * [`harness`]: JSON experiment configs, CSV results, run manifests.
//!
//! The runnable programs under `examples/` walk through each capability.

pub mod analytics;
pub mod bounds;
pub mod error;
pub mod harness;
pub mod inputs;
pub mod model;
pub mod planner;
pub mod sim;
pub mod timestamp;

pub use error::{Error, Result};
pub use model::{Duration, RandomSeed, TimePoint, TransmissionTimeModel};
pub use timestamp::{Relation, TwiSpec};
