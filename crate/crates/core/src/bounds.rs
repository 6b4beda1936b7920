//! Upper bounds on the probability of correct causal ordering of `N` events
//! and a lower bound on the pairwise violation probability.
//!
//! The bounds are plain arithmetic over pairwise probabilities
//! `Pr[I_{k,k+1} = 1]`, where `I_{k,k+1} = 1` when event `k` is perceived no
//! later than event `k+1` (by raw time without TWI, by stamp with one). The
//! pairwise probabilities themselves come from [`crate::sim`] or from a
//! closed form, so estimation and bound arithmetic are tested separately.
//!
//! * Without TWI the joint probability is at most `Π Pr[I_{k,k+1}=1]`. The
//!   proof chains conditional probabilities and uses [`verify_lemma1`]'s
//!   inequality: conditioning on `t_1 ≤ t_2` pushes `t_2` up and makes
//!   `t_2 ≤ t_3` less likely.
//! * With TWI the shared phase couples all pairs, and Hölder's inequality
//!   gives the weaker `Π Pr[I_{k,k+1}=1]^{1/(N−1)}`, which never exceeds the
//!   largest pairwise probability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RandomSeed, TransmissionTimeModel};
use crate::sim::{run_trials, ViolationEstimate};

/// Probabilities `Pr[I_{k,k+1} = 1]` for `k = 1..N−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseProbVector(Vec<f64>);

impl PairwiseProbVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::param("probs", "need at least one pair"));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::param("probs", format!("{p} is not a probability")));
        }
        Ok(Self(probs))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

/// Bound for raw-time ordering (no TWI).
pub fn theorem1_bound(pv: &PairwiseProbVector) -> f64 {
    pv.0.iter().product()
}

/// Bound for timestamp ordering with a positive window.
pub fn theorem2_bound(pv: &PairwiseProbVector) -> f64 {
    let exponent = 1.0 / pv.0.len() as f64;
    pv.0.iter().map(|p| p.powf(exponent)).product()
}

fn check_chain_len(n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("a chain needs N >= 2 events, got {n}")));
    }
    Ok(())
}

/// Exact `1 − Pr[V_c]` for the two-rate chain: each sender independently
/// takes `T0` or `2T0` with probability 1/2, consecutive events are `τ < T0`
/// apart, no TWI. Only state sequences of the form `H…HL…L` avoid a
/// violation, giving `(N+1)/2^N`.
pub fn two_rate_exact(n: u32) -> Result<f64> {
    check_chain_len(n)?;
    Ok((n as f64 + 1.0) / 2f64.powi(n as i32))
}

/// Pairwise-product bound `(3/4)^{N−1}` for the two-rate chain.
pub fn two_rate_pairwise_bound(n: u32) -> Result<f64> {
    check_chain_len(n)?;
    Ok(0.75f64.powi(n as i32 - 1))
}

/// `Pr[V_c | t_1, t_2]` for two events `τ` apart under a uniform window phase.
pub fn appendix_d_conditional(t_1: f64, t_2: f64, tau: f64, w: f64) -> f64 {
    let gap = t_1 - tau - t_2;
    if gap <= 0.0 {
        0.0
    } else if gap > w {
        1.0
    } else {
        gap / w
    }
}

/// Laplace transform `E[e^{−λT}]` of a transmission-time model.
pub fn laplace_transform(model: &TransmissionTimeModel, lambda: f64) -> f64 {
    match *model {
        TransmissionTimeModel::Constant { value } => (-lambda * value).exp(),
        TransmissionTimeModel::Uniform { low, high } => {
            let width = high - low;
            if width == 0.0 || lambda == 0.0 {
                (-lambda * low).exp()
            } else {
                ((-lambda * low).exp() - (-lambda * high).exp()) / (lambda * width)
            }
        }
        TransmissionTimeModel::ShiftedExponential { shift, rate } => {
            (-lambda * shift).exp() * rate / (rate + lambda)
        }
        TransmissionTimeModel::TwoPoint { low, high, p_low } => {
            p_low * (-lambda * low).exp() + (1.0 - p_low) * (-lambda * high).exp()
        }
        // The list is the distribution, so its average is exact.
        TransmissionTimeModel::Empirical { ref samples } => {
            samples.iter().map(|t| (-lambda * t).exp()).sum::<f64>() / samples.len() as f64
        }
    }
}

/// Lower bound `e^{−λ(τ+W)} E[e^{−λT_2}]` on the pairwise violation
/// probability when `Pr[T_1 > x] = e^{−λx}`.
pub fn appendix_d_lower_bound(
    lambda: f64,
    tau: f64,
    w: f64,
    t2_model: &TransmissionTimeModel,
) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::param("lambda", "rate must be positive"));
    }
    if !(tau >= 0.0 && w >= 0.0) {
        return Err(Error::param("tau", "τ and W must be nonnegative"));
    }
    t2_model.validate()?;
    Ok((-lambda * (tau + w)).exp() * laplace_transform(t2_model, lambda))
}

/// Fewest trials accepted by [`verify_lemma1`].
pub const LEMMA1_MIN_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lemma1Verdict {
    Holds,
    Violated,
    /// The conditioning event `t_1 ≤ t_2` never occurred.
    Inconclusive,
}

/// Empirical check of `Pr[t_2 ≤ t_3 | t_1 ≤ t_2] ≤ Pr[t_2 ≤ t_3]` for
/// independent `t_1, t_2, t_3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_std_err: f64,
    pub rhs_std_err: f64,
    /// Trials in which `t_1 ≤ t_2`.
    pub conditioning_count: u64,
    pub trials: u64,
    pub verdict: Lemma1Verdict,
}

impl Lemma1Report {
    pub fn combined_std_err(&self) -> f64 {
        (self.lhs_std_err.powi(2) + self.rhs_std_err.powi(2)).sqrt()
    }

    pub fn holds(&self) -> bool {
        self.verdict == Lemma1Verdict::Holds
    }
}

/// Tolerance of [`verify_lemma1`] in combined standard errors.
pub const LEMMA1_TOLERANCE_SE: f64 = 4.0;

pub fn verify_lemma1(
    models: [&TransmissionTimeModel; 3],
    trials: u64,
    seed: RandomSeed,
) -> Result<Lemma1Report> {
    if trials < LEMMA1_MIN_TRIALS {
        return Err(Error::domain(format!(
            "Lemma check needs at least {LEMMA1_MIN_TRIALS} trials, got {trials}"
        )));
    }
    for m in models {
        m.validate()?;
    }
    // [t1 <= t2, t1 <= t2 && t2 <= t3, t2 <= t3]
    let c = run_trials(trials, seed, || vec![0u64; 3], |acc, rng| {
        let t1 = models[0].draw(rng);
        let t2 = models[1].draw(rng);
        let t3 = models[2].draw(rng);
        let first = t1 <= t2;
        let second = t2 <= t3;
        acc[0] += u64::from(first);
        acc[1] += u64::from(first && second);
        acc[2] += u64::from(second);
    });
    let rhs = ViolationEstimate::from_counts(c[2], trials, seed);
    if c[0] == 0 {
        return Ok(Lemma1Report {
            lhs: f64::NAN,
            rhs: rhs.p_hat,
            lhs_std_err: f64::NAN,
            rhs_std_err: rhs.std_err,
            conditioning_count: 0,
            trials,
            verdict: Lemma1Verdict::Inconclusive,
        });
    }
    let lhs = ViolationEstimate::from_counts(c[1], c[0], seed);
    let mut report = Lemma1Report {
        lhs: lhs.p_hat,
        rhs: rhs.p_hat,
        lhs_std_err: lhs.std_err,
        rhs_std_err: rhs.std_err,
        conditioning_count: c[0],
        trials,
        verdict: Lemma1Verdict::Holds,
    };
    if report.lhs > report.rhs + LEMMA1_TOLERANCE_SE * report.combined_std_err() {
        report.verdict = Lemma1Verdict::Violated;
    }
    Ok(report)
}
