//! Closed-form violation probabilities and window-sizing conditions for two
//! and N inputs, assuming the window phase is uniform and independent of the
//! arrivals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Duration, TimePoint};

/// Smallest window that keeps two sensors simultaneous for an event,
/// `max{T_s1, τ_s2 − τ_s1 + T_s2}`. Sensor 1 must be the one reached first.
pub fn twi_two_sensor_min_window(
    t_s1: Duration,
    t_s2: Duration,
    tau_s1: Duration,
    tau_s2: Duration,
) -> Result<Duration> {
    if tau_s1 > tau_s2 {
        return Err(Error::domain(
            "sensor 1 must have the smaller propagation delay; swap the inputs",
        ));
    }
    let spread = tau_s2.secs() - tau_s1.secs() + t_s2.secs();
    Ok(Duration::from_secs(t_s1.secs().max(spread)))
}

/// `min{1, gap/W}`, with `W = 0` meaning any positive gap is a certain split.
fn split_probability(gap: f64, w: Duration) -> f64 {
    if gap <= 0.0 {
        0.0
    } else if w.secs() == 0.0 {
        1.0
    } else {
        (gap / w.secs()).min(1.0)
    }
}

/// Probability that a window edge separates two arrivals.
pub fn p_sim_violation_pair(t_1: TimePoint, t_2: TimePoint, w: Duration) -> f64 {
    split_probability((t_2 - t_1).abs(), w)
}

/// Causality violation when the physical event triggers the digital
/// transmission: the sensed cause at `t_s` is stamped after the digital
/// effect at `t_d`.
pub fn p_cv_case1(t_s: TimePoint, t_d: TimePoint, w: Duration) -> f64 {
    split_probability(t_s - t_d, w)
}

/// Causality violation when the digital transmission triggers the physical
/// event: the sensed effect at `t_s` is stamped before the digital cause at `t_d`.
pub fn p_cv_case2(t_s: TimePoint, t_d: TimePoint, w: Duration) -> f64 {
    split_probability(t_d - t_s, w)
}

/// Probability that arrivals of one event do not share a stamp.
pub fn p_sim_violation_n(arrivals: &[TimePoint], w: Duration) -> Result<f64> {
    if arrivals.is_empty() {
        return Err(Error::domain("need at least one arrival"));
    }
    let (lo, hi) = arrivals
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            (lo.min(t.secs()), hi.max(t.secs()))
        });
    Ok(split_probability(hi - lo, w))
}

/// A sensor and a digital link at one receiver, physical event first.
///
/// Registration times: `t_D = τ_a + T_AB`, `t_S = τ_s + φ_s + T_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case1Params {
    pub t_s: Duration,
    pub tau_s: Duration,
    pub tau_a: Duration,
    pub t_min: Duration,
    pub t_max: Duration,
    pub w: Duration,
}

/// A sensor and a digital link at one receiver, digital cause first.
///
/// Registration times: `t_D = T_AB`, `t_S = τ_s + τ_a + φ_s + T_s`. `tau_a`
/// is signed seconds: a sender that predicts the physical event acts with
/// zero or negative action time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case2Params {
    pub t_s: Duration,
    pub tau_s: Duration,
    pub tau_a: f64,
    pub t_min: Duration,
    pub t_max: Duration,
    pub w: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalityConditionReport {
    pub never_violated: bool,
    pub certainly_violated: bool,
    /// Minimal window, clamped at zero.
    pub w_min: Duration,
    /// The unclamped expression; negative when no window is needed.
    pub w_min_raw: f64,
}

fn check_support(t_min: Duration, t_max: Duration, t_ab: Duration) -> Result<()> {
    if t_min > t_max {
        return Err(Error::param("t_min", format!("{t_min} exceeds t_max {t_max}")));
    }
    if t_ab < t_min || t_ab > t_max {
        return Err(Error::param(
            "t_ab",
            format!("{t_ab} outside the support [{t_min}, {t_max}]"),
        ));
    }
    Ok(())
}

impl Case1Params {
    pub fn t_d(&self, t_ab: Duration) -> TimePoint {
        TimePoint::from_secs(self.tau_a.secs() + t_ab.secs())
    }

    pub fn t_s_at(&self, phi_s: f64) -> TimePoint {
        TimePoint::from_secs(self.tau_s.secs() + phi_s + self.t_s.secs())
    }

    /// Conditions for a realized transmission time `t_ab`.
    pub fn conditions(&self, t_ab: Duration) -> Result<CausalityConditionReport> {
        check_support(self.t_min, self.t_max, t_ab)?;
        let (t_s, tau_s, tau_a) = (self.t_s.secs(), self.tau_s.secs(), self.tau_a.secs());
        let w_min_raw = 2.0 * t_s + tau_s - self.t_min.secs() - tau_a;
        Ok(CausalityConditionReport {
            never_violated: t_ab.secs() > 2.0 * t_s + tau_s - tau_a,
            certainly_violated: self.w.secs() < t_s + tau_s - t_ab.secs() - tau_a,
            w_min: Duration::from_secs(w_min_raw.max(0.0)),
            w_min_raw,
        })
    }
}

impl Case2Params {
    pub fn t_d(&self, t_ab: Duration) -> TimePoint {
        TimePoint::from_secs(t_ab.secs())
    }

    /// Sensing time; may be negative in seconds when `tau_a` is negative,
    /// hence a plain `f64`.
    pub fn t_s_at(&self, phi_s: f64) -> f64 {
        self.tau_s.secs() + self.tau_a + phi_s + self.t_s.secs()
    }

    /// Conditions for a realized transmission time `t_ab`; certainty is
    /// judged at the worst phase `φ_s = 0`.
    pub fn conditions(&self, t_ab: Duration) -> Result<CausalityConditionReport> {
        check_support(self.t_min, self.t_max, t_ab)?;
        if !self.tau_a.is_finite() {
            return Err(Error::param("tau_a", "must be finite"));
        }
        let (t_s, tau_s, tau_a) = (self.t_s.secs(), self.tau_s.secs(), self.tau_a);
        let w_min_raw = self.t_max.secs() - t_s - tau_a - tau_s;
        Ok(CausalityConditionReport {
            never_violated: self.t_max.secs() < t_s + tau_a + tau_s,
            certainly_violated: self.w.secs() < t_ab.secs() - t_s - tau_a - tau_s,
            w_min: Duration::from_secs(w_min_raw.max(0.0)),
            w_min_raw,
        })
    }
}

pub fn causality_conditions_case1(p: &Case1Params, t_ab: Duration) -> Result<CausalityConditionReport> {
    p.conditions(t_ab)
}

pub fn causality_conditions_case2(p: &Case2Params, t_ab: Duration) -> Result<CausalityConditionReport> {
    p.conditions(t_ab)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(x: f64) -> Duration {
        Duration::from_secs(x)
    }
    fn t(x: f64) -> TimePoint {
        TimePoint::from_secs(x)
    }
    fn ms(x: f64) -> Duration {
        Duration::from_millis(x)
    }

    #[test]
    fn two_sensor_window() {
        // audio 50 ms window, video 10 ms; sound over 15 m arrives ~44 ms late
        let w = twi_two_sensor_min_window(ms(50.0), ms(10.0), Duration::ZERO, ms(44.0)).unwrap();
        assert!((w.millis() - 54.0).abs() < 1e-9);
        let w = twi_two_sensor_min_window(ms(50.0), ms(10.0), ms(3.0), ms(3.0)).unwrap();
        assert!((w.millis() - 50.0).abs() < 1e-9);
        let w = twi_two_sensor_min_window(s(1e-12), s(10.0), s(0.0), s(5.0)).unwrap();
        assert_eq!(w.secs(), 15.0);
        assert!(twi_two_sensor_min_window(ms(1.0), ms(1.0), ms(2.0), ms(1.0)).is_err());
    }

    #[test]
    fn pair_probabilities() {
        assert_eq!(p_sim_violation_pair(t(1.0), t(3.0), s(4.0)), 0.5);
        assert_eq!(p_sim_violation_pair(t(1.0), t(3.0), s(1.0)), 1.0);
        assert_eq!(p_sim_violation_pair(t(2.0), t(2.0), s(0.0)), 0.0);
        assert_eq!(p_sim_violation_pair(t(2.0), t(2.0), s(7.0)), 0.0);
        assert_eq!(p_sim_violation_pair(t(1.0), t(3.0), s(0.0)), 1.0);
    }

    #[test]
    fn case_probabilities() {
        assert_eq!(p_cv_case1(t(5.0), t(3.0), s(10.0)), 0.2);
        assert_eq!(p_cv_case1(t(3.0), t(5.0), s(10.0)), 0.0);
        assert_eq!(p_cv_case1(t(13.0), t(3.0), s(10.0)), 1.0);
        assert_eq!(p_cv_case1(t(5.0), t(3.0), s(0.0)), 1.0);
        assert_eq!(p_cv_case2(t(3.0), t(5.0), s(10.0)), 0.2);
        assert_eq!(p_cv_case2(t(5.0), t(3.0), s(10.0)), 0.0);
        assert_eq!(p_cv_case2(t(3.0), t(23.0), s(10.0)), 1.0);
    }

    #[test]
    fn n_input_probabilities() {
        let a = [t(1.0), t(2.0), t(6.0)];
        assert_eq!(p_sim_violation_n(&a, s(10.0)).unwrap(), 0.5);
        assert_eq!(p_sim_violation_n(&a, s(5.0)).unwrap(), 1.0);
        assert_eq!(p_sim_violation_n(&[t(4.0)], s(3.0)).unwrap(), 0.0);
        assert!(p_sim_violation_n(&[], s(3.0)).is_err());
    }

    #[test]
    fn case1_base_station_example() {
        // radio propagation 10 µs, sound over 30 m ~100 ms, T_s = 1 ms
        let p = Case1Params {
            t_s: ms(1.0),
            tau_s: Duration::from_micros(10.0),
            tau_a: ms(100.0),
            t_min: Duration::ZERO,
            t_max: ms(50.0),
            w: Duration::ZERO,
        };
        for t_ab in [0.0, 1.0, 10.0, 50.0] {
            let r = p.conditions(ms(t_ab)).unwrap();
            assert!(r.never_violated && !r.certainly_violated);
            assert_eq!(r.w_min, Duration::ZERO);
            assert!(r.w_min_raw < 0.0);
        }
    }

    #[test]
    fn case1_certain_and_window() {
        let p = Case1Params {
            t_s: s(10.0),
            tau_s: s(5.0),
            tau_a: s(0.0),
            t_min: s(1.0),
            t_max: s(30.0),
            w: s(10.0),
        };
        let r = causality_conditions_case1(&p, s(1.0)).unwrap();
        assert!(r.certainly_violated && !r.never_violated);
        assert_eq!(r.w_min.secs(), 24.0);
        assert!(causality_conditions_case1(&p, s(31.0)).is_err());
    }

    #[test]
    fn case2_leo_example() {
        let p = Case2Params {
            t_s: ms(100.0),
            tau_s: ms(5.0),
            tau_a: 5e-3,
            t_min: ms(10.0),
            t_max: ms(500.0),
            w: Duration::ZERO,
        };
        let r = causality_conditions_case2(&p, ms(500.0)).unwrap();
        assert!(!r.never_violated);
        assert!((r.w_min.millis() - 390.0).abs() < 1e-9);

        let q = Case2Params { t_max: ms(50.0), ..p };
        assert!(causality_conditions_case2(&q, ms(20.0)).unwrap().never_violated);
    }

    #[test]
    fn case2_prediction_shrinks_safe_region() {
        // The largest T_max that is still safe is T_s + τ_a + τ_s; it falls with τ_a.
        let base = Case2Params {
            t_s: ms(100.0),
            tau_s: ms(5.0),
            tau_a: 5e-3,
            t_min: Duration::ZERO,
            t_max: ms(108.0),
            w: Duration::ZERO,
        };
        assert!(base.conditions(ms(50.0)).unwrap().never_violated);
        let predicted = Case2Params { tau_a: 0.0, ..base };
        assert!(!predicted.conditions(ms(50.0)).unwrap().never_violated);
        let negative = Case2Params { tau_a: -0.02, t_max: ms(90.0), ..base };
        assert!(!negative.conditions(ms(50.0)).unwrap().never_violated);
        let (mut last, mut last_w) = (f64::INFINITY, f64::NEG_INFINITY);
        for tau_a in [0.01, 0.005, 0.0, -0.005, -0.01] {
            let p = Case2Params { tau_a, ..base };
            let threshold = p.t_s.secs() + p.tau_a + p.tau_s.secs();
            assert!(threshold < last);
            last = threshold;
            let w = p.conditions(ms(50.0)).unwrap().w_min_raw;
            assert!(w > last_w);
            last_w = w;
        }
    }

    proptest! {
        #[test]
        fn probabilities_in_unit_interval_and_nonincreasing_in_w(
            a in 0.0f64..10.0, b in 0.0f64..10.0, w1 in 0.0f64..10.0, dw in 0.0f64..10.0,
        ) {
            let (w_small, w_big) = (s(w1), s(w1 + dw));
            for f in [p_cv_case1, p_cv_case2, p_sim_violation_pair] {
                let p1 = f(t(a), t(b), w_small);
                let p2 = f(t(a), t(b), w_big);
                prop_assert!((0.0..=1.0).contains(&p1));
                prop_assert!(p2 <= p1);
            }
            prop_assert_eq!(
                p_sim_violation_n(&[t(a), t(b)], w_small).unwrap(),
                p_sim_violation_pair(t(a), t(b), w_small)
            );
        }

        #[test]
        fn case1_conditions_are_consistent(
            t_s in 0.01f64..5.0, tau_s in 0.0f64..5.0, tau_a in 0.0f64..5.0,
            t_min in 0.0f64..5.0, span in 0.0f64..5.0, frac in 0.0f64..1.0, w in 0.0f64..5.0,
        ) {
            let p = Case1Params { t_s: s(t_s), tau_s: s(tau_s), tau_a: s(tau_a),
                t_min: s(t_min), t_max: s(t_min + span), w: s(w) };
            let t_ab = s(t_min + frac * span);
            let r = p.conditions(t_ab).unwrap();
            prop_assert!(!(r.never_violated && r.certainly_violated));
            let grid = (0..200).map(|k| t_s * k as f64 / 200.0);
            if r.never_violated {
                for phi in grid.clone() {
                    prop_assert_eq!(p_cv_case1(p.t_s_at(phi), p.t_d(t_ab), p.w), 0.0);
                }
            }
            if r.certainly_violated {
                prop_assert_eq!(p_cv_case1(p.t_s_at(0.0), p.t_d(t_ab), p.w), 1.0);
            }
            prop_assert!(r.w_min.secs() >= 0.0);
        }

        #[test]
        fn case2_conditions_are_consistent(
            t_s in 0.01f64..5.0, tau_s in 0.0f64..5.0, tau_a in -2.0f64..5.0,
            t_min in 0.0f64..5.0, span in 0.0f64..10.0, frac in 0.0f64..1.0, w in 0.0f64..5.0,
        ) {
            let p = Case2Params { t_s: s(t_s), tau_s: s(tau_s), tau_a,
                t_min: s(t_min), t_max: s(t_min + span), w: s(w) };
            let t_ab = s(t_min + frac * span);
            let r = p.conditions(t_ab).unwrap();
            prop_assert!(!(r.never_violated && r.certainly_violated));
            let p_at = |phi: f64| {
                let gap = t_ab.secs() - p.t_s_at(phi);
                if gap <= 0.0 { 0.0 } else if w == 0.0 { 1.0 } else { (gap / w).min(1.0) }
            };
            if r.never_violated {
                for k in 0..200 {
                    prop_assert_eq!(p_at(t_s * k as f64 / 200.0), 0.0);
                }
            }
            if r.certainly_violated {
                prop_assert_eq!(p_at(0.0), 1.0);
            }
        }
    }
}
