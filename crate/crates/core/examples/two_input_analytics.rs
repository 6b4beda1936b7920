//! One sensed and one digital event: closed-form violation probabilities and
//! the smallest window that removes the violation.

use twi::analytics::{
    causality_conditions_case1, causality_conditions_case2, p_cv_case1, p_sim_violation_pair,
    twi_two_sensor_min_window, Case1Params, Case2Params,
};
use twi::{Duration, TimePoint};

fn ms(x: f64) -> Duration {
    Duration::from_millis(x)
}

fn main() -> twi::Result<()> {
    let w = twi_two_sensor_min_window(ms(10.0), ms(20.0), ms(1.0), ms(4.0))?;
    println!("two sensors stay simultaneous from W = {:.1} ms", w.millis());

    let (t1, t2) = (TimePoint::from_secs(0.001), TimePoint::from_secs(0.003));
    for wm in [1.0, 2.0, 4.0, 8.0] {
        println!("arrivals 2 ms apart, W = {wm} ms: Pr[split] = {}", p_sim_violation_pair(t1, t2, ms(wm)));
    }

    // the sensed cause registers at 15 ms, the digital effect at 12 ms
    let (t_s, t_d) = (TimePoint::from_secs(0.015), TimePoint::from_secs(0.012));
    for wm in [0.0, 1.0, 3.0, 10.0] {
        println!("W = {wm:>4} ms: Pr[effect stamped first] = {:.3}", p_cv_case1(t_s, t_d, ms(wm)));
    }

    // base station hearing a siren 30 m away while the machine reacts over radio
    let base_station = Case1Params {
        t_s: ms(1.0),
        tau_s: Duration::from_micros(10.0),
        tau_a: ms(100.0),
        t_min: Duration::ZERO,
        t_max: ms(50.0),
        w: Duration::ZERO,
    };
    let r = causality_conditions_case1(&base_station, ms(20.0))?;
    println!("sensed cause, digital effect: never violated = {}, W_min = {}", r.never_violated, r.w_min);

    // digital command over a satellite link; the actuator reacts in 5 ms
    let leo = Case2Params {
        t_s: ms(100.0),
        tau_s: ms(5.0),
        tau_a: 5e-3,
        t_min: ms(10.0),
        t_max: ms(500.0),
        w: Duration::ZERO,
    };
    let r = causality_conditions_case2(&leo, ms(500.0))?;
    println!(
        "digital cause, sensed effect: never violated = {}, W_min = {:.0} ms",
        r.never_violated,
        r.w_min.millis()
    );
    Ok(())
}
