//! One physical event perceived through several inputs: how often do the
//! copies land in different windows?

use twi::analytics::p_sim_violation_n;
use twi::inputs::InputModel;
use twi::sim::{estimate_sim_violation, FanOutInput, FanOutScenario};
use twi::{Duration, RandomSeed, TimePoint, TransmissionTimeModel, TwiSpec};

fn main() -> twi::Result<()> {
    let fixed = |d: f64| FanOutInput {
        delay: Duration::ZERO,
        model: InputModel::link(TransmissionTimeModel::constant(d)),
    };
    let scenario = FanOutScenario::new(vec![fixed(0.001), fixed(0.002), fixed(0.006)])?;
    let arrivals = [0.001, 0.002, 0.006].map(TimePoint::from_secs);
    for w_ms in [5.0, 10.0, 20.0] {
        let w = Duration::from_millis(w_ms);
        let est = estimate_sim_violation(&scenario, &TwiSpec::uniform(w), 200_000, RandomSeed(4))?;
        println!(
            "W = {w_ms:>4} ms: closed form {:.3}, simulated {:.3} +- {:.3}",
            p_sim_violation_n(&arrivals, w)?,
            est.p_hat,
            est.std_err
        );
    }
    Ok(())
}
