//! Pairwise-product bounds on ordering a chain of mixed inputs, and the
//! conditioning inequality behind them.

use twi::bounds::{theorem1_bound, theorem2_bound, verify_lemma1};
use twi::inputs::{InputModel, SensorMode, SensorSpec};
use twi::sim::{estimate_chain, CausalChainScenario};
use twi::{Duration, RandomSeed, TransmissionTimeModel, TwiSpec};

fn main() -> twi::Result<()> {
    let camera = SensorSpec::new(Duration::from_millis(33.0), Duration::ZERO, SensorMode::Synchronous)?;
    let chain = CausalChainScenario::new(
        vec![Duration::from_millis(10.0); 3],
        vec![
            InputModel::link(TransmissionTimeModel::uniform(0.005, 0.030)),
            InputModel::sensor(1, camera),
            InputModel::link(TransmissionTimeModel::shifted_exponential(0.002, 100.0)),
            InputModel::link(TransmissionTimeModel::two_point(0.004, 0.040, 0.8)),
        ],
    )?;
    for w_ms in [0.0, 10.0, 40.0] {
        let twi = TwiSpec::uniform(Duration::from_millis(w_ms));
        let est = estimate_chain(&chain, &twi, 200_000, RandomSeed(5))?;
        let pv = est.pairwise_probs();
        let bound = if twi.is_raw() { theorem1_bound(&pv) } else { theorem2_bound(&pv) };
        println!(
            "W = {w_ms:>4} ms: ordered {:.4} <= bound {bound:.4} (pairwise {:?})",
            est.joint.p_hat,
            pv.probs().iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>()
        );
    }

    let models = [
        TransmissionTimeModel::uniform(0.0, 1.0),
        TransmissionTimeModel::exponential(1.5),
        TransmissionTimeModel::two_point(0.2, 1.2, 0.5),
    ];
    let r = verify_lemma1([&models[0], &models[1], &models[2]], 200_000, RandomSeed(6))?;
    println!(
        "Pr[t2 <= t3 | t1 <= t2] = {:.4} vs Pr[t2 <= t3] = {:.4}: {:?}",
        r.lhs, r.rhs, r.verdict
    );
    Ok(())
}
