//! Sweeping the window width over an exponential chain with common random
//! numbers, so the curves are smooth in W.

use twi::inputs::InputModel;
use twi::sim::{estimate_chain_sweep, CausalChainScenario, SweepMode};
use twi::{Duration, RandomSeed, TransmissionTimeModel};

fn main() -> twi::Result<()> {
    let tau = 1.0;
    let input = InputModel::link(TransmissionTimeModel::exponential(2.0 / tau));
    let windows: Vec<Duration> = (0..=12).map(|k| Duration::from_secs(0.25 * k as f64 * tau)).collect();
    for n in [2, 5, 10] {
        let chain = CausalChainScenario::iid(n, Duration::from_secs(tau), input.clone())?;
        let ests = estimate_chain_sweep(&chain, &windows, 100_000, RandomSeed(8), SweepMode::CommonRandomNumbers)?;
        let row: Vec<String> = ests.iter().map(|e| format!("{:.3}", e.joint.p_hat)).collect();
        println!("N = {n:>2}: {}", row.join(" "));
    }
    println!("(columns: W/tau = 0, 0.25, ..., 3)");
    Ok(())
}
