//! A chain whose links run at one of two rates: exact ordering probability,
//! its pairwise bound and a Monte-Carlo check.

use twi::bounds::{two_rate_exact, two_rate_pairwise_bound};
use twi::inputs::InputModel;
use twi::sim::{estimate_chain, CausalChainScenario};
use twi::{Duration, RandomSeed, TransmissionTimeModel, TwiSpec};

fn main() -> twi::Result<()> {
    let input = InputModel::link(TransmissionTimeModel::two_point(1.0, 2.0, 0.5));
    println!("{:>3} {:>9} {:>9} {:>9} {:>7}", "N", "exact", "bound", "estimate", "z");
    for n in 2..=10u32 {
        let chain = CausalChainScenario::iid(n as usize, Duration::from_secs(0.5), input.clone())?;
        let est = estimate_chain(&chain, &TwiSpec::none(), 200_000, RandomSeed(u64::from(n)))?;
        let exact = two_rate_exact(n)?;
        println!(
            "{n:>3} {exact:>9.5} {:>9.5} {:>9.5} {:>7.2}",
            two_rate_pairwise_bound(n)?,
            est.joint.p_hat,
            est.joint.z_score(exact)
        );
    }
    Ok(())
}
