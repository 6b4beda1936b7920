//! When the cause's transmission time has an exponential tail, violations
//! decay only exponentially in the window width.

use twi::bounds::{appendix_d_lower_bound, laplace_transform};
use twi::inputs::InputModel;
use twi::sim::{estimate_chain_windows, CausalChainScenario};
use twi::{Duration, RandomSeed, TransmissionTimeModel, TwiSpec};

fn main() -> twi::Result<()> {
    let (lambda, tau) = (2.0, 0.5);
    let t2 = TransmissionTimeModel::uniform(0.0, 1.0);
    println!("E[exp(-lambda T2)] = {:.4}", laplace_transform(&t2, lambda));

    let pair = CausalChainScenario::new(
        vec![Duration::from_secs(tau)],
        vec![
            InputModel::link(TransmissionTimeModel::exponential(lambda)),
            InputModel::link(t2.clone()),
        ],
    )?;
    let windows = [0.0, 0.5, 1.0, 1.5, 2.0];
    let twis: Vec<TwiSpec> = windows.iter().map(|&w| TwiSpec::uniform(Duration::from_secs(w))).collect();
    let ests = estimate_chain_windows(&pair, &twis, 400_000, RandomSeed(2))?;
    for (w, est) in windows.iter().zip(&ests) {
        let lb = appendix_d_lower_bound(lambda, tau, *w, &t2)?;
        let p = est.pairwise[0].complement();
        println!("W = {w:.1}: Pr[violation] = {:.4} +- {:.4}, lower bound {lb:.4}", p.p_hat, p.std_err);
    }
    Ok(())
}
