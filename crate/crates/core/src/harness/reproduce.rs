use super::output::{Cell, ColumnLabels, ResultRow, ResultTable};
use crate::bounds::{theorem1_bound, theorem2_bound, two_rate_exact, two_rate_pairwise_bound};
use crate::inputs::InputModel;
use crate::model::{Duration, RandomSeed, TransmissionTimeModel};
use crate::sim::{estimate_chain, estimate_chain_windows, CausalChainScenario, ChainEstimate};
use crate::timestamp::TwiSpec;
use crate::Result;

/// `W/τ` grid of the window sweep.
pub const FIG8_W_OVER_TAU: [f64; 13] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0];

const FIG7_T0: f64 = 1.0;
const FIG7_TAU: f64 = 0.5;
const FIG8_TAU: f64 = 1.0;
const FIG8_CHAINS: [usize; 2] = [2, 10];

/// Bound on joint ordering from the estimated pairwise probabilities.
pub(crate) fn pairwise_bound(est: &ChainEstimate) -> f64 {
    let pv = est.pairwise_probs();
    if est.window == Duration::ZERO {
        theorem1_bound(&pv)
    } else {
        theorem2_bound(&pv)
    }
}

/// Two-rate chain (`T ∈ {T0, 2T0}` equally likely, `τ = T0/2`, no TWI),
/// `N = 2..=10`: exact ordering probability, pairwise bound and estimate.
pub fn figure7_table(trials: u64, seed: RandomSeed) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        ColumnLabels::new(Some("exact"), Some("bound"), Some("mc_estimate")),
        &["N"],
        &["bound_over_exact"],
    );
    let input = InputModel::link(TransmissionTimeModel::two_point(FIG7_T0, 2.0 * FIG7_T0, 0.5));
    for n in 2..=10u32 {
        let params = vec![Cell::from(n as u64)];
        let id = format!("fig7_n{n}");
        let scenario = CausalChainScenario::iid(n as usize, Duration::from_secs(FIG7_TAU), input.clone())?;
        let est = estimate_chain(&scenario, &TwiSpec::none(), trials, seed.derive(u64::from(n)))?;
        let exact = two_rate_exact(n)?;
        let bound = two_rate_pairwise_bound(n)?;
        let mut row = ResultRow::new(id, params);
        row.analytic_value = Some(exact);
        row.bound_value = Some(bound);
        row.estimate = Some(est.joint);
        row.extras = vec![Cell::Num(bound / exact)];
        table.rows.push(row);
    }
    Ok(table)
}

/// Exponential transmission times with mean `τ/2`, `W/τ` over
/// [`FIG8_W_OVER_TAU`], chains of 2 and 10 events, common random numbers
/// across the window grid.
pub fn figure8_table(trials: u64, seed: RandomSeed) -> Result<ResultTable> {
    let mut table = ResultTable::new(ColumnLabels::new(None, None, Some("estimate")), &["W_over_tau", "N"], &["pairwise_bound"]);
    let input = InputModel::link(TransmissionTimeModel::exponential(2.0 / FIG8_TAU));
    let twis: Vec<TwiSpec> = FIG8_W_OVER_TAU
        .iter()
        .map(|&r| TwiSpec::uniform(Duration::from_secs(r * FIG8_TAU)))
        .collect();
    for n in FIG8_CHAINS {
        let scenario = CausalChainScenario::iid(n, Duration::from_secs(FIG8_TAU), input.clone())?;
        let ests = estimate_chain_windows(&scenario, &twis, trials, seed.derive(n as u64))?;
        for (r, est) in FIG8_W_OVER_TAU.iter().zip(&ests) {
            let mut row = ResultRow::new(format!("fig8_n{n}_w{r}"), vec![Cell::Num(*r), Cell::from(n)]);
            row.estimate = Some(est.joint);
            row.extras = vec![Cell::Num(pairwise_bound(est))];
            table.rows.push(row);
        }
    }
    Ok(table)
}
