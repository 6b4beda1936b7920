//! Sizing the radio for a window: latency budget, window-edge misses and
//! slot alignment.

use twi::planner::{
    latency_budget_case2, p_miss_known_edge, p_miss_unknown_edge, quantize_to_slots, validate_twi_on_grid, SlotGrid,
};
use twi::{Duration, TimePoint, TransmissionTimeModel};

fn ms(x: f64) -> Duration {
    Duration::from_millis(x)
}

fn main() -> twi::Result<()> {
    let budget = latency_budget_case2(ms(10.0), Duration::ZERO, ms(20.0), ms(15.0))?;
    println!(
        "T_AB must stay below {:.0} ms; with 15 ms of sender processing the radio gets {:.0} ms",
        budget.max_t_ab.millis(),
        budget.radio_budget.millis()
    );
    if let Err(e) = latency_budget_case2(ms(10.0), Duration::ZERO, ms(20.0), ms(40.0)) {
        println!("40 ms sender budget: {e}");
    }

    let t = TransmissionTimeModel::constant(0.003);
    for w in [10.0, 30.0] {
        let unknown = p_miss_unknown_edge(&t, ms(w))?;
        println!(
            "T = 3 ms, W = {w} ms: miss with known edge {}, unknown edge {}",
            p_miss_known_edge(&t, ms(w))?,
            unknown.paper_value
        );
    }
    let jittery = TransmissionTimeModel::uniform(0.0, 0.05);
    let m = p_miss_unknown_edge(&jittery, ms(30.0))?;
    println!("T ~ U[0, 50 ms], W = 30 ms: min(1, E[T]/W) = {:.3}, E[min(T/W, 1)] = {:.3}", m.paper_value, m.exact_value);

    let grid = SlotGrid::nr_shortest();
    println!(
        "10 ms spans {} slots of {} us; 0.1 ms window on the grid: {}",
        quantize_to_slots(TimePoint::from_secs(0.01), grid),
        grid.slot().secs() * 1e6,
        validate_twi_on_grid(ms(0.1), grid)
    );
    Ok(())
}
