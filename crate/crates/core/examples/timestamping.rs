//! Stamping arrivals into windows and reading off the relations.

use twi::model::{EventKind, PerceivedEvent};
use twi::timestamp::{detect_causality_violation, detect_simultaneity_violation, event_throughput_loss, relate, stamp};
use twi::{Duration, TimePoint, TwiSpec};

fn main() -> twi::Result<()> {
    let w = Duration::from_millis(10.0);
    let omega = Duration::ZERO;
    for ms in [0.0, 5.0, 10.0, 10.001, 25.0] {
        println!("t = {ms:>7} ms -> stamp {}", stamp(TimePoint::from_secs(ms * 1e-3), w, omega)?);
    }

    let twi = TwiSpec::fixed(w, omega)?;
    let (a, b) = (TimePoint::from_secs(0.003), TimePoint::from_secs(0.007));
    println!("3 ms vs 7 ms, W = 10 ms: {:?}", relate(a, b, &twi, omega));
    println!("3 ms vs 7 ms, no window: {:?}", relate(a, b, &TwiSpec::none(), omega));

    // a cause perceived at 5 ms and its effect at 3 ms
    let cause = PerceivedEvent::new(0, EventKind::Sensing, TimePoint::from_secs(0.005), 0, TimePoint::ZERO)?;
    let effect = PerceivedEvent::new(1, EventKind::Digital, TimePoint::from_secs(0.003), 1, TimePoint::ZERO)?;
    println!(
        "causality violated: raw order {}, W = 10 ms {}",
        detect_causality_violation(&cause, &effect, &TwiSpec::none(), omega),
        detect_causality_violation(&cause, &effect, &twi, omega),
    );

    let copies = [0.001, 0.002, 0.011].map(TimePoint::from_secs);
    println!("one event seen at 1, 2, 11 ms split across windows: {}", detect_simultaneity_violation(&copies, &twi, omega)?);

    println!(
        "throughput loss of a 30 ms window on a 10 ms event stream: {}",
        event_throughput_loss(Duration::from_millis(30.0), Duration::from_millis(10.0))?
    );
    Ok(())
}
