//! Synchronous and asynchronous sensors, and a digital link, fed the same events.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use twi::inputs::{LinkSpec, SensorMode, SensorSpec};
use twi::{Duration, TimePoint, TransmissionTimeModel};

fn main() -> twi::Result<()> {
    let events: Vec<TimePoint> = [0.0, 3.0, 12.0, 14.0, 30.0].iter().map(|ms| TimePoint::from_secs(ms * 1e-3)).collect();
    let t_s = Duration::from_millis(10.0);
    let tau_s = Duration::from_millis(1.0);

    for mode in [SensorMode::Synchronous, SensorMode::Asynchronous] {
        let sensor = SensorSpec::new(t_s, tau_s, mode)?;
        println!("{mode:?} sensor, {:.0} bit/s max:", sensor.max_event_rate());
        for rec in sensor.detect_stream(&events, Duration::ZERO)? {
            match rec.arrival {
                Some(t) => println!("  event {} detected at {:.1} ms", rec.source_index, t.millis()),
                None => println!("  event {} missed (window busy)", rec.source_index),
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sensor = SensorSpec::new(t_s, tau_s, SensorMode::Synchronous)?;
    let delays: Vec<String> = (0..5)
        .map(|_| format!("{:.2}", sensor.sample_detection_time(&mut rng).millis()))
        .collect();
    println!("random detection delays (ms): {}", delays.join(", "));

    let link = LinkSpec::new(TransmissionTimeModel::shifted_exponential(0.002, 500.0))?;
    let arrivals: Vec<String> = events
        .iter()
        .map(|&t| format!("{:.2}", link.sample_arrival(t, &mut rng).millis()))
        .collect();
    println!("link arrivals (ms): {}", arrivals.join(", "));
    Ok(())
}
