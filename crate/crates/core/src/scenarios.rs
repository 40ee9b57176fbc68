//! Canned configurations.

use crate::buffer::StationId;
use crate::config::{BackoffMode, SimConfig};
use crate::engine::{ScriptedArrivals, Simulation};
use crate::error::Result;
use crate::metrics::RunMetrics;
use crate::time::Nanos;
use crate::trace::Observer;

/// The four-transmission walkthrough of the shared buffer with `M = 2`,
/// `B = 2`, `K = 8` (stations are numbered 1..=4 as in the walkthrough).
///
/// 1. One packet to station 1 reaches an idle AP and is sent alone.
/// 2. Meanwhile two packets for station 4 and two for station 2 arrive; they
///    go out together as `(m, b) = (2, 2)`.
/// 3. During that transmission two packets for station 3, one for station 1
///    and two for station 2 arrive. The four in-flight packets still hold
///    buffer slots, so the last arrival is blocked. The queue is then
///    `[3, 3, 1, 2]`, giving `psi = 1` and `(m, b) = (2, 1)` to stations 3
///    and 1.
/// 4. Arrivals for 3, 2, 1, 1 leave two packets for each of 3, 2 and 1; the
///    FIFO tie-break serves stations 3 and 2 with `(m, b) = (2, 2)`.
///
/// A final cycle drains the two packets left for station 1.
pub fn worked_example() -> (SimConfig, Vec<(Nanos, StationId)>) {
    let script: [(f64, u32); 14] = [
        (0.0, 1),
        // during the first cycle (0 .. 425.5 µs)
        (100.0, 4),
        (150.0, 4),
        (200.0, 2),
        (250.0, 2),
        // during the second cycle (425.5 .. 1011 µs)
        (500.0, 3),
        (550.0, 3),
        (600.0, 1),
        (650.0, 2),
        (700.0, 2),
        // during the third cycle (1011 .. 1564.5 µs)
        (1100.0, 3),
        (1150.0, 2),
        (1200.0, 1),
        (1250.0, 1),
    ];
    let arrivals = script
        .iter()
        .map(|&(us, s)| (Nanos::from_micros_f64(us), StationId(s)))
        .collect::<Vec<_>>();
    let config = SimConfig {
        antennas: 2,
        stations: 5,
        buffer_size: 8,
        max_ampdu: 2,
        lambda: Some(1.0),
        warmup: Some(0),
        horizon: arrivals.len() as u64,
        batches: 2,
        backoff: BackoffMode::FixedMean,
        ..SimConfig::default()
    };
    (config, arrivals)
}

/// Replays [`worked_example`] to completion.
pub fn run_worked_example(observer: &mut dyn Observer) -> Result<RunMetrics> {
    let (config, arrivals) = worked_example();
    Simulation::new(&config, ScriptedArrivals::new(arrivals), observer)?
        .drain(true)
        .run()
}
