use muagg_core::trace::EventKind;
use muagg_core::{
    plan_ideal, plan_reference, run, run_with, scenarios, BackoffMode, Census, PhyMacParams,
    SchedulerPolicy, SimConfig, StationId, TraceEvent, TraceRecorder,
};
use proptest::prelude::*;

fn small(load_mbps: f64) -> SimConfig {
    SimConfig {
        horizon: 200_000,
        ..SimConfig::default()
    }
    .with_load(load_mbps * 1e6)
}

#[test]
fn ideal_can_send_fewer_packets_in_one_cycle() {
    // Five packets for one station with M=4: the reference policy aggregates
    // all five on one stream, the ideal policy sends 4 x 1.
    let census = Census::from_destinations([StationId(0); 5]);
    let sel = plan_reference(&census, 4, 64).unwrap();
    assert_eq!((sel.m(), sel.b), (1, 5));
    assert_eq!(plan_ideal(5, 4, 64), Some((4, 1)));
}

#[test]
fn worked_example_replays() {
    let mut rec = TraceRecorder::default();
    let metrics = scenarios::run_worked_example(&mut rec).unwrap();
    assert_eq!(rec.cycles(), vec![(1, 1), (2, 2), (2, 1), (2, 2), (1, 2)]);
    assert_eq!(metrics.counts.offered, 14);
    assert_eq!(metrics.counts.blocked, 1);
    assert_eq!(metrics.counts.delivered, 13);
    assert_eq!(metrics.counts.residual, 0);
    let blocked: Vec<&TraceEvent> = rec
        .events
        .iter()
        .filter(|e| e.is_blocked_arrival())
        .collect();
    assert_eq!(blocked.len(), 1);
    assert_eq!(blocked[0].occupancy, 8);
    assert!(matches!(
        blocked[0].kind,
        EventKind::Arrival {
            station: StationId(2),
            ..
        }
    ));
}

#[test]
fn idle_system_serves_packets_alone() {
    let config = SimConfig {
        lambda: Some(1.0),
        horizon: 2_000,
        ..SimConfig::default()
    };
    let m = run(&config).unwrap();
    assert_eq!(m.blocking_probability, 0.0);
    assert_eq!(m.mean_streams, 1.0);
    assert_eq!(m.mean_ampdu, 1.0);
    // Mean backoff is preserved by the sampled draws, so the delay is T(1, 1).
    let t11 = PhyMacParams::default()
        .cycle_duration(1, 1, 4)
        .unwrap()
        .total
        .as_secs_f64();
    assert!(
        (m.mean_delay / t11 - 1.0).abs() < 0.02,
        "{} vs {t11}",
        m.mean_delay
    );

    let fixed = run(&SimConfig {
        backoff: BackoffMode::FixedMean,
        ..config
    })
    .unwrap();
    assert!((fixed.mean_delay - t11).abs() < 1e-9);
}

#[test]
fn metric_ranges_and_throughput_identity() {
    for (load, policy) in [
        (600.0, SchedulerPolicy::Reference),
        (1500.0, SchedulerPolicy::Reference),
        (1500.0, SchedulerPolicy::Ideal),
    ] {
        let config = SimConfig {
            scheduler: policy,
            ..small(load)
        };
        let m = run(&config).unwrap();
        let s_max = config.phy.s_max(4, 64).unwrap();
        assert!((0.0..=1.0).contains(&m.blocking_probability));
        assert!((1.0..=4.0).contains(&m.mean_streams));
        assert!((1.0..=64.0).contains(&m.mean_ampdu));
        assert!(m.throughput <= s_max * 1.01, "{} > {s_max}", m.throughput);
        let delivered: u64 = m.batches.iter().map(|b| b.delivered).sum();
        assert!((m.throughput - delivered as f64 * 12_000.0 / m.measured_time_s).abs() < 1e-3);
        let carried_bound = (1.0 - m.blocking_probability) * config.offered_load_bps();
        assert!(m.throughput <= carried_bound + 3.0 * m.half_widths.throughput);
        assert_eq!(m.measured_offered, 180_000);
    }
}

#[test]
fn ideal_policy_saturates_with_one_station() {
    let phy = PhyMacParams::default();
    let s_max = phy.s_max(4, 64).unwrap();
    let config = SimConfig {
        stations: 1,
        buffer_size: 1024,
        scheduler: SchedulerPolicy::Ideal,
        horizon: 300_000,
        ..SimConfig::default()
    }
    .with_load(2.0 * s_max);
    let m = run(&config).unwrap();
    assert!(m.throughput >= 0.97 * s_max, "{}", m.throughput);

    // The reference policy can use a single stream only.
    let reference = run(&SimConfig {
        scheduler: SchedulerPolicy::Reference,
        ..config
    })
    .unwrap();
    assert_eq!(reference.mean_streams, 1.0);
    assert!(reference.throughput < 0.5 * s_max);
}

#[test]
fn larger_buffer_blocks_less() {
    let at = |k| {
        run(&SimConfig {
            buffer_size: k,
            ..small(1090.0)
        })
        .unwrap()
        .blocking_probability
    };
    assert!(at(2000) < at(500));
}

#[test]
fn every_event_respects_capacity() {
    let config = SimConfig {
        buffer_size: 300,
        stations: 16,
        ..small(1600.0)
    };
    let mut violations = 0;
    let mut observer = |e: &TraceEvent| {
        if e.occupancy > 300 || e.queued > e.occupancy {
            violations += 1;
        }
    };
    let m = run_with(&config, &mut observer).unwrap();
    assert_eq!(violations, 0);
    assert!(m.blocking_probability > 0.0);
}

fn queue_strategy() -> impl Strategy<Value = (Vec<u32>, u32, u64)> {
    (1u32..=10).prop_flat_map(|n| (proptest::collection::vec(0..n, 0..=50), 1u32..=8, 1u64..=16))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conservation_is_exact(
        load in 50.0f64..2500.0,
        stations in 1u32..20,
        buffer_size in 1usize..600,
        antennas in 1u32..=8,
        ideal in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let config = SimConfig {
            antennas,
            stations,
            buffer_size,
            seed,
            horizon: 5_000,
            scheduler: if ideal { SchedulerPolicy::Ideal } else { SchedulerPolicy::Reference },
            ..SimConfig::default()
        }
        .with_load(load * 1e6);
        let c = run(&config).unwrap().counts;
        prop_assert_eq!(c.offered, 5_000);
        prop_assert_eq!(c.offered, c.accepted + c.blocked);
        prop_assert_eq!(c.accepted, c.delivered + c.residual);
        prop_assert!(c.residual <= buffer_size as u64);
    }

    #[test]
    fn reference_plan_properties((queue, antennas, max_ampdu) in queue_strategy()) {
        let census = Census::from_destinations(queue.iter().copied().map(StationId));
        let Some(sel) = plan_reference(&census, antennas, max_ampdu) else {
            prop_assert!(queue.is_empty());
            return Ok(());
        };
        let m = sel.stations.len();
        // xi rule
        prop_assert_eq!(m, census.distinct().min(antennas as usize));
        // distinct stations, each holding at least b packets
        let mut sorted = sel.stations.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), m);
        let count = |s: StationId| census.get(s).unwrap().count;
        prop_assert!(sel.stations.iter().all(|&s| count(s) as u64 >= sel.b));
        prop_assert!(sel.b >= 1 && sel.b <= max_ampdu);
        // maximality: no b' > psi reachable by m stations
        let mut counts: Vec<usize> = census.entries().iter().map(|e| e.count).collect();
        counts.sort_unstable_by(|a, b| b.cmp(a));
        let psi = counts[m - 1];
        prop_assert_eq!(sel.b, (psi as u64).min(max_ampdu));
        prop_assert!(counts.iter().filter(|&&c| c > psi).count() < m);
        // FIFO tie-break among stations holding >= psi
        let worst_selected = sel.stations.iter().map(|&s| census.get(s).unwrap().first_position).max().unwrap();
        for e in census.entries() {
            if e.count >= psi && !sel.stations.contains(&e.station) {
                prop_assert!(e.first_position > worst_selected);
            }
        }
        // determinism
        prop_assert_eq!(plan_reference(&census, antennas, max_ampdu), Some(sel.clone()));
        // Both policies stream to min(q, M) destinations at most.
        let (mi, _) = plan_ideal(queue.len(), antennas, max_ampdu).unwrap();
        prop_assert!(mi as usize >= m);
    }
}
