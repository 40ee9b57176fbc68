//! The discrete-event engine.
//!
//! Only two kinds of event exist: a packet arrival and the end of the
//! transmission cycle in progress (the AP is the only transmitter, so at
//! most one cycle is active). A cycle starts as soon as the queue is
//! non-empty and the medium is idle; its plan is fixed from the queue state
//! at that instant and packets arriving meanwhile wait for the next cycle.
//! When an arrival and a cycle end coincide, the cycle end is processed
//! first.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::buffer::{Admission, Packet, PacketId, SharedBuffer, StationId};
use crate::config::{BackoffMode, SimConfig};
use crate::error::{Error, Result};
use crate::metrics::{Collector, PacketCounts, RunMetrics};
use crate::scheduler::TransmissionPlan;
use crate::time::Nanos;
use crate::trace::{EventKind, NullObserver, Observer, TraceEvent};

/// RNG stream ids. Each stream is an independent ChaCha8 stream keyed by
/// the run seed, so policies compared under one seed see identical
/// arrival traces.
const ARRIVAL_STREAM: u64 = 0;
const DESTINATION_STREAM: u64 = 1;
const BACKOFF_STREAM: u64 = 2;

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Produces absolute arrival instants and destinations in time order.
pub trait ArrivalSource {
    fn next_arrival(&mut self) -> Option<(Nanos, StationId)>;
}

/// Poisson arrivals with uniformly distributed destinations.
pub struct PoissonArrivals {
    gaps: ChaCha8Rng,
    destinations: ChaCha8Rng,
    exp: Exp<f64>,
    stations: u32,
    clock: Nanos,
}

impl PoissonArrivals {
    pub fn new(lambda: f64, stations: u32, seed: u64) -> Result<Self> {
        let exp = Exp::new(lambda)
            .map_err(|e| Error::InvalidArgument(format!("arrival rate {lambda}: {e}")))?;
        if stations == 0 {
            return Err(Error::InvalidArgument("no stations".into()));
        }
        Ok(Self {
            gaps: stream_rng(seed, ARRIVAL_STREAM),
            destinations: stream_rng(seed, DESTINATION_STREAM),
            exp,
            stations,
            clock: Nanos::ZERO,
        })
    }

    /// Inter-arrival gap (rounded to the nanosecond) and destination.
    pub fn draw(&mut self) -> (Nanos, StationId) {
        let gap = Nanos::from_secs_f64(self.exp.sample(&mut self.gaps));
        let station = StationId(self.destinations.random_range(0..self.stations));
        (gap, station)
    }
}

impl ArrivalSource for PoissonArrivals {
    fn next_arrival(&mut self) -> Option<(Nanos, StationId)> {
        let (gap, station) = self.draw();
        self.clock += gap;
        Some((self.clock, station))
    }
}

/// A fixed list of `(instant, destination)` arrivals.
#[derive(Clone, Debug)]
pub struct ScriptedArrivals {
    arrivals: std::vec::IntoIter<(Nanos, StationId)>,
}

impl ScriptedArrivals {
    pub fn new(mut arrivals: Vec<(Nanos, StationId)>) -> Self {
        arrivals.sort_by_key(|a| a.0);
        Self {
            arrivals: arrivals.into_iter(),
        }
    }

    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.len() == 0
    }
}

impl ArrivalSource for ScriptedArrivals {
    fn next_arrival(&mut self) -> Option<(Nanos, StationId)> {
        self.arrivals.next()
    }
}

struct ActiveCycle {
    end: Nanos,
    plan: TransmissionPlan,
}

/// One simulation run. Runs until `horizon` packets have been offered, or
/// until the source is exhausted; with `drain` set the buffer is then
/// emptied before stopping.
pub struct Simulation<'a, S> {
    config: &'a SimConfig,
    source: S,
    observer: &'a mut dyn Observer,
    drain: bool,
    buffer: SharedBuffer,
    backoff_rng: ChaCha8Rng,
    pending: Option<(Nanos, StationId)>,
    cycle: Option<ActiveCycle>,
    counts: PacketCounts,
    collector: Collector,
    now: Nanos,
}

impl<'a, S: ArrivalSource> Simulation<'a, S> {
    pub fn new(config: &'a SimConfig, source: S, observer: &'a mut dyn Observer) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            source,
            observer,
            drain: false,
            buffer: SharedBuffer::new(config.buffer_size),
            backoff_rng: stream_rng(config.seed, BACKOFF_STREAM),
            pending: None,
            cycle: None,
            counts: PacketCounts::default(),
            collector: Collector::new(config.warmup_packets(), config.horizon, config.batches),
            now: Nanos::ZERO,
        })
    }

    pub fn drain(mut self, drain: bool) -> Self {
        self.drain = drain;
        self
    }

    pub fn run(mut self) -> Result<RunMetrics> {
        loop {
            if self.pending.is_none() && self.counts.offered < self.config.horizon {
                self.pending = self.source.next_arrival();
            }
            let cycle_end = self.cycle.as_ref().map(|c| c.end);
            match (cycle_end, self.pending) {
                (Some(end), Some((at, _))) if end <= at => self.finish_cycle(end)?,
                (Some(end), None) => {
                    if !self.drain && self.counts.offered > 0 {
                        break;
                    }
                    self.finish_cycle(end)?;
                }
                (_, Some((at, station))) => {
                    self.pending = None;
                    self.arrive(at, station)?;
                    if !self.drain && self.counts.offered == self.config.horizon {
                        break;
                    }
                }
                (None, None) => break,
            }
        }
        self.counts.residual = self.buffer.occupancy() as u64;
        let batches =
            std::mem::replace(&mut self.collector, Collector::new(0, 1, 0)).finish(self.now);
        Ok(RunMetrics::summarize(
            batches,
            self.counts,
            self.config.phy.packet_payload_bits,
            self.config.arrival_rate(),
        ))
    }

    fn advance(&mut self, to: Nanos) {
        debug_assert!(to >= self.now, "clock moved backwards");
        self.collector.advance(to);
        self.now = to;
    }

    fn emit(&mut self, kind: EventKind) {
        let event = TraceEvent {
            time: self.now,
            kind,
            occupancy: self.buffer.occupancy(),
            queued: self.buffer.queued_len(),
        };
        self.observer.on_event(&event);
    }

    fn arrive(&mut self, at: Nanos, station: StationId) -> Result<()> {
        self.advance(at);
        let id = PacketId(self.counts.offered);
        self.counts.offered += 1;
        let admission = self.buffer.offer(Packet {
            id,
            destination: station,
            arrival: at,
        });
        let blocked = admission == Admission::Blocked;
        if blocked {
            self.counts.blocked += 1;
        } else {
            self.counts.accepted += 1;
        }
        self.collector.arrival(id.0, at, blocked);
        self.collector.set_occupancy(self.buffer.occupancy());
        self.emit(EventKind::Arrival {
            packet: id,
            station,
            admission,
        });
        if !blocked && self.cycle.is_none() {
            self.start_cycle()?;
        }
        Ok(())
    }

    fn start_cycle(&mut self) -> Result<()> {
        let cfg = self.config;
        let plan = cfg
            .scheduler
            .plan(&self.buffer, cfg.antennas, cfg.max_ampdu)
            .ok_or_else(|| Error::Consistency("no plan for a non-empty queue".into()))?;
        self.buffer.dequeue_for_transmission(&plan)?;
        let backoff = match cfg.backoff {
            BackoffMode::FixedMean => cfg.phy.mean_backoff(),
            BackoffMode::Sampled => {
                let slots = self
                    .backoff_rng
                    .random_range(0..=cfg.phy.max_backoff_slots());
                cfg.phy.slot_time * slots as u64
            }
        };
        let (m, b) = (plan.m(), plan.b());
        let timing = cfg.phy.cycle_with_backoff(m, b, cfg.antennas, backoff)?;
        let end = self.now + timing.total;
        let stations = plan.stations().collect();
        self.cycle = Some(ActiveCycle { end, plan });
        self.emit(EventKind::CycleStart {
            m,
            b,
            stations,
            ends_at: end,
        });
        Ok(())
    }

    fn finish_cycle(&mut self, end: Nanos) -> Result<()> {
        self.advance(end);
        let cycle = self
            .cycle
            .take()
            .expect("finish_cycle without an active cycle");
        let delivered = self.buffer.complete_all();
        if delivered.len() != cycle.plan.len() {
            return Err(Error::Consistency(format!(
                "{} packets in flight for a plan of {}",
                delivered.len(),
                cycle.plan.len()
            )));
        }
        for p in &delivered {
            self.collector.delivered(p.id.0, end - p.arrival);
        }
        self.counts.delivered += delivered.len() as u64;
        let (m, b) = (cycle.plan.m(), cycle.plan.b());
        self.collector.cycle_completed(m, b, delivered.len());
        self.collector.set_occupancy(self.buffer.occupancy());
        self.emit(EventKind::CycleEnd {
            m,
            b,
            stations: cycle.plan.stations().collect(),
            delivered: delivered.len(),
        });
        if self.buffer.queued_len() > 0 {
            self.start_cycle()?;
        }
        Ok(())
    }
}

/// Runs `config` with Poisson arrivals.
pub fn run(config: &SimConfig) -> Result<RunMetrics> {
    run_with(config, &mut NullObserver)
}

/// Runs `config` with Poisson arrivals, reporting every event to `observer`.
pub fn run_with(config: &SimConfig, observer: &mut dyn Observer) -> Result<RunMetrics> {
    config.validate()?;
    let source = PoissonArrivals::new(config.arrival_rate(), config.stations, config.seed)?;
    Simulation::new(config, source, observer)?.run()
}
