//! Run statistics: per-batch accumulators and the summarized [`RunMetrics`].

use serde::Serialize;

use crate::stats;
use crate::time::Nanos;

/// Packet counts over the whole run, warm-up included.
/// `offered = accepted + blocked` and `accepted = delivered + residual`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PacketCounts {
    pub offered: u64,
    pub accepted: u64,
    pub blocked: u64,
    pub delivered: u64,
    /// Still queued or in flight when the run ended.
    pub residual: u64,
}

/// 95% confidence half-widths from batch means. `NaN` (serialized as
/// `null`) when fewer than two batches carry a sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct HalfWidths {
    pub blocking_probability: f64,
    pub mean_delay: f64,
    pub throughput: f64,
    pub mean_streams: f64,
    pub mean_ampdu: f64,
    pub mean_aggregated: f64,
    pub mean_occupancy: f64,
}

/// Accumulators for one batch. Packet statistics (blocking, delay) are
/// assigned by arrival index; cycle and time statistics by the instant
/// they occur.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct BatchStats {
    pub offered: u64,
    pub blocked: u64,
    /// Packets arrived in this batch and delivered before the run ended.
    pub delayed: u64,
    pub delay_sum_s: f64,
    /// Packets delivered while this batch was current.
    pub delivered: u64,
    pub cycles: u64,
    pub streams_sum: u64,
    pub ampdu_sum: u64,
    pub aggregated_sum: u64,
    /// Integral of buffer occupancy over time, packet-seconds.
    pub occupancy_integral: f64,
    pub duration_s: f64,
}

impl BatchStats {
    pub fn blocking_probability(&self) -> f64 {
        self.blocked as f64 / self.offered as f64
    }

    pub fn accepted(&self) -> u64 {
        self.offered - self.blocked
    }

    pub fn mean_delay(&self) -> f64 {
        self.delay_sum_s / self.delayed as f64
    }

    pub fn throughput(&self, payload_bits: u64) -> f64 {
        (self.delivered * payload_bits) as f64 / self.duration_s
    }

    pub fn mean_streams(&self) -> f64 {
        self.streams_sum as f64 / self.cycles as f64
    }

    pub fn mean_ampdu(&self) -> f64 {
        self.ampdu_sum as f64 / self.cycles as f64
    }

    pub fn mean_aggregated(&self) -> f64 {
        self.aggregated_sum as f64 / self.cycles as f64
    }

    pub fn mean_occupancy(&self) -> f64 {
        self.occupancy_integral / self.duration_s
    }

    fn merge(&mut self, other: &BatchStats) {
        self.offered += other.offered;
        self.blocked += other.blocked;
        self.delayed += other.delayed;
        self.delay_sum_s += other.delay_sum_s;
        self.delivered += other.delivered;
        self.cycles += other.cycles;
        self.streams_sum += other.streams_sum;
        self.ampdu_sum += other.ampdu_sum;
        self.aggregated_sum += other.aggregated_sum;
        self.occupancy_integral += other.occupancy_integral;
        self.duration_s += other.duration_s;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunMetrics {
    pub blocking_probability: f64,
    /// Mean system delay (arrival to Block ACK), seconds.
    pub mean_delay: f64,
    /// Delivered payload, bits/s.
    pub throughput: f64,
    /// `E[m]`
    pub mean_streams: f64,
    /// `E[b]`
    pub mean_ampdu: f64,
    /// `E[m * b]`
    pub mean_aggregated: f64,
    /// Time-averaged queued plus in-flight packets.
    pub mean_occupancy: f64,
    pub half_widths: HalfWidths,
    pub counts: PacketCounts,
    pub measured_offered: u64,
    pub measured_blocked: u64,
    pub measured_cycles: u64,
    pub measured_time_s: f64,
    pub offered_load: f64,
    pub lambda: f64,
    pub batches: Vec<BatchStats>,
}

fn half_width_of(batches: &[BatchStats], f: impl Fn(&BatchStats) -> f64) -> f64 {
    let samples: Vec<f64> = batches.iter().map(f).filter(|x| x.is_finite()).collect();
    stats::half_width_95(&samples).unwrap_or(f64::NAN)
}

impl RunMetrics {
    pub(crate) fn summarize(
        batches: Vec<BatchStats>,
        counts: PacketCounts,
        payload_bits: u64,
        lambda: f64,
    ) -> Self {
        let mut total = BatchStats::default();
        for b in &batches {
            total.merge(b);
        }
        let half_widths = HalfWidths {
            blocking_probability: half_width_of(&batches, BatchStats::blocking_probability),
            mean_delay: half_width_of(&batches, BatchStats::mean_delay),
            throughput: half_width_of(&batches, |b| b.throughput(payload_bits)),
            mean_streams: half_width_of(&batches, BatchStats::mean_streams),
            mean_ampdu: half_width_of(&batches, BatchStats::mean_ampdu),
            mean_aggregated: half_width_of(&batches, BatchStats::mean_aggregated),
            mean_occupancy: half_width_of(&batches, BatchStats::mean_occupancy),
        };
        RunMetrics {
            blocking_probability: total.blocking_probability(),
            mean_delay: total.mean_delay(),
            throughput: total.throughput(payload_bits),
            mean_streams: total.mean_streams(),
            mean_ampdu: total.mean_ampdu(),
            mean_aggregated: total.mean_aggregated(),
            mean_occupancy: total.mean_occupancy(),
            half_widths,
            counts,
            measured_offered: total.offered,
            measured_blocked: total.blocked,
            measured_cycles: total.cycles,
            measured_time_s: total.duration_s,
            offered_load: lambda * payload_bits as f64,
            lambda,
            batches,
        }
    }
}

/// Accumulates statistics while the engine runs.
#[derive(Debug)]
pub(crate) struct Collector {
    warmup: u64,
    measured: u64,
    batches: Vec<BatchStats>,
    batch_starts: Vec<Nanos>,
    /// Batch containing the current instant, `None` during warm-up.
    current: Option<usize>,
    last_time: Nanos,
    occupancy: usize,
}

impl Collector {
    pub fn new(warmup: u64, horizon: u64, batches: usize) -> Self {
        Self {
            warmup,
            measured: horizon - warmup,
            batches: vec![BatchStats::default(); batches],
            batch_starts: Vec::with_capacity(batches),
            current: None,
            last_time: Nanos::ZERO,
            occupancy: 0,
        }
    }

    fn batch_of(&self, index: u64) -> Option<usize> {
        let offset = index.checked_sub(self.warmup)?;
        if offset >= self.measured {
            return None;
        }
        Some((offset as u128 * self.batches.len() as u128 / self.measured as u128) as usize)
    }

    /// Advances the clock, integrating occupancy up to `now`.
    pub fn advance(&mut self, now: Nanos) {
        if let Some(k) = self.current {
            let dt = (now - self.last_time).as_secs_f64();
            self.batches[k].occupancy_integral += self.occupancy as f64 * dt;
        }
        self.last_time = now;
    }

    pub fn set_occupancy(&mut self, occupancy: usize) {
        self.occupancy = occupancy;
    }

    pub fn arrival(&mut self, index: u64, now: Nanos, blocked: bool) {
        let Some(k) = self.batch_of(index) else {
            return;
        };
        if self.batch_starts.len() == k {
            self.batch_starts.push(now);
            self.current = Some(k);
        }
        let b = &mut self.batches[k];
        b.offered += 1;
        b.blocked += u64::from(blocked);
    }

    pub fn delivered(&mut self, index: u64, delay: Nanos) {
        if let Some(k) = self.batch_of(index) {
            let b = &mut self.batches[k];
            b.delayed += 1;
            b.delay_sum_s += delay.as_secs_f64();
        }
    }

    pub fn cycle_completed(&mut self, m: u32, b: u64, delivered: usize) {
        if let Some(k) = self.current {
            let s = &mut self.batches[k];
            s.cycles += 1;
            s.streams_sum += m as u64;
            s.ampdu_sum += b;
            s.aggregated_sum += delivered as u64;
            s.delivered += delivered as u64;
        }
    }

    pub fn finish(mut self, end: Nanos) -> Vec<BatchStats> {
        self.advance(end);
        let starts = &self.batch_starts;
        for (k, batch) in self.batches.iter_mut().enumerate() {
            let (Some(&start), stop) = (starts.get(k), starts.get(k + 1).copied().unwrap_or(end))
            else {
                continue;
            };
            batch.duration_s = (stop - start).as_secs_f64();
        }
        self.batches
    }
}
