//! Event observation and the text trace format.
//!
//! The trace is comma-separated with a header line:
//!
//! ```text
//! time_us,event,station,occupancy,queued,m,b,stations,blocked
//! ```
//!
//! `event` is `arrival`, `cycle_start` or `cycle_end`. Arrival rows fill
//! `station` and `blocked` (`0`/`1`); cycle rows fill `m`, `b` and
//! `stations` (`+`-joined, empty for the ideal policy). `occupancy` counts
//! queued and in-flight packets after the event.

use std::fmt::Write as _;

use crate::buffer::{Admission, PacketId, StationId};
use crate::time::Nanos;

pub const TRACE_HEADER: &str = "time_us,event,station,occupancy,queued,m,b,stations,blocked";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    Arrival {
        packet: PacketId,
        station: StationId,
        admission: Admission,
    },
    CycleStart {
        m: u32,
        b: u64,
        stations: Vec<StationId>,
        ends_at: Nanos,
    },
    CycleEnd {
        m: u32,
        b: u64,
        stations: Vec<StationId>,
        delivered: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub time: Nanos,
    pub kind: EventKind,
    pub occupancy: usize,
    pub queued: usize,
}

impl TraceEvent {
    pub fn is_blocked_arrival(&self) -> bool {
        matches!(
            self.kind,
            EventKind::Arrival {
                admission: Admission::Blocked,
                ..
            }
        )
    }

    pub fn to_line(&self) -> String {
        let time = self.time.as_micros_f64();
        let (occ, q) = (self.occupancy, self.queued);
        let join = |stations: &[StationId]| {
            stations
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join("+")
        };
        match &self.kind {
            EventKind::Arrival {
                station, admission, ..
            } => {
                let blocked = u8::from(*admission == Admission::Blocked);
                format!("{time},arrival,{station},{occ},{q},,,,{blocked}")
            }
            EventKind::CycleStart { m, b, stations, .. } => {
                format!("{time},cycle_start,,{occ},{q},{m},{b},{},", join(stations))
            }
            EventKind::CycleEnd { m, b, stations, .. } => {
                format!("{time},cycle_end,,{occ},{q},{m},{b},{},", join(stations))
            }
        }
    }
}

pub trait Observer {
    fn on_event(&mut self, event: &TraceEvent);
}

/// Discards every event.
pub struct NullObserver;

impl Observer for NullObserver {
    fn on_event(&mut self, _: &TraceEvent) {}
}

impl<F: FnMut(&TraceEvent)> Observer for F {
    fn on_event(&mut self, event: &TraceEvent) {
        self(event)
    }
}

/// Keeps every event in memory.
#[derive(Debug, Default)]
pub struct TraceRecorder {
    pub events: Vec<TraceEvent>,
}

impl Observer for TraceRecorder {
    fn on_event(&mut self, event: &TraceEvent) {
        self.events.push(event.clone());
    }
}

impl TraceRecorder {
    /// `(m, b)` of every cycle in start order.
    pub fn cycles(&self) -> Vec<(u32, u64)> {
        self.events
            .iter()
            .filter_map(|e| match e.kind {
                EventKind::CycleStart { m, b, .. } => Some((m, b)),
                _ => None,
            })
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(64 * (self.events.len() + 1));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for e in &self.events {
            let _ = writeln!(out, "{}", e.to_line());
        }
        out
    }
}
