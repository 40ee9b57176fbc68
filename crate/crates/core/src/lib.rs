//! Discrete-event simulation of the downlink of an 802.11ac MU-MIMO access
//! point that combines multi-user spatial multiplexing with A-MPDU packet
//! aggregation.
//!
//! The crate is organized bottom-up:
//!
//! * [`time`]: the integer nanosecond clock used by every duration.
//! * [`phy`]: frame air-times, the RTS*/CTS*/A-MPDU/BA transmission cycle and
//!   the saturation throughput `S_max(M, B)`.
//! * [`buffer`]: the single shared finite FIFO buffer with in-flight accounting.
//! * [`scheduler`]: the reference aggregation scheme and the ideal upper-bound
//!   policy.
//! * [`engine`]: Poisson arrivals, the transmission-cycle state machine and
//!   metric collection.
//! * [`stats`]: batch-means confidence intervals.

pub mod buffer;
pub mod config;
pub mod engine;
mod error;
pub mod metrics;
pub mod phy;
pub mod scenarios;
pub mod scheduler;
pub mod stats;
pub mod time;
pub mod trace;

pub use buffer::{Admission, Census, Packet, PacketId, SharedBuffer, StationCensus, StationId};
pub use config::{BackoffMode, SimConfig};
pub use engine::{run, run_with, ArrivalSource, PoissonArrivals, ScriptedArrivals, Simulation};
pub use error::{Error, Result};
pub use metrics::{HalfWidths, PacketCounts, RunMetrics};
pub use phy::{CycleBreakdown, PhyMacParams};
pub use scheduler::{
    plan_ideal, plan_reference, SchedulerPolicy, Selection, Stream, TransmissionPlan,
};
pub use time::Nanos;
pub use trace::{EventKind, NullObserver, Observer, TraceEvent, TraceRecorder};
