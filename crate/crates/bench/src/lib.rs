//! Workloads shared by the criterion benches.

use muagg_core::{Nanos, Packet, PacketId, SharedBuffer, SimConfig, StationId};

/// A buffer of `len` queued packets spread round-robin-with-skew over
/// `stations` destinations.
pub fn loaded_buffer(len: usize, stations: u32) -> SharedBuffer {
    let mut buffer = SharedBuffer::new(len);
    for i in 0..len as u64 {
        let destination = StationId(((i * 7 + i / 3) % stations as u64) as u32);
        buffer.offer(Packet {
            id: PacketId(i),
            destination,
            arrival: Nanos(i),
        });
    }
    buffer
}

/// An M=4, N=8, K=1000 run near the 1% blocking point.
pub fn near_capacity(horizon: u64) -> SimConfig {
    SimConfig {
        horizon,
        ..SimConfig::default()
    }
    .with_load(1090e6)
}
