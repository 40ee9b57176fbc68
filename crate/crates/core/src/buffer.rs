//! The access point's single shared transmission buffer.
//!
//! Capacity is counted in packets and covers both queued packets and packets
//! of the transmission in progress: a transmitted MPDU keeps its slot until
//! the Block ACK confirms it.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheduler::TransmissionPlan;
use crate::time::Nanos;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PacketId(pub u64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StationId(pub u32);

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One fixed-length MPDU. The payload length is a PHY parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Packet {
    pub id: PacketId,
    pub destination: StationId,
    pub arrival: Nanos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Admission {
    Accepted,
    Blocked,
}

/// Per-station view of the queued (not in-flight) packets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StationCensus {
    pub station: StationId,
    pub count: usize,
    /// Queue position of the station's oldest waiting packet.
    pub first_position: usize,
}

/// Stations with waiting packets, ordered by `first_position`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Census {
    entries: Vec<StationCensus>,
}

impl Census {
    /// Builds a census from destinations in queue order.
    pub fn from_destinations<I: IntoIterator<Item = StationId>>(queue: I) -> Self {
        let mut index: HashMap<StationId, usize> = HashMap::new();
        let mut entries: Vec<StationCensus> = Vec::new();
        for (position, station) in queue.into_iter().enumerate() {
            match index.get(&station) {
                Some(&i) => entries[i].count += 1,
                None => {
                    index.insert(station, entries.len());
                    entries.push(StationCensus {
                        station,
                        count: 1,
                        first_position: position,
                    });
                }
            }
        }
        Census { entries }
    }

    pub fn entries(&self) -> &[StationCensus] {
        &self.entries
    }

    pub fn get(&self, station: StationId) -> Option<&StationCensus> {
        self.entries.iter().find(|e| e.station == station)
    }

    /// Number of distinct destinations.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SharedBuffer {
    capacity: usize,
    queued: VecDeque<Packet>,
    /// Sorted by packet id (arrival order).
    in_flight: Vec<Packet>,
}

impl SharedBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            queued: VecDeque::with_capacity(capacity),
            in_flight: Vec::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn occupancy(&self) -> usize {
        self.queued.len() + self.in_flight.len()
    }

    pub fn queued_len(&self) -> usize {
        self.queued.len()
    }

    pub fn in_flight_len(&self) -> usize {
        self.in_flight.len()
    }

    pub fn queued(&self) -> impl ExactSizeIterator<Item = &Packet> + '_ {
        self.queued.iter()
    }

    pub fn in_flight(&self) -> &[Packet] {
        &self.in_flight
    }

    /// Tail drop: the arriving packet is the one blocked when full.
    pub fn offer(&mut self, packet: Packet) -> Admission {
        if self.occupancy() < self.capacity {
            self.queued.push_back(packet);
            Admission::Accepted
        } else {
            Admission::Blocked
        }
    }

    pub fn census(&self) -> Census {
        Census::from_destinations(self.queued.iter().map(|p| p.destination))
    }

    /// Moves every packet named by `plan` from the queue to in-flight.
    pub fn dequeue_for_transmission(&mut self, plan: &TransmissionPlan) -> Result<()> {
        let mut wanted: Vec<PacketId> = plan.packet_ids().collect();
        if wanted.is_empty() {
            return Ok(());
        }
        wanted.sort_unstable();
        if wanted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Consistency("plan names a packet twice".into()));
        }
        let mut taken = Vec::with_capacity(wanted.len());
        self.queued.retain(|p| {
            if wanted.binary_search(&p.id).is_ok() {
                taken.push(*p);
                false
            } else {
                true
            }
        });
        if taken.len() != wanted.len() {
            // Restore the queue before reporting, keeping arrival order.
            let missing: Vec<PacketId> = wanted
                .iter()
                .filter(|id| !taken.iter().any(|p| p.id == **id))
                .copied()
                .collect();
            for p in taken.into_iter().rev() {
                self.queued.push_front(p);
            }
            self.queued.make_contiguous().sort_by_key(|p| p.id);
            return Err(Error::Consistency(format!(
                "planned packets not queued: {missing:?}"
            )));
        }
        self.in_flight.extend(taken);
        self.in_flight.sort_unstable_by_key(|p| p.id);
        Ok(())
    }

    /// Ends the transmission in progress. Acknowledged packets leave the
    /// buffer and are returned; the rest go back to the head of the queue in
    /// arrival order.
    pub fn complete_transmission(&mut self, acked: &[PacketId]) -> Result<Vec<Packet>> {
        for id in acked {
            if self.in_flight.binary_search_by_key(id, |p| p.id).is_err() {
                return Err(Error::Consistency(format!(
                    "acknowledged packet {id:?} is not in flight"
                )));
            }
        }
        let mut delivered = Vec::with_capacity(acked.len());
        let mut unacked = Vec::new();
        for p in self.in_flight.drain(..) {
            if acked.contains(&p.id) {
                delivered.push(p);
            } else {
                unacked.push(p);
            }
        }
        for p in unacked.into_iter().rev() {
            self.queued.push_front(p);
        }
        Ok(delivered)
    }

    /// Error-free completion: every in-flight packet is delivered.
    pub fn complete_all(&mut self) -> Vec<Packet> {
        std::mem::take(&mut self.in_flight)
    }
}
