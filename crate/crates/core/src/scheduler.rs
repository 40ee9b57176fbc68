//! Transmission planning: which stations are served, with how many spatial
//! streams `m` and how many aggregated packets `b` per stream.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::buffer::{Census, PacketId, SharedBuffer, StationId};
use crate::error::Error;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchedulerPolicy {
    /// Destination-aware joint spatial multiplexing and aggregation.
    #[default]
    Reference,
    /// Upper bound: any queued packet may ride any stream.
    Ideal,
}

impl SchedulerPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            SchedulerPolicy::Reference => "reference",
            SchedulerPolicy::Ideal => "ideal",
        }
    }

    /// Plans the next transmission from the queued packets of `buffer`.
    pub fn plan(
        self,
        buffer: &SharedBuffer,
        antennas: u32,
        max_ampdu: u64,
    ) -> Option<TransmissionPlan> {
        match self {
            SchedulerPolicy::Reference => {
                let selection = plan_reference(&buffer.census(), antennas, max_ampdu)?;
                Some(selection.materialize(buffer))
            }
            SchedulerPolicy::Ideal => {
                let (m, b) = plan_ideal(buffer.queued_len(), antennas, max_ampdu)?;
                let mut oldest = buffer.queued().map(|p| p.id);
                let streams = (0..m)
                    .map(|_| Stream {
                        station: None,
                        packets: oldest.by_ref().take(b as usize).collect(),
                    })
                    .collect();
                Some(TransmissionPlan::new(streams))
            }
        }
    }
}

impl fmt::Display for SchedulerPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchedulerPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "reference" => Ok(SchedulerPolicy::Reference),
            "ideal" => Ok(SchedulerPolicy::Ideal),
            other => Err(Error::config(
                "scheduler",
                format!("unknown policy `{other}`"),
            )),
        }
    }
}

/// Stations chosen by the reference scheme, in stream order, and the number
/// of packets each stream carries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    pub stations: Vec<StationId>,
    pub b: u64,
}

impl Selection {
    pub fn m(&self) -> u32 {
        self.stations.len() as u32
    }

    /// Picks each selected station's `b` oldest queued packets.
    pub fn materialize(&self, buffer: &SharedBuffer) -> TransmissionPlan {
        let b = self.b as usize;
        let mut streams: Vec<Stream> = self
            .stations
            .iter()
            .map(|&s| Stream {
                station: Some(s),
                packets: Vec::with_capacity(b),
            })
            .collect();
        let mut missing = b * streams.len();
        for packet in buffer.queued() {
            if missing == 0 {
                break;
            }
            if let Some(stream) = streams
                .iter_mut()
                .find(|s| s.station == Some(packet.destination))
            {
                if stream.packets.len() < b {
                    stream.packets.push(packet.id);
                    missing -= 1;
                }
            }
        }
        TransmissionPlan::new(streams)
    }
}

/// One spatial stream of a transmission. `station` is `None` for streams
/// planned by the ideal policy, which ignores destinations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stream {
    pub station: Option<StationId>,
    pub packets: Vec<PacketId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransmissionPlan {
    streams: Vec<Stream>,
}

impl TransmissionPlan {
    pub fn new(streams: Vec<Stream>) -> Self {
        Self { streams }
    }

    pub fn streams(&self) -> &[Stream] {
        &self.streams
    }

    pub fn m(&self) -> u32 {
        self.streams.len() as u32
    }

    pub fn b(&self) -> u64 {
        self.streams.first().map_or(0, |s| s.packets.len() as u64)
    }

    /// Total packets `l = m * b`.
    pub fn len(&self) -> usize {
        self.streams.iter().map(|s| s.packets.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stations(&self) -> impl Iterator<Item = StationId> + '_ {
        self.streams.iter().filter_map(|s| s.station)
    }

    pub fn packet_ids(&self) -> impl Iterator<Item = PacketId> + '_ {
        self.streams.iter().flat_map(|s| s.packets.iter().copied())
    }
}

/// The reference aggregation scheme.
///
/// `m = min(xi, M)` with `xi` the number of distinct queued destinations.
/// `psi` is the count of the m-th station when stations are sorted by
/// descending count (ties broken by the age of their oldest packet), so that
/// `m` stations hold at least `psi` packets each; `b = min(psi, B)`. Among the
/// stations holding at least `psi` packets, the `m` whose oldest packet is
/// earliest in the queue are served.
pub fn plan_reference(census: &Census, antennas: u32, max_ampdu: u64) -> Option<Selection> {
    if census.is_empty() || antennas == 0 || max_ampdu == 0 {
        return None;
    }
    let m = census.distinct().min(antennas as usize);
    let mut by_count: Vec<_> = census.entries().iter().collect();
    by_count.sort_by(|a, b| {
        b.count
            .cmp(&a.count)
            .then(a.first_position.cmp(&b.first_position))
    });
    let psi = by_count[m - 1].count;
    // Census entries are already in first-position order.
    let stations = census
        .entries()
        .iter()
        .filter(|e| e.count >= psi)
        .take(m)
        .map(|e| e.station)
        .collect();
    Some(Selection {
        stations,
        b: (psi as u64).min(max_ampdu),
    })
}

/// The ideal upper-bound policy: `m = min(q, M)`, `b = min(floor(q / m), B)`.
pub fn plan_ideal(queued: usize, antennas: u32, max_ampdu: u64) -> Option<(u32, u64)> {
    if queued == 0 || antennas == 0 || max_ampdu == 0 {
        return None;
    }
    let m = queued.min(antennas as usize);
    let b = ((queued / m) as u64).min(max_ampdu);
    Some((m as u32, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buffer::{Packet, StationCensus};
    use crate::time::Nanos;

    fn census(entries: &[(u32, usize, usize)]) -> Census {
        // Rebuild a queue consistent with the listed (station, count, first position).
        let len = entries.iter().map(|e| e.1).sum::<usize>();
        let mut slots: Vec<Option<u32>> = vec![None; len];
        for &(s, _, first) in entries {
            slots[first] = Some(s);
        }
        let mut remaining: Vec<(u32, usize)> = entries.iter().map(|e| (e.0, e.1 - 1)).collect();
        for slot in slots.iter_mut().filter(|s| s.is_none()) {
            let r = remaining.iter_mut().find(|r| r.1 > 0).unwrap();
            *slot = Some(r.0);
            r.1 -= 1;
        }
        let c = Census::from_destinations(slots.into_iter().map(|s| StationId(s.unwrap())));
        for &(s, count, first) in entries {
            assert_eq!(
                c.get(StationId(s)),
                Some(&StationCensus {
                    station: StationId(s),
                    count,
                    first_position: first
                })
            );
        }
        c
    }

    fn ids(v: &[u32]) -> Vec<StationId> {
        v.iter().copied().map(StationId).collect()
    }

    #[test]
    fn fifo_tie_break_with_single_packets() {
        let sel = plan_reference(&census(&[(3, 2, 0), (1, 1, 2), (2, 1, 3)]), 2, 2).unwrap();
        assert_eq!(
            sel,
            Selection {
                stations: ids(&[3, 1]),
                b: 1
            }
        );
    }

    #[test]
    fn fifo_tie_break_with_full_streams() {
        let sel = plan_reference(&census(&[(3, 2, 0), (2, 2, 1), (1, 2, 4)]), 2, 2).unwrap();
        assert_eq!(
            sel,
            Selection {
                stations: ids(&[3, 2]),
                b: 2
            }
        );
    }

    #[test]
    fn single_destination_caps_streams() {
        let c = Census::from_destinations(std::iter::repeat_n(StationId(7), 200));
        let sel = plan_reference(&c, 4, 64).unwrap();
        assert_eq!(sel.m(), 1);
        assert_eq!(sel.b, 64);
    }

    #[test]
    fn empty_census_has_no_plan() {
        assert!(plan_reference(&Census::default(), 4, 64).is_none());
    }

    #[test]
    fn eligibility_uses_uncapped_psi() {
        // Counts 10, 9, 3 with M=2, B=2: psi = 9 so only stations 5 and 6 are
        // eligible even though station 4 (oldest) also has >= b packets.
        let sel = plan_reference(&census(&[(4, 3, 0), (5, 10, 1), (6, 9, 2)]), 2, 2).unwrap();
        assert_eq!(
            sel,
            Selection {
                stations: ids(&[5, 6]),
                b: 2
            }
        );
    }

    #[test]
    fn ideal_plan() {
        assert_eq!(plan_ideal(10, 4, 64), Some((4, 2)));
        assert_eq!(plan_ideal(1, 8, 64), Some((1, 1)));
        assert_eq!(plan_ideal(1000, 4, 64), Some((4, 64)));
        assert_eq!(plan_ideal(0, 4, 64), None);
    }

    #[test]
    fn materialize_takes_oldest_per_station() {
        let mut buf = SharedBuffer::new(16);
        for (i, d) in [1, 2, 1, 3, 1, 2, 2].into_iter().enumerate() {
            buf.offer(Packet {
                id: PacketId(i as u64),
                destination: StationId(d),
                arrival: Nanos(0),
            });
        }
        let plan = SchedulerPolicy::Reference.plan(&buf, 2, 64).unwrap();
        assert_eq!(plan.m(), 2);
        assert_eq!(plan.b(), 3);
        let streams: Vec<Vec<u64>> = plan
            .streams()
            .iter()
            .map(|s| s.packets.iter().map(|p| p.0).collect())
            .collect();
        assert_eq!(streams, vec![vec![0, 2, 4], vec![1, 5, 6]]);

        let ideal = SchedulerPolicy::Ideal.plan(&buf, 2, 64).unwrap();
        assert_eq!((ideal.m(), ideal.b()), (2, 3));
        assert_eq!(
            ideal.packet_ids().map(|p| p.0).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, 4, 5]
        );
    }

    #[test]
    fn policy_names() {
        assert_eq!(
            "ideal".parse::<SchedulerPolicy>().unwrap(),
            SchedulerPolicy::Ideal
        );
        assert!("fair".parse::<SchedulerPolicy>().is_err());
    }
}
