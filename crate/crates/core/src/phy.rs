//! Frame air-times and the duration of one MU-MIMO transmission cycle.
//!
//! A cycle is `backoff, DIFS, RTS*, m x (SIFS, CTS*), A-MPDU, m x (SIFS, BA)`.
//! Every frame is a VHT preamble followed by an integer number of OFDM
//! symbols carrying `SF + body + TB` bits. The RTS* and the A-MPDU preambles
//! always carry one VHT-LTF per AP antenna, independently of how many
//! streams are scheduled; CTS* and BA are single-stream frames.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::time::Nanos;

/// Physical and MAC layer constants.
///
/// Defaults reproduce an 80 MHz, 256-QAM 5/6 channel (1560 data bits per
/// 4 µs symbol) with 5 GHz OFDM interframe spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhyMacParams {
    #[serde(rename = "symbol_time_us", with = "micros")]
    pub symbol_time: Nanos,
    /// Fixed part of the VHT preamble; each VHT-LTF adds one symbol.
    #[serde(rename = "preamble_base_us", with = "micros")]
    pub preamble_base: Nanos,
    #[serde(rename = "sifs_us", with = "micros")]
    pub sifs: Nanos,
    #[serde(rename = "difs_us", with = "micros")]
    pub difs: Nanos,
    #[serde(rename = "slot_time_us", with = "micros")]
    pub slot_time: Nanos,
    pub mean_backoff_slots: f64,
    pub bits_per_symbol: u64,
    pub service_field_bits: u64,
    pub tail_bits: u64,
    /// Only present when more than one MPDU is aggregated.
    pub mpdu_delimiter_bits: u64,
    pub mac_header_bits: u64,
    pub ba_bits: u64,
    pub rts_base_bits: u64,
    /// Extra RTS* address bits per antenna beyond the first.
    pub rts_per_extra_addr_bits: u64,
    pub cts_base_bits: u64,
    /// CSI feedback carried in each CTS*, per AP antenna.
    pub csi_bits_per_antenna: u64,
    pub packet_payload_bits: u64,
}

impl Default for PhyMacParams {
    fn default() -> Self {
        Self {
            symbol_time: Nanos::from_micros(4),
            preamble_base: Nanos::from_micros(36),
            sifs: Nanos::from_micros(16),
            difs: Nanos::from_micros(34),
            slot_time: Nanos::from_micros(9),
            mean_backoff_slots: 15.5,
            bits_per_symbol: 1560,
            service_field_bits: 16,
            tail_bits: 6,
            mpdu_delimiter_bits: 32,
            mac_header_bits: 288,
            ba_bits: 256,
            rts_base_bits: 160,
            rts_per_extra_addr_bits: 46,
            cts_base_bits: 112,
            csi_bits_per_antenna: 1872,
            packet_payload_bits: 12_000,
        }
    }
}

/// The phases of one transmission cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CycleBreakdown {
    pub backoff: Nanos,
    pub difs: Nanos,
    pub rts: Nanos,
    /// `m x (SIFS + CTS*)`
    pub cts_phase: Nanos,
    pub ampdu: Nanos,
    /// `m x (SIFS + BA)`
    pub ba_phase: Nanos,
    pub total: Nanos,
}

impl CycleBreakdown {
    pub fn parts(&self) -> [(&'static str, Nanos); 6] {
        [
            ("backoff", self.backoff),
            ("difs", self.difs),
            ("rts", self.rts),
            ("cts_phase", self.cts_phase),
            ("ampdu", self.ampdu),
            ("ba_phase", self.ba_phase),
        ]
    }
}

fn require_positive(name: &str, value: u64) -> Result<()> {
    if value < 1 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be at least 1, got {value}"
        )));
    }
    Ok(())
}

impl PhyMacParams {
    pub fn validate(&self) -> Result<()> {
        let durations = [
            ("phy.symbol_time_us", self.symbol_time),
            ("phy.preamble_base_us", self.preamble_base),
            ("phy.sifs_us", self.sifs),
            ("phy.difs_us", self.difs),
            ("phy.slot_time_us", self.slot_time),
        ];
        for (key, value) in durations {
            if value == Nanos::ZERO {
                return Err(Error::config(key, "duration must be strictly positive"));
            }
        }
        if !(self.mean_backoff_slots.is_finite() && self.mean_backoff_slots > 0.0) {
            return Err(Error::config(
                "phy.mean_backoff_slots",
                format!("must be a positive number, got {}", self.mean_backoff_slots),
            ));
        }
        if self.bits_per_symbol == 0 {
            return Err(Error::config("phy.bits_per_symbol", "must be positive"));
        }
        if self.packet_payload_bits == 0 {
            return Err(Error::config("phy.packet_payload_bits", "must be positive"));
        }
        Ok(())
    }

    /// VHT preamble and headers with `num_ltf` long training fields.
    pub fn preamble_duration(&self, num_ltf: u32) -> Result<Nanos> {
        require_positive("num_ltf", num_ltf as u64)?;
        Ok(self.preamble_base + self.symbol_time * num_ltf as u64)
    }

    /// `ceil(payload_bits / L_DBPS)`. Callers add the service and tail bits.
    pub fn symbols_for_bits(&self, payload_bits: u64) -> u64 {
        payload_bits.div_ceil(self.bits_per_symbol)
    }

    fn frame(&self, num_ltf: u32, body_bits: u64) -> Result<Nanos> {
        let bits = self.service_field_bits + body_bits + self.tail_bits;
        Ok(self.preamble_duration(num_ltf)? + self.symbol_time * self.symbols_for_bits(bits))
    }

    pub fn rts_bits(&self, antennas: u32) -> u64 {
        self.rts_base_bits + self.rts_per_extra_addr_bits * (antennas as u64).saturating_sub(1)
    }

    pub fn cts_bits(&self, antennas: u32) -> u64 {
        self.cts_base_bits + self.csi_bits_per_antenna * antennas as u64
    }

    /// MPDU bits of an A-MPDU carrying `b` packets (no SF/TB).
    pub fn ampdu_body_bits(&self, b: u64) -> u64 {
        let per_packet = self.mac_header_bits + self.packet_payload_bits;
        if b > 1 {
            b * (self.mpdu_delimiter_bits + per_packet)
        } else {
            b * per_packet
        }
    }

    pub fn rts_duration(&self, antennas: u32) -> Result<Nanos> {
        require_positive("antennas", antennas as u64)?;
        self.frame(antennas, self.rts_bits(antennas))
    }

    pub fn cts_duration(&self, antennas: u32) -> Result<Nanos> {
        require_positive("antennas", antennas as u64)?;
        self.frame(1, self.cts_bits(antennas))
    }

    pub fn ampdu_duration(&self, b: u64, antennas: u32) -> Result<Nanos> {
        require_positive("b", b)?;
        require_positive("antennas", antennas as u64)?;
        self.frame(antennas, self.ampdu_body_bits(b))
    }

    pub fn ba_duration(&self) -> Nanos {
        self.frame(1, self.ba_bits)
            .expect("single-LTF preamble is always valid")
    }

    /// Mean backoff `mean_backoff_slots x slot_time`.
    pub fn mean_backoff(&self) -> Nanos {
        Nanos((self.slot_time.0 as f64 * self.mean_backoff_slots).round() as u64)
    }

    /// Largest backoff counter drawn in sampled mode: the uniform window
    /// `[0, max]` has mean `mean_backoff_slots`.
    pub fn max_backoff_slots(&self) -> u32 {
        (2.0 * self.mean_backoff_slots).round() as u32
    }

    /// `T(m, b)` using the mean backoff.
    pub fn cycle_duration(&self, m: u32, b: u64, antennas: u32) -> Result<CycleBreakdown> {
        self.cycle_with_backoff(m, b, antennas, self.mean_backoff())
    }

    /// `T(m, b)` with an explicit backoff period, as drawn per cycle by the
    /// simulator in sampled mode.
    pub fn cycle_with_backoff(
        &self,
        m: u32,
        b: u64,
        antennas: u32,
        backoff: Nanos,
    ) -> Result<CycleBreakdown> {
        require_positive("antennas", antennas as u64)?;
        if m < 1 || m > antennas {
            return Err(Error::InvalidArgument(format!(
                "stream count m={m} outside [1, {antennas}]"
            )));
        }
        let streams = m as u64;
        let rts = self.rts_duration(antennas)?;
        let cts_phase = (self.sifs + self.cts_duration(antennas)?) * streams;
        let ampdu = self.ampdu_duration(b, antennas)?;
        let ba_phase = (self.sifs + self.ba_duration()) * streams;
        let total = backoff + self.difs + rts + cts_phase + ampdu + ba_phase;
        Ok(CycleBreakdown {
            backoff,
            difs: self.difs,
            rts,
            cts_phase,
            ampdu,
            ba_phase,
            total,
        })
    }

    /// Saturation throughput in bits/s: `M` streams of `B` packets every cycle.
    pub fn s_max(&self, antennas: u32, max_ampdu: u64) -> Result<f64> {
        require_positive("max_ampdu", max_ampdu)?;
        let cycle = self.cycle_duration(antennas, max_ampdu, antennas)?;
        let bits = antennas as u64 * max_ampdu * self.packet_payload_bits;
        Ok(bits as f64 / cycle.total.as_secs_f64())
    }
}

/// Serializes a [`Nanos`] as a floating-point microsecond count.
pub(crate) mod micros {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::time::Nanos;

    pub fn serialize<S: Serializer>(value: &Nanos, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(value.as_micros_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Nanos, D::Error> {
        let us = f64::deserialize(d)?;
        if !us.is_finite() || us < 0.0 {
            return Err(serde::de::Error::custom(format!(
                "duration must be a non-negative number of microseconds, got {us}"
            )));
        }
        Ok(Nanos::from_micros_f64(us))
    }
}
