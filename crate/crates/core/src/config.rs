use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phy::PhyMacParams;
use crate::scheduler::SchedulerPolicy;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackoffMode {
    /// Uniform integer number of slots in `[0, 2 x mean]` per cycle.
    #[default]
    Sampled,
    /// Every cycle uses the mean backoff.
    FixedMean,
}

/// Parameters of one simulation run. Field names double as the keys of
/// run configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// AP antennas `M`.
    pub antennas: u32,
    /// Active stations `N`; destinations are uniform over them.
    pub stations: u32,
    /// Shared buffer capacity `K` in packets.
    pub buffer_size: usize,
    /// Maximum A-MPDU size `B`.
    pub max_ampdu: u64,
    /// Aggregate offered load in bits/s. Exclusive with `lambda`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offered_load: Option<f64>,
    /// Aggregate arrival rate in packets/s. Exclusive with `offered_load`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    pub scheduler: SchedulerPolicy,
    pub seed: u64,
    /// Offered packets discarded from the statistics. Defaults to 10% of
    /// the horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warmup: Option<u64>,
    /// Total offered packets.
    pub horizon: u64,
    pub backoff: BackoffMode,
    /// Batches for the batch-means confidence intervals.
    pub batches: usize,
    pub phy: PhyMacParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            antennas: 4,
            stations: 8,
            buffer_size: 1000,
            max_ampdu: 64,
            offered_load: None,
            lambda: None,
            scheduler: SchedulerPolicy::Reference,
            seed: 1,
            warmup: None,
            horizon: 5_000_000,
            backoff: BackoffMode::Sampled,
            batches: 10,
            phy: PhyMacParams::default(),
        }
    }
}

impl SimConfig {
    /// Arrival rate in packets/s.
    pub fn arrival_rate(&self) -> f64 {
        match (self.lambda, self.offered_load) {
            (Some(lambda), _) => lambda,
            (None, Some(load)) => load / self.phy.packet_payload_bits as f64,
            (None, None) => f64::NAN,
        }
    }

    /// Offered load in bits/s.
    pub fn offered_load_bps(&self) -> f64 {
        self.arrival_rate() * self.phy.packet_payload_bits as f64
    }

    pub fn warmup_packets(&self) -> u64 {
        self.warmup.unwrap_or(self.horizon / 10)
    }

    pub fn with_load(mut self, bits_per_second: f64) -> Self {
        self.offered_load = Some(bits_per_second);
        self.lambda = None;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let at_least_one = [
            ("antennas", self.antennas as u64),
            ("stations", self.stations as u64),
            ("buffer_size", self.buffer_size as u64),
            ("max_ampdu", self.max_ampdu),
        ];
        for (key, value) in at_least_one {
            if value < 1 {
                return Err(Error::config(key, "must be at least 1"));
            }
        }
        match (self.offered_load, self.lambda) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "lambda",
                    "give either `offered_load` or `lambda`, not both",
                ))
            }
            (None, None) => {
                return Err(Error::config(
                    "offered_load",
                    "an arrival rate is required (`offered_load` or `lambda`)",
                ))
            }
            (Some(load), None) if !(load.is_finite() && load > 0.0) => {
                return Err(Error::config(
                    "offered_load",
                    format!("must be positive, got {load}"),
                ))
            }
            (None, Some(lambda)) if !(lambda.is_finite() && lambda > 0.0) => {
                return Err(Error::config(
                    "lambda",
                    format!("must be positive, got {lambda}"),
                ))
            }
            _ => {}
        }
        if self.batches < 2 {
            return Err(Error::config(
                "batches",
                "at least 2 batches are needed for confidence intervals",
            ));
        }
        let warmup = self.warmup_packets();
        if warmup >= self.horizon {
            return Err(Error::config(
                "warmup",
                format!(
                    "warm-up ({warmup}) must be shorter than the horizon ({})",
                    self.horizon
                ),
            ));
        }
        self.phy.validate()
    }
}
