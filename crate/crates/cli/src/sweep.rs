//! Parameter sweeps.
//!
//! A sweep file has a `[base]` run configuration, one `axis` with either
//! `values = [...]` or `range = { start, stop, step }`, a `replications`
//! count and optional `[[variants]]` tables (a `name` plus configuration
//! overrides). Every variant is crossed with every axis value; replication
//! `r` runs with seed `base.seed + r`.
//!
//! CSV columns, in order:
//!
//! ```text
//! variant,axis,axis_value,replication,seed,scheduler,antennas,stations,
//! buffer_size,max_ampdu,offered_load_bps,lambda_pps,blocking_probability,
//! blocking_probability_hw,mean_delay_s,mean_delay_hw,throughput_bps,
//! throughput_hw,mean_streams,mean_streams_hw,mean_ampdu,mean_ampdu_hw,
//! mean_aggregated,mean_aggregated_hw,mean_occupancy,offered,accepted,
//! blocked,delivered,residual[,runtime_s]
//! ```

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use muagg_core::{RunMetrics, SimConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::settings;

pub const CSV_COLUMNS: &[&str] = &[
    "variant",
    "axis",
    "axis_value",
    "replication",
    "seed",
    "scheduler",
    "antennas",
    "stations",
    "buffer_size",
    "max_ampdu",
    "offered_load_bps",
    "lambda_pps",
    "blocking_probability",
    "blocking_probability_hw",
    "mean_delay_s",
    "mean_delay_hw",
    "throughput_bps",
    "throughput_hw",
    "mean_streams",
    "mean_streams_hw",
    "mean_ampdu",
    "mean_ampdu_hw",
    "mean_aggregated",
    "mean_aggregated_hw",
    "mean_occupancy",
    "offered",
    "accepted",
    "blocked",
    "delivered",
    "residual",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[serde(alias = "load")]
    OfferedLoad,
    #[serde(alias = "N")]
    Stations,
    #[serde(alias = "K")]
    BufferSize,
    #[serde(alias = "M")]
    Antennas,
    Alpha,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::OfferedLoad => "offered_load",
            Axis::Stations => "stations",
            Axis::BufferSize => "buffer_size",
            Axis::Antennas => "antennas",
            Axis::Alpha => "alpha",
        }
    }

    fn apply(self, config: &mut SimConfig, value: f64) -> Result<()> {
        let count = |v: f64| -> Result<u64> {
            if v < 1.0 || v.fract() != 0.0 {
                bail!("{} axis value {v} must be a positive integer", self.name());
            }
            Ok(v as u64)
        };
        match self {
            Axis::OfferedLoad => *config = config.clone().with_load(value),
            Axis::Stations => config.stations = count(value)? as u32,
            Axis::BufferSize => config.buffer_size = count(value)? as usize,
            Axis::Antennas => config.antennas = count(value)? as u32,
            // K = round(alpha * M * B), using the point's M and B.
            Axis::Alpha => {
                let k = (value * config.antennas as f64 * config.max_ampdu as f64).round();
                if k < 1.0 {
                    bail!("alpha {value} gives an empty buffer");
                }
                config.buffer_size = k as usize;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Range {
    start: f64,
    stop: f64,
    step: f64,
}

impl Range {
    fn values(&self) -> Result<Vec<f64>> {
        if self.step.is_nan() || self.step <= 0.0 || self.stop < self.start {
            bail!("range needs step > 0 and stop >= start");
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    axis: Axis,
    values: Option<Vec<f64>>,
    range: Option<Range>,
    #[serde(default = "one")]
    replications: u32,
    #[serde(default)]
    base: Table,
    #[serde(default)]
    variants: Vec<Table>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, Serialize)]
pub struct Variant {
    pub name: String,
    /// The variant's configuration before the axis value is applied.
    pub config: SimConfig,
}

/// A fully resolved sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub replications: u32,
    pub variants: Vec<Variant>,
}

/// One (variant, value, replication) run.
#[derive(Clone, Debug)]
pub struct Point {
    pub variant: String,
    pub axis_value: f64,
    pub replication: u32,
    pub config: SimConfig,
}

impl SweepSpec {
    /// Resolves a sweep file. `overrides` apply to the base configuration;
    /// `seed` replaces the base seed.
    pub fn from_table(table: Table, overrides: &[String], seed: Option<u64>) -> Result<Self> {
        let file: SweepFile = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| {
                anyhow!("invalid sweep specification: {}", e.message())
            })?;
        let values = match (file.values, file.range) {
            (Some(v), None) => v,
            (None, Some(r)) => r.values()?,
            _ => bail!("a sweep needs exactly one of `values` or `range`"),
        };
        if values.is_empty() {
            bail!("sweep has no axis values");
        }
        if file.replications < 1 {
            bail!("`replications` must be at least 1");
        }
        let mut base = file.base;
        settings::apply_overrides(&mut base, overrides)?;
        if let Some(seed) = seed {
            base.insert("seed".into(), Value::Integer(seed as i64));
        }
        let raw_variants = if file.variants.is_empty() {
            vec![Table::new()]
        } else {
            file.variants
        };
        let mut variants = Vec::with_capacity(raw_variants.len());
        for (i, mut overrides) in raw_variants.into_iter().enumerate() {
            let name = match overrides.remove("name") {
                Some(Value::String(s)) => s,
                Some(_) => bail!("variant {i}: `name` must be a string"),
                None => format!("v{i}"),
            };
            let mut table = base.clone();
            for (k, v) in overrides {
                merge(&mut table, k, v);
            }
            // On a load axis the rate comes from the axis values.
            let load_axis = file.axis == Axis::OfferedLoad;
            if load_axis && !table.contains_key("offered_load") && !table.contains_key("lambda") {
                table.insert("offered_load".into(), Value::Float(values[0]));
            }
            let config = settings::to_config(table).with_context(|| format!("variant `{name}`"))?;
            variants.push(Variant { name, config });
        }
        let spec = SweepSpec {
            axis: file.axis,
            values,
            replications: file.replications,
            variants,
        };
        // Surface invalid points before anything runs.
        spec.points()?;
        Ok(spec)
    }

    pub fn points(&self) -> Result<Vec<Point>> {
        let mut points = Vec::new();
        for variant in &self.variants {
            for &value in &self.values {
                for replication in 0..self.replications {
                    let mut config = variant.config.clone();
                    self.axis.apply(&mut config, value)?;
                    config.seed = variant.config.seed + replication as u64;
                    config.validate().map_err(|e| {
                        anyhow!(
                            "variant `{}`, {}={value}: {e}",
                            variant.name,
                            self.axis.name()
                        )
                    })?;
                    points.push(Point {
                        variant: variant.name.clone(),
                        axis_value: value,
                        replication,
                        config,
                    });
                }
            }
        }
        Ok(points)
    }
}

fn merge(table: &mut Table, key: String, value: Value) {
    match (table.get_mut(&key), value) {
        (Some(Value::Table(existing)), Value::Table(incoming)) => {
            for (k, v) in incoming {
                merge(existing, k, v);
            }
        }
        (_, value) => {
            table.insert(key, value);
        }
    }
}

pub struct PointResult {
    pub point: Point,
    pub metrics: RunMetrics,
    pub runtime_s: f64,
}

/// Runs every point on a pool of `workers` threads. Results come back in
/// point order.
pub fn execute(spec: &SweepSpec, workers: usize) -> Result<Vec<PointResult>> {
    let points = spec.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?;
    pool.install(|| {
        points
            .into_par_iter()
            .map(|point| {
                let started = Instant::now();
                let metrics = muagg_core::run(&point.config).map_err(|e| {
                    anyhow!(
                        "run failed for variant `{}`, {}={}, replication {}: {e}",
                        point.variant,
                        spec.axis.name(),
                        point.axis_value,
                        point.replication
                    )
                })?;
                Ok(PointResult {
                    point,
                    metrics,
                    runtime_s: started.elapsed().as_secs_f64(),
                })
            })
            .collect()
    })
}

fn record(axis: Axis, r: &PointResult) -> Vec<String> {
    let c = &r.point.config;
    let m = &r.metrics;
    let hw = &m.half_widths;
    let f = |x: f64| x.to_string();
    vec![
        r.point.variant.clone(),
        axis.name().to_string(),
        f(r.point.axis_value),
        r.point.replication.to_string(),
        c.seed.to_string(),
        c.scheduler.to_string(),
        c.antennas.to_string(),
        c.stations.to_string(),
        c.buffer_size.to_string(),
        c.max_ampdu.to_string(),
        f(c.offered_load_bps()),
        f(c.arrival_rate()),
        f(m.blocking_probability),
        f(hw.blocking_probability),
        f(m.mean_delay),
        f(hw.mean_delay),
        f(m.throughput),
        f(hw.throughput),
        f(m.mean_streams),
        f(hw.mean_streams),
        f(m.mean_ampdu),
        f(hw.mean_ampdu),
        f(m.mean_aggregated),
        f(hw.mean_aggregated),
        f(m.mean_occupancy),
        m.counts.offered.to_string(),
        m.counts.accepted.to_string(),
        m.counts.blocked.to_string(),
        m.counts.delivered.to_string(),
        m.counts.residual.to_string(),
    ]
}

pub fn write_csv<W: std::io::Write>(
    out: W,
    axis: Axis,
    results: &[PointResult],
    timings: bool,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = CSV_COLUMNS.to_vec();
    if timings {
        header.push("runtime_s");
    }
    writer.write_record(&header)?;
    for r in results {
        let mut row = record(axis, r);
        if timings {
            row.push(r.runtime_s.to_string());
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// `results.csv` -> `results.spec.json`
pub fn sidecar_path(output: &Path) -> PathBuf {
    output.with_extension("spec.json")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> Result<SweepSpec> {
        SweepSpec::from_table(settings::parse_table(text).unwrap(), &[], None)
    }

    #[test]
    fn range_expands_inclusive() {
        let s = spec(
            "axis = \"N\"\nrange = { start = 4, stop = 8, step = 2 }\n[base]\noffered_load = 1e8\n",
        )
        .unwrap();
        assert_eq!(s.values, vec![4.0, 6.0, 8.0]);
        assert_eq!(s.axis, Axis::Stations);
    }

    #[test]
    fn alpha_sets_buffer() {
        let s = spec("axis = \"alpha\"\nvalues = [4.0, 1.5]\n[base]\nantennas = 4\nmax_ampdu = 64\noffered_load = 1e8\n").unwrap();
        let sizes: Vec<usize> = s
            .points()
            .unwrap()
            .iter()
            .map(|p| p.config.buffer_size)
            .collect();
        assert_eq!(sizes, vec![1024, 384]);
    }

    #[test]
    fn replications_get_distinct_seeds() {
        let s =
            spec("axis = \"offered_load\"\nvalues = [5e8]\nreplications = 3\n[base]\nseed = 10\n")
                .unwrap();
        let points = s.points().unwrap();
        assert_eq!(
            points.iter().map(|p| p.config.seed).collect::<Vec<_>>(),
            vec![10, 11, 12]
        );
        assert!(points.iter().all(|p| p.config.offered_load == Some(5e8)));
    }

    #[test]
    fn variants_override_base() {
        let s = spec(
            "axis = \"load\"\nvalues = [1e8]\n[base]\nbuffer_size = 10\n[[variants]]\nname = \"a\"\n[[variants]]\nname = \"b\"\nbuffer_size = 20\nscheduler = \"ideal\"\n",
        )
        .unwrap();
        let sizes: Vec<_> = s
            .variants
            .iter()
            .map(|v| (v.name.as_str(), v.config.buffer_size))
            .collect();
        assert_eq!(sizes, vec![("a", 10), ("b", 20)]);
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(spec("axis = \"N\"\nvalues = [2.5]\n[base]\noffered_load = 1e8\n").is_err());
        assert!(spec("axis = \"N\"\nvalues = []\n[base]\noffered_load = 1e8\n").is_err());
        assert!(spec("axis = \"N\"\n[base]\noffered_load = 1e8\n").is_err());
        assert!(spec("axis = \"speed\"\nvalues = [1]\n").is_err());
    }
}
