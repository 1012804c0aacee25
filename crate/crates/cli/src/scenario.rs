//! Scenario files: a JSON description of one experiment.
//!
//! ```json
//! {
//!   "channel": { "kappa_db": 25.0, "sigma_db": 8.0, "bandwidth_hz": 5e8, "slot_seconds": 1.0 },
//!   "arrival": { "rate_gbps": 1.0, "burst_bits": 0.0 },
//!   "delta": "limit",
//!   "query": { "kind": "backlog", "epsilons": [1e-1, 1e-2, 1e-3] },
//!   "sweep": { "axis": "rate", "values": [1.0, 2.0, 3.0] },
//!   "simulate": { "replications": 100000, "seed": 1, "horizon_slots": 2000 }
//! }
//! ```

use std::fmt;
use std::path::Path;

use mmwave_snc::{BoundKind, LinkBudget, ShadowingChannel};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub channel: ChannelSpec,
    pub arrival: ArrivalSpec,
    pub delta: Delta,
    pub query: QuerySpec,
    #[serde(default)]
    pub sweep: Sweep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimSpec>,
    /// Report unstable points as empty rows instead of failing.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_unstable: bool,
}

/// Either `kappa_db` with `bandwidth_hz`, or a full `link_budget`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link_budget: Option<LinkBudgetSpec>,
    pub sigma_db: f64,
    pub slot_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkBudgetSpec {
    pub transmit_power_dbm: f64,
    pub antenna_gain_tx_db: f64,
    pub antenna_gain_rx_db: f64,
    pub noise_density_dbm_per_mhz: f64,
    pub bandwidth_hz: f64,
    pub distance_m: f64,
    pub intercept_alpha_db: f64,
    pub slope_beta: f64,
}

impl From<LinkBudgetSpec> for LinkBudget {
    fn from(b: LinkBudgetSpec) -> Self {
        LinkBudget {
            transmit_power_dbm: b.transmit_power_dbm,
            antenna_gain_tx_db: b.antenna_gain_tx_db,
            antenna_gain_rx_db: b.antenna_gain_rx_db,
            noise_density_dbm_per_mhz: b.noise_density_dbm_per_mhz,
            bandwidth_hz: b.bandwidth_hz,
            distance_m: b.distance_m,
            intercept_alpha_db: b.intercept_alpha_db,
            slope_beta: b.slope_beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalSpec {
    pub rate_gbps: f64,
    #[serde(default)]
    pub burst_bits: f64,
}

/// Bin width of the discretized inverse moment, or its `delta -> 0` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Delta {
    Step(f64),
    Limit,
}

impl std::str::FromStr for Delta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim() == "limit" {
            return Ok(Delta::Limit);
        }
        match s.trim().parse::<f64>() {
            Ok(v) if v > 0.0 && v.is_finite() => Ok(Delta::Step(v)),
            _ => Err(format!("expected a positive step or \"limit\", got {s:?}")),
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delta::Step(v) => write!(f, "{v}"),
            Delta::Limit => f.write_str("limit"),
        }
    }
}

impl Serialize for Delta {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Delta::Step(v) => s.serialize_f64(*v),
            Delta::Limit => s.serialize_str("limit"),
        }
    }
}

impl<'de> Deserialize<'de> for Delta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct DeltaVisitor;

        impl Visitor<'_> for DeltaVisitor {
            type Value = Delta;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive number or \"limit\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Delta, E> {
                if v > 0.0 && v.is_finite() {
                    Ok(Delta::Step(v))
                } else {
                    Err(E::invalid_value(de::Unexpected::Float(v), &self))
                }
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Delta, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Delta, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Delta, E> {
                if v == "limit" {
                    Ok(Delta::Limit)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }

        d.deserialize_any(DeltaVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Backlog,
    Delay,
}

impl From<Kind> for BoundKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Backlog => BoundKind::Backlog,
            Kind::Delay => BoundKind::Delay,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub kind: Kind,
    /// Violation probabilities; must stay empty when sweeping over epsilon.
    #[serde(default)]
    pub epsilons: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    None,
    Rate,
    Kappa,
    Sigma,
    Epsilon,
}

impl Axis {
    /// Column name of the swept quantity.
    pub fn column(self) -> &'static str {
        match self {
            Axis::None => "none",
            Axis::Rate => "rate_gbps",
            Axis::Kappa => "kappa_db",
            Axis::Sigma => "sigma_db",
            Axis::Epsilon => "epsilon",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Axis::None),
            "rate" => Ok(Axis::Rate),
            "kappa" => Ok(Axis::Kappa),
            "sigma" => Ok(Axis::Sigma),
            "epsilon" => Ok(Axis::Epsilon),
            _ => Err(format!(
                "unknown sweep axis {s:?} (none|rate|kappa|sigma|epsilon)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: Axis,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon_slots: usize,
}

fn default_replications() -> usize {
    10_000
}

fn default_horizon() -> usize {
    mmwave_snc::sim::DEFAULT_HORIZON
}

impl Default for SimSpec {
    fn default() -> Self {
        Self {
            replications: default_replications(),
            seed: 0,
            horizon_slots: default_horizon(),
        }
    }
}

/// One evaluation point after the sweep value has been applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub channel: ShadowingChannel,
    pub rate_gbps: f64,
    pub burst_bits: f64,
}

impl Scenario {
    pub fn from_json(text: &str, path: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| CliError::Parse {
            path: path.to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Violation probabilities queried at every sweep point.
    pub fn epsilons(&self) -> &[f64] {
        if self.sweep.axis == Axis::Epsilon {
            &self.sweep.values
        } else {
            &self.query.epsilons
        }
    }

    /// Sweep values, or a single placeholder point without a sweep. An
    /// epsilon sweep is a single point queried at every epsilon.
    pub fn points(&self) -> Vec<Option<f64>> {
        match self.sweep.axis {
            Axis::None | Axis::Epsilon => vec![None],
            _ => self.sweep.values.iter().map(|&v| Some(v)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.channel;
        match (c.kappa_db, &c.link_budget) {
            (Some(_), None) => {
                if c.bandwidth_hz.is_none() {
                    return Err(CliError::Config(
                        "channel: kappa_db needs bandwidth_hz".into(),
                    ));
                }
            }
            (None, Some(_)) => {
                if c.bandwidth_hz.is_some() {
                    return Err(CliError::Config(
                        "channel: bandwidth_hz comes from link_budget, drop one".into(),
                    ));
                }
            }
            _ => {
                return Err(CliError::Config(
                    "channel: give exactly one of kappa_db or link_budget".into(),
                ))
            }
        }
        if !(self.arrival.rate_gbps >= 0.0 && self.arrival.rate_gbps.is_finite()) {
            return Err(CliError::Config("arrival.rate_gbps must be >= 0".into()));
        }
        let sweep = &self.sweep;
        match sweep.axis {
            Axis::None => {
                if !sweep.values.is_empty() {
                    return Err(CliError::Config(
                        "sweep: values given without an axis".into(),
                    ));
                }
            }
            Axis::Epsilon if !self.query.epsilons.is_empty() => {
                return Err(CliError::Config(
                    "query.epsilons must be empty when sweeping over epsilon".into(),
                ));
            }
            _ => {}
        }
        if sweep.axis != Axis::None {
            if sweep.values.is_empty() {
                return Err(CliError::Config("sweep.values is empty".into()));
            }
            let increasing = sweep.values.windows(2).all(|w| w[1] > w[0]);
            let decreasing = sweep.values.windows(2).all(|w| w[1] < w[0]);
            if !(increasing || decreasing) {
                return Err(CliError::Config(
                    "sweep.values must be strictly monotone".into(),
                ));
            }
        }
        let eps = self.epsilons();
        if eps.is_empty() {
            return Err(CliError::Usage("the epsilon list is empty".into()));
        }
        if let Some(bad) = eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(CliError::Config(format!("epsilon {bad} is outside (0, 1)")));
        }
        if let Some(sim) = &self.simulate {
            if sim.replications == 0 || sim.horizon_slots == 0 {
                return Err(CliError::Config(
                    "simulate: replications and horizon_slots must be positive".into(),
                ));
            }
        }
        for v in self.points() {
            self.point(v)?;
        }
        Ok(())
    }

    /// Model parameters at one sweep value.
    pub fn point(&self, value: Option<f64>) -> Result<Point> {
        let c = &self.channel;
        let (mut kappa_db, bandwidth_hz) = match (&c.link_budget, c.kappa_db, c.bandwidth_hz) {
            (Some(b), _, _) => (
                mmwave_snc::compute_kappa(&LinkBudget::from(*b))?,
                b.bandwidth_hz,
            ),
            (None, Some(k), Some(w)) => (k, w),
            _ => return Err(CliError::Config("channel is incomplete".into())),
        };
        let mut sigma_db = c.sigma_db;
        let mut rate_gbps = self.arrival.rate_gbps;
        if let Some(v) = value {
            match self.sweep.axis {
                Axis::Rate => rate_gbps = v,
                Axis::Kappa => kappa_db = v,
                Axis::Sigma => sigma_db = v,
                Axis::None | Axis::Epsilon => {}
            }
        }
        if !(rate_gbps >= 0.0 && rate_gbps.is_finite()) {
            return Err(CliError::Config(format!(
                "rate {rate_gbps} Gbps is negative"
            )));
        }
        let channel = ShadowingChannel::new(kappa_db, sigma_db, bandwidth_hz, c.slot_seconds)
            .map_err(|e| CliError::Config(format!("channel: {e}")))?;
        Ok(Point {
            channel,
            rate_gbps,
            burst_bits: self.arrival.burst_bits,
        })
    }
}
