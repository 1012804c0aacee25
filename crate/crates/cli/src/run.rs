//! Evaluates a scenario into a table of bounds.

use mmwave_snc::bounds::{bound, stability_region};
use mmwave_snc::{
    run_experiment, AffineEnvelope, BoundQuery, DiscretizationConfig, Error,
    ServiceCharacterization, ServiceMode, SimConfig, SimOutcome,
};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::scenario::{Axis, Delta, Kind, Point, Scenario};

/// One output row: a (sweep point, epsilon) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    /// Position in the sweep grid.
    pub point: usize,
    pub sweep_value: Option<f64>,
    pub epsilon: f64,
    pub kind: Kind,
    /// Bits for backlog, seconds for delay; `None` at unstable points.
    pub bound: Option<f64>,
    pub optimal_theta: Option<f64>,
    pub stability_lower: Option<f64>,
    pub stability_upper: Option<f64>,
    pub empirical_violation: Option<f64>,
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub axis: Axis,
    pub kind: Kind,
    pub rows: Vec<Row>,
    /// Raw simulation samples per sweep point, when simulating.
    pub samples: Vec<Option<SimOutcome>>,
}

impl Table {
    pub fn unit(&self) -> &'static str {
        match self.kind {
            Kind::Backlog => "bits",
            Kind::Delay => "seconds",
        }
    }
}

fn service_mode(delta: Delta) -> ServiceMode {
    match delta {
        Delta::Limit => ServiceMode::Limit,
        Delta::Step(step) => ServiceMode::Lemma(DiscretizationConfig::with_step(step)),
    }
}

struct PointResult {
    rows: Vec<Row>,
    samples: Option<SimOutcome>,
    unstable: bool,
}

fn evaluate_point(
    scenario: &Scenario,
    index: usize,
    value: Option<f64>,
    point: Point,
) -> Result<PointResult> {
    let slot = point.channel.slot_seconds();
    let env = AffineEnvelope::new(point.burst_bits, point.rate_gbps * 1e9 * slot)?;
    let svc = ServiceCharacterization::new(point.channel, service_mode(scenario.delta));
    let stability = stability_region(&env, &svc)?;
    let samples = match scenario.simulate {
        Some(sim) => {
            let config = SimConfig {
                horizon_slots: sim.horizon_slots,
                replications: sim.replications,
                master_seed: sim.seed,
                ..Default::default()
            };
            Some(run_experiment(&env, &point.channel, &config)?)
        }
        None => None,
    };
    let mut rows = Vec::new();
    for &epsilon in scenario.epsilons() {
        let query = BoundQuery::new(scenario.query.kind.into(), epsilon)?;
        let mut row = Row {
            point: index,
            sweep_value: match scenario.sweep.axis {
                Axis::Epsilon => Some(epsilon),
                _ => value,
            },
            epsilon,
            kind: scenario.query.kind,
            bound: None,
            optimal_theta: None,
            stability_lower: None,
            stability_upper: None,
            empirical_violation: None,
            half_width: None,
        };
        match bound(&env, &svc, &query) {
            Ok(result) => {
                let (bound, exceedance) = match scenario.query.kind {
                    Kind::Backlog => (
                        result.value,
                        samples.as_ref().map(|s| s.backlog_exceedance(result.value)),
                    ),
                    Kind::Delay => (
                        result.value * slot,
                        samples.as_ref().map(|s| s.delay_exceedance(result.value)),
                    ),
                };
                row.bound = Some(bound);
                row.optimal_theta = Some(result.optimal_theta);
                row.stability_lower = Some(stability.lower);
                row.stability_upper = Some(stability.upper);
                row.empirical_violation = exceedance.map(|e| e.probability);
                row.half_width = exceedance.map(|e| e.half_width);
            }
            Err(Error::Unstable) => {
                return Ok(PointResult {
                    rows: unstable_rows(scenario, index, value),
                    samples,
                    unstable: true,
                })
            }
            Err(e) => return Err(e.into()),
        }
        rows.push(row);
    }
    Ok(PointResult {
        rows,
        samples,
        unstable: false,
    })
}

fn unstable_rows(scenario: &Scenario, index: usize, value: Option<f64>) -> Vec<Row> {
    scenario
        .epsilons()
        .iter()
        .map(|&epsilon| Row {
            point: index,
            sweep_value: match scenario.sweep.axis {
                Axis::Epsilon => Some(epsilon),
                _ => value,
            },
            epsilon,
            kind: scenario.query.kind,
            bound: None,
            optimal_theta: None,
            stability_lower: None,
            stability_upper: None,
            empirical_violation: None,
            half_width: None,
        })
        .collect()
}

#[cfg(feature = "parallel")]
fn map_points<F>(n: usize, f: F) -> Vec<Result<PointResult>>
where
    F: Fn(usize) -> Result<PointResult> + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_points<F>(n: usize, f: F) -> Vec<Result<PointResult>>
where
    F: Fn(usize) -> Result<PointResult>,
{
    (0..n).map(f).collect()
}

/// Evaluates every sweep point. Points run concurrently; rows come back in
/// sweep order regardless.
pub fn run_scenario(scenario: &Scenario) -> Result<Table> {
    scenario.validate()?;
    let values = scenario.points();
    let points = values
        .iter()
        .map(|&v| scenario.point(v))
        .collect::<Result<Vec<_>>>()?;
    let results = map_points(values.len(), |i| {
        evaluate_point(scenario, i, values[i], points[i])
    });
    let mut rows = Vec::new();
    let mut samples = Vec::new();
    for (i, result) in results.into_iter().enumerate() {
        let result = result?;
        if result.unstable && !scenario.allow_unstable {
            let value = match values[i] {
                Some(v) => v.to_string(),
                None => "the only point".into(),
            };
            let axis = match scenario.sweep.axis {
                Axis::None | Axis::Epsilon => "scenario",
                a => a.column(),
            };
            return Err(CliError::Unstable { axis, value });
        }
        rows.extend(result.rows);
        samples.push(result.samples);
    }
    Ok(Table {
        axis: scenario.sweep.axis,
        kind: scenario.query.kind,
        rows,
        samples,
    })
}
