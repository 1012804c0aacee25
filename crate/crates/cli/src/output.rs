//! CSV and JSON emission.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::run::{Row, Table};
use crate::scenario::{Axis, Scenario};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format {s:?} (csv|json)")),
        }
    }
}

/// First 16 hex digits of the SHA-256 of the compact scenario JSON.
pub fn scenario_hash(scenario: &Scenario) -> Result<String> {
    let canonical = serde_json::to_vec(scenario)?;
    let digest = Sha256::digest(&canonical);
    Ok(digest[..8].iter().map(|b| format!("{b:02x}")).collect())
}

/// Shortest round-trip text; exponent form for very small or large values.
fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e15) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut out: W, scenario: &Scenario, table: &Table) -> Result<()> {
    writeln!(
        out,
        "# mmwave-snc v{VERSION} scenario={}",
        scenario_hash(scenario)?
    )?;
    let mut w = csv::Writer::from_writer(out);
    let sweep = table.axis != Axis::None && table.axis != Axis::Epsilon;
    let mut header = vec!["point"];
    if sweep {
        header.push(table.axis.column());
    }
    let bound = format!("bound_{}", table.unit());
    header.extend([
        "epsilon",
        "kind",
        bound.as_str(),
        "optimal_theta",
        "stability_lower",
        "stability_upper",
    ]);
    let simulated = scenario.simulate.is_some();
    if simulated {
        header.extend(["empirical_violation", "half_width"]);
    }
    w.write_record(&header)?;
    for row in &table.rows {
        let mut record = vec![row.point.to_string()];
        if sweep {
            record.push(opt(row.sweep_value));
        }
        record.extend([
            num(row.epsilon),
            kind_name(row),
            opt(row.bound),
            opt(row.optimal_theta),
            opt(row.stability_lower),
            opt(row.stability_upper),
        ]);
        if simulated {
            record.extend([opt(row.empirical_violation), opt(row.half_width)]);
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

fn kind_name(row: &Row) -> String {
    match row.kind {
        crate::scenario::Kind::Backlog => "backlog".into(),
        crate::scenario::Kind::Delay => "delay".into(),
    }
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'static str,
    version: &'static str,
    scenario_hash: String,
    unit: &'static str,
    sweep_axis: &'static str,
    scenario: &'a Scenario,
    rows: &'a [Row],
}

pub fn write_json<W: Write>(mut out: W, scenario: &Scenario, table: &Table) -> Result<()> {
    let report = JsonReport {
        tool: "mmwave-snc",
        version: VERSION,
        scenario_hash: scenario_hash(scenario)?,
        unit: table.unit(),
        sweep_axis: table.axis.column(),
        scenario,
        rows: &table.rows,
    };
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    Ok(())
}

pub fn write<W: Write>(out: W, format: Format, scenario: &Scenario, table: &Table) -> Result<()> {
    match format {
        Format::Csv => write_csv(out, scenario, table),
        Format::Json => write_json(out, scenario, table),
    }
}
