use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmwave_snc_cli::scenario::{
    ArrivalSpec, ChannelSpec, LinkBudgetSpec, QuerySpec, SimSpec, Sweep,
};
use mmwave_snc_cli::{Axis, Delta, Kind, Scenario};
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmwave-snc"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn small_scenario(dir: &Path) -> PathBuf {
    let path = dir.join("small.json");
    std::fs::write(
        &path,
        r#"{
            "channel": {"kappa_db": 25, "sigma_db": 8, "bandwidth_hz": 5e8, "slot_seconds": 1},
            "arrival": {"rate_gbps": 1},
            "delta": "limit",
            "query": {"kind": "backlog", "epsilons": [0.1, 0.01]},
            "sweep": {"axis": "rate", "values": [1, 2]},
            "simulate": {"replications": 300, "seed": 9, "horizon_slots": 100}
        }"#,
    )
    .unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path());
    let s = scenario.to_str().unwrap();
    let a = run(&["run", "--scenario", s]);
    let b = run(&["run", "--scenario", s]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# mmwave-snc v"));
    assert_eq!(
        lines.next().unwrap(),
        "point,rate_gbps,epsilon,kind,bound_bits,optimal_theta,stability_lower,stability_upper,empirical_violation,half_width"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn seed_changes_only_the_simulated_columns() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path());
    let s = scenario.to_str().unwrap();
    let a = String::from_utf8(run(&["run", "--scenario", s]).stdout).unwrap();
    let b = String::from_utf8(run(&["run", "--scenario", s, "--seed", "10"]).stdout).unwrap();
    // The hash covers the seed.
    assert_ne!(a.lines().next(), b.lines().next());
    let analytic = |t: &str| -> Vec<String> {
        t.lines()
            .skip(2)
            .map(|l| l.split(',').take(8).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert_eq!(analytic(&a), analytic(&b));
}

#[test]
fn empty_epsilon_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path());
    let out = dir.path().join("out.csv");
    let o = run(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--epsilon",
        "",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    assert!(!out.exists());
}

#[test]
fn unstable_point_fails_with_its_name() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path());
    let o = run(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--sweep",
        "rate:1,9",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("rate_gbps = 9"), "{err}");
}

#[test]
fn overrides_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = small_scenario(dir.path());
    let samples = dir.path().join("samples");
    let o = run(&[
        "run",
        "--scenario",
        scenario.to_str().unwrap(),
        "--sweep",
        "kappa:20,30",
        "--epsilon",
        "1e-3",
        "--delta",
        "0.1",
        "--replications",
        "50",
        "--format",
        "json",
        "--dump-samples",
        samples.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["sweep_axis"], "kappa_db");
    assert_eq!(v["scenario"]["delta"], 0.1);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["bound"].as_f64().unwrap() > rows[1]["bound"].as_f64().unwrap());
    let dump = std::fs::read_to_string(samples.join("point-1.csv")).unwrap();
    assert_eq!(dump.lines().count(), 51);
    assert!(dump.starts_with("replication,backlog_bits,delay_slots,censored"));
}

#[test]
fn malformed_file_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"channel\": {\"kappa_db\": 25,\n  \"oops\"\n}").unwrap();
    let o = run(&["run", "--scenario", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`oops`") && err.contains("line 4"), "{err}");
}

#[test]
fn shipped_scenarios_are_valid() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let s = Scenario::load(&path).unwrap();
        s.validate()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 6);
}

#[test]
fn shipped_kappa_sweep_delay_falls_with_kappa() {
    let o = run(&[
        "run",
        "--scenario",
        shipped("delay_vs_kappa.json").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let delays: Vec<f64> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(delays.len(), 8);
    assert!(delays.windows(2).all(|w| w[1] <= w[0]));
}

fn finite(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    lo..hi
}

prop_compose! {
    fn channel_spec()(
        kappa in finite(-10.0, 50.0),
        sigma in finite(0.0, 12.0),
        bw in finite(1e6, 2e9),
        slot in finite(1e-4, 2.0),
        budget in any::<bool>(),
    ) -> ChannelSpec {
        if budget {
            ChannelSpec {
                kappa_db: None,
                bandwidth_hz: None,
                link_budget: Some(LinkBudgetSpec {
                    transmit_power_dbm: kappa,
                    antenna_gain_tx_db: 20.0,
                    antenna_gain_rx_db: 20.0,
                    noise_density_dbm_per_mhz: -114.0,
                    bandwidth_hz: bw,
                    distance_m: 100.0,
                    intercept_alpha_db: 70.0,
                    slope_beta: 2.45,
                }),
                sigma_db: sigma,
                slot_seconds: slot,
            }
        } else {
            ChannelSpec {
                kappa_db: Some(kappa),
                bandwidth_hz: Some(bw),
                link_budget: None,
                sigma_db: sigma,
                slot_seconds: slot,
            }
        }
    }
}

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![
        Just(Axis::None),
        Just(Axis::Rate),
        Just(Axis::Kappa),
        Just(Axis::Sigma),
        Just(Axis::Epsilon),
    ]
}

prop_compose! {
    fn scenario()(
        channel in channel_spec(),
        rate in finite(0.0, 10.0),
        burst in finite(0.0, 1e9),
        delta in prop_oneof![Just(Delta::Limit), finite(1e-4, 1.0).prop_map(Delta::Step)],
        kind in prop_oneof![Just(Kind::Backlog), Just(Kind::Delay)],
        epsilons in prop::collection::vec(finite(1e-9, 0.5), 0..5),
        axis in axis(),
        values in prop::collection::vec(finite(-50.0, 50.0), 0..6),
        sim in prop::option::of((1usize..1_000_000, any::<u64>(), 1usize..10_000)),
        allow_unstable in any::<bool>(),
    ) -> Scenario {
        Scenario {
            channel,
            arrival: ArrivalSpec { rate_gbps: rate, burst_bits: burst },
            delta,
            query: QuerySpec { kind, epsilons },
            sweep: Sweep { axis, values },
            simulate: sim.map(|(replications, seed, horizon_slots)| SimSpec {
                replications,
                seed,
                horizon_slots,
            }),
            allow_unstable,
        }
    }
}

proptest! {
    #[test]
    fn scenario_round_trips(s in scenario()) {
        let text = s.to_json().unwrap();
        let back = Scenario::from_json(&text, "generated").unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(
            mmwave_snc_cli::scenario_hash(&back).unwrap(),
            mmwave_snc_cli::scenario_hash(&s).unwrap()
        );
    }
}
