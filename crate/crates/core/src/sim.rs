//! Slotted fluid-queue Monte Carlo.
//!
//! Each replication evolves `B_k = max(B_{k-1} + a_k - s_k, 0)` from an empty
//! queue, reads the backlog at the horizon and then keeps drawing service
//! until everything that arrived by the horizon has left (FCFS virtual delay).
//!
//! Replication `i` draws from `ChaCha8Rng::seed_from_u64(master_seed)` with its
//! stream set to `i`, so results do not depend on how work is split.

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arrival::AffineEnvelope;
use crate::channel::ShadowingChannel;
use crate::error::{Error, Result};
use crate::par::{map_indexed, Execution};

pub const DEFAULT_HORIZON: usize = 2_000;
pub const DEFAULT_DELAY_CAP: u64 = 10_000;
/// Normal quantile for two-sided 95% intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    /// Slot at which backlog and delay are observed.
    pub horizon_slots: usize,
    pub replications: usize,
    pub master_seed: u64,
    /// Contiguous blocks of replications handed to workers.
    pub parallel_shards: usize,
    /// Delay search stops here and marks the sample censored.
    pub delay_cap_slots: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            horizon_slots: DEFAULT_HORIZON,
            replications: 10_000,
            master_seed: 0,
            parallel_shards: 64,
            delay_cap_slots: DEFAULT_DELAY_CAP,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon_slots < 1 {
            return Err(Error::InvalidConfig(
                "horizon_slots must be at least 1".into(),
            ));
        }
        if self.replications < 1 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.parallel_shards < 1 {
            return Err(Error::InvalidConfig(
                "parallel_shards must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationSample {
    pub backlog_bits: f64,
    pub delay_slots: u64,
    /// The delay search hit the cap; `delay_slots` is then the cap.
    pub censored: bool,
}

/// Random source of replication `index`.
pub fn child_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Runs one replication with per-slot `arrivals` (its length is the horizon).
pub fn run_replication<R: Rng + ?Sized>(
    arrivals: &[f64],
    channel: &ShadowingChannel,
    delay_cap_slots: u64,
    rng: &mut R,
) -> ReplicationSample {
    let mut backlog = 0.0f64;
    for &a in arrivals {
        let s = channel.sample_service_bits(rng);
        backlog = (backlog + a - s).max(0.0);
    }
    let (delay_slots, censored) = drain_time(backlog, channel, delay_cap_slots, rng);
    ReplicationSample {
        backlog_bits: backlog,
        delay_slots,
        censored,
    }
}

/// Slots of fresh service needed to clear `backlog`.
fn drain_time<R: Rng + ?Sized>(
    backlog: f64,
    channel: &ShadowingChannel,
    cap: u64,
    rng: &mut R,
) -> (u64, bool) {
    let mut served = 0.0;
    let mut w = 0;
    while served < backlog {
        if w == cap {
            return (cap, true);
        }
        served += channel.sample_service_bits(rng);
        w += 1;
    }
    (w, false)
}

/// Cumulative processes of one replication, indexed by slot `0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    /// `A(0, k)`.
    pub arrivals: Vec<f64>,
    /// `S(0, k)`.
    pub service: Vec<f64>,
    /// `D(0, k)`.
    pub departures: Vec<f64>,
    /// `B(k)`.
    pub backlog: Vec<f64>,
    pub sample: ReplicationSample,
}

/// Same draws as [`run_replication`], keeping the whole path.
pub fn trace_replication<R: Rng + ?Sized>(
    arrivals: &[f64],
    channel: &ShadowingChannel,
    delay_cap_slots: u64,
    rng: &mut R,
) -> SamplePath {
    let n = arrivals.len();
    let mut path = SamplePath {
        arrivals: Vec::with_capacity(n + 1),
        service: Vec::with_capacity(n + 1),
        departures: Vec::with_capacity(n + 1),
        backlog: Vec::with_capacity(n + 1),
        sample: ReplicationSample {
            backlog_bits: 0.0,
            delay_slots: 0,
            censored: false,
        },
    };
    let (mut a_cum, mut s_cum, mut d_cum, mut b) = (0.0, 0.0, 0.0, 0.0f64);
    path.arrivals.push(0.0);
    path.service.push(0.0);
    path.departures.push(0.0);
    path.backlog.push(0.0);
    for &a in arrivals {
        let s = channel.sample_service_bits(rng);
        let next = (b + a - s).max(0.0);
        d_cum += b + a - next;
        a_cum += a;
        s_cum += s;
        b = next;
        path.arrivals.push(a_cum);
        path.service.push(s_cum);
        path.departures.push(d_cum);
        path.backlog.push(b);
    }
    let (delay_slots, censored) = drain_time(b, channel, delay_cap_slots, rng);
    path.sample = ReplicationSample {
        backlog_bits: b,
        delay_slots,
        censored,
    };
    path
}

/// Empirical exceedance probability with a Wilson 95% half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exceedance {
    pub threshold: f64,
    pub count: usize,
    pub trials: usize,
    pub probability: f64,
    pub half_width: f64,
}

impl Exceedance {
    fn new(threshold: f64, count: usize, trials: usize) -> Self {
        let (_, half) = wilson_interval(count, trials, Z_95);
        Self {
            threshold,
            count,
            trials,
            probability: count as f64 / trials as f64,
            half_width: half,
        }
    }

    /// `p + 3 sqrt(p (1 - p) / n)` evaluated at the target `eps`, the
    /// acceptance level for a bound at violation probability `eps`.
    pub fn within(&self, eps: f64) -> bool {
        self.probability <= eps + 3.0 * (eps * (1.0 - eps) / self.trials as f64).sqrt()
    }
}

/// Wilson score interval `(centre, half_width)` for `k` successes in `n`.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (centre, half)
}

/// Samples of one experiment, in replication order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub backlog_samples: Vec<f64>,
    pub delay_samples: Vec<u64>,
    pub censored: Vec<bool>,
}

impl SimOutcome {
    pub fn from_samples(samples: &[ReplicationSample]) -> Self {
        Self {
            backlog_samples: samples.iter().map(|s| s.backlog_bits).collect(),
            delay_samples: samples.iter().map(|s| s.delay_slots).collect(),
            censored: samples.iter().map(|s| s.censored).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.backlog_samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backlog_samples.is_empty()
    }

    /// Empirical `P(B > threshold)`.
    pub fn backlog_exceedance(&self, threshold: f64) -> Exceedance {
        let count = self
            .backlog_samples
            .iter()
            .filter(|&&b| b > threshold)
            .count();
        Exceedance::new(threshold, count, self.len())
    }

    /// Empirical `P(W > threshold)`; censored samples exceed everything.
    pub fn delay_exceedance(&self, threshold: f64) -> Exceedance {
        let count = self
            .delay_samples
            .iter()
            .zip(&self.censored)
            .filter(|(&w, &c)| c || w as f64 > threshold)
            .count();
        Exceedance::new(threshold, count, self.len())
    }

    pub fn backlog_ccdf(&self, thresholds: &[f64]) -> Vec<Exceedance> {
        let mut sorted = self.backlog_samples.clone();
        sorted.sort_by(f64::total_cmp);
        thresholds
            .iter()
            .map(|&x| {
                let below = sorted.partition_point(|&b| b <= x);
                Exceedance::new(x, sorted.len() - below, sorted.len())
            })
            .collect()
    }

    pub fn delay_ccdf(&self, thresholds: &[f64]) -> Vec<Exceedance> {
        thresholds
            .iter()
            .map(|&x| self.delay_exceedance(x))
            .collect()
    }

    /// One record per replication with a header line.
    pub fn write_samples<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "replication,backlog_bits,delay_slots,censored")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{i},{},{},{}",
                self.backlog_samples[i], self.delay_samples[i], self.censored[i]
            )?;
        }
        Ok(())
    }
}

/// Runs `config.replications` replications with the default execution mode.
pub fn run_experiment(
    env: &AffineEnvelope,
    channel: &ShadowingChannel,
    config: &SimConfig,
) -> Result<SimOutcome> {
    run_experiment_with(env, channel, config, Execution::default())
}

pub fn run_experiment_with(
    env: &AffineEnvelope,
    channel: &ShadowingChannel,
    config: &SimConfig,
    exec: Execution,
) -> Result<SimOutcome> {
    config.validate()?;
    let arrivals = env.generate_arrivals(config.horizon_slots);
    let n = config.replications;
    let shards = config.parallel_shards.min(n);
    let per_shard = n.div_ceil(shards);
    let blocks = map_indexed(shards, exec, |shard| {
        let start = shard * per_shard;
        let end = ((shard + 1) * per_shard).min(n);
        (start..end)
            .map(|i| {
                let mut rng = child_rng(config.master_seed, i as u64);
                run_replication(&arrivals, channel, config.delay_cap_slots, &mut rng)
            })
            .collect::<Vec<_>>()
    });
    let samples: Vec<ReplicationSample> = blocks.into_iter().flatten().collect();
    Ok(SimOutcome::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn channel(sigma: f64) -> ShadowingChannel {
        ShadowingChannel::new(25.0, sigma, 500e6, 1.0).unwrap()
    }

    fn config(replications: usize, horizon: usize) -> SimConfig {
        SimConfig {
            horizon_slots: horizon,
            replications,
            ..Default::default()
        }
    }

    #[test]
    fn zero_arrivals_leave_the_queue_empty() {
        let env = AffineEnvelope::constant_rate(0.0).unwrap();
        let out = run_experiment(&env, &channel(8.0), &config(50, 100)).unwrap();
        assert!(out.backlog_samples.iter().all(|&b| b == 0.0));
        assert!(out.delay_samples.iter().all(|&w| w == 0));
    }

    #[test]
    fn deterministic_server() {
        let ch = channel(0.0);
        let c = ch.capacity_bits_per_slot(ch.median_snr()).unwrap();
        let under = AffineEnvelope::constant_rate(0.9 * c).unwrap();
        let out = run_experiment(&under, &ch, &config(3, 10)).unwrap();
        assert!(out.backlog_samples.iter().all(|&b| b == 0.0));

        let over = AffineEnvelope::constant_rate(1.5 * c).unwrap();
        let mut rng = child_rng(1, 0);
        let path = trace_replication(&over.generate_arrivals(41), &ch, 1000, &mut rng);
        for (t, &b) in path.backlog.iter().enumerate() {
            assert!((b - t as f64 * 0.5 * c).abs() <= 1e-9 * c * t.max(1) as f64);
        }
        // 20.5c of backlog needs 21 slots of service
        assert_eq!(path.sample.delay_slots, 21);
    }

    #[test]
    fn single_replication_is_wrapped() {
        let env = AffineEnvelope::constant_rate(3e9).unwrap();
        let ch = channel(8.0);
        let cfg = SimConfig {
            master_seed: 9,
            ..config(1, 200)
        };
        let out = run_experiment(&env, &ch, &cfg).unwrap();
        let mut rng = child_rng(9, 0);
        let one = run_replication(
            &env.generate_arrivals(200),
            &ch,
            cfg.delay_cap_slots,
            &mut rng,
        );
        assert_eq!(out, SimOutcome::from_samples(&[one]));
    }

    #[test]
    fn shards_and_execution_do_not_change_results() {
        let env = AffineEnvelope::constant_rate(3e9).unwrap();
        let ch = channel(8.0);
        let base = SimConfig {
            master_seed: 42,
            ..config(97, 300)
        };
        let reference = run_experiment_with(&env, &ch, &base, Execution::Sequential).unwrap();
        for shards in [1, 2, 7, 97, 500] {
            let cfg = SimConfig {
                parallel_shards: shards,
                ..base
            };
            assert_eq!(
                run_experiment_with(&env, &ch, &cfg, Execution::Parallel).unwrap(),
                reference
            );
        }
        let other = SimConfig {
            master_seed: 43,
            ..base
        };
        assert_ne!(run_experiment(&env, &ch, &other).unwrap(), reference);
    }

    #[test]
    fn trace_matches_replication() {
        let env = AffineEnvelope::constant_rate(3.5e9).unwrap();
        let ch = channel(8.0);
        let arrivals = env.generate_arrivals(300);
        let a = run_replication(&arrivals, &ch, 10_000, &mut child_rng(5, 3));
        let b = trace_replication(&arrivals, &ch, 10_000, &mut child_rng(5, 3));
        assert_eq!(a, b.sample);
    }

    #[test]
    fn path_identities() {
        let env = AffineEnvelope::constant_rate(3.8e9).unwrap();
        let ch = channel(8.0);
        let arrivals = env.generate_arrivals(60);
        for rep in 0..20 {
            let p = trace_replication(&arrivals, &ch, 10_000, &mut child_rng(11, rep));
            for k in 0..p.backlog.len() {
                let scale = p.arrivals[k].max(1.0);
                assert!(p.backlog[k] >= 0.0);
                assert!((p.arrivals[k] - p.departures[k] - p.backlog[k]).abs() <= 1e-9 * scale);
                assert!(p.departures[k] <= p.arrivals[k] * (1.0 + 1e-12));
                // work-conserving queue: D(0,k) = min_tau A(0,tau) + S(tau,k)
                let conv = (0..=k)
                    .map(|tau| p.arrivals[tau] + p.service[k] - p.service[tau])
                    .fold(f64::INFINITY, f64::min);
                assert!((p.departures[k] - conv).abs() <= 1e-9 * scale, "slot {k}");
            }
        }
    }

    #[test]
    fn censoring_counts_as_exceedance() {
        let ch = channel(0.0);
        let c = ch.capacity_bits_per_slot(ch.median_snr()).unwrap();
        let env = AffineEnvelope::constant_rate(2.0 * c).unwrap();
        let cfg = SimConfig {
            delay_cap_slots: 5,
            ..config(4, 50)
        };
        let out = run_experiment(&env, &ch, &cfg).unwrap();
        assert!(out.censored.iter().all(|&c| c));
        assert_eq!(out.delay_exceedance(1e12).probability, 1.0);
    }

    #[test]
    fn ccdf_is_monotone() {
        let env = AffineEnvelope::constant_rate(3e9).unwrap();
        let out = run_experiment(&env, &channel(8.0), &config(500, 300)).unwrap();
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 1e9).collect();
        let ccdf = out.backlog_ccdf(&xs);
        for w in ccdf.windows(2) {
            assert!(w[1].probability <= w[0].probability);
        }
        for (e, &x) in ccdf.iter().zip(&xs) {
            assert_eq!(*e, out.backlog_exceedance(x));
            assert!((0.0..=1.0).contains(&e.probability));
        }
        let d = out.delay_ccdf(&[0.0, 1.0, 2.0, 5.0]);
        for w in d.windows(2) {
            assert!(w[1].probability <= w[0].probability);
        }
    }

    #[test]
    fn wilson_interval_values() {
        // k = 0: the half-width is z^2 / (2 (n + z^2)) around the same centre.
        let (c, h) = wilson_interval(0, 100, Z_95);
        assert!((c - h).abs() < 1e-15);
        let (c, h) = wilson_interval(50, 100, Z_95);
        assert!((c - 0.5).abs() < 1e-15);
        assert!((h - 0.096_168_5).abs() < 1e-6);
    }

    #[test]
    fn sample_dump_format() {
        let out = SimOutcome::from_samples(&[
            ReplicationSample {
                backlog_bits: 1.5,
                delay_slots: 2,
                censored: false,
            },
            ReplicationSample {
                backlog_bits: 0.0,
                delay_slots: 7,
                censored: true,
            },
        ]);
        let mut buf = Vec::new();
        out.write_samples(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "replication,backlog_bits,delay_slots,censored\n0,1.5,2,false\n1,0,7,true\n"
        );
    }

    #[test]
    fn config_validation() {
        assert!(config(0, 10).validate().is_err());
        assert!(config(1, 0).validate().is_err());
        assert!(SimConfig {
            parallel_shards: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }
}
