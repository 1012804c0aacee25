//! MGF bound for the cumulative service of the shadowed link.
//!
//! The service in `n` slots is `S = (slot W / ln 2) sum ln(1 + gamma_k)`, so
//! `E[exp(-theta S)] = prod E[(1 + gamma_k)^(-theta slot W / ln 2)]`. Each
//! factor is bounded by the discretized inverse moment of the SNR (or
//! computed exactly in [`ServiceMode::Limit`]); for i.i.d. slots the bound is
//! `q(theta)^n`.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::channel::ShadowingChannel;
use crate::error::{domain, Result};
use crate::inverse_moment::{
    exact_inverse_moment_ln, lemma1_bound, truncation_point, BinAccumulator, BinWalker, Cdf,
    DiscretizationConfig,
};
use crate::par::{map_indexed, Execution};

/// How the per-slot factor `q(theta)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ServiceMode {
    /// Discretized CDF bound with the given controls.
    Lemma(DiscretizationConfig),
    /// The exact inverse moment by quadrature: the `delta -> 0` limit.
    Limit,
}

/// A quantity carried as its natural logarithm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogBound(pub f64);

impl LogBound {
    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }
}

/// Service characterization of one i.i.d. channel, with a `theta -> ln q`
/// memo shared by every bound computed against it.
pub struct ServiceCharacterization {
    channel: ShadowingChannel,
    mode: ServiceMode,
    cache: RwLock<HashMap<u64, f64>>,
    bins: RwLock<BinTable>,
}

impl std::fmt::Debug for ServiceCharacterization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ServiceCharacterization")
            .field("channel", &self.channel)
            .field("mode", &self.mode)
            .field(
                "cached_thetas",
                &self.cache.read().map(|c| c.len()).unwrap_or(0),
            )
            .finish()
    }
}

/// Bin masses and left-edge logs of the SNR grid, grown on demand.
struct BinTable {
    walker: BinWalker,
    ln_left: Vec<f64>,
    mass: Vec<f64>,
}

impl BinTable {
    fn new(step: f64) -> Self {
        Self {
            walker: BinWalker::new(step),
            ln_left: Vec::new(),
            mass: Vec::new(),
        }
    }

    fn grow_to(&mut self, channel: &ShadowingChannel, n: usize) -> Result<()> {
        if n <= self.mass.len() {
            return Ok(());
        }
        self.ln_left.reserve(n - self.mass.len());
        self.mass.reserve(n - self.mass.len());
        let more = n - self.mass.len();
        self.walker
            .fill(channel, more, &mut self.ln_left, &mut self.mass)
    }
}

/// Rounds to 12 significant digits. `q` is always evaluated at the rounded
/// exponent, so callers that round first see consistent values.
pub fn canonical_theta(theta: f64) -> f64 {
    format!("{theta:.11e}")
        .parse()
        .expect("formatted float parses")
}

impl ServiceCharacterization {
    pub fn new(channel: ShadowingChannel, mode: ServiceMode) -> Self {
        let step = match mode {
            ServiceMode::Lemma(cfg) => cfg.step_delta,
            ServiceMode::Limit => 1.0,
        };
        Self {
            channel,
            mode,
            cache: RwLock::new(HashMap::new()),
            bins: RwLock::new(BinTable::new(step)),
        }
    }

    pub fn channel(&self) -> &ShadowingChannel {
        &self.channel
    }

    pub fn mode(&self) -> ServiceMode {
        self.mode
    }

    /// The exponent handed to the inverse-moment bound: `theta slot W / ln 2`.
    pub fn composite_exponent(&self, theta: f64) -> f64 {
        theta * self.channel.bits_per_nat()
    }

    /// `q(theta)`, the per-slot bound on `E[exp(-theta s_k)]`.
    pub fn q_of_theta(&self, theta: f64) -> Result<f64> {
        Ok(self.ln_q(theta)?.exp())
    }

    /// `ln q(theta)`; memoized on `theta` rounded to 12 significant digits.
    pub fn ln_q(&self, theta: f64) -> Result<f64> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(domain("theta", theta));
        }
        let theta = canonical_theta(theta);
        let key = theta.to_bits();
        if let Some(v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let value = self.compute_ln_q(theta)?;
        self.cache.write().expect("cache lock").insert(key, value);
        Ok(value)
    }

    /// `ln q` for many exponents at once.
    pub fn ln_q_many(&self, thetas: &[f64], exec: Execution) -> Result<Vec<f64>> {
        if let ServiceMode::Lemma(cfg) = self.mode {
            if !cfg.refine_to_limit {
                // Grow the shared table once so workers only take read locks.
                let mut need = 0usize;
                for &theta in thetas {
                    if theta > 0.0 && theta.is_finite() {
                        need = need.max(self.bins_needed(&cfg, canonical_theta(theta))?);
                    }
                }
                self.bins
                    .write()
                    .expect("bin lock")
                    .grow_to(&self.channel, need)?;
            }
        }
        map_indexed(thetas.len(), exec, |i| self.ln_q(thetas[i]))
            .into_iter()
            .collect()
    }

    /// Upper bound on `E[exp(-theta S(s, s + n))]`, in log form.
    pub fn service_mgf_bound(&self, theta: f64, n_slots: u64) -> Result<LogBound> {
        let ln_q = self.ln_q(theta)?;
        Ok(LogBound(if n_slots == 0 {
            0.0
        } else {
            n_slots as f64 * ln_q
        }))
    }

    /// Sustainable rate at exponent `theta`: `-ln q(theta) / theta` bits per slot.
    pub fn effective_capacity(&self, theta: f64) -> Result<f64> {
        Ok(-self.ln_q(theta)? / theta)
    }

    pub fn cached_len(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    fn bins_needed(&self, cfg: &DiscretizationConfig, theta: f64) -> Result<usize> {
        let c = self.composite_exponent(theta);
        let u = truncation_point(&self.channel, c, cfg.tail_mass_tol)?;
        let n = (u / cfg.step_delta).floor().min(cfg.max_terms as f64);
        Ok(n as usize)
    }

    fn compute_ln_q(&self, theta: f64) -> Result<f64> {
        let c = self.composite_exponent(theta);
        match self.mode {
            ServiceMode::Limit => exact_inverse_moment_ln(&self.channel.inverse_moment_source(), c),
            ServiceMode::Lemma(cfg) if cfg.refine_to_limit => {
                Ok(lemma1_bound(&self.channel, c, &cfg)?.ln_value())
            }
            ServiceMode::Lemma(cfg) => {
                cfg.validate()?;
                let n = self.bins_needed(&cfg, theta)?;
                if self.bins.read().expect("bin lock").mass.len() < n {
                    self.bins
                        .write()
                        .expect("bin lock")
                        .grow_to(&self.channel, n)?;
                }
                let table = self.bins.read().expect("bin lock");
                let end = n as f64 * cfg.step_delta;
                let mut acc = BinAccumulator::new(c, end);
                acc.add_slice(&table.ln_left[..n], &table.mass[..n]);
                let tail = if n == 0 {
                    1.0
                } else {
                    self.channel.cdf_and_sf(end).1
                };
                let (value, complement) = acc.finish(tail);
                Ok(if complement < 0.5 {
                    (-complement).ln_1p()
                } else {
                    value.ln()
                })
            }
        }
    }
}

/// Bound on `E[exp(-theta S)]` over consecutive slots with independent but
/// differently distributed channels: the product of the per-slot factors.
pub fn heterogeneous_service_mgf_bound(
    channels: &[ShadowingChannel],
    theta: f64,
    mode: ServiceMode,
) -> Result<LogBound> {
    let mut total = 0.0;
    for ch in channels {
        total += ServiceCharacterization::new(*ch, mode).ln_q(theta)?;
    }
    Ok(LogBound(total))
}
