//! Deterministically bounded arrivals: the affine `(sigma(theta), rho(theta))`
//! envelope with constant burst and rate, and the constant-rate traffic used
//! in simulation.

use crate::error::{domain, Result};

/// Affine envelope `A(s, t) <= burst + rate * (t - s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineEnvelope {
    burst_bits: f64,
    rate_bits_per_slot: f64,
}

impl AffineEnvelope {
    pub fn new(burst_bits: f64, rate_bits_per_slot: f64) -> Result<Self> {
        if !(burst_bits >= 0.0 && burst_bits.is_finite()) {
            return Err(domain("burst_bits", burst_bits));
        }
        if !(rate_bits_per_slot >= 0.0 && rate_bits_per_slot.is_finite()) {
            return Err(domain("rate_bits_per_slot", rate_bits_per_slot));
        }
        Ok(Self {
            burst_bits,
            rate_bits_per_slot,
        })
    }

    /// Constant-rate traffic without burst.
    pub fn constant_rate(rate_bits_per_slot: f64) -> Result<Self> {
        Self::new(0.0, rate_bits_per_slot)
    }

    pub fn burst_bits(&self) -> f64 {
        self.burst_bits
    }

    pub fn rate_bits_per_slot(&self) -> f64 {
        self.rate_bits_per_slot
    }

    /// `ln p_a(theta) = theta * rate`.
    pub fn ln_rate_factor(&self, theta: f64) -> f64 {
        theta * self.rate_bits_per_slot
    }

    /// Upper bound on `ln E[exp(theta A(s, s + interval))]`.
    pub fn log_mgf_bound(&self, theta: f64, interval_slots: u64) -> Result<f64> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(domain("theta", theta));
        }
        Ok(theta * self.burst_bits + interval_slots as f64 * theta * self.rate_bits_per_slot)
    }

    /// Per-slot arrivals of the constant-rate source over `horizon_slots`.
    pub fn generate_arrivals(&self, horizon_slots: usize) -> Vec<f64> {
        vec![self.rate_bits_per_slot; horizon_slots]
    }
}

/// Bits arriving during slots `[s, t)` of a per-slot trace.
pub fn cumulative(trace: &[f64], s: usize, t: usize) -> f64 {
    trace[s..t].iter().sum()
}
