//! The 60 GHz link: link budget, per-slot SNR under log-normal shadowing and
//! the instantaneous Shannon capacity of a slot.
//!
//! The SNR in slot `k` is `gamma_k = kappa * 10^(-xi_k / 10)` with
//! `xi_k ~ N(0, sigma^2)` i.i.d. over slots, so `10 log10(gamma_k)` is normal
//! with mean `kappa_db` and standard deviation `sigma_db`.

use std::f64::consts::{LN_2, SQRT_2};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::inverse_moment::{Cdf, InverseMomentSource};

/// `ln(10) / 10`: converts decibels to natural-log units.
pub const IOTA: f64 = std::f64::consts::LN_10 / 10.0;

/// Beyond this normalized argument the erfc tails are clamped.
const ERFC_CLAMP_ARG: f64 = 6.0;
const CDF_FLOOR: f64 = 1e-300;
const CDF_CEIL: f64 = 1.0 - 1e-16;

/// Deterministic link-budget terms that fix the system gain `kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub transmit_power_dbm: f64,
    pub antenna_gain_tx_db: f64,
    pub antenna_gain_rx_db: f64,
    /// Noise power density in dBm/MHz.
    pub noise_density_dbm_per_mhz: f64,
    pub bandwidth_hz: f64,
    pub distance_m: f64,
    /// Floating-intercept of the path-loss fit, dB.
    pub intercept_alpha_db: f64,
    /// Slope of the path-loss fit (dimensionless).
    pub slope_beta: f64,
}

impl LinkBudget {
    /// Outdoor 60 GHz reference configuration: 1 mW, 20 dB antennas,
    /// -114 dBm/MHz noise, 500 MHz, 100 m, alpha = 70, beta = 2.45.
    pub fn reference_60ghz() -> Self {
        Self {
            transmit_power_dbm: 0.0,
            antenna_gain_tx_db: 20.0,
            antenna_gain_rx_db: 20.0,
            noise_density_dbm_per_mhz: -114.0,
            bandwidth_hz: 500e6,
            distance_m: 100.0,
            intercept_alpha_db: 70.0,
            slope_beta: 2.45,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.transmit_power_dbm,
            self.antenna_gain_tx_db,
            self.antenna_gain_rx_db,
            self.noise_density_dbm_per_mhz,
            self.intercept_alpha_db,
        ];
        if let Some(bad) = finite.iter().find(|v| !v.is_finite()) {
            return Err(domain("link budget term", *bad));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(domain("bandwidth_hz", self.bandwidth_hz));
        }
        if !(self.distance_m > 0.0 && self.distance_m.is_finite()) {
            return Err(domain("distance_m", self.distance_m));
        }
        if !(self.slope_beta > 0.0 && self.slope_beta.is_finite()) {
            return Err(domain("slope_beta", self.slope_beta));
        }
        Ok(())
    }

    /// Mean path loss `alpha + 10 beta log10(l)` in dB.
    pub fn path_loss_db(&self) -> f64 {
        self.intercept_alpha_db + 10.0 * self.slope_beta * self.distance_m.log10()
    }

    /// Total noise power over the band in dBm.
    pub fn noise_power_dbm(&self) -> f64 {
        self.noise_density_dbm_per_mhz + 10.0 * (self.bandwidth_hz / 1e6).log10()
    }
}

/// System gain `kappa` in dB (the mean of the SNR in dB).
pub fn compute_kappa(budget: &LinkBudget) -> Result<f64> {
    budget.validate()?;
    Ok(
        budget.transmit_power_dbm + budget.antenna_gain_tx_db + budget.antenna_gain_rx_db
            - budget.path_loss_db()
            - budget.noise_power_dbm(),
    )
}

/// Per-slot SNR distribution and the capacity mapping of the link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowingChannel {
    kappa_db: f64,
    sigma_db: f64,
    bandwidth_hz: f64,
    slot_seconds: f64,
}

impl ShadowingChannel {
    pub fn new(kappa_db: f64, sigma_db: f64, bandwidth_hz: f64, slot_seconds: f64) -> Result<Self> {
        if !kappa_db.is_finite() {
            return Err(domain("kappa_db", kappa_db));
        }
        if !(sigma_db >= 0.0 && sigma_db.is_finite()) {
            return Err(domain("sigma_db", sigma_db));
        }
        if !(bandwidth_hz > 0.0 && bandwidth_hz.is_finite()) {
            return Err(domain("bandwidth_hz", bandwidth_hz));
        }
        if !(slot_seconds > 0.0 && slot_seconds.is_finite()) {
            return Err(domain("slot_seconds", slot_seconds));
        }
        Ok(Self {
            kappa_db,
            sigma_db,
            bandwidth_hz,
            slot_seconds,
        })
    }

    /// Channel whose system gain comes from a link budget.
    pub fn from_budget(budget: &LinkBudget, sigma_db: f64, slot_seconds: f64) -> Result<Self> {
        Self::new(
            compute_kappa(budget)?,
            sigma_db,
            budget.bandwidth_hz,
            slot_seconds,
        )
    }

    pub fn kappa_db(&self) -> f64 {
        self.kappa_db
    }

    pub fn sigma_db(&self) -> f64 {
        self.sigma_db
    }

    pub fn bandwidth_hz(&self) -> f64 {
        self.bandwidth_hz
    }

    pub fn slot_seconds(&self) -> f64 {
        self.slot_seconds
    }

    pub fn with_kappa_db(self, kappa_db: f64) -> Result<Self> {
        Self::new(
            kappa_db,
            self.sigma_db,
            self.bandwidth_hz,
            self.slot_seconds,
        )
    }

    pub fn with_sigma_db(self, sigma_db: f64) -> Result<Self> {
        Self::new(
            self.kappa_db,
            sigma_db,
            self.bandwidth_hz,
            self.slot_seconds,
        )
    }

    /// Median linear SNR, `10^(kappa_db / 10)`.
    pub fn median_snr(&self) -> f64 {
        (IOTA * self.kappa_db).exp()
    }

    /// Bits carried per slot per nat of `ln(1 + gamma)`: `slot * W / ln 2`.
    pub fn bits_per_nat(&self) -> f64 {
        self.slot_seconds * self.bandwidth_hz / LN_2
    }

    /// Normalized Gaussian coordinate of `ln x`; `None` when `sigma = 0`.
    fn z_score(&self, x: f64) -> Option<f64> {
        (self.sigma_db > 0.0).then(|| (x.ln() - IOTA * self.kappa_db) / (IOTA * self.sigma_db))
    }

    /// `P(gamma <= x)`.
    pub fn snr_cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain("snr", x));
        }
        Ok(self.cdf_and_sf(x).0)
    }

    /// `P(gamma > x)`, accurate in the upper tail.
    pub fn snr_sf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain("snr", x));
        }
        Ok(self.cdf_and_sf(x).1)
    }

    /// Both tails from a single erfc evaluation; the smaller one is the
    /// accurately computed value and the larger is its complement.
    fn cdf_and_sf(&self, x: f64) -> (f64, f64) {
        let Some(z) = self.z_score(x) else {
            return if x >= self.median_snr() {
                (1.0, 0.0)
            } else {
                (0.0, 1.0)
            };
        };
        let arg = z / SQRT_2;
        if arg < 0.0 {
            let lower = if arg < -ERFC_CLAMP_ARG {
                (0.5 * libm::erfc(-arg)).max(CDF_FLOOR)
            } else {
                0.5 * libm::erfc(-arg)
            };
            (lower, 1.0 - lower)
        } else {
            let upper = 0.5 * libm::erfc(arg);
            let upper = if arg > ERFC_CLAMP_ARG {
                upper.max(1.0 - CDF_CEIL)
            } else {
                upper
            };
            (1.0 - upper, upper)
        }
    }

    /// One draw of the linear SNR.
    pub fn sample_snr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let xi: f64 = if self.sigma_db > 0.0 {
            self.sigma_db * rng.sample::<f64, _>(StandardNormal)
        } else {
            0.0
        };
        (IOTA * (self.kappa_db - xi)).exp()
    }

    /// Service of one slot, in bits, for SNR `gamma`.
    pub fn capacity_bits_per_slot(&self, gamma: f64) -> Result<f64> {
        capacity_bits_per_slot(self, gamma)
    }

    /// Draws one slot of service directly.
    pub fn sample_service_bits<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.bits_per_nat() * self.sample_snr(rng).ln_1p()
    }

    /// Distribution descriptor used by the quadrature oracle.
    pub fn inverse_moment_source(&self) -> InverseMomentSource<'static> {
        if self.sigma_db > 0.0 {
            InverseMomentSource::LogNormalDb {
                kappa_db: self.kappa_db,
                sigma_db: self.sigma_db,
            }
        } else {
            InverseMomentSource::PointMass(self.median_snr())
        }
    }
}

/// `slot * (W / ln 2) * ln(1 + gamma)` bits.
pub fn capacity_bits_per_slot(channel: &ShadowingChannel, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) {
        return Err(domain("snr", gamma));
    }
    Ok(channel.bits_per_nat() * gamma.ln_1p())
}

impl Cdf for ShadowingChannel {
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        self.cdf_and_sf(x).0
    }

    fn cdf_and_sf(&self, x: f64) -> (f64, f64) {
        if x <= 0.0 {
            return (0.0, 1.0);
        }
        ShadowingChannel::cdf_and_sf(self, x)
    }

    fn log_normal_parameters(&self) -> Option<(f64, f64)> {
        (self.sigma_db > 0.0).then_some((IOTA * self.kappa_db, IOTA * self.sigma_db))
    }
}
