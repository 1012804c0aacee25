//! Stochastic network calculus for a buffered wireless link under log-normal
//! shadowing.
//!
//! The crate computes probabilistic backlog and delay bounds from the moment
//! generating functions of a deterministically enveloped arrival process and
//! of the cumulative Shannon-capacity service of the link, and ships a slotted
//! fluid-queue simulator that estimates the same tail probabilities
//! empirically.
//!
//! Units are bits and slots throughout; `theta` is measured in 1/bits.
//!
//! ```
//! use mmwave_snc::{AffineEnvelope, BoundQuery, ServiceCharacterization, ServiceMode, ShadowingChannel};
//!
//! let channel = ShadowingChannel::new(25.0, 8.0, 500e6, 1.0).unwrap();
//! let service = ServiceCharacterization::new(channel, ServiceMode::Limit);
//! let arrivals = AffineEnvelope::constant_rate(1e9).unwrap();
//! let bound = mmwave_snc::backlog_bound(&arrivals, &service, &BoundQuery::backlog(1e-3).unwrap()).unwrap();
//! assert!(bound.value >= 0.0);
//! ```

// NaN must fail the range checks, so they are written as negations.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrival;
pub mod bounds;
pub mod channel;
mod error;
mod fastmath;
pub mod inverse_moment;
mod par;
pub mod quadrature;
pub mod service;
pub mod sim;

pub use arrival::AffineEnvelope;
pub use bounds::{
    backlog_bound, delay_bound, kernel_bound, stability_region, BoundKind, BoundQuery, BoundResult,
    StabilityInterval, ThetaSample,
};
pub use channel::{capacity_bits_per_slot, compute_kappa, LinkBudget, ShadowingChannel};
pub use error::{Error, Result};
pub use inverse_moment::{
    exact_inverse_moment, lemma1_bound, Cdf, DiscretizationConfig, InverseMomentSource,
    Lemma1Estimate,
};
pub use par::Execution;
pub use service::{LogBound, ServiceCharacterization, ServiceMode};
pub use sim::{run_experiment, run_replication, Exceedance, SimConfig, SimOutcome};
